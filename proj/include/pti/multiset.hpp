#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "pti/base.hpp"

namespace pti {

// Finite multiset over places. Entries are kept sorted by place index and
// never store a zero count, so entries() is exactly the support dom(m).
class Multiset {
 public:
  using Entry = std::pair<PlaceId, Count>;

  Multiset() = default;

  static Multiset of(PlaceId s, Count k = 1) {
    Multiset m;
    if (k > 0) m.entries_.emplace_back(s, k);
    m.total_ = k;
    return m;
  }

  // Merges duplicates, drops zeros, sorts by place index.
  static Multiset from_entries(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    Multiset m;
    for (const auto& [place, count] : entries) {
      if (count == 0) continue;
      if (!m.entries_.empty() && m.entries_.back().first == place)
        m.entries_.back().second = checked_add(m.entries_.back().second, count);
      else
        m.entries_.emplace_back(place, count);
      m.total_ = checked_add(m.total_, count);
    }
    return m;
  }

  Count count(PlaceId s) const {
    auto it = find(s);
    return it == entries_.end() ? 0 : it->second;
  }
  bool contains(PlaceId s) const { return find(s) != entries_.end(); }

  // |m|, the total number of tokens.
  Count total() const { return total_; }
  bool empty() const { return entries_.empty(); }
  std::size_t support_size() const { return entries_.size(); }

  const std::vector<Entry>& entries() const { return entries_; }

  friend bool operator==(const Multiset& a, const Multiset& b) { return a.entries_ == b.entries_; }
  friend bool operator!=(const Multiset& a, const Multiset& b) { return !(a == b); }
  friend bool operator<(const Multiset& a, const Multiset& b) {
    return std::lexicographical_compare(
        a.entries_.begin(), a.entries_.end(), b.entries_.begin(), b.entries_.end(),
        [](const Entry& x, const Entry& y) {
          return x.first < y.first || (x.first == y.first && x.second < y.second);
        });
  }

  std::uint64_t hash() const {
    std::uint64_t h = 0x243f6a8885a308d3ull;
    for (const auto& [place, count] : entries_) {
      h = hash_mix(h, place.index);
      h = hash_mix(h, count);
    }
    return h;
  }

  static Count checked_add(Count a, Count b) {
    Count r;
    if (__builtin_add_overflow(a, b, &r)) throw error("multiset count overflow");
    return r;
  }
  static Count checked_mul(Count a, Count b) {
    Count r;
    if (__builtin_mul_overflow(a, b, &r)) throw error("multiset count overflow");
    return r;
  }

 private:
  std::vector<Entry>::const_iterator find(PlaceId s) const {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), s,
        [](const Entry& e, PlaceId p) { return e.first < p; });
    return (it != entries_.end() && it->first == s) ? it : entries_.end();
  }

  std::vector<Entry> entries_;
  Count total_ = 0;
};

struct MultisetHash {
  std::size_t operator()(const Multiset& m) const { return m.hash(); }
};

// m ⊕ m'
inline Multiset ms_add(const Multiset& a, const Multiset& b) {
  std::vector<Multiset::Entry> out;
  out.reserve(a.support_size() + b.support_size());
  out.insert(out.end(), a.entries().begin(), a.entries().end());
  out.insert(out.end(), b.entries().begin(), b.entries().end());
  return Multiset::from_entries(std::move(out));
}

// m ⊖ m', truncating at zero componentwise.
inline Multiset ms_sub(const Multiset& a, const Multiset& b) {
  std::vector<Multiset::Entry> out;
  out.reserve(a.support_size());
  for (const auto& [place, count] : a.entries()) {
    Count sub = b.count(place);
    if (count > sub) out.emplace_back(place, count - sub);
  }
  return Multiset::from_entries(std::move(out));
}

// a ⊆ b, componentwise.
inline bool ms_leq(const Multiset& a, const Multiset& b) {
  for (const auto& [place, count] : a.entries())
    if (count > b.count(place)) return false;
  return true;
}

// j · m
inline Multiset ms_scale(Count j, const Multiset& a) {
  std::vector<Multiset::Entry> out;
  out.reserve(a.support_size());
  for (const auto& [place, count] : a.entries())
    out.emplace_back(place, Multiset::checked_mul(j, count));
  return Multiset::from_entries(std::move(out));
}

}  // namespace pti
