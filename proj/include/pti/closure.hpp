#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <optional>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pti/multiset.hpp"
#include "pti/relation.hpp"

namespace pti {

// A proof that (m1, m2) ∈ R⊕: a multiset of R-pairs whose left components
// re-assemble m1 and whose right components re-assemble m2.
struct MatchWitness {
  std::vector<std::pair<PlaceId, PlaceId>> pairs;  // sorted (left, right)
};

namespace detail {

// Expands a multiset into one node per token, in place declaration order.
inline std::vector<PlaceId> expand_tokens(const Multiset& m) {
  std::vector<PlaceId> out;
  out.reserve(static_cast<std::size_t>(m.total()));
  for (const auto& [place, count] : m.entries())
    for (Count i = 0; i < count; ++i) out.push_back(place);
  return out;
}

// Maximum bipartite matching (Hopcroft–Karp) on the token graph: left tokens
// of m1, right tokens of m2, edge iff the place pair is in R. Adjacency is
// built in declaration order, so the matching found is deterministic.
class TokenMatcher {
 public:
  TokenMatcher(const PlaceRelation& rel, const std::vector<PlaceId>& left,
               const std::vector<PlaceId>& right)
      : left_(left), right_(right) {
    adj_.resize(left.size());
    for (std::size_t i = 0; i < left.size(); ++i)
      for (std::size_t j = 0; j < right.size(); ++j)
        if (rel.contains(left[i], right[j])) adj_[i].push_back(j);
    match_left_.assign(left.size(), npos);
    match_right_.assign(right.size(), npos);
  }

  std::size_t run() {
    std::size_t matched = 0;
    while (bfs()) {
      for (std::size_t i = 0; i < left_.size(); ++i)
        if (match_left_[i] == npos && dfs(i)) ++matched;
    }
    return matched;
  }

  std::optional<MatchWitness> witness() const {
    MatchWitness w;
    for (std::size_t i = 0; i < left_.size(); ++i) {
      if (match_left_[i] == npos) return std::nullopt;
      w.pairs.emplace_back(left_[i], right_[match_left_[i]]);
    }
    std::sort(w.pairs.begin(), w.pairs.end());
    return w;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  bool bfs() {
    std::deque<std::size_t> queue;
    dist_.assign(left_.size(), npos);
    for (std::size_t i = 0; i < left_.size(); ++i) {
      if (match_left_[i] == npos) {
        dist_[i] = 0;
        queue.push_back(i);
      }
    }
    bool found_free = false;
    while (!queue.empty()) {
      std::size_t i = queue.front();
      queue.pop_front();
      for (std::size_t j : adj_[i]) {
        std::size_t owner = match_right_[j];
        if (owner == npos) {
          found_free = true;
        } else if (dist_[owner] == npos) {
          dist_[owner] = dist_[i] + 1;
          queue.push_back(owner);
        }
      }
    }
    return found_free;
  }

  bool dfs(std::size_t i) {
    for (std::size_t j : adj_[i]) {
      std::size_t owner = match_right_[j];
      if (owner == npos || (dist_[owner] == dist_[i] + 1 && dfs(owner))) {
        match_left_[i] = j;
        match_right_[j] = i;
        return true;
      }
    }
    dist_[i] = npos;
    return false;
  }

  const std::vector<PlaceId>& left_;
  const std::vector<PlaceId>& right_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> match_left_, match_right_, dist_;
};

inline std::optional<MatchWitness> closure_member_matching(const PlaceRelation& rel,
                                                           const Multiset& m1,
                                                           const Multiset& m2) {
  auto left = expand_tokens(m1);
  auto right = expand_tokens(m2);
  TokenMatcher matcher(rel, left, right);
  if (matcher.run() != left.size()) return std::nullopt;
  return matcher.witness();
}

// Class-count comparison; valid only when R is an equivalence on S.
inline std::optional<MatchWitness> closure_member_equiv(const PlaceRelation& rel,
                                                        const Multiset& m1, const Multiset& m2) {
  const auto& info = rel.equivalence_info();
  std::vector<Count> balance(rel.place_count(), 0);
  for (const auto& [place, count] : m1.entries()) balance[info.class_of[place.index]] += count;
  for (const auto& [place, count] : m2.entries()) {
    Count& b = balance[info.class_of[place.index]];
    if (b < count) return std::nullopt;
    b -= count;
  }
  // Counts already known equal overall, so all balances are zero here. Pair
  // tokens class-wise in declaration order for the witness.
  MatchWitness w;
  auto left = expand_tokens(m1);
  auto right = expand_tokens(m2);
  std::vector<std::vector<PlaceId>> per_class(rel.place_count());
  for (PlaceId r : right) per_class[info.class_of[r.index]].push_back(r);
  std::vector<std::size_t> used(rel.place_count(), 0);
  for (PlaceId l : left) {
    std::uint32_t cls = info.class_of[l.index];
    w.pairs.emplace_back(l, per_class[cls][used[cls]++]);
  }
  std::sort(w.pairs.begin(), w.pairs.end());
  return w;
}

}  // namespace detail

// Decides (m1, m2) ∈ R⊕ and returns a pairing witness on success. Equal
// sizes are necessary, so that check short-circuits; for equivalence
// relations the per-class token counts decide membership directly, otherwise
// the token-level bipartite graph is matched with Hopcroft–Karp.
inline std::optional<MatchWitness> closure_member(const PlaceRelation& rel, const Multiset& m1,
                                                  const Multiset& m2) {
  for (const Multiset* m : {&m1, &m2})
    for (const auto& [place, count] : m->entries())
      if (place.index >= rel.place_count())
        throw lookup_error("marking refers to a place outside the relation");
  if (m1.total() != m2.total()) return std::nullopt;
  if (m1.empty()) return MatchWitness{};
  if (rel.equivalence_info().is_equivalence) return detail::closure_member_equiv(rel, m1, m2);
  return detail::closure_member_matching(rel, m1, m2);
}

// Calls fn(m2) for every distinct m2 with (m1, m2) ∈ R⊕; stops early if fn
// returns false. Emission order is not canonical here; related_markings
// sorts. Each token of m1 picks an R-image independently, which covers R⊕
// exactly.
template <class F>
inline bool for_each_related_marking(const PlaceRelation& rel, const Multiset& m1, F&& fn) {
  const auto& entries = m1.entries();
  // per support place: list of image places (ascending) and the multiplicity
  std::vector<std::vector<std::uint32_t>> images(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    rel.row(entries[i].first.index).for_each([&](std::uint32_t j) { images[i].push_back(j); });
    if (images[i].empty()) return true;  // some token has no image: R⊕ image empty
  }

  std::unordered_set<Multiset, MultisetHash> seen;
  std::vector<Count> counts(rel.place_count(), 0);

  // Combinations with repetition per support place keep same-place tokens
  // unordered, so duplicates only arise across places.
  std::function<bool(std::size_t)> rec_place = [&](std::size_t pi) -> bool {
    if (pi == entries.size()) {
      std::vector<Multiset::Entry> es;
      for (std::uint32_t s = 0; s < counts.size(); ++s)
        if (counts[s]) es.emplace_back(PlaceId(s), counts[s]);
      Multiset m2 = Multiset::from_entries(std::move(es));
      if (seen.insert(m2).second) {
        if (!fn(m2)) return false;
      }
      return true;
    }
    Count k = entries[pi].second;
    const auto& imgs = images[pi];
    std::function<bool(Count, std::size_t)> rec_token = [&](Count left, std::size_t min_img) -> bool {
      if (left == 0) return rec_place(pi + 1);
      for (std::size_t ii = min_img; ii < imgs.size(); ++ii) {
        counts[imgs[ii]] += 1;
        bool keep_going = rec_token(left - 1, ii);
        counts[imgs[ii]] -= 1;
        if (!keep_going) return false;
      }
      return true;
    };
    return rec_token(k, 0);
  };
  return rec_place(0);
}

// All markings m2 with (m1, m2) ∈ R⊕, each exactly once, in canonical
// (lexicographic) order. Worst case O(n^k); callers guard sizes.
inline std::vector<Multiset> related_markings(const PlaceRelation& rel, const Multiset& m1) {
  std::vector<Multiset> out;
  for_each_related_marking(rel, m1, [&](const Multiset& m2) {
    out.push_back(m2);
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace pti
