#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pti {

// Counts are 64-bit; arithmetic that would wrap throws instead of truncating.
using Count = std::uint64_t;

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class parse_error : public error {
 public:
  parse_error(const std::string& msg, std::size_t line = 0)
      : error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class lookup_error : public error {
 public:
  using error::error;
};

// Thrown by oracle entry points when an input exceeds their blow-up guard.
class guard_error : public error {
 public:
  using error::error;
};

struct PlaceId {
  std::uint32_t index = 0;
  PlaceId() = default;
  explicit PlaceId(std::uint32_t i) : index(i) {}
  friend bool operator==(PlaceId a, PlaceId b) { return a.index == b.index; }
  friend bool operator!=(PlaceId a, PlaceId b) { return a.index != b.index; }
  friend bool operator<(PlaceId a, PlaceId b) { return a.index < b.index; }
};

struct TransitionId {
  std::uint32_t index = 0;
  TransitionId() = default;
  explicit TransitionId(std::uint32_t i) : index(i) {}
  friend bool operator==(TransitionId a, TransitionId b) { return a.index == b.index; }
  friend bool operator!=(TransitionId a, TransitionId b) { return a.index != b.index; }
  friend bool operator<(TransitionId a, TransitionId b) { return a.index < b.index; }
};

using LabelId = std::uint32_t;

inline std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

// Fixed-width bit set sized at construction. Bits are place (or pair) indices.
class DynBitset {
 public:
  DynBitset() = default;
  explicit DynBitset(std::uint32_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::uint32_t size() const { return size_; }

  bool test(std::uint32_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
  void set(std::uint32_t i) { words_[i >> 6] |= 1ull << (i & 63); }
  void reset(std::uint32_t i) { words_[i >> 6] &= ~(1ull << (i & 63)); }

  bool any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }
  bool none() const { return !any(); }

  std::uint32_t count() const {
    std::uint32_t c = 0;
    for (auto w : words_) c += static_cast<std::uint32_t>(__builtin_popcountll(w));
    return c;
  }

  bool intersects(const DynBitset& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }

  bool subset_of(const DynBitset& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }

  DynBitset& operator|=(const DynBitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  DynBitset& operator&=(const DynBitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }

  friend bool operator==(const DynBitset& a, const DynBitset& b) {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }
  friend bool operator!=(const DynBitset& a, const DynBitset& b) { return !(a == b); }

  std::optional<std::uint32_t> first() const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w]) return static_cast<std::uint32_t>(w * 64 + __builtin_ctzll(words_[w]));
    return std::nullopt;
  }

  // Visits set bits in ascending order.
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        f(static_cast<std::uint32_t>(w * 64 + __builtin_ctzll(bits)));
        bits &= bits - 1;
      }
    }
  }

  std::uint64_t hash() const {
    std::uint64_t h = size_;
    for (auto w : words_) h = hash_mix(h, w);
    return h;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  std::uint32_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace pti
