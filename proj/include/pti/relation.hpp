#pragma once

#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "pti/base.hpp"

namespace pti {

// Relation R ⊆ S × S over the places of one net, stored as one bit row per
// left place. Iteration over pairs is row-major, so reports and witnesses
// come out in a stable order.
class PlaceRelation {
 public:
  struct EquivInfo {
    bool is_equivalence = false;
    std::vector<std::uint32_t> class_of;  // valid only when is_equivalence
  };

  PlaceRelation() = default;
  explicit PlaceRelation(std::uint32_t n) : n_(n), rows_(n, DynBitset(n)) { reset_cache(); }

  std::uint32_t place_count() const { return n_; }

  bool contains(PlaceId a, PlaceId b) const { return rows_[a.index].test(b.index); }
  void insert(PlaceId a, PlaceId b) {
    if (!rows_[a.index].test(b.index)) {
      rows_[a.index].set(b.index);
      reset_cache();
    }
  }
  void erase(PlaceId a, PlaceId b) {
    if (rows_[a.index].test(b.index)) {
      rows_[a.index].reset(b.index);
      reset_cache();
    }
  }

  const DynBitset& row(std::uint32_t left) const { return rows_[left]; }

  DynBitset column(std::uint32_t right) const {
    DynBitset col(n_);
    for (std::uint32_t i = 0; i < n_; ++i)
      if (rows_[i].test(right)) col.set(i);
    return col;
  }

  std::size_t pair_count() const {
    std::size_t c = 0;
    for (const auto& r : rows_) c += r.count();
    return c;
  }
  bool empty() const { return pair_count() == 0; }

  std::vector<std::pair<PlaceId, PlaceId>> pairs() const {
    std::vector<std::pair<PlaceId, PlaceId>> out;
    for (std::uint32_t i = 0; i < n_; ++i)
      rows_[i].for_each([&](std::uint32_t j) { out.emplace_back(PlaceId(i), PlaceId(j)); });
    return out;
  }

  bool subset_of(const PlaceRelation& o) const {
    for (std::uint32_t i = 0; i < n_; ++i)
      if (!rows_[i].subset_of(o.rows_[i])) return false;
    return true;
  }

  friend bool operator==(const PlaceRelation& a, const PlaceRelation& b) {
    return a.n_ == b.n_ && a.rows_ == b.rows_;
  }
  friend bool operator!=(const PlaceRelation& a, const PlaceRelation& b) { return !(a == b); }

  std::uint64_t hash() const {
    std::uint64_t h = n_;
    for (const auto& r : rows_) h = hash_mix(h, r.hash());
    return h;
  }

  // Reflexivity, symmetry and transitivity plus class ids, computed once per
  // value and shared across copies. Thread-safe after construction.
  const EquivInfo& equivalence_info() const {
    std::call_once(cache_->flag, [this] {
      auto info = std::make_unique<EquivInfo>();
      *info = compute_equiv_info();
      cache_->info = std::move(info);
    });
    return *cache_->info;
  }

 private:
  struct Cache {
    std::once_flag flag;
    std::unique_ptr<const EquivInfo> info;
  };

  void reset_cache() { cache_ = std::make_shared<Cache>(); }

  EquivInfo compute_equiv_info() const {
    EquivInfo info;
    for (std::uint32_t i = 0; i < n_; ++i)
      if (!rows_[i].test(i)) return info;  // not reflexive
    for (std::uint32_t i = 0; i < n_; ++i) {
      bool symmetric = true;
      rows_[i].for_each([&](std::uint32_t j) {
        if (!rows_[j].test(i)) symmetric = false;
      });
      if (!symmetric) return info;
    }
    // transitive closure must not add pairs
    std::vector<DynBitset> closed = rows_;
    for (std::uint32_t k = 0; k < n_; ++k)
      for (std::uint32_t i = 0; i < n_; ++i)
        if (closed[i].test(k)) closed[i] |= closed[k];
    if (closed != rows_) return info;
    info.is_equivalence = true;
    info.class_of.assign(n_, 0);
    std::uint32_t next_class = 0;
    std::vector<bool> assigned(n_, false);
    for (std::uint32_t i = 0; i < n_; ++i) {
      if (assigned[i]) continue;
      std::uint32_t cls = next_class++;
      rows_[i].for_each([&](std::uint32_t j) {
        info.class_of[j] = cls;
        assigned[j] = true;
      });
    }
    return info;
  }

  std::uint32_t n_ = 0;
  std::vector<DynBitset> rows_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

inline PlaceRelation relation_identity(std::uint32_t n) {
  PlaceRelation r(n);
  for (std::uint32_t i = 0; i < n; ++i) r.insert(PlaceId(i), PlaceId(i));
  return r;
}

inline PlaceRelation relation_inverse(const PlaceRelation& r) {
  PlaceRelation out(r.place_count());
  for (const auto& [a, b] : r.pairs()) out.insert(b, a);
  return out;
}

inline PlaceRelation relation_compose(const PlaceRelation& r1, const PlaceRelation& r2) {
  if (r1.place_count() != r2.place_count()) throw error("relation composition: size mismatch");
  PlaceRelation out(r1.place_count());
  for (std::uint32_t i = 0; i < r1.place_count(); ++i) {
    DynBitset row(r1.place_count());
    r1.row(i).for_each([&](std::uint32_t mid) { row |= r2.row(mid); });
    row.for_each([&](std::uint32_t j) { out.insert(PlaceId(i), PlaceId(j)); });
  }
  return out;
}

inline PlaceRelation relation_union(const PlaceRelation& r1, const PlaceRelation& r2) {
  if (r1.place_count() != r2.place_count()) throw error("relation union: size mismatch");
  PlaceRelation out = r1;
  for (const auto& [a, b] : r2.pairs()) out.insert(a, b);
  return out;
}

inline bool relation_is_equivalence(const PlaceRelation& r) {
  return r.equivalence_info().is_equivalence;
}

}  // namespace pti
