#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pti/net.hpp"
#include "pti/relation.hpp"
#include "pti/token_game.hpp"

// Brute-force reference implementations, kept deliberately separate from the
// optimized paths in closure.hpp / bisim.hpp so that agreement between the
// two is evidence rather than tautology. Everything here may be exponential.

namespace pti::oracles {

// (m1, m2) ∈ R⊕ by scanning permutations of m2's tokens, O(k!). Guarded to
// |m1| ≤ 8.
inline bool closure_member_naive(const PlaceRelation& rel, const Multiset& m1,
                                 const Multiset& m2) {
  if (m1.total() > 8) throw guard_error("closure_member_naive: marking larger than 8 tokens");
  if (m1.total() != m2.total()) return false;
  std::vector<std::uint32_t> left, right;
  for (const auto& [place, count] : m1.entries())
    for (Count i = 0; i < count; ++i) left.push_back(place.index);
  for (const auto& [place, count] : m2.entries())
    for (Count i = 0; i < count; ++i) right.push_back(place.index);
  std::sort(right.begin(), right.end());
  do {
    bool ok = true;
    for (std::size_t i = 0; i < left.size() && ok; ++i)
      ok = rel.contains(PlaceId(left[i]), PlaceId(right[i]));
    if (ok) return true;
  } while (std::next_permutation(right.begin(), right.end()));
  return false;
}

struct DefCheckCounterexample {
  Multiset m1, m2;   // the R⊕-related pair where the transfer fails
  int side = 1;      // 1: m1 moved first, 2: m2 moved first
  TransitionId t;    // the unanswered move
};

namespace detail {

// All multisets of the given size over the net's places, ascending place
// order (combinations with repetition).
template <class F>
inline void for_each_multiset_of_size(std::uint32_t places, Count size, F&& fn) {
  std::vector<Count> counts(places, 0);
  std::function<void(std::uint32_t, Count)> rec = [&](std::uint32_t first, Count left) {
    if (left == 0) {
      std::vector<Multiset::Entry> es;
      for (std::uint32_t s = 0; s < places; ++s)
        if (counts[s]) es.emplace_back(PlaceId(s), counts[s]);
      fn(Multiset::from_entries(std::move(es)));
      return;
    }
    for (std::uint32_t s = first; s < places; ++s) {
      ++counts[s];
      rec(s, left - 1);
      --counts[s];
    }
  };
  rec(0, size);
}

// Images of m1 under R, one choice per token; own re-implementation of the
// product enumeration (duplicates allowed, the caller works per candidate).
template <class F>
inline void for_each_image(const PlaceRelation& rel, const Multiset& m1, F&& fn) {
  std::vector<std::uint32_t> tokens;
  for (const auto& [place, count] : m1.entries())
    for (Count i = 0; i < count; ++i) tokens.push_back(place.index);
  std::vector<Count> counts(rel.place_count(), 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == tokens.size()) {
      std::vector<Multiset::Entry> es;
      for (std::uint32_t s = 0; s < rel.place_count(); ++s)
        if (counts[s]) es.emplace_back(PlaceId(s), counts[s]);
      fn(Multiset::from_entries(std::move(es)));
      return;
    }
    rel.row(tokens[i]).for_each([&](std::uint32_t img) {
      ++counts[img];
      rec(i + 1);
      --counts[img];
    });
  };
  rec(0);
}

inline bool inhibiting_sets_respected(const PtiNet& net, const PlaceRelation& rel,
                                      const Transition& t1, const Transition& t2) {
  for (std::uint32_t s = 0; s < net.place_count(); ++s) {
    bool in1 = t1.inhib.test(s);
    bool violated = false;
    rel.row(s).for_each([&](std::uint32_t sp) {
      if (in1 != t2.inhib.test(sp)) violated = true;
    });
    if (violated) return false;
  }
  return true;
}

// The transfer clause of the bisimulation definition for one move m1[t1⟩.
inline bool has_matching_response(const PtiNet& net, const PlaceRelation& rel, const Multiset& m1,
                                  const Multiset& m2, TransitionId t1) {
  const Transition& tr1 = net.transition(t1);
  for (std::uint32_t ti = 0; ti < net.transition_count(); ++ti) {
    TransitionId t2(ti);
    if (!enabled(net, m2, t2)) continue;
    const Transition& tr2 = net.transition(t2);
    if (tr1.label != tr2.label) continue;
    if (!closure_member_naive(rel, tr1.pre, tr2.pre)) continue;
    if (!closure_member_naive(rel, tr1.post, tr2.post)) continue;
    if (!closure_member_naive(rel, ms_sub(m1, tr1.pre), ms_sub(m2, tr2.pre))) continue;
    if (!inhibiting_sets_respected(net, rel, tr1, tr2)) continue;
    return true;
  }
  return false;
}

}  // namespace detail

// Checks the bisimulation definition directly on every pair (m1, m2) ∈ R⊕
// with |m1| ≤ size_bound, in increasing size and canonical order. Returns
// the first failing pair. This is the reference the finite-condition checker
// is tested against; any disagreement between them must already show up
// within size_bound = max pre-set size + 2.
inline std::optional<DefCheckCounterexample> bisim_check_by_definition(const PtiNet& net,
                                                                       const PlaceRelation& rel,
                                                                       Count size_bound) {
  if (size_bound > 8) throw guard_error("bisim_check_by_definition: size bound larger than 8");
  const PlaceRelation inv = relation_inverse(rel);
  std::optional<DefCheckCounterexample> failure;
  for (Count size = 0; size <= size_bound && !failure; ++size) {
    detail::for_each_multiset_of_size(net.place_count(), size, [&](const Multiset& m1) {
      if (failure) return;
      detail::for_each_image(rel, m1, [&](const Multiset& m2) {
        if (failure) return;
        for (std::uint32_t ti = 0; ti < net.transition_count() && !failure; ++ti) {
          TransitionId t(ti);
          if (enabled(net, m1, t) && !detail::has_matching_response(net, rel, m1, m2, t))
            failure = DefCheckCounterexample{m1, m2, 1, t};
        }
        for (std::uint32_t ti = 0; ti < net.transition_count() && !failure; ++ti) {
          TransitionId t(ti);
          if (enabled(net, m2, t) && !detail::has_matching_response(net, inv, m2, m1, t))
            failure = DefCheckCounterexample{m1, m2, 2, t};
        }
      });
    });
  }
  return failure;
}

// splitmix64; all generators below are pure functions of their seeds.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }
  // in [lo, hi]
  std::uint64_t range(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
  bool chance(double p) { return static_cast<double>(next() >> 11) / 9007199254740992.0 < p; }
};

struct GenConfig {
  std::uint32_t min_places = 2, max_places = 5;
  std::uint32_t min_transitions = 1, max_transitions = 6;
  std::uint32_t max_pre = 2, max_post = 2;
  double inhibitor_density = 0.15;   // chance that a place inhibits a transition
  double relation_density = 0.35;    // chance that a place pair enters a random relation
  std::uint32_t label_count = 2;
  std::uint64_t seed = 1;
};

inline PtiNet random_net(const GenConfig& cfg) {
  if (cfg.min_places == 0 || cfg.min_places > cfg.max_places ||
      cfg.min_transitions > cfg.max_transitions || cfg.max_pre == 0 || cfg.max_post == 0 ||
      cfg.label_count == 0)
    throw error("random_net: invalid generator config");
  Rng rng(cfg.seed);
  std::uint32_t places = static_cast<std::uint32_t>(rng.range(cfg.min_places, cfg.max_places));
  std::uint32_t transitions =
      static_cast<std::uint32_t>(rng.range(cfg.min_transitions, cfg.max_transitions));
  NetBuilder builder("random_" + std::to_string(cfg.seed));
  for (std::uint32_t s = 0; s < places; ++s) builder.add_place("s" + std::to_string(s));
  for (std::uint32_t ti = 0; ti < transitions; ++ti) {
    auto random_mset = [&](std::uint32_t max_size) {
      std::uint32_t size = static_cast<std::uint32_t>(rng.range(1, max_size));
      std::vector<Multiset::Entry> es;
      for (std::uint32_t i = 0; i < size; ++i)
        es.emplace_back(PlaceId(static_cast<std::uint32_t>(rng.below(places))), 1);
      return Multiset::from_entries(std::move(es));
    };
    Multiset pre = random_mset(cfg.max_pre);
    Multiset post = random_mset(cfg.max_post);
    std::vector<PlaceId> inhib;
    for (std::uint32_t s = 0; s < places; ++s)
      if (rng.chance(cfg.inhibitor_density)) inhib.push_back(PlaceId(s));
    std::string label(1, static_cast<char>('a' + rng.below(cfg.label_count)));
    builder.add_transition("t" + std::to_string(ti), label, std::move(pre), inhib,
                           std::move(post));
  }
  return builder.build();
}

inline PlaceRelation random_relation(const GenConfig& cfg, const PtiNet& net) {
  Rng rng(cfg.seed ^ 0xda3e39cb94b95bdbull);
  PlaceRelation rel(net.place_count());
  for (std::uint32_t i = 0; i < net.place_count(); ++i)
    for (std::uint32_t j = 0; j < net.place_count(); ++j)
      if (rng.chance(cfg.relation_density)) rel.insert(PlaceId(i), PlaceId(j));
  return rel;
}

inline Multiset random_marking(const GenConfig& cfg, const PtiNet& net, Count size) {
  Rng rng(cfg.seed ^ 0xc2b2ae3d27d4eb4full);
  std::vector<Multiset::Entry> es;
  for (Count i = 0; i < size; ++i)
    es.emplace_back(PlaceId(static_cast<std::uint32_t>(rng.below(net.place_count()))), 1);
  return Multiset::from_entries(std::move(es));
}

}  // namespace pti::oracles
