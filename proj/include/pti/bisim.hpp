#pragma once

#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pti/closure.hpp"
#include "pti/net.hpp"
#include "pti/token_game.hpp"

namespace pti {

// First pair of R violating the inhibiting-set biconditional
// (s,s') ∈ R ⇒ (s ∈ inhib(t1) ⇔ s' ∈ inhib(t2)), in row-major order;
// nothing when the biconditional holds throughout.
inline std::optional<std::pair<PlaceId, PlaceId>> inhibitor_consistent(const PtiNet& net,
                                                                       const PlaceRelation& rel,
                                                                       TransitionId t1,
                                                                       TransitionId t2) {
  const DynBitset& in1 = net.transition(t1).inhib;
  const DynBitset& in2 = net.transition(t2).inhib;
  for (std::uint32_t s = 0; s < net.place_count(); ++s) {
    bool left = in1.test(s);
    std::optional<std::pair<PlaceId, PlaceId>> hit;
    rel.row(s).for_each([&](std::uint32_t sp) {
      if (!hit && in2.test(sp) != left) hit = std::make_pair(PlaceId(s), PlaceId(sp));
    });
    if (hit) return hit;
  }
  return std::nullopt;
}

// Why a relation failed the finite bisimulation conditions. `condition` is 1
// when a left transition had no match, 2 for the symmetric direction. The
// clause tells how far candidate matches got: 'a' no transition has the
// required pre-set, 'b' none with that pre-set matches label and post-set
// closure, 'c' a candidate matched those but violated the inhibiting-set
// biconditional (violating_pair holds the offending pair).
struct BisimCounterexample {
  int condition = 1;
  char clause = 'a';
  TransitionId t;                                            // the unmatched transition
  Multiset m;                                                // related pre-set image with no match
  std::optional<TransitionId> candidate;                     // furthest-reaching candidate
  std::optional<std::pair<PlaceId, PlaceId>> violating_pair; // for clause 'c'
};

// Decides whether R is a pti-place bisimulation via the two finite
// conditions: for every transition t1 that can fire from its own pre-set and
// every marking m with (pre(t1), m) ∈ R⊕ there must be a transition t2 with
// pre(t2) = m, equal label, (post(t1), post(t2)) ∈ R⊕ and consistent
// inhibiting sets; and symmetrically. Transitions consuming from their own
// inhibiting places can never fire and are skipped on both sides.
class BisimChecker {
 public:
  explicit BisimChecker(const PtiNet& net) : net_(&net) {
    for (std::uint32_t ti = 0; ti < net.transition_count(); ++ti) {
      if (net.is_dead(TransitionId(ti))) continue;
      preset_index_[net.transition(TransitionId(ti)).pre].push_back(ti);
    }
  }

  const PtiNet& net() const { return *net_; }

  bool check_fast(const PlaceRelation& rel) const {
    PlaceRelation inv = relation_inverse(rel);
    return pass_fast(rel) && pass_fast_swapped(inv);
  }

  std::optional<BisimCounterexample> check(const PlaceRelation& rel) const {
    PlaceRelation inv = relation_inverse(rel);
    if (auto ce = pass_report(rel, rel, 1)) return ce;
    if (auto ce = pass_report(inv, rel, 2)) return ce;
    return std::nullopt;
  }

 private:
  struct InhibUnions {
    std::vector<DynBitset> in, out;  // per transition: union of R-rows over inhib / its complement
  };

  InhibUnions inhib_unions(const PlaceRelation& rel) const {
    InhibUnions u;
    std::uint32_t n = net_->place_count();
    u.in.assign(net_->transition_count(), DynBitset(n));
    u.out.assign(net_->transition_count(), DynBitset(n));
    for (std::uint32_t ti = 0; ti < net_->transition_count(); ++ti) {
      const DynBitset& inhib = net_->transition(TransitionId(ti)).inhib;
      for (std::uint32_t s = 0; s < n; ++s)
        (inhib.test(s) ? u.in[ti] : u.out[ti]) |= rel.row(s);
    }
    return u;
  }

  // The biconditional for (t_fwd, t_cand) under `rel`:
  // every R-image of an inhibiting place must inhibit the candidate, and no
  // R-image of a non-inhibiting place may.
  static bool inhib_ok(const InhibUnions& u, std::uint32_t fwd, const DynBitset& cand_inhib) {
    return u.in[fwd].subset_of(cand_inhib) && !u.out[fwd].intersects(cand_inhib);
  }

  bool candidate_matches(const PlaceRelation& rel, const InhibUnions& u, std::uint32_t fwd,
                         std::uint32_t cand) const {
    const Transition& tf = net_->transition(TransitionId(fwd));
    const Transition& tc = net_->transition(TransitionId(cand));
    if (tf.label != tc.label) return false;
    if (!inhib_ok(u, fwd, tc.inhib)) return false;
    return detail::closure_member_matching(rel, tf.post, tc.post).has_value();
  }

  // One direction of the finite conditions under `rel`; candidates are
  // looked up by exact pre-set.
  template <class OnFail>
  bool run_pass(const PlaceRelation& rel, OnFail&& on_fail) const {
    InhibUnions u = inhib_unions(rel);
    for (std::uint32_t fwd = 0; fwd < net_->transition_count(); ++fwd) {
      if (net_->is_dead(TransitionId(fwd))) continue;
      const Transition& tf = net_->transition(TransitionId(fwd));
      bool all_matched = for_each_related_marking(rel, tf.pre, [&](const Multiset& m) {
        auto it = preset_index_.find(m);
        if (it != preset_index_.end())
          for (std::uint32_t cand : it->second)
            if (candidate_matches(rel, u, fwd, cand)) return true;
        return on_fail(fwd, m, u);
      });
      if (!all_matched) return false;
    }
    return true;
  }

  bool pass_fast(const PlaceRelation& rel) const {
    return run_pass(rel, [](std::uint32_t, const Multiset&, const InhibUnions&) { return false; });
  }
  bool pass_fast_swapped(const PlaceRelation& inv) const { return pass_fast(inv); }

  std::optional<BisimCounterexample> pass_report(const PlaceRelation& rel,
                                                 const PlaceRelation& orig, int condition) const {
    std::optional<BisimCounterexample> ce;
    InhibUnions u = inhib_unions(rel);
    for (std::uint32_t fwd = 0; fwd < net_->transition_count() && !ce; ++fwd) {
      if (net_->is_dead(TransitionId(fwd))) continue;
      const Transition& tf = net_->transition(TransitionId(fwd));
      for (const Multiset& m : related_markings(rel, tf.pre)) {
        bool matched = false;
        BisimCounterexample fail;
        fail.condition = condition;
        fail.clause = 'a';
        fail.t = TransitionId(fwd);
        fail.m = m;
        auto it = preset_index_.find(m);
        if (it != preset_index_.end()) {
          for (std::uint32_t cand : it->second) {
            const Transition& tc = net_->transition(TransitionId(cand));
            if (tf.label != tc.label ||
                !detail::closure_member_matching(rel, tf.post, tc.post)) {
              if (fail.clause == 'a') fail.clause = 'b';
              continue;
            }
            if (!inhib_ok(u, fwd, tc.inhib)) {
              fail.clause = 'c';
              fail.candidate = TransitionId(cand);
              TransitionId left = condition == 1 ? TransitionId(fwd) : TransitionId(cand);
              TransitionId right = condition == 1 ? TransitionId(cand) : TransitionId(fwd);
              fail.violating_pair = inhibitor_consistent(*net_, orig, left, right);
              continue;
            }
            matched = true;
            break;
          }
        }
        if (!matched) {
          ce = std::move(fail);
          break;
        }
      }
    }
    return ce;
  }

  const PtiNet* net_;
  std::unordered_map<Multiset, std::vector<std::uint32_t>, MultisetHash> preset_index_;
};

inline std::optional<BisimCounterexample> is_pti_place_bisimulation(const PtiNet& net,
                                                                    const PlaceRelation& rel) {
  return BisimChecker(net).check(rel);
}

// Re-runs the failed condition on the stored data; true means the
// counterexample still fails, i.e. it is replayable.
inline bool counterexample_replays(const PtiNet& net, const PlaceRelation& rel,
                                   const BisimCounterexample& ce) {
  const Transition& tf = net.transition(ce.t);
  PlaceRelation oriented = ce.condition == 1 ? rel : relation_inverse(rel);
  if (!closure_member(oriented, tf.pre, ce.m)) return false;
  for (std::uint32_t cand = 0; cand < net.transition_count(); ++cand) {
    TransitionId tc(cand);
    if (net.is_dead(tc)) continue;
    const Transition& trc = net.transition(tc);
    if (trc.pre != ce.m || trc.label != tf.label) continue;
    if (!closure_member(oriented, tf.post, trc.post)) continue;
    TransitionId left = ce.condition == 1 ? ce.t : tc;
    TransitionId right = ce.condition == 1 ? tc : ce.t;
    if (!inhibitor_consistent(net, rel, left, right)) return false;  // a match exists after all
  }
  return true;
}

// Sound over-approximation of the pairs that can appear in any pti-place
// bisimulation. When pre(t1) = k·s and (s,s') ∈ R, the marking k·s' is
// always R⊕-related to pre(t1), so a matching t2 with pre(t2) = k·s', equal
// label, a consistent (s,s') inhibitor verdict and post-sets matchable
// within the surviving pairs must exist; symmetrically for s'. Pairs with no
// such match are deleted until a fixpoint. Every pti-place bisimulation is a
// subset of the result, which caps the search space of the decision
// procedure and often refutes equivalence outright.
inline PlaceRelation feasible_pairs(const PtiNet& net) {
  std::uint32_t n = net.place_count();
  PlaceRelation feas(n);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j) feas.insert(PlaceId(i), PlaceId(j));

  // transitions whose pre-set is k·s, grouped by s
  std::vector<std::vector<std::uint32_t>> single_pre(n);
  for (std::uint32_t ti = 0; ti < net.transition_count(); ++ti) {
    if (net.is_dead(TransitionId(ti))) continue;
    const Multiset& pre = net.transition(TransitionId(ti)).pre;
    if (pre.support_size() == 1) single_pre[pre.entries()[0].first.index].push_back(ti);
  }

  auto posts_matchable = [&](const PlaceRelation& d, const Transition& t1, const Transition& t2) {
    PlaceRelation filtered(n);
    for (std::uint32_t s = 0; s < n; ++s) {
      bool in1 = t1.inhib.test(s);
      d.row(s).for_each([&](std::uint32_t sp) {
        if (t2.inhib.test(sp) == in1) filtered.insert(PlaceId(s), PlaceId(sp));
      });
    }
    return detail::closure_member_matching(filtered, t1.post, t2.post).has_value();
  };

  auto pair_survives = [&](const PlaceRelation& d, std::uint32_t s, std::uint32_t sp) {
    for (int dir = 0; dir < 2; ++dir) {
      std::uint32_t from = dir == 0 ? s : sp;
      std::uint32_t to = dir == 0 ? sp : s;
      for (std::uint32_t ti : single_pre[from]) {
        const Transition& t1 = net.transition(TransitionId(ti));
        Count k = t1.pre.entries()[0].second;
        bool matched = false;
        for (std::uint32_t ui : single_pre[to]) {
          const Transition& t2 = net.transition(TransitionId(ui));
          if (t2.pre.entries()[0].second != k || t2.label != t1.label) continue;
          const Transition& left = dir == 0 ? t1 : t2;
          const Transition& right = dir == 0 ? t2 : t1;
          if (left.inhib.test(s) != right.inhib.test(sp)) continue;
          if (dir == 0 ? posts_matchable(d, t1, t2) : posts_matchable(d, t2, t1)) {
            matched = true;
            break;
          }
        }
        if (!matched) return false;
      }
    }
    return true;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [a, b] : feas.pairs()) {
      if (!pair_survives(feas, a.index, b.index)) {
        feas.erase(a, b);
        changed = true;
      }
    }
  }
  return feas;
}

enum class Verdict { equivalent, not_equivalent, unknown };

struct EquivVerdict {
  Verdict verdict = Verdict::unknown;
  std::optional<PlaceRelation> witness;      // a pti-place bisimulation relating m1, m2
  std::optional<MatchWitness> witness_match; // pairing proving (m1, m2) ∈ witness⊕
  std::uint64_t relations_examined = 0;
  std::uint64_t pruned = 0;  // rejected before the bisimulation check
  bool equivalent() const { return verdict == Verdict::equivalent; }
};

struct DecideConfig {
  std::uint64_t max_candidates = 1ull << 25;  // exhaustive up to 25 candidate pairs
  bool exhaustive = false;                    // lift the candidate budget entirely
  bool use_memo = true;
};

struct MaximalResult {
  std::vector<PlaceRelation> relations;  // canonical order: pair count, then lex
  bool truncated = false;
  std::uint64_t examined = 0;
};

// Decision procedure for pti-place bisimilarity: enumerate candidate place
// relations in canonical order (pair count, then lexicographic), keep only
// those whose additive closure relates the queried markings, and accept the
// first that passes the finite bisimulation conditions. Only subsets of
// feasible_pairs() can be bisimulations, so the enumeration ranges over
// those; exhausting them refutes equivalence definitively. The candidate
// budget turns into an explicit "unknown" verdict, never a silent answer.
class Decider {
 public:
  explicit Decider(const PtiNet& net)
      : net_(&net), checker_(net), feasible_(feasible_pairs(net)) {
    for (const auto& [a, b] : feasible_.pairs())
      positions_.emplace_back(a.index, b.index);
  }

  const PlaceRelation& feasible() const { return feasible_; }

  EquivVerdict decide_equiv(const Multiset& m1, const Multiset& m2,
                            const DecideConfig& cfg = {}) const {
    EquivVerdict out;
    out.verdict = Verdict::not_equivalent;
    if (m1.total() != m2.total()) return out;
    if (!closure_member(feasible_, m1, m2)) return out;

    std::uint64_t budget =
        cfg.exhaustive ? std::numeric_limits<std::uint64_t>::max() : cfg.max_candidates;
    std::size_t p = positions_.size();
    std::vector<std::uint32_t> combo;
    PlaceRelation cand(net_->place_count());

    for (std::size_t k = 0; k <= p; ++k) {
      combo.assign(k, 0);
      for (std::size_t i = 0; i < k; ++i) combo[i] = static_cast<std::uint32_t>(i);
      bool more = true;
      while (more) {
        if (out.relations_examined >= budget) {
          out.verdict = Verdict::unknown;
          return out;
        }
        ++out.relations_examined;
        build_candidate(combo, cand);
        bool plausible = true;
        for (const auto& [place, count] : m1.entries())
          if (cand.row(place.index).none()) {
            plausible = false;
            break;
          }
        if (plausible && closure_member(cand, m1, m2)) {
          if (bisim_cached(combo, cand, cfg.use_memo)) {
            out.verdict = Verdict::equivalent;
            out.witness = cand;
            out.witness_match = closure_member(cand, m1, m2);
            return out;
          }
        } else {
          ++out.pruned;
        }
        more = next_combination(combo, p);
      }
    }
    return out;
  }

  // All maximal pti-place bisimulations, found by walking candidate sets in
  // decreasing size: any set contained in an already-found bisimulation is
  // dominated and skipped, and whole subtrees are pruned the same way.
  MaximalResult maximal_bisimulations(const DecideConfig& cfg = {}) const {
    MaximalResult out;
    std::uint64_t budget =
        cfg.exhaustive ? std::numeric_limits<std::uint64_t>::max() : cfg.max_candidates;
    std::size_t p = positions_.size();
    std::uint32_t n = net_->place_count();

    std::vector<DynBitset> suffix_union(p + 1, DynBitset(n * n));
    for (std::size_t i = p; i-- > 0;) {
      suffix_union[i] = suffix_union[i + 1];
      suffix_union[i].set(positions_[i].first * n + positions_[i].second);
    }

    std::vector<DynBitset> found_masks;
    std::vector<std::uint32_t> chosen;
    DynBitset chosen_mask(n * n);
    PlaceRelation cand(net_->place_count());

    std::function<bool(std::size_t, std::size_t)> walk = [&](std::size_t next,
                                                             std::size_t still_needed) -> bool {
      if (still_needed == 0) {
        // dominated candidates cannot be maximal
        for (const auto& mask : found_masks)
          if (chosen_mask.subset_of(mask)) return true;
        if (out.examined >= budget) {
          out.truncated = true;
          return false;
        }
        ++out.examined;
        build_candidate(chosen, cand);
        if (checker_.check_fast(cand)) {
          out.relations.push_back(cand);
          found_masks.push_back(chosen_mask);
        }
        return true;
      }
      // every completion below stays inside an already-found bisimulation?
      DynBitset reach = chosen_mask;
      reach |= suffix_union[next];
      for (const auto& mask : found_masks)
        if (reach.subset_of(mask)) return true;
      for (std::size_t i = next; i + still_needed <= p; ++i) {
        chosen.push_back(static_cast<std::uint32_t>(i));
        chosen_mask.set(positions_[i].first * n + positions_[i].second);
        bool keep_going = walk(i + 1, still_needed - 1);
        chosen_mask.reset(positions_[i].first * n + positions_[i].second);
        chosen.pop_back();
        if (!keep_going) return false;
      }
      return true;
    };

    bool completed = true;
    for (std::size_t k = p + 1; k-- > 0 && completed;) completed = walk(0, k);

    std::sort(out.relations.begin(), out.relations.end(),
              [](const PlaceRelation& a, const PlaceRelation& b) {
                std::size_t pa = a.pair_count(), pb = b.pair_count();
                if (pa != pb) return pa < pb;
                return a.pairs() < b.pairs();
              });
    return out;
  }

 private:
  void build_candidate(const std::vector<std::uint32_t>& combo, PlaceRelation& cand) const {
    PlaceRelation fresh(net_->place_count());
    for (std::uint32_t idx : combo)
      fresh.insert(PlaceId(positions_[idx].first), PlaceId(positions_[idx].second));
    cand = std::move(fresh);
  }

  static bool next_combination(std::vector<std::uint32_t>& combo, std::size_t p) {
    std::size_t k = combo.size();
    if (k == 0) return false;
    std::size_t i = k;
    while (i-- > 0) {
      if (combo[i] + (k - i) <= p - 1 + 0) {
        ++combo[i];
        for (std::size_t j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
        return true;
      }
    }
    return false;
  }

  bool bisim_cached(const std::vector<std::uint32_t>& combo, const PlaceRelation& cand,
                    bool use_memo) const {
    if (!use_memo) return checker_.check_fast(cand);
    std::vector<std::uint64_t> key((positions_.size() + 63) / 64, 0);
    for (std::uint32_t idx : combo) key[idx >> 6] |= 1ull << (idx & 63);
    std::uint64_t h = 0;
    for (auto w : key) h = hash_mix(h, w);
    {
      std::lock_guard<std::mutex> lock(memo_mutex_);
      auto range = memo_.equal_range(h);
      for (auto it = range.first; it != range.second; ++it)
        if (it->second.first == key) return it->second.second;
    }
    bool verdict = checker_.check_fast(cand);
    std::lock_guard<std::mutex> lock(memo_mutex_);
    if (memo_.size() < memo_capacity_) memo_.emplace(h, std::make_pair(key, verdict));
    return verdict;
  }

  const PtiNet* net_;
  BisimChecker checker_;
  PlaceRelation feasible_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> positions_;  // row-major
  mutable std::mutex memo_mutex_;
  mutable std::unordered_multimap<std::uint64_t, std::pair<std::vector<std::uint64_t>, bool>>
      memo_;
  static constexpr std::size_t memo_capacity_ = 1u << 20;
};

inline EquivVerdict decide_equiv(const PtiNet& net, const Multiset& m1, const Multiset& m2,
                                 const DecideConfig& cfg = {}) {
  return Decider(net).decide_equiv(m1, m2, cfg);
}

inline MaximalResult maximal_bisimulations(const PtiNet& net, const DecideConfig& cfg = {}) {
  return Decider(net).maximal_bisimulations(cfg);
}

}  // namespace pti
