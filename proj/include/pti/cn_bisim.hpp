#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pti/causal.hpp"

namespace pti {

// Bounded causal-net bisimulation game. A state is a triple (ρ1, C, ρ2):
// one shared causal PTI net, two foldings. The attacker extends the process
// on one side; the defender must extend the other side to the *same* causal
// net — same event, same consumed conditions, same number of produced
// conditions and identical before/after arcs — via some transition with the
// same label. Whoever runs out of answers loses. The bound counts events
// added to C, so "equivalent_to_depth" is evidence up to that horizon, not a
// claim of full causal-net bisimilarity.

struct CnTriple {
  CausalPtiNet causal;
  Folding fold1, fold2;
};

struct GameMoveRecord {
  int attacker_side = 1;
  std::string attacker_transition;
  std::optional<std::string> defender_transition;  // empty: no answer at all
};

struct CnBisimVerdict {
  enum class Kind { equivalent_to_depth, distinguished, budget_exhausted };
  Kind kind = Kind::equivalent_to_depth;
  std::size_t depth = 0;               // depth played (or at which distinguishing succeeded)
  std::vector<GameMoveRecord> trace;   // minimal distinguishing sequence
  std::size_t nodes_explored = 0;
};

struct CnBisimConfig {
  std::size_t max_nodes = 1u << 20;
};

namespace cn_detail {

inline void put_u32(std::string& s, std::uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline std::string triple_key(const CnTriple& tr) {
  std::string s;
  put_u32(s, tr.causal.condition_count);
  for (const auto& e : tr.causal.events) {
    put_u32(s, e.label);
    put_u32(s, static_cast<std::uint32_t>(e.pre.size()));
    for (auto b : e.pre) put_u32(s, b);
    put_u32(s, static_cast<std::uint32_t>(e.post.size()));
    for (auto b : e.post) put_u32(s, b);
  }
  auto arcs = [&](std::vector<std::pair<std::uint32_t, std::uint32_t>> ys) {
    std::sort(ys.begin(), ys.end());
    put_u32(s, static_cast<std::uint32_t>(ys.size()));
    for (const auto& [b, e] : ys) {
      put_u32(s, b);
      put_u32(s, e);
    }
  };
  arcs(tr.causal.y_before);
  arcs(tr.causal.y_after);
  for (auto p : tr.fold1.condition_place) put_u32(s, p);
  for (auto t : tr.fold1.event_transition) put_u32(s, t);
  for (auto p : tr.fold2.condition_place) put_u32(s, p);
  for (auto t : tr.fold2.event_transition) put_u32(s, t);
  return s;
}

inline std::vector<std::pair<std::uint32_t, std::uint32_t>> sorted_suffix(
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& arcs, std::size_t old_size) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out(arcs.begin() + old_size, arcs.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace cn_detail

class CnBisimGame {
 public:
  CnBisimGame(const PtiNet& net, CnBisimConfig cfg = {}) : net_(&net), cfg_(cfg) {}

  CnBisimVerdict run(const Multiset& m1, const Multiset& m2, std::size_t depth) {
    CnBisimVerdict verdict;
    if (m1.total() != m2.total()) {
      // no shared causal net can fold onto both markings
      verdict.kind = CnBisimVerdict::Kind::distinguished;
      verdict.depth = 0;
      return verdict;
    }
    std::vector<CnTriple> pairings = base_triples(m1, m2);
    for (std::size_t d = 1; d <= depth; ++d) {
      bool some_pairing_survives = false;
      for (const auto& base : pairings) {
        if (survives(base, d)) {
          some_pairing_survives = true;
          break;
        }
        if (exhausted_) break;
      }
      if (exhausted_) {
        verdict.kind = CnBisimVerdict::Kind::budget_exhausted;
        verdict.depth = d;
        verdict.nodes_explored = nodes_;
        return verdict;
      }
      if (!some_pairing_survives) {
        verdict.kind = CnBisimVerdict::Kind::distinguished;
        verdict.depth = d;
        build_trace(pairings.front(), d, verdict.trace);
        verdict.nodes_explored = nodes_;
        return verdict;
      }
    }
    verdict.kind = CnBisimVerdict::Kind::equivalent_to_depth;
    verdict.depth = depth;
    verdict.nodes_explored = nodes_;
    return verdict;
  }

 private:
  // ρ1 enumerates m1 canonically over the shared conditions; every distinct
  // assignment of m2's tokens to those conditions is a candidate ρ2.
  std::vector<CnTriple> base_triples(const Multiset& m1, const Multiset& m2) const {
    std::vector<std::uint32_t> left, right;
    for (const auto& [place, count] : m1.entries())
      for (Count i = 0; i < count; ++i) left.push_back(place.index);
    for (const auto& [place, count] : m2.entries())
      for (Count i = 0; i < count; ++i) right.push_back(place.index);
    std::sort(right.begin(), right.end());
    std::vector<CnTriple> out;
    do {
      CnTriple tr;
      tr.causal.condition_count = static_cast<std::uint32_t>(left.size());
      tr.fold1.condition_place = left;
      tr.fold2.condition_place = right;
      out.push_back(std::move(tr));
    } while (std::next_permutation(right.begin(), right.end()));
    return out;
  }

  struct AttackerMove {
    TransitionId transition;
    std::vector<CnTriple> answers;  // successor triples, one per defender option
  };

  // Attacker extensions on `side`, paired with every defender answer.
  std::vector<AttackerMove> moves(const CnTriple& tr, int side) const {
    std::vector<AttackerMove> out;
    const Folding& fa = side == 1 ? tr.fold1 : tr.fold2;
    const Folding& fd = side == 1 ? tr.fold2 : tr.fold1;

    PtiProcess pa{net_, tr.causal, fa};
    auto flow1 = causal_detail::flow_of(tr.causal);
    auto max1 = causal_detail::max_conditions(tr.causal, flow1);

    for (auto& [t, ext] : process_extensions(*net_, pa)) {
      const CausalPtiNet& c2 = ext.causal;
      std::uint32_t e = static_cast<std::uint32_t>(tr.causal.events.size());
      const CausalEvent& ev = c2.events[e];
      auto new_before = cn_detail::sorted_suffix(c2.y_before, tr.causal.y_before.size());
      auto new_after = cn_detail::sorted_suffix(c2.y_after, tr.causal.y_after.size());

      std::vector<Multiset::Entry> pre_entries;
      for (std::uint32_t b : ev.pre) pre_entries.emplace_back(PlaceId(fd.condition_place[b]), 1);
      Multiset pre_image_d = Multiset::from_entries(std::move(pre_entries));

      std::vector<CnTriple> answers;
      for (std::uint32_t ui = 0; ui < net_->transition_count(); ++ui) {
        const Transition& u = net_->transition(TransitionId(ui));
        if (u.label != ev.label) continue;
        if (u.pre != pre_image_d) continue;
        if (u.post.total() != ev.post.size()) continue;
        bool blocked = false;
        for (std::uint32_t b : max1)
          if (u.inhib.test(fd.condition_place[b])) blocked = true;
        if (blocked) continue;
        // defender's after arcs do not depend on the token assignment
        std::vector<std::pair<std::uint32_t, std::uint32_t>> after_d;
        for (std::uint32_t b = 0; b < tr.causal.condition_count; ++b)
          if (flow1.consumer[b] != causal_detail::none && u.inhib.test(fd.condition_place[b]))
            after_d.emplace_back(b, e);
        std::sort(after_d.begin(), after_d.end());
        if (after_d != new_after) continue;

        std::vector<std::uint32_t> tokens;
        for (const auto& [place, count] : u.post.entries())
          for (Count i = 0; i < count; ++i) tokens.push_back(place.index);
        std::sort(tokens.begin(), tokens.end());
        do {
          std::vector<std::pair<std::uint32_t, std::uint32_t>> before_d;
          for (std::size_t k = 0; k < ev.post.size(); ++k)
            for (std::uint32_t past = 0; past < e; ++past) {
              const Transition& tp = net_->transition(TransitionId(fd.event_transition[past]));
              if (tp.inhib.test(tokens[k])) before_d.emplace_back(ev.post[k], past);
            }
          std::sort(before_d.begin(), before_d.end());
          if (before_d != new_before) continue;
          Folding fd2 = fd;
          for (std::size_t k = 0; k < ev.post.size(); ++k)
            fd2.condition_place.push_back(tokens[k]);
          fd2.event_transition.push_back(ui);
          CnTriple next;
          next.causal = c2;
          next.fold1 = side == 1 ? ext.fold : fd2;
          next.fold2 = side == 1 ? fd2 : ext.fold;
          answers.push_back(std::move(next));
        } while (std::next_permutation(tokens.begin(), tokens.end()));
      }
      out.push_back(AttackerMove{t, std::move(answers)});
    }
    return out;
  }

  bool survives(const CnTriple& tr, std::size_t d) {
    if (exhausted_) return true;
    if (d == 0) return true;
    std::string key = cn_detail::triple_key(tr);
    cn_detail::put_u32(key, static_cast<std::uint32_t>(d));
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (++nodes_ > cfg_.max_nodes) {
      exhausted_ = true;
      return true;
    }
    bool result = true;
    for (int side = 1; side <= 2 && result; ++side) {
      for (const auto& move : moves(tr, side)) {
        bool defended = false;
        for (const auto& next : move.answers)
          if (survives(next, d - 1)) {
            defended = true;
            break;
          }
        if (exhausted_) return true;
        if (!defended) {
          result = false;
          break;
        }
      }
    }
    memo_.emplace(std::move(key), result);
    return result;
  }

  // Precondition: !survives(tr, d). Appends the canonical minimal
  // distinguishing line: the first winning attacker move, continued through
  // the defender's first (still losing) answer.
  void build_trace(const CnTriple& tr, std::size_t d, std::vector<GameMoveRecord>& trace) {
    for (int side = 1; side <= 2; ++side) {
      for (const auto& move : moves(tr, side)) {
        bool defended = false;
        for (const auto& next : move.answers)
          if (survives(next, d - 1)) {
            defended = true;
            break;
          }
        if (defended) continue;
        GameMoveRecord rec;
        rec.attacker_side = side;
        rec.attacker_transition = net_->transition(move.transition).name;
        if (!move.answers.empty()) {
          const CnTriple& follow = move.answers.front();
          const Folding& fd = side == 1 ? follow.fold2 : follow.fold1;
          rec.defender_transition =
              net_->transition(TransitionId(fd.event_transition.back())).name;
          trace.push_back(std::move(rec));
          build_trace(follow, d - 1, trace);
        } else {
          trace.push_back(std::move(rec));
        }
        return;
      }
    }
  }

  const PtiNet* net_;
  CnBisimConfig cfg_;
  std::unordered_map<std::string, bool> memo_;
  std::size_t nodes_ = 0;
  bool exhausted_ = false;
};

inline CnBisimVerdict cn_bisim_bounded(const PtiNet& net, const Multiset& m1, const Multiset& m2,
                                       std::size_t depth, const CnBisimConfig& cfg = {}) {
  CnBisimGame game(net, cfg);
  return game.run(m1, m2, depth);
}

}  // namespace pti
