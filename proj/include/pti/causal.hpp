#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pti/net.hpp"
#include "pti/token_game.hpp"

namespace pti {

// Causal PTI net: an acyclic, unbranched, weight-1 net recording one
// concurrent run, with inhibitor arcs split into before arcs (the condition
// did not hold yet when the event fired) and after arcs (it no longer held).
// Conditions and events carry dense ids in creation order.
struct CausalEvent {
  LabelId label = 0;
  std::vector<std::uint32_t> pre, post;  // condition ids, ascending / creation order
};

struct CausalPtiNet {
  std::uint32_t condition_count = 0;
  std::vector<CausalEvent> events;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> y_before, y_after;  // (condition, event)
};

// Type-preserving map from conditions/events onto the places/transitions of
// the system net.
struct Folding {
  std::vector<std::uint32_t> condition_place;
  std::vector<std::uint32_t> event_transition;
};

struct PtiProcess {
  const PtiNet* net = nullptr;
  CausalPtiNet causal;
  Folding fold;
};

namespace causal_detail {

constexpr std::int32_t none = -1;

struct Flow {
  std::vector<std::int32_t> producer, consumer;  // event id or none
  bool branched = false;                         // some condition produced/consumed twice
};

inline Flow flow_of(const CausalPtiNet& c) {
  Flow f;
  f.producer.assign(c.condition_count, none);
  f.consumer.assign(c.condition_count, none);
  for (std::uint32_t e = 0; e < c.events.size(); ++e) {
    for (std::uint32_t b : c.events[e].post) {
      if (f.producer[b] != none) f.branched = true;
      f.producer[b] = static_cast<std::int32_t>(e);
    }
    for (std::uint32_t b : c.events[e].pre) {
      if (f.consumer[b] != none) f.branched = true;
      f.consumer[b] = static_cast<std::int32_t>(e);
    }
  }
  return f;
}

inline std::vector<std::uint32_t> max_conditions(const CausalPtiNet& c, const Flow& f) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t b = 0; b < c.condition_count; ++b)
    if (f.consumer[b] == none) out.push_back(b);
  return out;
}

}  // namespace causal_detail

// ρ(Max(C)): the marking the process has reached.
inline Multiset process_marking(const PtiProcess& p) {
  auto flow = causal_detail::flow_of(p.causal);
  std::vector<Multiset::Entry> es;
  for (std::uint32_t b : causal_detail::max_conditions(p.causal, flow))
    es.emplace_back(PlaceId(p.fold.condition_place[b]), 1);
  return Multiset::from_entries(std::move(es));
}

inline Multiset process_initial_marking(const PtiProcess& p) {
  auto flow = causal_detail::flow_of(p.causal);
  std::vector<Multiset::Entry> es;
  for (std::uint32_t b = 0; b < p.causal.condition_count; ++b)
    if (flow.producer[b] == causal_detail::none)
      es.emplace_back(PlaceId(p.fold.condition_place[b]), 1);
  return Multiset::from_entries(std::move(es));
}

// The event-free process of N(m0): one condition per token, no arcs.
inline PtiProcess initial_process(const PtiNet& net, const Multiset& m0) {
  PtiProcess p;
  p.net = &net;
  for (const auto& [place, count] : m0.entries())
    for (Count i = 0; i < count; ++i) {
      p.fold.condition_place.push_back(place.index);
      ++p.causal.condition_count;
    }
  return p;
}

// Checks every defining clause of causal PTI nets, foldings and move
// synthesis; returns one message per violated clause. The before/after
// partition is execution-relative, so beyond the static clauses the events
// are replayed in creation order and the stored partition must agree with
// the replay.
inline std::vector<std::string> validate(const PtiProcess& p) {
  std::vector<std::string> v;
  const CausalPtiNet& c = p.causal;
  const PtiNet& net = *p.net;

  if (p.fold.condition_place.size() != c.condition_count ||
      p.fold.event_transition.size() != c.events.size()) {
    v.push_back("folding: size mismatch with causal net");
    return v;
  }
  for (std::uint32_t b = 0; b < c.condition_count; ++b)
    if (p.fold.condition_place[b] >= net.place_count()) {
      v.push_back("folding: condition " + std::to_string(b) + " maps to undeclared place");
      return v;
    }
  for (std::uint32_t e = 0; e < c.events.size(); ++e) {
    if (p.fold.event_transition[e] >= net.transition_count()) {
      v.push_back("folding: event " + std::to_string(e) + " maps to undeclared transition");
      return v;
    }
    for (std::uint32_t b : c.events[e].pre)
      if (b >= c.condition_count) {
        v.push_back("event " + std::to_string(e) + " consumes unknown condition");
        return v;
      }
    for (std::uint32_t b : c.events[e].post)
      if (b >= c.condition_count) {
        v.push_back("event " + std::to_string(e) + " produces unknown condition");
        return v;
      }
  }
  for (const auto& arcs : {c.y_before, c.y_after})
    for (const auto& [b, e] : arcs)
      if (b >= c.condition_count || e >= c.events.size()) {
        v.push_back("inhibitor arc references unknown condition or event");
        return v;
      }

  auto flow = causal_detail::flow_of(c);
  if (flow.branched) v.push_back("conditions must be unbranched (single producer and consumer)");

  for (std::uint32_t e = 0; e < c.events.size(); ++e) {
    std::vector<std::uint32_t> pre = c.events[e].pre, post = c.events[e].post;
    std::sort(pre.begin(), pre.end());
    std::sort(post.begin(), post.end());
    if (std::adjacent_find(pre.begin(), pre.end()) != pre.end() ||
        std::adjacent_find(post.begin(), post.end()) != post.end())
      v.push_back("event " + std::to_string(e) + ": arc weights must be 1");
  }

  // folding: labels and pre/post images
  for (std::uint32_t e = 0; e < c.events.size(); ++e) {
    const Transition& t = net.transition(TransitionId(p.fold.event_transition[e]));
    if (c.events[e].label != t.label)
      v.push_back("event " + std::to_string(e) + ": label differs from folded transition");
    auto image = [&](const std::vector<std::uint32_t>& bs) {
      std::vector<Multiset::Entry> es;
      for (std::uint32_t b : bs) es.emplace_back(PlaceId(p.fold.condition_place[b]), 1);
      return Multiset::from_entries(std::move(es));
    };
    if (image(c.events[e].pre) != t.pre)
      v.push_back("event " + std::to_string(e) + ": pre-set image differs from transition");
    if (image(c.events[e].post) != t.post)
      v.push_back("event " + std::to_string(e) + ": post-set image differs from transition");
  }

  // before/after requirements
  for (const auto& [b, e] : c.y_before)
    if (flow.producer[b] == causal_detail::none)
      v.push_back("before arc on condition " + std::to_string(b) + " which has no producer");
  for (const auto& [b, e] : c.y_after)
    if (flow.consumer[b] == causal_detail::none)
      v.push_back("after arc on condition " + std::to_string(b) + " which has no consumer");
  {
    auto overlap = c.y_before;
    for (const auto& arc : c.y_after)
      if (std::find(overlap.begin(), overlap.end(), arc) != overlap.end())
        v.push_back("arc (" + std::to_string(arc.first) + "," + std::to_string(arc.second) +
                    ") is both a before and an after arc");
  }

  // acyclicity of F ∪ ≺af ∪ ≺be over conditions and events
  {
    std::uint32_t nodes = c.condition_count + static_cast<std::uint32_t>(c.events.size());
    auto event_node = [&](std::uint32_t e) { return c.condition_count + e; };
    std::vector<std::vector<std::uint32_t>> succ(nodes);
    for (std::uint32_t e = 0; e < c.events.size(); ++e) {
      for (std::uint32_t b : c.events[e].pre) succ[b].push_back(event_node(e));
      for (std::uint32_t b : c.events[e].post) succ[event_node(e)].push_back(b);
    }
    // e ≺af e' when e consumes a condition that after-inhibits e'
    for (const auto& [b, e2] : c.y_after)
      if (flow.consumer[b] != causal_detail::none)
        succ[event_node(flow.consumer[b])].push_back(event_node(e2));
    // e ≺be e' when e' produces a condition that before-inhibits e
    for (const auto& [b, e1] : c.y_before)
      if (flow.producer[b] != causal_detail::none)
        succ[event_node(e1)].push_back(event_node(flow.producer[b]));
    std::vector<int> state(nodes, 0);
    bool cyclic = false;
    std::function<void(std::uint32_t)> dfs = [&](std::uint32_t u) {
      state[u] = 1;
      for (std::uint32_t w : succ[u]) {
        if (state[w] == 1) cyclic = true;
        else if (state[w] == 0 && !cyclic) dfs(w);
      }
      state[u] = 2;
    };
    for (std::uint32_t u = 0; u < nodes && !cyclic; ++u)
      if (state[u] == 0) dfs(u);
    if (cyclic) v.push_back("flow plus before/after precedences contain a cycle");
  }

  // folding coherence with the inhibiting relation
  {
    auto has_arc = [&](std::uint32_t b, std::uint32_t e) {
      auto arc = std::make_pair(b, e);
      return std::find(c.y_before.begin(), c.y_before.end(), arc) != c.y_before.end() ||
             std::find(c.y_after.begin(), c.y_after.end(), arc) != c.y_after.end();
    };
    for (std::uint32_t e = 0; e < c.events.size(); ++e) {
      const Transition& t = net.transition(TransitionId(p.fold.event_transition[e]));
      for (std::uint32_t b = 0; b < c.condition_count; ++b) {
        if (!t.inhib.test(p.fold.condition_place[b])) continue;
        bool in_post = std::find(c.events[e].post.begin(), c.events[e].post.end(), b) !=
                       c.events[e].post.end();
        if (!in_post && !has_arc(b, e))
          v.push_back("condition " + std::to_string(b) + " inhibits event " + std::to_string(e) +
                      " in the system net but carries no inhibitor arc");
      }
    }
    for (const auto& arcs : {c.y_before, c.y_after})
      for (const auto& [b, e] : arcs) {
        const Transition& t = net.transition(TransitionId(p.fold.event_transition[e]));
        if (!t.inhib.test(p.fold.condition_place[b]))
          v.push_back("inhibitor arc (" + std::to_string(b) + "," + std::to_string(e) +
                      ") has no counterpart in the system net");
      }
  }

  // replay in creation order and compare the synthesized partition
  {
    std::vector<bool> present(c.condition_count, false);
    std::vector<bool> consumed(c.condition_count, false);
    for (std::uint32_t b = 0; b < c.condition_count; ++b)
      if (flow.producer[b] == causal_detail::none) present[b] = true;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> want_before, want_after;
    bool replay_ok = true;
    for (std::uint32_t e = 0; e < c.events.size() && replay_ok; ++e) {
      const Transition& t = net.transition(TransitionId(p.fold.event_transition[e]));
      for (std::uint32_t b : c.events[e].pre)
        if (!present[b] || consumed[b]) {
          v.push_back("events are not fireable in creation order (event " + std::to_string(e) +
                      ")");
          replay_ok = false;
        }
      if (!replay_ok) break;
      for (std::uint32_t b = 0; b < c.condition_count; ++b)
        if (present[b] && !consumed[b] && t.inhib.test(p.fold.condition_place[b])) {
          v.push_back("inhibiting condition " + std::to_string(b) +
                      " still marked when event " + std::to_string(e) + " fired");
          replay_ok = false;
        }
      if (!replay_ok) break;
      for (std::uint32_t b = 0; b < c.condition_count; ++b)
        if (consumed[b] && t.inhib.test(p.fold.condition_place[b]))
          want_after.emplace_back(b, e);
      for (std::uint32_t b : c.events[e].pre) consumed[b] = true;
      for (std::uint32_t b : c.events[e].post) {
        for (std::uint32_t past = 0; past < e; ++past) {
          const Transition& tp = net.transition(TransitionId(p.fold.event_transition[past]));
          if (tp.inhib.test(p.fold.condition_place[b])) want_before.emplace_back(b, past);
        }
        present[b] = true;
      }
    }
    if (replay_ok) {
      auto canon = [](std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs) {
        std::sort(arcs.begin(), arcs.end());
        return arcs;
      };
      if (canon(c.y_before) != canon(want_before) || canon(c.y_after) != canon(want_after))
        v.push_back("before/after partition differs from the one synthesized by replay");
    }
  }

  return v;
}

// All one-step extensions of a process: every transition together with every
// way of drawing its pre-set from the maximal conditions. New post
// conditions are appended in place order; before arcs connect them to past
// events whose transition they inhibit, after arcs connect previously
// consumed inhibiting conditions to the new event. A transition with an
// inhibiting place imaged by a maximal condition cannot fire (for pre-set
// conditions that is the move gate, for untouched ones the folding could
// carry no arc), so those extensions are excluded.
inline std::vector<std::pair<TransitionId, PtiProcess>> process_extensions(const PtiNet& net,
                                                                           const PtiProcess& p) {
  std::vector<std::pair<TransitionId, PtiProcess>> out;
  auto flow = causal_detail::flow_of(p.causal);
  auto max_conds = causal_detail::max_conditions(p.causal, flow);

  std::vector<std::vector<std::uint32_t>> by_place(net.place_count());
  for (std::uint32_t b : max_conds) by_place[p.fold.condition_place[b]].push_back(b);

  for (std::uint32_t ti = 0; ti < net.transition_count(); ++ti) {
    const Transition& t = net.transition(TransitionId(ti));
    bool inhibited = false;
    for (std::uint32_t b : max_conds)
      if (t.inhib.test(p.fold.condition_place[b])) inhibited = true;
    if (inhibited) continue;

    // choose, per place, which maximal conditions feed the pre-set
    std::vector<std::vector<std::vector<std::uint32_t>>> per_place_choices;
    bool possible = true;
    for (const auto& [place, count] : t.pre.entries()) {
      const auto& pool = by_place[place.index];
      if (pool.size() < count) {
        possible = false;
        break;
      }
      std::vector<std::vector<std::uint32_t>> choices;
      std::vector<std::uint32_t> idx(static_cast<std::size_t>(count));
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i);
      while (true) {
        std::vector<std::uint32_t> pick;
        for (std::uint32_t i : idx) pick.push_back(pool[i]);
        choices.push_back(std::move(pick));
        std::size_t k = idx.size(), i = k;
        bool moved = false;
        while (i-- > 0) {
          if (idx[i] + (k - i) <= pool.size() - 1) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            moved = true;
            break;
          }
        }
        if (!moved) break;
      }
      per_place_choices.push_back(std::move(choices));
    }
    if (!possible) continue;

    std::vector<std::size_t> cursor(per_place_choices.size(), 0);
    while (true) {
      std::vector<std::uint32_t> pre;
      for (std::size_t pi = 0; pi < per_place_choices.size(); ++pi)
        for (std::uint32_t b : per_place_choices[pi][cursor[pi]]) pre.push_back(b);
      std::sort(pre.begin(), pre.end());

      PtiProcess next = p;
      std::uint32_t e = static_cast<std::uint32_t>(next.causal.events.size());
      CausalEvent ev;
      ev.label = t.label;
      ev.pre = pre;
      for (const auto& [place, count] : t.post.entries())
        for (Count i = 0; i < count; ++i) {
          std::uint32_t b = next.causal.condition_count++;
          ev.post.push_back(b);
          next.fold.condition_place.push_back(place.index);
          for (std::uint32_t past = 0; past < e; ++past) {
            const Transition& tp =
                net.transition(TransitionId(next.fold.event_transition[past]));
            if (tp.inhib.test(place.index)) next.causal.y_before.emplace_back(b, past);
          }
        }
      for (std::uint32_t b = 0; b < p.causal.condition_count; ++b)
        if (flow.consumer[b] != causal_detail::none && t.inhib.test(p.fold.condition_place[b]))
          next.causal.y_after.emplace_back(b, e);
      next.causal.events.push_back(std::move(ev));
      next.fold.event_transition.push_back(ti);
      out.emplace_back(TransitionId(ti), std::move(next));

      std::size_t pi = per_place_choices.size();
      bool moved = false;
      while (pi-- > 0) {
        if (++cursor[pi] < per_place_choices[pi].size()) {
          moved = true;
          break;
        }
        cursor[pi] = 0;
      }
      if (!moved || per_place_choices.empty()) break;
    }
  }
  return out;
}

// DOT rendering of a process: conditions as circles, events as boxes, flow
// arcs solid, inhibitor arcs with a circled head on the event side labeled
// "b" (before) or "a" (after).
inline std::string process_to_dot(const PtiProcess& p, const std::string& graph_name = "process") {
  const PtiNet& net = *p.net;
  std::ostringstream out;
  out << "digraph " << graph_name << " {\n";
  out << "  rankdir=TB;\n";
  for (std::uint32_t b = 0; b < p.causal.condition_count; ++b)
    out << "  b" << b << " [shape=circle, label=\"b" << b << ":"
        << net.place_name(PlaceId(p.fold.condition_place[b])) << "\"];\n";
  for (std::uint32_t e = 0; e < p.causal.events.size(); ++e) {
    const Transition& t = net.transition(TransitionId(p.fold.event_transition[e]));
    out << "  e" << e << " [shape=box, label=\"e" << e << ":" << t.name << "/"
        << net.label_name(t.label) << "\"];\n";
  }
  for (std::uint32_t e = 0; e < p.causal.events.size(); ++e) {
    for (std::uint32_t b : p.causal.events[e].pre) out << "  b" << b << " -> e" << e << ";\n";
    for (std::uint32_t b : p.causal.events[e].post) out << "  e" << e << " -> b" << b << ";\n";
  }
  for (const auto& [b, e] : p.causal.y_before)
    out << "  b" << b << " -> e" << e << " [arrowhead=odot, label=\"b\"];\n";
  for (const auto& [b, e] : p.causal.y_after)
    out << "  b" << b << " -> e" << e << " [arrowhead=odot, label=\"a\"];\n";
  out << "}\n";
  return out.str();
}

}  // namespace pti
