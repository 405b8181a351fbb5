#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pti/multiset.hpp"
#include "pti/net.hpp"

namespace pti {

class fire_error : public error {
 public:
  enum class Reason { missing_tokens, inhibited };

  fire_error(const PtiNet& net, TransitionId t, Reason reason, PlaceId place)
      : error(message(net, t, reason, place)), reason_(reason), place_(place), transition_(t) {}

  Reason reason() const { return reason_; }
  PlaceId place() const { return place_; }
  TransitionId transition() const { return transition_; }

 private:
  static std::string message(const PtiNet& net, TransitionId t, Reason reason, PlaceId place) {
    const std::string& tn = net.transition(t).name;
    const std::string& pn = net.place_name(place);
    if (reason == Reason::missing_tokens)
      return "transition " + tn + " not enabled: missing tokens in place " + pn;
    return "transition " + tn + " not enabled: inhibited by token in place " + pn;
  }

  Reason reason_;
  PlaceId place_;
  TransitionId transition_;
};

class sequence_error : public error {
 public:
  sequence_error(std::size_t index, const fire_error& cause)
      : error("step " + std::to_string(index) + ": " + cause.what()),
        index_(index), reason_(cause.reason()), place_(cause.place()) {}

  std::size_t index() const { return index_; }
  fire_error::Reason reason() const { return reason_; }
  PlaceId place() const { return place_; }

 private:
  std::size_t index_;
  fire_error::Reason reason_;
  PlaceId place_;
};

// First clause of Def-6 enabling that fails, if any.
inline std::optional<std::pair<fire_error::Reason, PlaceId>> enabling_failure(
    const PtiNet& net, const Multiset& m, TransitionId t) {
  const Transition& tr = net.transition(t);
  for (const auto& [place, count] : tr.pre.entries())
    if (m.count(place) < count) return std::make_pair(fire_error::Reason::missing_tokens, place);
  for (const auto& [place, count] : m.entries())
    if (tr.inhib.test(place.index)) return std::make_pair(fire_error::Reason::inhibited, place);
  return std::nullopt;
}

// t is enabled at m iff pre(t) ⊆ m and no place of dom(m) inhibits t.
inline bool enabled(const PtiNet& net, const Multiset& m, TransitionId t) {
  if (t.index >= net.transition_count()) throw lookup_error("unknown transition id");
  return !enabling_failure(net, m, t).has_value();
}

inline std::vector<TransitionId> enabled_transitions(const PtiNet& net, const Multiset& m) {
  std::vector<TransitionId> out;
  for (std::uint32_t i = 0; i < net.transition_count(); ++i)
    if (enabled(net, m, TransitionId(i))) out.push_back(TransitionId(i));
  return out;
}

// m' = (m ⊖ pre(t)) ⊕ post(t); throws fire_error when t is not enabled.
inline Multiset fire(const PtiNet& net, const Multiset& m, TransitionId t) {
  if (t.index >= net.transition_count()) throw lookup_error("unknown transition id");
  if (auto fail = enabling_failure(net, m, t)) throw fire_error(net, t, fail->first, fail->second);
  const Transition& tr = net.transition(t);
  return ms_add(ms_sub(m, tr.pre), tr.post);
}

inline Multiset fire_sequence(const PtiNet& net, const Multiset& m0,
                              std::span<const TransitionId> seq) {
  Multiset m = m0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    try {
      m = fire(net, m, seq[i]);
    } catch (const fire_error& e) {
      throw sequence_error(i, e);
    }
  }
  return m;
}

struct Reachability {
  std::vector<Multiset> markings;  // BFS discovery order; markings[0] = m0
  // parent[i] = (index of predecessor, transition fired), nullopt for m0
  std::vector<std::optional<std::pair<std::size_t, TransitionId>>> parents;
  bool truncated = false;
};

// Bounded BFS of the reachability set. Successor markings larger than
// max_size are not explored and set the truncation flag; likewise when the
// marking budget runs out. Reachability of PTI nets is undecidable, so
// bounded exploration is all this can honestly offer.
inline Reachability reachable_bounded(const PtiNet& net, const Multiset& m0,
                                      std::size_t max_markings, Count max_size) {
  Reachability out;
  if (max_markings == 0) {
    out.truncated = true;
    return out;
  }
  std::unordered_map<Multiset, std::size_t, MultisetHash> seen;
  out.markings.push_back(m0);
  out.parents.push_back(std::nullopt);
  seen.emplace(m0, 0);
  for (std::size_t head = 0; head < out.markings.size(); ++head) {
    Multiset m = out.markings[head];
    for (std::uint32_t ti = 0; ti < net.transition_count(); ++ti) {
      TransitionId t(ti);
      if (!enabled(net, m, t)) continue;
      Multiset next = fire(net, m, t);
      if (seen.count(next)) continue;
      if (next.total() > max_size) {
        out.truncated = true;
        continue;
      }
      if (out.markings.size() >= max_markings) {
        out.truncated = true;
        return out;
      }
      seen.emplace(next, out.markings.size());
      out.markings.push_back(std::move(next));
      out.parents.emplace_back(std::make_pair(head, t));
    }
  }
  return out;
}

}  // namespace pti
