#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pti/base.hpp"
#include "pti/multiset.hpp"

namespace pti {

struct Transition {
  std::string name;
  LabelId label = 0;
  Multiset pre;    // nonempty
  Multiset post;   // nonempty
  DynBitset inhib; // places tested for absence of tokens
};

// Immutable finite Place/Transition net with inhibitor arcs. Places,
// labels and transitions carry dense indices in declaration order; all
// iteration follows that order so runs are reproducible.
class PtiNet {
 public:
  const std::string& name() const { return name_; }

  std::uint32_t place_count() const { return static_cast<std::uint32_t>(place_names_.size()); }
  const std::string& place_name(PlaceId s) const { return place_names_.at(s.index); }
  std::optional<PlaceId> find_place(std::string_view name) const {
    auto it = place_index_.find(std::string(name));
    if (it == place_index_.end()) return std::nullopt;
    return PlaceId(it->second);
  }
  PlaceId place(std::string_view name) const {
    auto p = find_place(name);
    if (!p) throw lookup_error("unknown place: " + std::string(name));
    return *p;
  }

  std::uint32_t label_count() const { return static_cast<std::uint32_t>(label_names_.size()); }
  const std::string& label_name(LabelId l) const { return label_names_.at(l); }

  std::uint32_t transition_count() const { return static_cast<std::uint32_t>(transitions_.size()); }
  const Transition& transition(TransitionId t) const { return transitions_.at(t.index); }
  const std::vector<Transition>& transitions() const { return transitions_; }
  std::optional<TransitionId> find_transition(std::string_view name) const {
    auto it = transition_index_.find(std::string(name));
    if (it == transition_index_.end()) return std::nullopt;
    return TransitionId(it->second);
  }
  TransitionId transition_id(std::string_view name) const {
    auto t = find_transition(name);
    if (!t) throw lookup_error("unknown transition: " + std::string(name));
    return *t;
  }

  // A transition consuming from one of its own inhibiting places can never
  // be enabled. Such transitions are legal input but flagged here so tools
  // can warn about them.
  bool is_dead(TransitionId t) const { return dead_.at(t.index); }

  const std::map<std::string, Multiset>& named_markings() const { return markings_; }
  std::optional<Multiset> find_marking(std::string_view name) const {
    auto it = markings_.find(std::string(name));
    if (it == markings_.end()) return std::nullopt;
    return it->second;
  }

 private:
  friend class NetBuilder;

  std::string name_;
  std::vector<std::string> place_names_;
  std::unordered_map<std::string, std::uint32_t> place_index_;
  std::vector<std::string> label_names_;
  std::unordered_map<std::string, std::uint32_t> label_index_;
  std::vector<Transition> transitions_;
  std::unordered_map<std::string, std::uint32_t> transition_index_;
  std::vector<bool> dead_;
  std::map<std::string, Multiset> markings_;
};

class NetBuilder {
 public:
  explicit NetBuilder(std::string name = "net") { net_.name_ = std::move(name); }

  PlaceId add_place(std::string_view name) {
    std::string key(name);
    if (net_.place_index_.count(key)) throw error("duplicate place name: " + key);
    std::uint32_t idx = net_.place_count();
    net_.place_index_.emplace(key, idx);
    net_.place_names_.push_back(std::move(key));
    return PlaceId(idx);
  }

  LabelId label(std::string_view name) {
    std::string key(name);
    auto it = net_.label_index_.find(key);
    if (it != net_.label_index_.end()) return it->second;
    LabelId idx = net_.label_count();
    net_.label_index_.emplace(key, idx);
    net_.label_names_.push_back(std::move(key));
    return idx;
  }

  TransitionId add_transition(std::string_view name, std::string_view label_name,
                              Multiset pre, const std::vector<PlaceId>& inhib, Multiset post) {
    std::string key(name);
    if (net_.transition_index_.count(key)) throw error("duplicate transition name: " + key);
    if (pre.empty()) throw error("transition " + key + " has empty pre-set");
    if (post.empty()) throw error("transition " + key + " has empty post-set");
    check_declared(pre);
    check_declared(post);
    Transition t;
    t.name = key;
    t.label = label(label_name);
    t.pre = std::move(pre);
    t.post = std::move(post);
    t.inhib = DynBitset(net_.place_count());
    for (PlaceId s : inhib) {
      if (s.index >= net_.place_count())
        throw error("transition " + key + " inhibits undeclared place");
      t.inhib.set(s.index);
    }
    bool dead = false;
    for (const auto& [place, count] : t.pre.entries())
      if (t.inhib.test(place.index)) dead = true;
    std::uint32_t idx = net_.transition_count();
    net_.transition_index_.emplace(key, idx);
    net_.transitions_.push_back(std::move(t));
    net_.dead_.push_back(dead);
    return TransitionId(idx);
  }

  void add_marking(std::string_view name, Multiset m) {
    std::string key(name);
    if (net_.markings_.count(key)) throw error("duplicate marking name: " + key);
    check_declared(m);
    net_.markings_.emplace(std::move(key), std::move(m));
  }

  PtiNet build() {
    // inhib bitsets may have been sized before later places were declared
    for (auto& t : net_.transitions_) {
      if (t.inhib.size() != net_.place_count()) {
        DynBitset widened(net_.place_count());
        t.inhib.for_each([&](std::uint32_t i) { widened.set(i); });
        t.inhib = widened;
      }
    }
    return std::move(net_);
  }

 private:
  void check_declared(const Multiset& m) const {
    for (const auto& [place, count] : m.entries())
      if (place.index >= net_.place_count()) throw error("multiset references undeclared place");
  }

  PtiNet net_;
};

}  // namespace pti
