#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pti/bisim.hpp"
#include "pti/cn_bisim.hpp"
#include "pti/text.hpp"
#include "pti/version.hpp"

namespace pti {

// Machine-readable verdict emitted by the CLI with --json. Round-trips
// through nlohmann::json; witnesses re-verify against the net they came
// from.
struct VerdictReport {
  std::string net;
  std::string kind;  // "closure" | "check-relation" | "decide" | "cn-bisim"
  std::string m1, m2;
  std::string relation;                 // for relation queries
  std::string result;                   // "true" | "false" | "unknown"
  std::vector<std::pair<std::string, std::string>> witness_relation;
  std::vector<std::pair<std::string, std::string>> witness_match;
  std::string counterexample;
  std::uint64_t relations_examined = 0;
  std::uint64_t pruned = 0;
  std::uint64_t elapsed_ms = 0;
  std::string tool_version = version;
};

inline nlohmann::json to_json(const VerdictReport& r) {
  nlohmann::json query{{"net", r.net}, {"kind", r.kind}};
  if (!r.m1.empty()) query["m1"] = r.m1;
  if (!r.m2.empty()) query["m2"] = r.m2;
  if (!r.relation.empty()) query["relation"] = r.relation;
  nlohmann::json j{{"query", query},
                   {"relations_examined", r.relations_examined},
                   {"pruned", r.pruned},
                   {"elapsed_ms", r.elapsed_ms},
                   {"tool_version", r.tool_version}};
  if (r.result == "true")
    j["result"] = true;
  else if (r.result == "false")
    j["result"] = false;
  else
    j["result"] = "unknown";
  auto pairs = [](const std::vector<std::pair<std::string, std::string>>& ps) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& [l, rgt] : ps) a.push_back(nlohmann::json::array({l, rgt}));
    return a;
  };
  if (!r.witness_relation.empty()) j["witness_relation"] = pairs(r.witness_relation);
  if (!r.witness_match.empty()) j["witness_match"] = pairs(r.witness_match);
  if (!r.counterexample.empty()) j["counterexample"] = r.counterexample;
  return j;
}

inline VerdictReport report_from_json(const nlohmann::json& j) {
  VerdictReport r;
  const auto& q = j.at("query");
  r.net = q.at("net").get<std::string>();
  r.kind = q.at("kind").get<std::string>();
  if (q.contains("m1")) r.m1 = q.at("m1").get<std::string>();
  if (q.contains("m2")) r.m2 = q.at("m2").get<std::string>();
  if (q.contains("relation")) r.relation = q.at("relation").get<std::string>();
  const auto& res = j.at("result");
  r.result = res.is_boolean() ? (res.get<bool>() ? "true" : "false") : "unknown";
  auto pairs = [&](const char* key, std::vector<std::pair<std::string, std::string>>& out) {
    if (!j.contains(key)) return;
    for (const auto& p : j.at(key))
      out.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
  };
  pairs("witness_relation", r.witness_relation);
  pairs("witness_match", r.witness_match);
  if (j.contains("counterexample")) r.counterexample = j.at("counterexample").get<std::string>();
  r.relations_examined = j.at("relations_examined").get<std::uint64_t>();
  r.pruned = j.at("pruned").get<std::uint64_t>();
  r.elapsed_ms = j.at("elapsed_ms").get<std::uint64_t>();
  r.tool_version = j.at("tool_version").get<std::string>();
  return r;
}

inline std::vector<std::pair<std::string, std::string>> named_pairs(
    const PtiNet& net, const std::vector<std::pair<PlaceId, PlaceId>>& ps) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [l, r] : ps) out.emplace_back(net.place_name(l), net.place_name(r));
  return out;
}

inline std::string describe_counterexample(const PtiNet& net, const BisimCounterexample& ce) {
  std::string s = "condition " + std::to_string(ce.condition) + "(" + ce.clause + "): transition " +
                  net.transition(ce.t).name + " with related marking " +
                  marking_to_text(net, ce.m) + " has no match";
  if (ce.candidate)
    s += "; candidate " + net.transition(*ce.candidate).name + " fails the inhibiting-set test";
  if (ce.violating_pair)
    s += " on pair (" + net.place_name(ce.violating_pair->first) + "," +
         net.place_name(ce.violating_pair->second) + ")";
  return s;
}

inline std::string describe_trace(const std::vector<GameMoveRecord>& trace) {
  std::string s;
  for (const auto& mv : trace) {
    if (!s.empty()) s += "; ";
    s += "side " + std::to_string(mv.attacker_side) + " fires " + mv.attacker_transition;
    if (mv.defender_transition)
      s += ", answered by " + *mv.defender_transition;
    else
      s += ", unanswered";
  }
  return s;
}

}  // namespace pti
