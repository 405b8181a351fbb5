#pragma once

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pti/bisim.hpp"
#include "pti/causal.hpp"
#include "pti/cn_bisim.hpp"
#include "pti/oracles.hpp"
#include "pti/report.hpp"
#include "pti/text.hpp"
#include "pti/token_game.hpp"
#include "pti/version.hpp"

// Command-line front end. Exit codes: 0 definitive positive answer,
// 1 definitive negative answer, 2 usage or input errors, 3 budget exhausted.

namespace pti::cli {

namespace detail {

inline PtiNet load_and_warn(const std::string& path, std::ostream& err) {
  PtiNet net = load_net(path);
  for (std::uint32_t t = 0; t < net.transition_count(); ++t)
    if (net.is_dead(TransitionId(t)))
      err << "warning: transition " << net.transition(TransitionId(t)).name
          << " consumes from its own inhibiting place and can never fire\n";
  return net;
}

inline std::uint64_t elapsed_ms_since(std::chrono::steady_clock::time_point start) {
  return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                        std::chrono::steady_clock::now() - start)
                                        .count());
}

struct CommonArgs {
  std::string net_path, rel_path, m1_expr, m2_expr, marking_expr, dot_path;
  std::uint64_t budget = DecideConfig{}.max_candidates;
  bool exhaustive = false;
  bool json = false;
  std::size_t events = 0, depth = 0;
  std::size_t max_nodes = CnBisimConfig{}.max_nodes;
};

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite PTI nets: token game, additive closure, pti-place bisimilarity, "
               "causal processes"};
  app.set_version_flag("--version", version);
  app.require_subcommand(1);
  detail::CommonArgs a;

  auto add_net = [&](CLI::App* cmd) {
    cmd->add_option("net", a.net_path, "net file (.pti)")->required();
  };
  auto add_pair = [&](CLI::App* cmd) {
    cmd->add_option("-1,--m1", a.m1_expr, "first marking expression")->required();
    cmd->add_option("-2,--m2", a.m2_expr, "second marking expression")->required();
  };

  CLI::App* fire_cmd = app.add_subcommand("fire", "fire one transition from a marking");
  add_net(fire_cmd);
  fire_cmd->add_option("-m,--marking", a.marking_expr, "marking expression")->required();
  std::string trans_name;
  fire_cmd->add_option("-t,--transition", trans_name, "transition name")->required();

  CLI::App* enabled_cmd = app.add_subcommand("enabled", "list transitions enabled at a marking");
  add_net(enabled_cmd);
  enabled_cmd->add_option("-m,--marking", a.marking_expr, "marking expression")->required();

  CLI::App* closure_cmd =
      app.add_subcommand("closure", "decide additive-closure membership of a marking pair");
  add_net(closure_cmd);
  closure_cmd->add_option("-r,--relation", a.rel_path, "relation file")->required();
  add_pair(closure_cmd);
  closure_cmd->add_flag("--json", a.json, "emit a JSON report");

  CLI::App* check_cmd =
      app.add_subcommand("check-relation", "check whether a relation is a pti-place bisimulation");
  add_net(check_cmd);
  check_cmd->add_option("-r,--relation", a.rel_path, "relation file")->required();
  check_cmd->add_flag("--json", a.json, "emit a JSON report");

  CLI::App* decide_cmd = app.add_subcommand("decide", "decide pti-place bisimilarity of markings");
  add_net(decide_cmd);
  add_pair(decide_cmd);
  decide_cmd->add_option("--budget", a.budget, "candidate relation budget");
  decide_cmd->add_flag("--exhaustive", a.exhaustive, "search without a candidate budget");
  decide_cmd->add_flag("--json", a.json, "emit a JSON report");

  CLI::App* maximal_cmd =
      app.add_subcommand("maximal-bisims", "list all maximal pti-place bisimulations");
  add_net(maximal_cmd);
  maximal_cmd->add_option("--budget", a.budget, "candidate relation budget");
  maximal_cmd->add_flag("--exhaustive", a.exhaustive, "search without a candidate budget");

  CLI::App* unfold_cmd = app.add_subcommand("unfold", "enumerate processes of a marked net");
  add_net(unfold_cmd);
  unfold_cmd->add_option("-m,--marking", a.marking_expr, "initial marking expression")->required();
  unfold_cmd->add_option("--events", a.events, "maximum number of events")->required();
  unfold_cmd->add_option("--dot", a.dot_path, "write maximal processes as DOT to this file");

  CLI::App* cn_cmd = app.add_subcommand("cn-bisim", "play the bounded causal-net bisimulation game");
  add_net(cn_cmd);
  add_pair(cn_cmd);
  cn_cmd->add_option("--depth", a.depth, "event depth of the game")->required();
  cn_cmd->add_option("--max-nodes", a.max_nodes, "game position budget");
  cn_cmd->add_flag("--json", a.json, "emit a JSON report");

  std::vector<const char*> argv;
  argv.push_back("pti");
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << version << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  auto start = std::chrono::steady_clock::now();
  try {
    PtiNet net = detail::load_and_warn(a.net_path, err);

    if (fire_cmd->parsed()) {
      Multiset m = parse_marking_expr(net, a.marking_expr);
      TransitionId t = net.transition_id(trans_name);
      try {
        out << marking_to_text(net, fire(net, m, t)) << "\n";
        return 0;
      } catch (const fire_error& e) {
        err << e.what() << "\n";
        return 1;
      }
    }

    if (enabled_cmd->parsed()) {
      Multiset m = parse_marking_expr(net, a.marking_expr);
      for (TransitionId t : enabled_transitions(net, m))
        out << net.transition(t).name << "\n";
      return 0;
    }

    if (closure_cmd->parsed()) {
      PlaceRelation rel = load_relation(net, a.rel_path);
      Multiset m1 = parse_marking_expr(net, a.m1_expr);
      Multiset m2 = parse_marking_expr(net, a.m2_expr);
      auto witness = closure_member(rel, m1, m2);
      if (a.json) {
        VerdictReport r;
        r.net = net.name();
        r.kind = "closure";
        r.m1 = marking_to_text(net, m1);
        r.m2 = marking_to_text(net, m2);
        r.relation = a.rel_path;
        r.result = witness ? "true" : "false";
        if (witness) r.witness_match = named_pairs(net, witness->pairs);
        r.elapsed_ms = detail::elapsed_ms_since(start);
        out << to_json(r).dump(2) << "\n";
      } else if (witness) {
        out << "member\n";
        for (const auto& [l, rp] : witness->pairs)
          out << "  (" << net.place_name(l) << "," << net.place_name(rp) << ")\n";
      } else {
        out << "not a member\n";
      }
      return witness ? 0 : 1;
    }

    if (check_cmd->parsed()) {
      PlaceRelation rel = load_relation(net, a.rel_path);
      auto ce = is_pti_place_bisimulation(net, rel);
      if (a.json) {
        VerdictReport r;
        r.net = net.name();
        r.kind = "check-relation";
        r.relation = a.rel_path;
        r.result = ce ? "false" : "true";
        if (ce) r.counterexample = describe_counterexample(net, *ce);
        r.elapsed_ms = detail::elapsed_ms_since(start);
        out << to_json(r).dump(2) << "\n";
      } else if (ce) {
        out << "not a pti-place bisimulation\n" << describe_counterexample(net, *ce) << "\n";
      } else {
        out << "pti-place bisimulation\n";
      }
      return ce ? 1 : 0;
    }

    if (decide_cmd->parsed()) {
      Multiset m1 = parse_marking_expr(net, a.m1_expr);
      Multiset m2 = parse_marking_expr(net, a.m2_expr);
      DecideConfig cfg;
      cfg.max_candidates = a.budget;
      cfg.exhaustive = a.exhaustive;
      EquivVerdict v = decide_equiv(net, m1, m2, cfg);
      if (a.json) {
        VerdictReport r;
        r.net = net.name();
        r.kind = "decide";
        r.m1 = marking_to_text(net, m1);
        r.m2 = marking_to_text(net, m2);
        r.result = v.verdict == Verdict::equivalent    ? "true"
                   : v.verdict == Verdict::not_equivalent ? "false"
                                                          : "unknown";
        if (v.witness) r.witness_relation = named_pairs(net, v.witness->pairs());
        if (v.witness_match) r.witness_match = named_pairs(net, v.witness_match->pairs);
        r.relations_examined = v.relations_examined;
        r.pruned = v.pruned;
        r.elapsed_ms = detail::elapsed_ms_since(start);
        out << to_json(r).dump(2) << "\n";
      } else {
        switch (v.verdict) {
          case Verdict::equivalent: {
            out << "equivalent\nwitness:\n";
            for (const auto& [l, rp] : v.witness->pairs())
              out << "  (" << net.place_name(l) << "," << net.place_name(rp) << ")\n";
            break;
          }
          case Verdict::not_equivalent:
            out << "not equivalent\n";
            break;
          case Verdict::unknown:
            out << "unknown: candidate budget exhausted after " << v.relations_examined
                << " relations (rerun with --exhaustive or a larger --budget)\n";
            break;
        }
        out << "relations examined: " << v.relations_examined << ", pruned: " << v.pruned << "\n";
      }
      return v.verdict == Verdict::equivalent ? 0 : v.verdict == Verdict::not_equivalent ? 1 : 3;
    }

    if (maximal_cmd->parsed()) {
      DecideConfig cfg;
      cfg.max_candidates = a.budget;
      cfg.exhaustive = a.exhaustive;
      MaximalResult res = maximal_bisimulations(net, cfg);
      out << res.relations.size() << " maximal pti-place bisimulation(s)"
          << (res.truncated ? " (truncated: budget exhausted)" : "") << "\n";
      for (const auto& rel : res.relations) {
        out << "{";
        bool first = true;
        for (const auto& [l, rp] : rel.pairs()) {
          out << (first ? " " : ", ") << "(" << net.place_name(l) << "," << net.place_name(rp)
              << ")";
          first = false;
        }
        out << " }\n";
      }
      return res.truncated ? 3 : 0;
    }

    if (unfold_cmd->parsed()) {
      Multiset m0 = parse_marking_expr(net, a.marking_expr);
      struct Item {
        PtiProcess process;
        std::vector<std::string> fired;
      };
      std::vector<Item> all, maximal;
      std::vector<Item> frontier;
      frontier.push_back({initial_process(net, m0), {}});
      all.push_back(frontier.front());
      while (!frontier.empty()) {
        std::vector<Item> next_frontier;
        for (const auto& item : frontier) {
          if (item.process.causal.events.size() >= a.events) {
            maximal.push_back(item);
            continue;
          }
          auto exts = process_extensions(net, item.process);
          if (exts.empty()) {
            maximal.push_back(item);
            continue;
          }
          for (auto& [t, q] : exts) {
            Item child{std::move(q), item.fired};
            child.fired.push_back(net.transition(t).name);
            all.push_back(child);
            next_frontier.push_back(std::move(child));
          }
        }
        frontier = std::move(next_frontier);
      }
      out << all.size() << " process(es) within " << a.events << " event(s), " << maximal.size()
          << " maximal\n";
      for (const auto& item : maximal) {
        out << "process:";
        for (const auto& name : item.fired) out << " " << name;
        if (item.fired.empty()) out << " (empty)";
        out << "  [" << item.process.causal.y_before.size() << " before, "
            << item.process.causal.y_after.size() << " after arc(s)]\n";
      }
      if (!a.dot_path.empty()) {
        std::ofstream dot(a.dot_path);
        if (!dot) throw error("cannot write DOT file: " + a.dot_path);
        for (std::size_t i = 0; i < maximal.size(); ++i)
          dot << process_to_dot(maximal[i].process, "process" + std::to_string(i));
      }
      return 0;
    }

    if (cn_cmd->parsed()) {
      Multiset m1 = parse_marking_expr(net, a.m1_expr);
      Multiset m2 = parse_marking_expr(net, a.m2_expr);
      CnBisimConfig cfg;
      cfg.max_nodes = a.max_nodes;
      CnBisimVerdict v = cn_bisim_bounded(net, m1, m2, a.depth, cfg);
      std::string result = v.kind == CnBisimVerdict::Kind::equivalent_to_depth ? "true"
                           : v.kind == CnBisimVerdict::Kind::distinguished    ? "false"
                                                                              : "unknown";
      if (a.json) {
        VerdictReport r;
        r.net = net.name();
        r.kind = "cn-bisim";
        r.m1 = marking_to_text(net, m1);
        r.m2 = marking_to_text(net, m2);
        r.result = result;
        if (v.kind == CnBisimVerdict::Kind::distinguished)
          r.counterexample = describe_trace(v.trace);
        r.elapsed_ms = detail::elapsed_ms_since(start);
        out << to_json(r).dump(2) << "\n";
      } else {
        switch (v.kind) {
          case CnBisimVerdict::Kind::equivalent_to_depth:
            out << "equivalent to depth " << v.depth << "\n";
            break;
          case CnBisimVerdict::Kind::distinguished:
            out << "distinguished at depth " << v.depth << "\n" << describe_trace(v.trace) << "\n";
            break;
          case CnBisimVerdict::Kind::budget_exhausted:
            out << "unknown: game position budget exhausted\n";
            break;
        }
      }
      return v.kind == CnBisimVerdict::Kind::equivalent_to_depth ? 0
             : v.kind == CnBisimVerdict::Kind::distinguished     ? 1
                                                                 : 3;
    }
  } catch (const parse_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const lookup_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace pti::cli
