#include <catch2/catch.hpp>

#include "fixtures.hpp"
#include "pti/oracles.hpp"
#include "pti/relation.hpp"

using namespace pti;

namespace {
Multiset ms(const PtiNet& net, const std::string& expr) { return parse_marking_expr(net, expr); }
}  // namespace

TEST_CASE("permutation oracle basics") {
  PtiNet net = load_fixture("fig_ex.pti");
  PlaceRelation rel = load_fixture_relation(net, "nsub.rel");
  CHECK(oracles::closure_member_naive(rel, ms(net, "s1 + s2"), ms(net, "s4 + s3")));
  CHECK(oracles::closure_member_naive(rel, Multiset(), Multiset()));
  CHECK_FALSE(oracles::closure_member_naive(rel, ms(net, "s1"), ms(net, "s3 + s4")));
  CHECK_FALSE(oracles::closure_member_naive(rel, ms(net, "s2"), ms(net, "s3")));
  CHECK_THROWS_AS(oracles::closure_member_naive(rel, ms(net, "9*s1"), ms(net, "9*s3")),
                  guard_error);
}

TEST_CASE("definition-level bisimulation check on the fig4 relations") {
  PtiNet net = load_fixture("fig4.pti");
  PlaceRelation r1 = load_fixture_relation(net, "fig4-r1.rel");
  PlaceRelation r2 = load_fixture_relation(net, "fig4-r2.rel");
  PlaceRelation both = load_fixture_relation(net, "fig4-union.rel");

  SECTION("the maximal relations satisfy the definition up to size 3") {
    CHECK_FALSE(oracles::bisim_check_by_definition(net, r1, 3));
    CHECK_FALSE(oracles::bisim_check_by_definition(net, r2, 3));
  }

  SECTION("their union fails, and the failure replays") {
    auto ce = oracles::bisim_check_by_definition(net, both, 2);
    REQUIRE(ce);
    CHECK(oracles::closure_member_naive(both, ce->m1, ce->m2));
    TransitionId t = ce->t;
    if (ce->side == 1) {
      CHECK(enabled(net, ce->m1, t));
      CHECK_FALSE(oracles::detail::has_matching_response(net, both, ce->m1, ce->m2, t));
    } else {
      CHECK(enabled(net, ce->m2, t));
      CHECK_FALSE(oracles::detail::has_matching_response(net, relation_inverse(both), ce->m2,
                                                         ce->m1, t));
    }
  }

  SECTION("the two-token pair (2*s2, s2 + s3) is itself a failing instance") {
    Multiset two_s2 = ms(net, "2*s2");
    Multiset mixed = ms(net, "s2 + s3");
    REQUIRE(oracles::closure_member_naive(both, two_s2, mixed));
    TransitionId t1 = net.transition_id("t1");
    REQUIRE(enabled(net, two_s2, t1));
    CHECK_FALSE(oracles::detail::has_matching_response(net, both, two_s2, mixed, t1));
  }

  SECTION("the empty relation passes vacuously") {
    PlaceRelation empty(net.place_count());
    CHECK_FALSE(oracles::bisim_check_by_definition(net, empty, 2));
  }

  SECTION("the size guard refuses factorial blow-ups") {
    CHECK_THROWS_AS(oracles::bisim_check_by_definition(net, r1, 9), guard_error);
  }
}

TEST_CASE("random generation is a pure function of the seed") {
  oracles::GenConfig cfg;
  cfg.seed = 42;
  PtiNet a = oracles::random_net(cfg);
  PtiNet b = oracles::random_net(cfg);
  CHECK(net_to_text(a) == net_to_text(b));
  CHECK(oracles::random_relation(cfg, a) == oracles::random_relation(cfg, b));
  CHECK(oracles::random_marking(cfg, a, 4) == oracles::random_marking(cfg, b, 4));
  cfg.seed = 43;
  CHECK(net_to_text(oracles::random_net(cfg)) != net_to_text(a));
}

TEST_CASE("generated nets are well-formed") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    oracles::GenConfig cfg;
    cfg.seed = seed;
    PtiNet net = oracles::random_net(cfg);
    CHECK(net.place_count() >= cfg.min_places);
    CHECK(net.place_count() <= cfg.max_places);
    for (const auto& t : net.transitions()) {
      CHECK_FALSE(t.pre.empty());
      CHECK_FALSE(t.post.empty());
      CHECK(t.pre.total() <= cfg.max_pre);
      CHECK(t.post.total() <= cfg.max_post);
    }
  }
}

TEST_CASE("zero inhibitor density yields a plain P/T net") {
  oracles::GenConfig cfg;
  cfg.seed = 5;
  cfg.inhibitor_density = 0.0;
  PtiNet net = oracles::random_net(cfg);
  for (const auto& t : net.transitions()) CHECK(t.inhib.none());
}

TEST_CASE("single-token closures collapse to plain membership") {
  oracles::GenConfig cfg;
  cfg.seed = 11;
  PtiNet net = oracles::random_net(cfg);
  PlaceRelation rel = oracles::random_relation(cfg, net);
  for (std::uint32_t i = 0; i < net.place_count(); ++i)
    for (std::uint32_t j = 0; j < net.place_count(); ++j)
      CHECK(oracles::closure_member_naive(rel, Multiset::of(PlaceId(i)),
                                          Multiset::of(PlaceId(j))) ==
            rel.contains(PlaceId(i), PlaceId(j)));
}
