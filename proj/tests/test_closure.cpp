#include <algorithm>
#include <catch2/catch.hpp>

#include "fixtures.hpp"
#include "pti/closure.hpp"
#include "pti/oracles.hpp"

using namespace pti;

namespace {

Multiset ms(const PtiNet& net, const std::string& expr) { return parse_marking_expr(net, expr); }

// MatchWitness invariant: left components re-assemble m1, right components
// re-assemble m2, every pair lies in R.
void check_witness(const PlaceRelation& rel, const Multiset& m1, const Multiset& m2,
                   const MatchWitness& w) {
  std::vector<Multiset::Entry> lefts, rights;
  for (const auto& [l, r] : w.pairs) {
    lefts.emplace_back(l, 1);
    rights.emplace_back(r, 1);
    CHECK(rel.contains(l, r));
  }
  CHECK(Multiset::from_entries(lefts) == m1);
  CHECK(Multiset::from_entries(rights) == m2);
}

}  // namespace

TEST_CASE("closure membership on the non-equivalence example relation") {
  PtiNet net = load_fixture("fig_ex.pti");
  PlaceRelation rel = load_fixture_relation(net, "nsub.rel");  // {(s1,s3),(s1,s4),(s2,s4)}

  SECTION("a permutation of the right marking makes the match succeed") {
    auto w = closure_member(rel, ms(net, "s1 + s2"), ms(net, "s4 + s3"));
    REQUIRE(w);
    CHECK(w->pairs == std::vector<std::pair<PlaceId, PlaceId>>{
                          {net.place("s1"), net.place("s3")}, {net.place("s2"), net.place("s4")}});
    check_witness(rel, ms(net, "s1 + s2"), ms(net, "s4 + s3"), *w);
  }
  SECTION("empty markings are related with the empty witness") {
    auto w = closure_member(rel, Multiset(), Multiset());
    REQUIRE(w);
    CHECK(w->pairs.empty());
  }
  SECTION("doubled right place") {
    auto w = closure_member(rel, ms(net, "s1 + s2"), ms(net, "2*s4"));
    REQUIRE(w);
    CHECK(w->pairs == std::vector<std::pair<PlaceId, PlaceId>>{
                          {net.place("s1"), net.place("s4")}, {net.place("s2"), net.place("s4")}});
    CHECK(oracles::closure_member_naive(rel, ms(net, "s1 + s2"), ms(net, "2*s4")));
  }
  SECTION("the residual pair is not in R") {
    CHECK_FALSE(closure_member(rel, ms(net, "s2"), ms(net, "s3")));
  }
  SECTION("sizes must agree") {
    CHECK_FALSE(closure_member(rel, ms(net, "s1"), ms(net, "s3 + s4")));
  }
}

TEST_CASE("related markings enumeration") {
  PtiNet net = load_fixture("fig_ex.pti");
  PlaceRelation rel = load_fixture_relation(net, "nsub.rel");

  SECTION("images of a single token") {
    auto r = related_markings(rel, ms(net, "s1"));
    REQUIRE(r.size() == 2);
    CHECK(r[0] == ms(net, "s3"));
    CHECK(r[1] == ms(net, "s4"));
  }
  SECTION("images of a pair, deduplicated") {
    auto r = related_markings(rel, ms(net, "s1 + s2"));
    REQUIRE(r.size() == 2);
    CHECK(r[0] == ms(net, "s3 + s4"));
    CHECK(r[1] == ms(net, "2*s4"));
    for (const auto& m2 : r) CHECK(closure_member(rel, ms(net, "s1 + s2"), m2));
  }
  SECTION("the empty marking relates exactly to itself") {
    auto r = related_markings(rel, Multiset());
    REQUIRE(r.size() == 1);
    CHECK(r[0].empty());
  }
  SECTION("a token without images kills the whole stream") {
    auto r = related_markings(rel, ms(net, "s1 + s3"));  // s3 has no image
    CHECK(r.empty());
  }
}

TEST_CASE("relation algebra") {
  PtiNet net = load_fixture("fig_ex.pti");
  std::uint32_t n = net.place_count();

  SECTION("identity closure relates only equal markings") {
    PlaceRelation id = relation_identity(n);
    CHECK(closure_member(id, ms(net, "2*s1 + s2"), ms(net, "2*s1 + s2")));
    CHECK_FALSE(closure_member(id, ms(net, "s1"), ms(net, "s2")));
    CHECK(relation_is_equivalence(id));
  }
  SECTION("inverse is an involution") {
    PlaceRelation rel = load_fixture_relation(net, "nsub.rel");
    CHECK(relation_inverse(relation_inverse(rel)) == rel);
  }
  SECTION("composition chases one step") {
    PlaceRelation r1(n), r2(n);
    r1.insert(net.place("s1"), net.place("s2"));
    r2.insert(net.place("s2"), net.place("s3"));
    PlaceRelation c = relation_compose(r1, r2);
    CHECK(c.pair_count() == 1);
    CHECK(c.contains(net.place("s1"), net.place("s3")));
  }
  SECTION("equivalence detection") {
    PlaceRelation rel = load_fixture_relation(net, "nsub.rel");
    CHECK_FALSE(relation_is_equivalence(rel));
    PlaceRelation full(n);
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t j = 0; j < n; ++j) full.insert(PlaceId(i), PlaceId(j));
    CHECK(relation_is_equivalence(full));
    PlaceRelation sym(n);  // reflexive+symmetric but not transitive
    for (std::uint32_t i = 0; i < n; ++i) sym.insert(PlaceId(i), PlaceId(i));
    sym.insert(PlaceId(0), PlaceId(1));
    sym.insert(PlaceId(1), PlaceId(0));
    sym.insert(PlaceId(1), PlaceId(2));
    sym.insert(PlaceId(2), PlaceId(1));
    CHECK_FALSE(relation_is_equivalence(sym));
  }
}

TEST_CASE("additive closure properties on random instances") {
  oracles::GenConfig cfg;
  cfg.min_places = 3;
  cfg.max_places = 5;
  PtiNet net = oracles::random_net(cfg);
  std::uint32_t n = net.place_count();

  for (std::uint64_t i = 0; i < 300; ++i) {
    oracles::GenConfig ci = cfg;
    ci.seed = 100 + i;
    PlaceRelation rel = oracles::random_relation(ci, net);
    ci.seed = 500 + i;
    Multiset m1 = oracles::random_marking(ci, net, 1 + i % 4);
    ci.seed = 900 + i;
    Multiset m2 = oracles::random_marking(ci, net, 1 + i % 4);

    auto member = closure_member(rel, m1, m2);

    // equal-size necessity
    if (member) CHECK(m1.total() == m2.total());
    if (member) check_witness(rel, m1, m2, *member);

    // monotonicity under a superset relation
    if (member) {
      PlaceRelation bigger = rel;
      bigger.insert(PlaceId(i % n), PlaceId((i / 2) % n));
      CHECK(closure_member(bigger, m1, m2).has_value());
    }

    // inverse law
    CHECK(member.has_value() == closure_member(relation_inverse(rel), m2, m1).has_value());

    // additivity: witnesses concatenate
    ci.seed = 1300 + i;
    Multiset m1b = oracles::random_marking(ci, net, 1 + i % 3);
    auto others = related_markings(rel, m1b);
    if (member && !others.empty()) {
      const Multiset& m2b = others[i % others.size()];
      auto combined = closure_member(rel, ms_add(m1, m1b), ms_add(m2, m2b));
      REQUIRE(combined);
      check_witness(rel, ms_add(m1, m1b), ms_add(m2, m2b), *combined);
    }
  }
}

TEST_CASE("composition law, exhaustively on small instances") {
  PtiNet net = load_fixture("fig_ex.pti");
  std::uint32_t n = net.place_count();
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    oracles::GenConfig c;
    c.seed = seed;
    c.relation_density = 0.3;
    PlaceRelation r1 = oracles::random_relation(c, net);
    c.seed = seed + 1000;
    PlaceRelation r2 = oracles::random_relation(c, net);
    c.seed = seed + 2000;
    Multiset m1 = oracles::random_marking(c, net, 1 + seed % 3);
    c.seed = seed + 3000;
    Multiset m3 = oracles::random_marking(c, net, 1 + seed % 3);

    bool via_compose = closure_member(relation_compose(r1, r2), m1, m3).has_value();
    bool via_chain = false;
    for (const Multiset& m2 : related_markings(r1, m1))
      if (closure_member(r2, m2, m3)) {
        via_chain = true;
        break;
      }
    CHECK(via_compose == via_chain);
    (void)n;
  }
}

TEST_CASE("subtractivity holds for equivalences and fails for the example relation") {
  PtiNet net = load_fixture("fig_ex.pti");
  std::uint32_t n = net.place_count();

  SECTION("equivalence relations are subtractive") {
    // partition {s1,s2} / {s3,s4}
    PlaceRelation eq(n);
    for (std::uint32_t i = 0; i < n; ++i) eq.insert(PlaceId(i), PlaceId(i));
    eq.insert(net.place("s1"), net.place("s2"));
    eq.insert(net.place("s2"), net.place("s1"));
    eq.insert(net.place("s3"), net.place("s4"));
    eq.insert(net.place("s4"), net.place("s3"));
    REQUIRE(relation_is_equivalence(eq));
    for (std::uint64_t i = 0; i < 200; ++i) {
      oracles::GenConfig c;
      c.seed = i;
      Multiset m1 = oracles::random_marking(c, net, 1 + i % 3);
      c.seed = i + 7000;
      Multiset m1p = oracles::random_marking(c, net, 1 + i % 2);
      auto images1 = related_markings(eq, m1);
      auto images2 = related_markings(eq, m1p);
      const Multiset& m2 = images1[i % images1.size()];
      const Multiset& m2p = images2[i % images2.size()];
      REQUIRE(closure_member(eq, ms_add(m1, m1p), ms_add(m2, m2p)));
      // subtracting the related summand keeps the residual related
      CHECK(closure_member(eq, m1p, m2p));
    }
  }

  SECTION("the non-equivalence relation is not subtractive") {
    PlaceRelation rel = load_fixture_relation(net, "nsub.rel");
    // search all small instances for a concrete failure
    bool found = false;
    std::vector<PlaceId> places;
    for (std::uint32_t i = 0; i < n; ++i) places.push_back(PlaceId(i));
    for (PlaceId a : places)
      for (PlaceId b : places)
        for (PlaceId c : places)
          for (PlaceId d : places) {
            Multiset m1 = Multiset::of(a), m2 = Multiset::of(b);
            Multiset m1p = Multiset::of(c), m2p = Multiset::of(d);
            if (closure_member(rel, ms_add(m1, m1p), ms_add(m2, m2p)) &&
                closure_member(rel, m1, m2) && !closure_member(rel, m1p, m2p))
              found = true;
          }
    CHECK(found);
  }
}

TEST_CASE("matching path agrees with the equivalence fast path") {
  PtiNet net = load_fixture("fig_ex.pti");
  std::uint32_t n = net.place_count();
  PlaceRelation eq(n);
  for (std::uint32_t i = 0; i < n; ++i) eq.insert(PlaceId(i), PlaceId(i));
  eq.insert(net.place("s1"), net.place("s2"));
  eq.insert(net.place("s2"), net.place("s1"));
  REQUIRE(relation_is_equivalence(eq));
  for (std::uint64_t i = 0; i < 400; ++i) {
    oracles::GenConfig c;
    c.seed = i;
    Multiset m1 = oracles::random_marking(c, net, i % 5);
    c.seed = i + 4000;
    Multiset m2 = oracles::random_marking(c, net, i % 5);
    auto fast = closure_member(eq, m1, m2);
    auto slow = detail::closure_member_matching(eq, m1, m2);
    CHECK(fast.has_value() == slow.has_value());
    if (fast) check_witness(eq, m1, m2, *fast);
  }
}

TEST_CASE("matching agrees with the permutation oracle") {
  for (std::uint64_t i = 0; i < 2000; ++i) {
    oracles::GenConfig c;
    c.seed = i;
    c.min_places = 2;
    c.max_places = 5;
    PtiNet net = oracles::random_net(c);
    PlaceRelation rel = oracles::random_relation(c, net);
    c.seed = i + 50000;
    Multiset m1 = oracles::random_marking(c, net, i % 7);
    c.seed = i + 90000;
    Multiset m2 = oracles::random_marking(c, net, (i % 2) ? i % 7 : (i + 1) % 7);
    CHECK(closure_member(rel, m1, m2).has_value() ==
          oracles::closure_member_naive(rel, m1, m2));
  }
}

TEST_CASE("matching scales to large markings") {
  // 40 places, dense relation, 100 tokens a side
  std::uint32_t n = 40;
  NetBuilder b("big");
  std::vector<PlaceId> places;
  for (std::uint32_t i = 0; i < n; ++i) places.push_back(b.add_place("p" + std::to_string(i)));
  PtiNet net = b.build();
  oracles::GenConfig c;
  c.seed = 99;
  c.relation_density = 0.5;
  PlaceRelation rel = oracles::random_relation(c, net);
  c.seed = 123;
  Multiset m1 = oracles::random_marking(c, net, 100);
  c.seed = 124;
  Multiset m2 = oracles::random_marking(c, net, 100);
  auto t0 = std::chrono::steady_clock::now();
  auto w = closure_member(rel, m1, m2);
  auto ms_elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  if (w) check_witness(rel, m1, m2, *w);
  CHECK(ms_elapsed < 100);
}
