#include <catch2/catch.hpp>

#include "fixtures.hpp"
#include "pti/text.hpp"

using namespace pti;

TEST_CASE("every shipped fixture parses and round-trips through print") {
  for (const char* name : {"fig1.pti", "fig2-n1.pti", "fig2-n2.pti", "fig3-upac-upbc.pti",
                           "fig4.pti", "fig5.pti", "fig_ex.pti"}) {
    PtiNet net = load_fixture(name);
    std::string canonical = net_to_text(net);
    PtiNet reparsed = parse_net(canonical);
    CHECK(net_to_text(reparsed) == canonical);
    CHECK(reparsed.place_count() == net.place_count());
    CHECK(reparsed.transition_count() == net.transition_count());
  }
}

TEST_CASE("mset grammar") {
  PtiNet net = load_fixture("fig1.pti");
  SECTION("zero denotes the empty multiset") {
    CHECK(parse_marking_expr(net, "0").empty());
  }
  SECTION("coefficients and merging of repeated terms") {
    Multiset m = parse_marking_expr(net, "2*s1 + s2 + s1");
    CHECK(m.count(net.place("s1")) == 3);
    CHECK(m.count(net.place("s2")) == 1);
  }
  SECTION("whitespace is free within the line") {
    CHECK(parse_marking_expr(net, "  2 * s1+s2 ") == parse_marking_expr(net, "2*s1 + s2"));
  }
  SECTION("named markings resolve") {
    CHECK(parse_marking_expr(net, "m0") == *net.find_marking("m0"));
  }
  SECTION("rejects") {
    CHECK_THROWS_AS(parse_marking_expr(net, "s99"), parse_error);
    CHECK_THROWS_AS(parse_marking_expr(net, "0*s1"), parse_error);
    CHECK_THROWS_AS(parse_marking_expr(net, "s1 +"), parse_error);
    CHECK_THROWS_AS(parse_marking_expr(net, "2 s1"), parse_error);
  }
}

TEST_CASE("net parser rejections") {
  SECTION("duplicate place") {
    CHECK_THROWS_AS(parse_net("net x\nplaces: a a\n"), error);
  }
  SECTION("duplicate transition") {
    CHECK_THROWS_AS(parse_net("net x\nplaces: a b\n"
                              "trans t : l ; pre a ; post b\n"
                              "trans t : l ; pre a ; post b\n"),
                    error);
  }
  SECTION("undeclared place in pre-set") {
    CHECK_THROWS_AS(parse_net("net x\nplaces: a\ntrans t : l ; pre z ; post a\n"), parse_error);
  }
  SECTION("undeclared place in inhibitor list") {
    CHECK_THROWS_AS(parse_net("net x\nplaces: a\ntrans t : l ; pre a ; inh z ; post a\n"),
                    parse_error);
  }
  SECTION("empty pre is not representable") {
    CHECK_THROWS_AS(parse_net("net x\nplaces: a\ntrans t : l ; pre 0 ; post a\n"), error);
  }
  SECTION("missing header") {
    CHECK_THROWS_AS(parse_net("places: a\n"), parse_error);
  }
  SECTION("garbage keyword") {
    CHECK_THROWS_AS(parse_net("net x\nplaces: a\nfoo bar\n"), parse_error);
  }
}

TEST_CASE("comments and blank lines are ignored") {
  PtiNet net = parse_net("# heading\nnet x\n\nplaces: a b  # two places\n"
                         "trans t : l ; pre a ; post b # arc\n\n# trailing\n");
  CHECK(net.place_count() == 2);
  CHECK(net.transition_count() == 1);
}

TEST_CASE("relation files parse against the net and round-trip") {
  PtiNet net = load_fixture("fig4.pti");
  PlaceRelation r1 = load_fixture_relation(net, "fig4-r1.rel");
  CHECK(r1.pair_count() == 11);
  CHECK(r1.contains(net.place("s2"), net.place("s2")));
  CHECK_FALSE(r1.contains(net.place("s2"), net.place("s3")));

  std::string text = relation_to_text(net, r1);
  PlaceRelation reparsed = parse_relation(net, text);
  CHECK(reparsed == r1);

  CHECK_THROWS_AS(parse_relation(net, "s1 s99\n"), parse_error);
  CHECK_THROWS_AS(parse_relation(net, "s1\n"), parse_error);
}

TEST_CASE("inhibitor arcs survive the round trip") {
  PtiNet net = load_fixture("fig2-n2.pti");
  const Transition& t2 = net.transition(net.transition_id("t2"));
  CHECK(t2.inhib.test(net.place("s1").index));
  CHECK(t2.inhib.test(net.place("s3").index));
  CHECK(t2.inhib.count() == 2);
  PtiNet reparsed = parse_net(net_to_text(net));
  CHECK(reparsed.transition(reparsed.transition_id("t2")).inhib.count() == 2);
}
