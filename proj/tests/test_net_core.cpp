#include <catch2/catch.hpp>

#include "fixtures.hpp"
#include "pti/oracles.hpp"
#include "pti/token_game.hpp"

using namespace pti;

namespace {

Multiset ms(const PtiNet& net, const std::string& expr) { return parse_marking_expr(net, expr); }

}  // namespace

TEST_CASE("multiset algebra") {
  PtiNet net = load_fixture("fig1.pti");
  PlaceId s1 = net.place("s1"), s2 = net.place("s2"), s3 = net.place("s3");

  SECTION("subtraction truncates at zero") {
    Multiset a = ms_add(Multiset::of(s1), Multiset::of(s2));
    CHECK(ms_sub(a, ms_scale(2, Multiset::of(s1))) == Multiset::of(s2));
  }
  SECTION("empty marking is the unit of addition") {
    Multiset m = ms(net, "2*s1 + s3");
    CHECK(ms_add(Multiset(), m) == m);
    CHECK(ms_add(m, Multiset()) == m);
  }
  SECTION("componentwise comparison") {
    CHECK(ms_leq(Multiset::of(s2), ms_add(Multiset::of(s2), Multiset::of(s3))));
    CHECK_FALSE(ms_leq(ms_scale(2, Multiset::of(s2)), Multiset::of(s2)));
  }
  SECTION("size bookkeeping") {
    Multiset m = ms(net, "2*s1 + 3*s3");
    CHECK(m.total() == 5);
    CHECK(m.support_size() == 2);
    CHECK(m.count(s2) == 0);
  }
  SECTION("scaling by zero clears") {
    CHECK(ms_scale(0, ms(net, "2*s1 + s2")).empty());
  }
  SECTION("no silent overflow") {
    Multiset huge = Multiset::of(s1, ~Count(0));
    CHECK_THROWS_AS(ms_add(huge, Multiset::of(s1)), error);
    CHECK_THROWS_AS(ms_scale(2, huge), error);
  }
}

TEST_CASE("multiset algebra properties hold on random instances") {
  oracles::GenConfig cfg;
  cfg.seed = 7;
  PtiNet net = oracles::random_net(cfg);
  for (std::uint64_t i = 0; i < 500; ++i) {
    oracles::GenConfig c1 = cfg, c2 = cfg;
    c1.seed = 1000 + i;
    c2.seed = 2000 + i;
    Multiset a = oracles::random_marking(c1, net, i % 5);
    Multiset b = oracles::random_marking(c2, net, (i + 2) % 4);
    // subtracting a summand recovers the other one exactly
    CHECK(ms_sub(ms_add(a, b), b) == a);
    CHECK(ms_leq(a, ms_add(a, b)));
    CHECK(ms_add(a, b).total() == a.total() + b.total());
  }
}

TEST_CASE("token game on the fig1 net") {
  PtiNet net = load_fixture("fig1.pti");
  Multiset m0 = *net.find_marking("m0");
  TransitionId t1 = net.transition_id("t1"), t2 = net.transition_id("t2"),
               t3 = net.transition_id("t3");

  SECTION("enabling tests tokens and absence") {
    CHECK(enabled(net, m0, t2));                      // no token in the inhibiting place
    CHECK(enabled(net, m0, t1));
    CHECK_FALSE(enabled(net, ms(net, "s2 + s3"), t2));  // s2 marked: inhibited
    CHECK_FALSE(enabled(net, Multiset(), t1));          // empty marking enables nothing
    CHECK_FALSE(enabled(net, Multiset(), t2));
  }

  SECTION("unknown ids are lookup errors") {
    CHECK_THROWS_AS(enabled(net, m0, TransitionId(99)), lookup_error);
    CHECK_THROWS_AS(net.transition_id("nope"), lookup_error);
  }

  SECTION("firing moves tokens") {
    CHECK(fire(net, m0, t1) == ms(net, "s2 + s3"));
    CHECK(fire(net, m0, t2) == ms(net, "s1 + s4"));
  }

  SECTION("firing a disabled transition names the failing clause") {
    try {
      fire(net, ms(net, "s2 + s3"), t2);
      FAIL("expected fire_error");
    } catch (const fire_error& e) {
      CHECK(e.reason() == fire_error::Reason::inhibited);
      CHECK(e.place() == net.place("s2"));
    }
    try {
      fire(net, ms(net, "s1"), t2);
      FAIL("expected fire_error");
    } catch (const fire_error& e) {
      CHECK(e.reason() == fire_error::Reason::missing_tokens);
      CHECK(e.place() == net.place("s3"));
    }
  }

  SECTION("firing sequences fold and report the failing index") {
    std::vector<TransitionId> seq{t1, t3, t2};
    CHECK(fire_sequence(net, m0, seq) == ms(net, "s4 + s5"));
    CHECK(fire_sequence(net, m0, {}) == m0);
    std::vector<TransitionId> bad{t2, t2};
    try {
      fire_sequence(net, m0, bad);
      FAIL("expected sequence_error");
    } catch (const sequence_error& e) {
      CHECK(e.index() == 1);
      CHECK(e.reason() == fire_error::Reason::missing_tokens);
    }
  }

  SECTION("size arithmetic of firing") {
    Multiset m = fire(net, m0, t1);
    CHECK(m.total() == m0.total() - net.transition(t1).pre.total() +
                           net.transition(t1).post.total());
  }

  SECTION("enabledness is not monotone in the marking") {
    CHECK(enabled(net, ms(net, "s3"), t2));
    CHECK_FALSE(enabled(net, ms(net, "s2 + s3"), t2));
  }
}

TEST_CASE("bounded reachability") {
  PtiNet net = load_fixture("fig1.pti");
  Multiset m0 = *net.find_marking("m0");

  SECTION("fig1 has six reachable markings") {
    Reachability r = reachable_bounded(net, m0, 100, 10);
    CHECK(r.markings.size() == 6);
    CHECK_FALSE(r.truncated);
  }

  SECTION("marking budget of one keeps only the start") {
    Reachability r = reachable_bounded(net, m0, 1, 10);
    CHECK(r.markings.size() == 1);
    CHECK(r.markings[0] == m0);
    CHECK(r.truncated);  // t1 and t2 were enabled
  }

  SECTION("every discovered marking replays through its parent chain") {
    Reachability r = reachable_bounded(net, m0, 100, 10);
    for (std::size_t i = 0; i < r.markings.size(); ++i) {
      std::vector<TransitionId> seq;
      std::size_t at = i;
      while (r.parents[at]) {
        seq.push_back(r.parents[at]->second);
        at = r.parents[at]->first;
      }
      std::reverse(seq.begin(), seq.end());
      CHECK(fire_sequence(net, m0, seq) == r.markings[i]);
    }
  }
}

TEST_CASE("unbounded producer loop trips the size cap") {
  PtiNet net = load_fixture("fig3-upac-upbc.pti");
  Reachability r = reachable_bounded(net, *net.find_marking("upac"), 50, 10);
  CHECK(r.truncated);
}

TEST_CASE("dead transitions are flagged, not rejected") {
  NetBuilder b("dead");
  PlaceId s = b.add_place("s");
  PlaceId q = b.add_place("q");
  TransitionId t = b.add_transition("t", "a", Multiset::of(s), {s}, Multiset::of(q));
  TransitionId u = b.add_transition("u", "a", Multiset::of(s), {q}, Multiset::of(q));
  PtiNet net = b.build();
  CHECK(net.is_dead(t));
  CHECK_FALSE(net.is_dead(u));
  CHECK_FALSE(enabled(net, Multiset::of(s, 5), t));  // never enabled anywhere
}

TEST_CASE("builder rejects malformed nets") {
  NetBuilder b("bad");
  PlaceId s = b.add_place("s");
  CHECK_THROWS_AS(b.add_place("s"), error);
  CHECK_THROWS_AS(b.add_transition("t", "a", Multiset(), {}, Multiset::of(s)), error);
  CHECK_THROWS_AS(b.add_transition("t", "a", Multiset::of(s), {}, Multiset()), error);
}
