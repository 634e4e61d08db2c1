#include "ultra/config.hpp"
#include "ultra/markov.hpp"

#include <doctest.h>

#include <algorithm>

using namespace ultra;

namespace {

MarkovMap map_of(const std::string& text) { return *parse_config(text).map; }

MarkovMap fixture(const std::string& name) {
  return *load_config(std::string(FIXTURE_DIR) + "/" + name + ".cfg").map;
}

std::string example1_with(const std::string& first_piece) {
  return "[map]\nambient = [0, inf)\ninterval 1 = [0, 1]\n" + first_piece +
         "\nfor n>=2: I_n = [2n-2, 2n-1], g = x-2\n";
}

Rational q(long a, long b = 1) { return Rational(a, b); }

std::vector<std::pair<Rational, int>> levels(const OrbitTree& t) {
  std::vector<std::pair<Rational, int>> out;
  for (const OrbitNode& n : t.nodes)
    out.push_back({n.point, n.depth});
  return out;
}

} // namespace

TEST_CASE("Example 1 is certified") {
  MarkovMap m = fixture("example1");
  Certification c = validate_markov(m, 32);
  CHECK(c.certified);
  CHECK(c.violations.empty());
  CHECK(transition_row(m, 1).row == VertexSet::finite({1, 2}));
}

TEST_CASE("partial overlap of I_2 violates condition (3)") {
  MarkovMap m = map_of(example1_with("on [0, 1]: (5/2)x"));
  Certification c = validate_markov(m, 32);
  CHECK_FALSE(c.certified);
  auto it = std::find_if(c.violations.begin(), c.violations.end(),
                         [](const Violation& v) { return v.condition == 3; });
  REQUIRE(it != c.violations.end());
  CHECK(it->interval == 1);
  CHECK(it->witness == q(5, 2));
}

TEST_CASE("g(I_1) = [0, 3/2] stops inside the gap") {
  MarkovMap m = map_of(example1_with("on [0, 1]: (3/2)x"));
  Certification c = validate_markov(m, 32);
  CHECK_FALSE(c.certified);
  for (const Violation& v : c.violations)
    CHECK(v.condition == 2);
}

TEST_CASE("an endpoint image outside Gamma violates condition (2)") {
  MarkovMap m = map_of(example1_with("on [0, 1): 3x\nat 1 -> 3/2"));
  Certification c = validate_markov(m, 32);
  CHECK_FALSE(c.certified);
  auto it = std::find_if(c.violations.begin(), c.violations.end(),
                         [](const Violation& v) { return v.condition == 2; });
  REQUIRE(it != c.violations.end());
  CHECK(it->witness == q(3, 2));
}

TEST_CASE("condition (1) geometry") {
  CHECK_FALSE(validate_markov(map_of("[map]\nambient = [1, 5)\ninterval 1 = [0, 1]\non [0, 1]: x\n"), 8).certified);
  CHECK_FALSE(validate_markov(map_of("[map]\nambient = [0, 5)\ninterval 1 = [0, 2]\ninterval 2 = [1, 3]\n"
                                     "on [0, 2]: x\non [1, 3]: x\n"), 8).certified);
}

TEST_CASE("non-injective branch violates condition (2)") {
  MarkovMap m = map_of("[map]\nambient = [0, 2)\ninterval 1 = [0, 1]\non [0, 1/2]: 2x\non (1/2, 1]: -2x+2\n");
  CHECK_FALSE(validate_markov(m, 8).certified);
}

TEST_CASE("transition matrices of the three examples") {
  TransitionMatrix t1 = transition_matrix(fixture("example1"), 32);
  CHECK(t1.rows[0] == VertexSet::finite({1, 2}));
  for (Index n = 2; n <= 32; ++n)
    CHECK(t1.rows[n - 1] == VertexSet::singleton(n - 1));

  TransitionMatrix t2 = transition_matrix(fixture("example2"), 32);
  CHECK(t2.rows[0] == VertexSet::tail(2));
  for (Index n = 2; n <= 32; ++n)
    CHECK(t2.rows[n - 1] == VertexSet::singleton(n - 1));

  TransitionMatrix t3 = transition_matrix(fixture("example3"), 32);
  CHECK(t3.rows[0] == VertexSet::singleton(2));
  for (Index n = 2; n <= 32; ++n)
    CHECK(t3.rows[n - 1] == VertexSet::finite({n - 1, n + 1}));
}

TEST_CASE("induced ultragraphs") {
  MarkovMap m1 = fixture("example1");
  Ultragraph g1 = induced_ultragraph(transition_matrix(m1, 32), m1);
  CHECK(g1.edge_range(1) == VertexSet::finite({1, 2}));
  CHECK(g1.edge_range(100) == VertexSet::singleton(99));

  MarkovMap m3 = fixture("example3");
  Ultragraph g3 = induced_ultragraph(transition_matrix(m3, 32), m3);
  CHECK(g3.edge_range(1) == VertexSet::singleton(2));
  CHECK(g3.edge_range(50) == VertexSet::finite({49, 51}));

  MarkovMap one = fixture("single_interval");
  Ultragraph g = induced_ultragraph(transition_matrix(one, 32), one);
  CHECK(g.vertices() == VertexSet::singleton(1));
  CHECK(g.edge_ids() == VertexSet::singleton(1));
  CHECK(g.edge_range(1) == VertexSet::singleton(1));
}

TEST_CASE("escape data") {
  auto e1 = escape_data(fixture("example1"), q(1, 2), 64).data;
  REQUIRE(e1);
  CHECK(e1->tau == 1);
  CHECK(e1->J == 1);
  CHECK(e1->target == q(3, 2));

  auto e2 = escape_data(fixture("example2"), q(17, 8), 64).data;
  REQUIRE(e2);
  CHECK(e2->tau == 2);
  CHECK(e2->J == 1);
  CHECK(e2->target == q(3, 2));

  auto e3 = escape_data(fixture("example3"), q(5, 2), 64).data;
  REQUIRE(e3);
  CHECK(e3->tau == 1);
  CHECK(e3->J == 2);
  CHECK(e3->target == q(7, 2));

  // 0 is fixed by 3x, so it never escapes
  EscapeResult stuck = escape_data(fixture("example1"), q(0), 10);
  CHECK_FALSE(stuck.data);
  CHECK(stuck.bound == 10);
}

TEST_CASE("preimages of gaps and points") {
  MarkovMap m1 = fixture("example1");
  PreimageIntervals p1 = preimage_set(m1, m1.gap(1), 32);
  REQUIRE(p1.parts.size() == 1);
  CHECK(p1.parts[0].first == 1);
  CHECK(p1.parts[0].second == Interval::open(q(1, 3), q(2, 3)));
  CHECK(p1.beyond.empty());

  MarkovMap m2 = fixture("example2");
  PreimageIntervals p2 = preimage_set(m2, m2.gap(1), 32);
  REQUIRE(p2.parts.size() == 1);
  CHECK(p2.parts[0].second == Interval::open(q(0), q(1, 2)));

  PreimagePoints pts = preimage_set(m1, q(3, 2), 32);
  REQUIRE(pts.points.size() == 1);
  CHECK(pts.points[0] == PreimagePoint{q(1, 2), 1});
  CHECK_FALSE(pts.overflow);

  for (const Rational& y : {q(1, 2), q(5, 2), q(1, 6)})
    for (const PreimagePoint& p : preimage_set(m1, y, 32).points)
      CHECK(m1.eval(p.point) == y);
}

TEST_CASE("Example 1 backward orbit to depth 3") {
  MarkovMap m = fixture("example1");
  OrbitTree t = backward_orbit(m, q(3, 2), 3, 32);
  std::vector<std::pair<Rational, int>> expect{{q(1, 2), 1},   {q(1, 6), 2},  {q(5, 2), 2},
                                               {q(1, 18), 3},  {q(5, 6), 3},  {q(13, 6), 3},
                                               {q(9, 2), 3}};
  CHECK(levels(t) == expect);
  CHECK(orbit_invariant_failures(m, t).empty());
  CHECK(t.recurrences.empty());
}

TEST_CASE("Example 2 level one") {
  MarkovMap m = fixture("example2");
  OrbitTree t = backward_orbit(m, q(3, 2), 2, 32);
  REQUIRE_FALSE(t.nodes.empty());
  CHECK(t.nodes[0].point == q(1, 4));
  CHECK(t.nodes[0].interval == 1);
  CHECK(std::count_if(t.nodes.begin(), t.nodes.end(), [](const OrbitNode& n) { return n.depth == 1; }) == 1);
  for (const OrbitNode& n : t.nodes)
    if (n.depth == 2)
      CHECK(n.image == q(1, 4));
  CHECK(m.eval(q(9, 16)) == q(17, 8));
}

TEST_CASE("a target without preimages gives an empty tree") {
  MarkovMap m = fixture("example1");
  OrbitTree t = backward_orbit(m, q(1001, 2), 4, 8); // only I_502 maps onto it
  CHECK(t.nodes.empty());
  CHECK_FALSE(t.overflows.empty());
}

TEST_CASE("hypothesis on X") {
  MarkovMap m1 = fixture("example1");
  EscapeData e1 = *escape_data(m1, q(1, 2), 64).data;
  CHECK(x_hypothesis_check(m1, e1, VertexSet::tail(2), 32).holds());
  HypothesisResult bad = x_hypothesis_check(m1, e1, VertexSet::tail(1), 32);
  CHECK_FALSE(bad.holds());
  REQUIRE_FALSE(bad.entries.empty());
  CHECK(bad.entries[0].vertex == 1);
  CHECK_FALSE(bad.entries[0].holds);
  CHECK(bad.entries[0].witness == q(1, 2));

  MarkovMap m3 = fixture("example3");
  EscapeData e3 = *escape_data(m3, q(5, 2), 64).data;
  CHECK(x_hypothesis_check(m3, e3, VertexSet::progression(1, 2), 32).holds());
  CHECK_FALSE(x_hypothesis_check(m3, e3, VertexSet::singleton(2), 32).holds());
}

TEST_CASE("g(I_i) n I_j is empty, one Gamma point, or all of I_j") {
  for (const char* name : {"example1", "example2", "example3"}) {
    MarkovMap m = fixture(name);
    for (Index i = 1; i <= 12; ++i) {
      std::vector<Interval> image;
      for (const Piece& p : m.effective_pieces(i))
        image.push_back(p.image());
      for (Index j = 1; j <= 14; ++j) {
        Interval I = m.interval(j);
        std::vector<Interval> bits;
        for (const Interval& c : image)
          if (Interval x = intersect(c, I); !x.empty())
            bits.push_back(x);
        bool whole = transition_row(m, i).row.contains(j);
        bool points = std::all_of(bits.begin(), bits.end(),
                                  [&](const Interval& b) { return b.is_point() && m.in_gamma(b.lo); });
        CAPTURE(name);
        CAPTURE(i);
        CAPTURE(j);
        CHECK((whole || points));
      }
    }
  }
}

TEST_CASE("Example 2 boundary overrides") {
  MarkovMap m = fixture("example2");
  CHECK(m.eval(q(0)) == q(2));
  CHECK(m.eval(q(1)) == q(2));
  CHECK(m.eval(q(1, 4)) == q(3, 2));
  // 5/2 is shared by I_2 and I_3; the lowest index wins
  CHECK(m.locate(q(5, 2)) == std::vector<Index>{2, 3});
  CHECK(m.eval(q(5, 2)) == q(1));
}
