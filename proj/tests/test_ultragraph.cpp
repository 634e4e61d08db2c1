#include "ultra/ultragraph.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace ultra;

namespace {

Ultragraph two_vertex() {
  return Ultragraph(VertexSet::finite({1, 2}),
                    {{1, 1, VertexSet::singleton(2)}, {2, 2, VertexSet::singleton(1)}}, {});
}

/// e_1: v_1 -> {1,2}; e_n: v_n -> {n-1}.
Ultragraph example1_graph() {
  return Ultragraph(VertexSet::tail(1), {{1, 1, VertexSet::finite({1, 2})}}, {{2, 1, {-1}, VertexSet()}});
}

/// e_1: v_1 -> tail(2); e_n: v_n -> {n-1}.
Ultragraph example2_graph() {
  return Ultragraph(VertexSet::tail(1), {{1, 1, VertexSet::tail(2)}}, {{2, 1, {-1}, VertexSet()}});
}

/// e_n: v_n -> {n-1, n+1}; v_1 -> {2} by clipping.
Ultragraph example3_graph() { return Ultragraph(VertexSet::tail(1), {}, {{1, 1, {-1, 1}, VertexSet()}}); }

} // namespace

TEST_CASE("invariants are enforced") {
  CHECK_THROWS_AS(Ultragraph(VertexSet::tail(1), {{2, 2, VertexSet::singleton(1)}}, {{2, 1, {-1}, VertexSet()}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Ultragraph(VertexSet::finite({1}), {{1, 1, VertexSet()}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(Ultragraph(VertexSet::finite({1}), {{1, 1, VertexSet::singleton(1)}, {1, 1, VertexSet::singleton(1)}}, {}),
                  std::invalid_argument);
}

TEST_CASE("regular vertices") {
  CHECK(example1_graph().regular_vertices() == VertexSet::tail(1));
  Ultragraph sink(VertexSet::finite({1, 2}), {{2, 2, VertexSet::singleton(1)}}, {});
  CHECK(sink.regular_vertices() == VertexSet::singleton(2));
  CHECK(two_vertex().regular_vertices() == VertexSet::finite({1, 2}));
}

TEST_CASE("relative ultragraph derives Y and rejects X outside Reg") {
  RelativeUltragraph rg(example3_graph(), VertexSet::progression(1, 2));
  CHECK(rg.Y() == VertexSet::progression(2, 2));
  Ultragraph sink(VertexSet::finite({1, 2}), {{2, 2, VertexSet::singleton(1)}}, {});
  CHECK_THROWS_AS(RelativeUltragraph(sink, VertexSet::singleton(1)), std::invalid_argument);
}

TEST_CASE("lift of the two-vertex graph") {
  RelativeUltragraph rg(two_vertex(), VertexSet::singleton(1));
  LiftedUltragraph gx(rg);
  CHECK(gx.added_vertices() == VertexSet::singleton(2).as_primed());
  CHECK(gx.has_primed_edge(1));
  CHECK_FALSE(gx.has_primed_edge(2));
  EdgeId e1p{1, true};
  CHECK(gx.source(e1p) == 1);
  CHECK(gx.range(e1p) == EXSet(VertexSet(), VertexSet::singleton(2).as_primed()));
  CHECK(gx.regular_vertices() == rg.graph().regular_vertices());
}

TEST_CASE("lift with X = Reg adds nothing") {
  RelativeUltragraph rg(example1_graph(), VertexSet::tail(1));
  LiftedUltragraph gx(rg);
  CHECK(gx.added_vertices().empty());
  CHECK(gx.added_edges_up_to(20).empty());
}

TEST_CASE("lift of the Example 2 graph with X = tail(2)") {
  RelativeUltragraph rg(example2_graph(), VertexSet::tail(2));
  CHECK(rg.Y() == VertexSet::singleton(1));
  LiftedUltragraph gx(rg);
  auto added = gx.added_edges_up_to(20);
  REQUIRE(added.size() == 1);
  CHECK(added[0] == EdgeId{2, true});
  CHECK(gx.range(added[0]) == EXSet(VertexSet(), VertexSet::singleton(1).as_primed()));
}

TEST_CASE("decomposition") {
  RelativeUltragraph rg(example2_graph(), VertexSet::tail(2));
  EXSet z(VertexSet::singleton(1), VertexSet::singleton(1).as_primed());
  Decomposition d = decompose(z, rg);
  CHECK(d.A == VertexSet::singleton(1));
  CHECK(d.BcapY == VertexSet::singleton(1));
  CHECK(recompose(d) == z);

  LiftedUltragraph gx(rg);
  Decomposition r = decompose(gx.range(EdgeId{2, true}), rg);
  CHECK(r.A.empty());
  CHECK(r.BcapY == VertexSet::singleton(1));

  Decomposition plain = decompose(EXSet(VertexSet::tail(3)), rg);
  CHECK(plain.A == VertexSet::tail(3));
  CHECK(plain.BcapY.empty());

  CHECK_THROWS(decompose(EXSet(VertexSet(), VertexSet::singleton(2).as_primed()), rg));
}

TEST_CASE("cycles and Condition (L)") {
  Ultragraph g = two_vertex();
  CycleScope scope{4, 10};
  auto cycles = find_cycles(g, scope);
  REQUIRE_FALSE(cycles.empty());
  CHECK(cycles[0].edges.size() == 2);
  CHECK(cycles[0].simple);
  CHECK_FALSE(has_exit(g, cycles[0]));
  CHECK_FALSE(condition_L(g, scope).holds);

  RelativeUltragraph rg(g, VertexSet::singleton(1));
  ConditionLVerdict rel = relative_condition_L(rg, scope);
  CHECK(rel.holds);
  REQUIRE(rel.meets_Y.size() == rel.exitless.size());
  CHECK(rel.meets_Y[0]);

  // rotations are deduplicated
  for (const Cycle& c : cycles)
    CHECK(c.edges.front().index == 1);
}

TEST_CASE("Example 3 cycle (e_2, e_3) exits through e_1") {
  Ultragraph g = example3_graph();
  Cycle c{{EdgeId{2, false}, EdgeId{3, false}}, true};
  auto exit = has_exit(g, c);
  REQUIRE(exit.has_value());
}

TEST_CASE("Example 1 edges from 2 on are acyclic") {
  Ultragraph g(VertexSet::tail(1), {}, {{2, 1, {-1}, VertexSet()}});
  CHECK(find_cycles(g, {4, 10}).empty());
}

TEST_CASE("equivalence of relative (L) with (L) on the lift") {
  EquivalenceVerdict a = lift_condition_L_equivalence_check(RelativeUltragraph(two_vertex(), VertexSet::singleton(1)), {4, 10});
  CHECK(a.relative_holds);
  CHECK(a.lifted_holds);
  CHECK(a.agree);
  EquivalenceVerdict b = lift_condition_L_equivalence_check(RelativeUltragraph(two_vertex(), VertexSet::finite({1, 2})), {4, 10});
  CHECK_FALSE(b.relative_holds);
  CHECK_FALSE(b.lifted_holds);
  CHECK(b.agree);
  EquivalenceVerdict c = lift_condition_L_equivalence_check(
      RelativeUltragraph(example3_graph(), VertexSet::progression(1, 2)), {6, 12});
  CHECK(c.relative_holds);
  CHECK(c.lifted_holds);
  CHECK(c.agree);
  CHECK(c.same_cycles);
}

TEST_CASE("finiteness of r(e) n Y") {
  RelativeUltragraph rg2(example2_graph(), VertexSet::tail(2));
  CHECK(ranges_meet_Y_finitely(rg2));
  RelativeUltragraph rg3(example3_graph(), VertexSet::progression(1, 2));
  CHECK(ranges_meet_Y_finitely(rg3));
  Ultragraph g(VertexSet::tail(1), {{1, 1, VertexSet::tail(2)}}, {{2, 1, {1}, VertexSet()}});
  RelativeUltragraph bad(g, VertexSet::progression(1, 2));
  CHECK_FALSE(ranges_meet_Y_finitely(bad));
  bool flagged = false;
  for (const EdgeFiniteness& f : range_Y_finiteness(bad))
    if (f.edge == "e1")
      flagged = !f.finite;
  CHECK(flagged);
}
