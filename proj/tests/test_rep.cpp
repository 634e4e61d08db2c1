#include "ultra/config.hpp"
#include "ultra/rep.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace ultra;
using G = GeneratorSymbol;

namespace {

Rational q(long a, long b = 1) { return Rational(a, b); }

struct Fixture {
  Workspace ws;
  MarkovMap m;
  EscapeData ed;
  Ultragraph graph;
  explicit Fixture(const std::string& name)
      : ws(load_config(std::string(FIXTURE_DIR) + "/" + name + ".cfg")), m(*ws.map),
        ed(*escape_data(m, *ws.run.x, 64).data), graph(induced_ultragraph(transition_matrix(m, 32), m)) {}
  VertexSet X() const { return *ws.run.X; }
  RelativeUltragraph rg() const { return RelativeUltragraph(graph, X()); }
};

/// Points hit by column y of M (M applied to delta_y).
std::set<Rational> apply(const MatrixRep& rep, const SparseMatrix& M, const Rational& y) {
  std::set<Rational> out;
  auto idx = rep.index_of(y);
  REQUIRE(idx.has_value());
  for (const auto& [row, v] : M.column(*idx)) {
    CHECK(v == 1);
    out.insert(rep.basis()[row].point);
  }
  return out;
}

std::set<Rational> points(const BranchingSystem& bs, const PointSet& s) {
  std::set<Rational> out;
  for (std::size_t k : s)
    out.insert(bs.points[k].point);
  return out;
}

} // namespace

TEST_CASE("Markov operators on the Example 1 tree") {
  Fixture f("example1");
  MatrixRep rep = build_markov_rep(f.m, f.ed, f.X(), 3, 32);
  CHECK(rep.size() == 7);
  CHECK(apply(rep, rep.matrix(G::s(2)), q(1, 2)) == std::set<Rational>{q(5, 2)});
  CHECK(apply(rep, rep.matrix(G::s(1)), q(1, 2)) == std::set<Rational>{q(1, 6)});
  CHECK(apply(rep, rep.matrix(G::s_star(1)), q(1, 2)).empty());
  CHECK(apply(rep, rep.matrix(G::p(f.graph.edge_range(2))), q(1, 2)) == std::set<Rational>{q(1, 2)});
  SparseMatrix tt = rep.matrix(G::s_star(2)) * rep.matrix(G::s(2));
  CHECK(apply(rep, tt, q(1, 2)) == std::set<Rational>{q(1, 2)});
  CHECK(rep.matrix(G::p(VertexSet())).is_zero());
  CHECK(rep.matrix(G::s_star(2)) == rep.matrix(G::s(2)).transpose());
}

TEST_CASE("the hypothesis on X is enforced") {
  Fixture f("example1");
  try {
    build_markov_rep(f.m, f.ed, VertexSet::tail(1), 3, 32);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("v1") != std::string::npos);
  }
}

TEST_CASE("inverse branches") {
  Fixture f("example2");
  CHECK(inverse_branch(f.m, 1, q(2)) == q(0)); // overridden end point
  CHECK(inverse_branch(f.m, 3, q(17, 8)) == q(41, 16));
  CHECK(inverse_branch(f.m, 2, q(3)) == std::nullopt);
  CHECK(inverse_branch(f.m, 1, q(17, 8)) == q(9, 16));
}

TEST_CASE("branching system of Example 1") {
  Fixture f("example1");
  BranchingSystem bs = branching_from_markov(f.m, f.ed, 3, 32);
  CHECK(points(bs, bs.D.at(1)) == std::set<Rational>{q(1, 2), q(1, 6), q(1, 18), q(5, 6)});
  CHECK(points(bs, bs.D.at(2)) == std::set<Rational>{q(5, 2), q(13, 6)});
  CHECK(points(bs, bs.D.at(3)) == std::set<Rational>{q(9, 2)});
  CHECK(points(bs, bs.R_of(2)) == std::set<Rational>{q(5, 2), q(13, 6)});
  CHECK(points(bs, bs.D_of(VertexSet::finite({2, 3}))) == std::set<Rational>{q(5, 2), q(13, 6), q(9, 2)});
  Report r = validate_branching(bs, f.rg());
  CHECK(r.all_hold());
}

TEST_CASE("branching representation matches the branching data") {
  Fixture f("example1");
  BranchingSystem bs = branching_from_markov(f.m, f.ed, 4, 32);
  MatrixRep pi = rep_from_branching(bs, f.graph);
  for (Index e = 1; e <= 3; ++e) {
    SparseMatrix ss = pi.matrix(G::s(e)) * pi.matrix(G::s_star(e));
    PointSet R = bs.R_of(e);
    for (std::size_t k = 0; k < bs.points.size(); ++k) {
      // s s* is the indicator of R_e below the top level
      if (bs.points[k].depth >= 4)
        continue;
      CHECK((ss.get(k, k) == 1) == (R.count(k) == 1));
    }
  }
}

TEST_CASE("lift with Y empty is the base system") {
  Fixture f("example1");
  BranchingSystem bs = branching_from_markov(f.m, f.ed, 4, 32);
  RelativeUltragraph rg(f.graph, VertexSet::tail(1));
  LiftedBranchingSystem l(bs, rg);
  for (Index v = 1; v <= 4; ++v)
    CHECK(l.B(EXSet(VertexSet::singleton(v))) == bs.D.at(v));
  for (Index e = 1; e <= 4; ++e) {
    PointSet img;
    for (const auto& [y, z] : bs.f.at(e))
      img.insert(z);
    CHECK(l.Q(EdgeId{e, false}) == img);
    CHECK(l.Q(EdgeId{e, true}).empty());
  }
}

TEST_CASE("lifted Example 2 system") {
  Fixture f("example2");
  BranchingSystem bs = branching_from_markov(f.m, f.ed, 6, 32);
  LiftedBranchingSystem l = lift_branching(bs, f.rg());
  PointSet residual;
  for (std::size_t k : bs.D.at(1))
    if (!bs.R_of(1).count(k))
      residual.insert(k);
  CHECK(l.B(EXSet(VertexSet(), VertexSet::singleton(1).as_primed())) == residual);
  PointSet image;
  for (std::size_t y : residual)
    if (auto it = bs.f.at(2).find(y); it != bs.f.at(2).end())
      image.insert(it->second);
  CHECK(l.Q(EdgeId{2, true}) == image);
  CHECK_FALSE(image.empty());
  CHECK(l.disjointness_checks(default_scope(f.rg(), 5).sets).all_hold());
}

TEST_CASE("lift needs finite r(e) n Y") {
  BranchingSystem bs;
  bs.horizon = 4;
  Ultragraph g(VertexSet::tail(1), {{1, 1, VertexSet::tail(2)}}, {{2, 1, {1}, VertexSet()}});
  RelativeUltragraph rg(g, VertexSet::progression(1, 2));
  CHECK_THROWS_AS(LiftedBranchingSystem(bs, rg), std::domain_error);
}

TEST_CASE("nu equals pi") {
  for (const char* name : {"example1", "example3", "single_interval"}) {
    CAPTURE(name);
    Fixture f(name);
    Report r = check_nu_equals_pi(f.m, f.ed, f.X(), 6, 32);
    CHECK(r.all_hold());
    CHECK(r.count(Verdict::Holds) >= 1);
  }
}

TEST_CASE("diagram on Example 2") {
  Fixture f("example2");
  LiftedBranchingSystem l = lift_branching(branching_from_markov(f.m, f.ed, 6, 32), f.rg());
  Report r = check_diagram(l, default_scope(f.rg(), 5));
  CHECK(r.all_hold());
  CHECK(r.count(Verdict::Holds) >= 1);
}

TEST_CASE("axiom check catches a broken system") {
  Fixture f("example2");
  BranchingSystem bs = branching_from_markov(f.m, f.ed, 6, 32);
  bs.R[2].clear(); // f_e2 now maps into nothing
  Report r = validate_branching(bs, f.rg());
  CHECK(r.count(Verdict::Fails) > 0);
}

TEST_CASE("Markov injectivity verdicts") {
  InjectivityScope scope;
  scope.cycles = {4, 10};
  {
    Fixture f("example1");
    InjectivityVerdict v = injectivity_markov(f.m, f.ed, f.X(), 6, 32, scope);
    CHECK(v.overall() == Verdict::Holds);
    const CheckRecord* c2 = v.report.find("injectivity.cond2", "v1");
    REQUIRE(c2);
    CHECK(c2->witnesses[0].second == "1/6");
    const CheckRecord* c3 = v.report.find("injectivity.cond3", "v1");
    REQUIRE(c3);
    CHECK(c3->witnesses[0].second == "1/2");
  }
  {
    Fixture f("example2_negative");
    InjectivityVerdict v = injectivity_markov(f.m, f.ed, f.X(), 6, 32, scope);
    CHECK(v.conditions.at("3") == Verdict::Fails);
    const CheckRecord* c3 = v.report.find("injectivity.cond3", "v2");
    REQUIRE(c3);
    CHECK(c3->verdict == Verdict::Fails);
    CHECK(v.overall() == Verdict::Fails);
  }
  {
    Fixture f("example3");
    InjectivityVerdict v = injectivity_markov(f.m, f.ed, f.X(), 6, 32, scope);
    CHECK(v.overall() == Verdict::Holds);
    for (const char* k : {"1", "2", "3", "4"})
      CHECK(v.conditions.at(k) == Verdict::Holds);
  }
}

TEST_CASE("counting-measure verdicts agree with the Markov verdicts") {
  InjectivityScope scope;
  scope.cycles = {4, 10};
  scope.vertices = 4;
  for (const char* name : {"example1", "example2_negative", "example3"}) {
    CAPTURE(name);
    Fixture f(name);
    InjectivityVerdict mk = injectivity_markov(f.m, f.ed, f.X(), 6, 32, scope);
    InjectivityVerdict ct = injectivity_counting(branching_from_markov(f.m, f.ed, 6, 32), f.rg(), scope);
    CHECK(mk.conditions.at("1") == ct.conditions.at("a"));
    CHECK(mk.conditions.at("3") == ct.conditions.at("c"));
    CHECK(mk.overall() == ct.overall());
  }
}

TEST_CASE("a loop whose branch is the identity is not injective") {
  BranchingSystem bs;
  bs.points = {{q(1, 2), 1, 1}, {q(1, 3), 1, 1}};
  bs.complete_depth = 2;
  bs.horizon = 1;
  bs.residual_complete = true;
  bs.D[1] = {0, 1};
  bs.R[1] = {0, 1};
  bs.f[1] = {{0, 0}, {1, 1}};
  Ultragraph g(VertexSet::singleton(1), {{1, 1, VertexSet::singleton(1)}}, {});
  RelativeUltragraph rg(g, VertexSet::singleton(1));
  InjectivityScope scope;
  scope.cycles = {3, 1};
  InjectivityVerdict v = injectivity_counting(bs, rg, scope);
  CHECK(v.conditions.at("d") == Verdict::Fails);
  // empty Y: b) and c) have nothing to check
  CHECK(v.conditions.at("b") == Verdict::Holds);
  CHECK(v.conditions.at("c") == Verdict::Holds);
}
