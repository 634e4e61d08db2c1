#include "ultra/config.hpp"
#include "ultra/relations.hpp"
#include "ultra/rep.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace ultra;
using G = GeneratorSymbol;

namespace {

Ultragraph example2_graph() {
  return Ultragraph(VertexSet::tail(1), {{1, 1, VertexSet::tail(2)}}, {{2, 1, {-1}, VertexSet()}});
}

StarPolynomial sym(const G& g) { return StarPolynomial(g); }

struct Fixture {
  Workspace ws;
  EscapeData ed;
  Ultragraph graph;
  explicit Fixture(const std::string& name)
      : ws(load_config(std::string(FIXTURE_DIR) + "/" + name + ".cfg")),
        ed(*escape_data(*ws.map, *ws.run.x, 64).data),
        graph(induced_ultragraph(transition_matrix(*ws.map, 32), *ws.map)) {}
  RelativeUltragraph rg() const { return RelativeUltragraph(graph, *ws.run.X); }
  MatrixRep rep(int depth = 6, Index horizon = 32) const {
    return build_markov_rep(*ws.map, ed, *ws.run.X, depth, horizon);
  }
};

} // namespace

TEST_CASE("phi on generators of Example 2 with Y = {1}") {
  RelativeUltragraph rg(example2_graph(), VertexSet::tail(2));
  CHECK(phi_image(G::s(1), rg) == sym(G::S(EdgeId{1, false})));
  CHECK(phi_image(G::s(2), rg) == sym(G::S(EdgeId{2, false})) + sym(G::S(EdgeId{2, true})));
  CHECK(phi_image(G::p(VertexSet::singleton(1)), rg) ==
        sym(G::P(EXSet(VertexSet::singleton(1)))) +
            sym(G::P(EXSet(VertexSet(), VertexSet::singleton(1).as_primed()))));
  CHECK(phi_image(G::s_star(2), rg) == phi_image(G::s(2), rg).adjoint());
}

TEST_CASE("psi on generators of Example 2 with Y = {1}") {
  RelativeUltragraph rg(example2_graph(), VertexSet::tail(2));
  StarPolynomial q1 = sym(G::p(VertexSet::singleton(1))) - sym(G::s(1)) * sym(G::s_star(1));
  CHECK(q_of(1, rg.graph()) == q1);
  CHECK(psi_image(G::P(EXSet(VertexSet(), VertexSet::singleton(1).as_primed())), rg) == q1);
  StarPolynomial se2p = psi_image(G::S(EdgeId{2, true}), rg);
  CHECK(se2p == sym(G::s(2)) * q1);
  CHECK(se2p.terms().size() == 2);
  CHECK(psi_image(G::P(EXSet(VertexSet::tail(3))), rg) == sym(G::p(VertexSet::tail(3))));
}

TEST_CASE("psi rejects infinite correction sums") {
  Ultragraph g(VertexSet::tail(1), {{1, 1, VertexSet::tail(2)}}, {{2, 1, {1}, VertexSet()}});
  RelativeUltragraph rg(g, VertexSet::progression(1, 2));
  CHECK_THROWS_AS(psi_image(G::P(EXSet(VertexSet::tail(1))), rg), std::domain_error);
}

TEST_CASE("q_of rejects vertices that are not regular") {
  Ultragraph sink(VertexSet::finite({1, 2}), {{2, 2, VertexSet::singleton(1)}}, {});
  CHECK_THROWS(q_of(1, sink));
}

TEST_CASE("evaluation on the Example 1 representation") {
  Fixture f("example1");
  MatrixRep rep = f.rep(4, 32);
  StarPolynomial boolean = sym(G::p(VertexSet::finite({1, 2}))) * sym(G::p(VertexSet::tail(2))) -
                           sym(G::p(VertexSet::singleton(2)));
  Evaluation e = evaluate(boolean, rep);
  CHECK(e.matrix.is_zero());
  CHECK(e.safe_depth == 4);

  StarPolynomial ss = sym(G::s_star(2)) * sym(G::s(2)) - sym(G::p(f.graph.edge_range(2)));
  ZeroCheck z = check_zero(ss, rep);
  CHECK(z.zero);
  CHECK(z.safe_depth == 3);

  // CK fails at v_1 (not in X): 1/2 lies in I_1 but g(1/2) escapes
  ZeroCheck ck1 = check_zero(q_of(1, f.graph), rep);
  CHECK_FALSE(ck1.zero);
  REQUIRE(ck1.witness.has_value());
  CHECK(ck1.witness->point == Rational(1, 2));
  CHECK(check_zero(q_of(3, f.graph), rep).zero);
}

TEST_CASE("q products vanish off the diagonal") {
  Fixture f("example1");
  MatrixRep rep = f.rep();
  StarPolynomial q1 = q_of(1, f.graph), q2 = q_of(2, f.graph);
  CHECK(check_zero(q1 * q2, rep).zero);
  CHECK(check_zero(q1 * q1 - q1, rep).zero);
}

TEST_CASE("evaluation commutes with the adjoint") {
  Fixture f("example3");
  MatrixRep rep = f.rep(5, 16);
  StarPolynomial p = sym(G::s(2)) * sym(G::s(3)) * sym(G::s_star(4)) + 2 * sym(G::s_star(1));
  SparseMatrix a = evaluate_word({G::s(2), G::s(3), G::s_star(4)}, rep);
  SparseMatrix b = evaluate_word({G::s(4), G::s_star(3), G::s_star(2)}, rep);
  CHECK(a.transpose() == b);
  CHECK(p.adjoint().adjoint() == p);
}

TEST_CASE("guard band errors when nothing is safe") {
  Fixture f("example1");
  MatrixRep rep = f.rep(2, 32);
  Word deep{G::s(1), G::s(1), G::s(1)};
  StarPolynomial p;
  p.add_term(deep, 1);
  CHECK_THROWS_AS(evaluate(p, rep), GuardBandError);
}

TEST_CASE("relation suite on Example 1 holds") {
  Fixture f("example1");
  MatrixRep rep = f.rep(6, 12);
  Report r = relation_suite(rep, f.rg(), default_scope(f.rg(), 6));
  CHECK(r.all_hold());
  CHECK(r.count(Verdict::Holds) > 10);
}

TEST_CASE("relation suite catches a zeroed operator") {
  Fixture f("example1");
  MatrixRep rep = f.rep(6, 12);
  rep.override_symbol(G::s(1), SparseMatrix(rep.size()));
  rep.override_symbol(G::s_star(1), SparseMatrix(rep.size()));
  Report r = relation_suite(rep, f.rg(), default_scope(f.rg(), 6));
  CHECK(r.count(Verdict::Fails) > 0);
  bool witnessed = false;
  for (const CheckRecord& c : r.records())
    if (c.verdict == Verdict::Fails && !c.witnesses.empty())
      witnessed = true;
  CHECK(witnessed);
}

TEST_CASE("psi after phi is the identity on Example 2") {
  Fixture f("example2");
  MatrixRep rep = f.rep();
  RelativeUltragraph rg = f.rg();
  StarPolynomial back = psi(phi(sym(G::p(VertexSet::singleton(1))), rg), rg);
  CHECK(check_zero(back - sym(G::p(VertexSet::singleton(1))), rep).zero);
  // formally s_e1 p_{r(e1)}, equal to s_e1 in the algebra
  CHECK(check_zero(psi(phi(sym(G::s(1)), rg), rg) - sym(G::s(1)), rep).zero);
  Report r = psi_phi_identity_check(rep, rg, default_scope(rg, 5));
  CHECK(r.all_hold());
}

TEST_CASE("projections are diagonal idempotents and isometries partial permutations") {
  Fixture f("example2");
  MatrixRep rep = f.rep();
  for (Index e = 1; e <= 5; ++e) {
    CHECK(rep.matrix(G::s(e)).is_partial_permutation());
    CHECK(rep.matrix(G::p(VertexSet::singleton(e))).is_diagonal_01());
  }
  CHECK(rep.matrix(G::p(VertexSet())).is_zero());
}
