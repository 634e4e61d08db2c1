#pragma once

#include "ultra/markov.hpp"
#include "ultra/relations.hpp"
#include "ultra/report.hpp"
#include "ultra/ultragraph.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ultra {

using PointSet = std::set<std::size_t>; ///< indices into a point list

/// Relative branching system on a finite, depth-labelled point space with
/// counting measure. D_A is the union of the per-vertex sets.
struct BranchingSystem {
  std::vector<BasisPoint> points;
  int complete_depth = 0;
  Index horizon = 0; ///< vertices and edges carrying data are <= horizon
  /// every point of D_v minus the union of R_e (s(e)=v) lies in the point space
  bool residual_complete = false;
  std::map<Index, PointSet> D; ///< per vertex
  std::map<Index, PointSet> R; ///< per edge
  std::map<Index, std::map<std::size_t, std::size_t>> f; ///< per edge: y -> f_e(y)

  PointSet D_of(const VertexSet& a) const;
  PointSet R_of(Index e) const;
};

/// Truncated R_g(x) plus the data every Markov construction needs.
struct MarkovSetting {
  EscapeData escape;
  OrbitTree tree;
  Ultragraph graph;
  std::vector<BasisPoint> basis;
};

/// Throws std::invalid_argument when the orbit tree is empty or not complete to depth 1.
MarkovSetting markov_setting(const MarkovMap& m, const EscapeData& ed, int depth, Index horizon);

/// The unique y in I_i with g(y) = target, if any (inverse branch g_i^{-1}).
std::optional<Rational> inverse_branch(const MarkovMap& m, Index i, const Rational& target);

/// W_B, T_e and T_e* on the orbit tree. Throws std::invalid_argument when
/// the hypothesis on X fails; the message names the vertex.
MatrixRep build_markov_rep(const MarkovMap& m, const EscapeData& ed, const VertexSet& X, int depth,
                           Index horizon);

/// D_v = I_v n R_g(x), R_{e_i} and f_{e_i} computed by forward evaluation of g.
BranchingSystem branching_from_markov(const MarkovMap& m, const EscapeData& ed, int depth,
                                      Index horizon);

/// The five axioms on the finite point space; completeness of f_e is only
/// required below the complete depth.
Report validate_branching(const BranchingSystem& bs, const RelativeUltragraph& rg);

/// {Q_f, B_Z, g_f} over G_X. B_Z is computed on demand from the base system.
class LiftedBranchingSystem {
public:
  /// Throws std::domain_error when some r(e) n Y with e <= horizon is infinite.
  LiftedBranchingSystem(BranchingSystem base, RelativeUltragraph rg);

  const BranchingSystem& base() const { return base_; }
  const RelativeUltragraph& relative() const { return rg_; }
  PointSet B(const EXSet& z) const;
  /// Q_f; empty for edges outside the horizon.
  PointSet Q(EdgeId f) const;
  /// g_f as pairs y -> g_f(y).
  std::map<std::size_t, std::size_t> g(EdgeId f) const;
  /// The six disjointness identities, on all pairs from the given sets.
  Report disjointness_checks(const std::vector<VertexSet>& sets) const;

private:
  BranchingSystem base_;
  RelativeUltragraph rg_;
  PointSet residual(Index v) const; ///< D_v minus the union of R_g with s(g)=v
  PointSet sources_R(const VertexSet& w) const; ///< union of R_g with s(g) in w (finite w)
};

LiftedBranchingSystem lift_branching(const BranchingSystem& bs, const RelativeUltragraph& rg);

MatrixRep rep_from_branching(const BranchingSystem& bs, const Ultragraph& g);
MatrixRep rep_from_branching(const LiftedBranchingSystem& lbs);

/// Every p_A with A a subset of {1..k}, tails and ranges up to k, and s_e, s_e* with e <= k.
Report check_nu_equals_pi(const MarkovMap& m, const EscapeData& ed, const VertexSet& X, int depth,
                          Index horizon, Index k = 6);

/// Generators of G_X in scope: P_Z for scope sets and their primed Y-parts, S_f and S_f*.
Report check_diagram(const LiftedBranchingSystem& lbs, const RelationScope& scope);

struct InjectivityScope {
  CycleScope cycles;
  int witness_bound = 8; ///< F = {1, ..., witness_bound}
  Index vertices = 0;    ///< vertex indices checked; 0 means the horizon
};

struct InjectivityVerdict {
  Report report;
  /// condition label ("1".."4" or "a".."d") -> combined verdict
  std::map<std::string, Verdict> conditions;
  std::string scope;

  Verdict overall() const;
};

InjectivityVerdict injectivity_markov(const MarkovMap& m, const EscapeData& ed, const VertexSet& X,
                                      int depth, Index horizon, const InjectivityScope& scope);
InjectivityVerdict injectivity_counting(const BranchingSystem& bs, const RelativeUltragraph& rg,
                                        const InjectivityScope& scope);

} // namespace ultra
