#pragma once

#include "ultra/polynomial.hpp"
#include "ultra/report.hpp"
#include "ultra/sparse_matrix.hpp"
#include "ultra/ultragraph.hpp"

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ultra {

StarPolynomial phi_image(const GeneratorSymbol& g, const RelativeUltragraph& rg);
/// Throws std::domain_error when a correction sum would be infinite.
StarPolynomial psi_image(const GeneratorSymbol& g, const RelativeUltragraph& rg);
StarPolynomial phi(const StarPolynomial& p, const RelativeUltragraph& rg);
StarPolynomial psi(const StarPolynomial& p, const RelativeUltragraph& rg);

/// q_v = p_v - sum_{s(e)=v} s_e s_e*; v must be regular.
StarPolynomial q_of(Index v, const Ultragraph& g);
/// sum of s_e s_e* over edges with source in the finite set w
StarPolynomial range_sum(const VertexSet& w, const Ultragraph& g);
/// sum of q_v over the finite set w
StarPolynomial q_sum(const VertexSet& w, const Ultragraph& g);

struct BasisPoint {
  Rational point;
  int depth = 0;
  Index interval = 0;
  friend bool operator==(const BasisPoint&, const BasisPoint&) = default;
};

class GuardBandError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Finite truncation of a representation: a depth-labelled basis plus an
/// assignment of matrices to generator symbols. Words are trusted only on
/// basis vectors whose depth leaves room for the word's excursion.
class MatrixRep {
public:
  using Assigner = std::function<SparseMatrix(const GeneratorSymbol&)>;

  MatrixRep(Algebra algebra, std::vector<BasisPoint> basis, int complete_depth, Assigner assign);

  Algebra algebra() const { return algebra_; }
  const std::vector<BasisPoint>& basis() const { return basis_; }
  std::size_t size() const { return basis_.size(); }
  /// Every point of depth <= complete_depth is in the basis.
  int complete_depth() const { return complete_depth_; }
  int min_depth() const;

  SparseMatrix matrix(const GeneratorSymbol& g) const;
  /// Replace the matrix of one symbol (used to build deliberately broken reps).
  void override_symbol(const GeneratorSymbol& g, SparseMatrix m);
  std::optional<std::size_t> index_of(const Rational& point) const;

private:
  Algebra algebra_;
  std::vector<BasisPoint> basis_;
  int complete_depth_;
  Assigner assign_;
  std::map<GeneratorSymbol, SparseMatrix> overrides_;
  std::map<Rational, std::size_t> lookup_;
};

struct Evaluation {
  SparseMatrix matrix;
  int safe_depth = 0;
};

/// Throws GuardBandError if no basis vector is within the guard band.
Evaluation evaluate(const StarPolynomial& p, const MatrixRep& rep);
/// Product of the symbol matrices of w (identity for the empty word).
SparseMatrix evaluate_word(const Word& w, const MatrixRep& rep);

struct ZeroCheck {
  bool zero = true;
  int safe_depth = 0;
  std::optional<BasisPoint> witness; ///< basis vector with a nonzero image
};

ZeroCheck check_zero(const StarPolynomial& p, const MatrixRep& rep);

/// Finite collection of sets, edges and vertices on which identities are tested.
struct RelationScope {
  std::vector<VertexSet> sets;
  std::vector<Index> edges;
  std::vector<Index> vertices;
  std::string label;
};

/// Singletons and ranges up to index k, plus X, Y and the empty set; sets A
/// with A n Y infinite are dropped since the correction sums need finiteness.
RelationScope default_scope(const RelativeUltragraph& rg, Index k);

Report relation_suite(const MatrixRep& rep, const RelativeUltragraph& rg, const RelationScope& scope);
Report psi_phi_identity_check(const MatrixRep& rep, const RelativeUltragraph& rg,
                              const RelationScope& scope);

} // namespace ultra
