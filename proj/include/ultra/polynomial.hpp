#pragma once

#include "ultra/rational.hpp"
#include "ultra/ultragraph.hpp"
#include "ultra/vertexset.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace ultra {

/// REL: the relative algebra of (G, X), ABS: the algebra of G_X.
enum class Algebra { Rel, Abs };

enum class SymbolKind { Projection, Isometry, Adjoint };

/// p_A, s_e, s_e* over (G, X) or P_Z, S_f, S_f* over G_X.
struct GeneratorSymbol {
  Algebra algebra = Algebra::Rel;
  SymbolKind kind = SymbolKind::Projection;
  EXSet set;   ///< projections only
  EdgeId edge; ///< isometries and adjoints only

  static GeneratorSymbol p(const VertexSet& a);
  static GeneratorSymbol s(Index e);
  static GeneratorSymbol s_star(Index e);
  static GeneratorSymbol P(const EXSet& z);
  static GeneratorSymbol S(EdgeId f);
  static GeneratorSymbol S_star(EdgeId f);

  GeneratorSymbol adjoint() const;
  /// +1 for s/S, -1 for s*/S*, 0 for projections.
  int excursion() const;
  std::string to_string() const;

  friend bool operator==(const GeneratorSymbol&, const GeneratorSymbol&) = default;
  friend std::strong_ordering operator<=>(const GeneratorSymbol& a, const GeneratorSymbol& b);
};

using Word = std::vector<GeneratorSymbol>;

/// Finite rational combination of words; like words merged, zero terms dropped.
class StarPolynomial {
public:
  explicit StarPolynomial(Algebra a = Algebra::Rel) : algebra_(a) {}
  StarPolynomial(const GeneratorSymbol& g);

  static StarPolynomial zero(Algebra a) { return StarPolynomial(a); }
  static StarPolynomial identity_word(Algebra a); ///< the empty word, coefficient 1

  Algebra algebra() const { return algebra_; }
  const std::map<Word, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Word& w, const Rational& c);

  StarPolynomial& operator+=(const StarPolynomial& o);
  StarPolynomial& operator-=(const StarPolynomial& o);
  friend StarPolynomial operator+(StarPolynomial a, const StarPolynomial& b) { return a += b; }
  friend StarPolynomial operator-(StarPolynomial a, const StarPolynomial& b) { return a -= b; }
  friend StarPolynomial operator*(const StarPolynomial& a, const StarPolynomial& b);
  friend StarPolynomial operator*(const Rational& c, const StarPolynomial& a);

  StarPolynomial adjoint() const;
  /// Replace every symbol by a polynomial (possibly in the other algebra).
  StarPolynomial substitute(Algebra target,
                            const std::function<StarPolynomial(const GeneratorSymbol&)>& f) const;
  /// Largest right-to-left prefix excursion over all words.
  int max_excursion() const;
  std::string to_string() const;

  friend bool operator==(const StarPolynomial&, const StarPolynomial&) = default;

private:
  Algebra algebra_;
  std::map<Word, Rational> terms_;
};

} // namespace ultra
