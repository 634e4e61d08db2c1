#include "ultra/polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace ultra {

GeneratorSymbol GeneratorSymbol::p(const VertexSet& a) {
  return {Algebra::Rel, SymbolKind::Projection, EXSet(a), {}};
}
GeneratorSymbol GeneratorSymbol::s(Index e) {
  return {Algebra::Rel, SymbolKind::Isometry, {}, {e, false}};
}
GeneratorSymbol GeneratorSymbol::s_star(Index e) {
  return {Algebra::Rel, SymbolKind::Adjoint, {}, {e, false}};
}
GeneratorSymbol GeneratorSymbol::P(const EXSet& z) {
  return {Algebra::Abs, SymbolKind::Projection, z, {}};
}
GeneratorSymbol GeneratorSymbol::S(EdgeId f) { return {Algebra::Abs, SymbolKind::Isometry, {}, f}; }
GeneratorSymbol GeneratorSymbol::S_star(EdgeId f) {
  return {Algebra::Abs, SymbolKind::Adjoint, {}, f};
}

GeneratorSymbol GeneratorSymbol::adjoint() const {
  GeneratorSymbol g = *this;
  if (kind == SymbolKind::Isometry)
    g.kind = SymbolKind::Adjoint;
  else if (kind == SymbolKind::Adjoint)
    g.kind = SymbolKind::Isometry;
  return g;
}

int GeneratorSymbol::excursion() const {
  switch (kind) {
  case SymbolKind::Isometry:
    return 1;
  case SymbolKind::Adjoint:
    return -1;
  default:
    return 0;
  }
}

std::string GeneratorSymbol::to_string() const {
  bool rel = algebra == Algebra::Rel;
  switch (kind) {
  case SymbolKind::Projection:
    return std::string(rel ? "p" : "P") + "[" + set.to_string() + "]";
  case SymbolKind::Isometry:
    return std::string(rel ? "s_" : "S_") + edge.name();
  case SymbolKind::Adjoint:
    return std::string(rel ? "s_" : "S_") + edge.name() + "*";
  }
  return "?";
}

std::strong_ordering operator<=>(const GeneratorSymbol& a, const GeneratorSymbol& b) {
  if (auto c = a.algebra <=> b.algebra; c != 0)
    return c;
  if (auto c = a.kind <=> b.kind; c != 0)
    return c;
  if (auto c = a.set <=> b.set; c != 0)
    return c;
  return a.edge <=> b.edge;
}

// ---------------------------------------------------------------- polynomial

StarPolynomial::StarPolynomial(const GeneratorSymbol& g) : algebra_(g.algebra) { add_term({g}, 1); }

StarPolynomial StarPolynomial::identity_word(Algebra a) {
  StarPolynomial p(a);
  p.terms_[{}] = 1;
  return p;
}

void StarPolynomial::add_term(const Word& w, const Rational& c) {
  for (const GeneratorSymbol& g : w)
    if (g.algebra != algebra_)
      throw std::invalid_argument("symbol " + g.to_string() + " belongs to the other algebra");
  // p of the empty set is zero
  for (const GeneratorSymbol& g : w)
    if (g.kind == SymbolKind::Projection && g.set.empty())
      return;
  Rational& slot = terms_[w];
  slot += c;
  if (slot == 0)
    terms_.erase(w);
}

StarPolynomial& StarPolynomial::operator+=(const StarPolynomial& o) {
  if (o.algebra_ != algebra_ && !o.is_zero())
    throw std::invalid_argument("adding polynomials over different algebras");
  for (const auto& [w, c] : o.terms_)
    add_term(w, c);
  return *this;
}

StarPolynomial& StarPolynomial::operator-=(const StarPolynomial& o) {
  if (o.algebra_ != algebra_ && !o.is_zero())
    throw std::invalid_argument("subtracting polynomials over different algebras");
  for (const auto& [w, c] : o.terms_)
    add_term(w, -c);
  return *this;
}

StarPolynomial operator*(const StarPolynomial& a, const StarPolynomial& b) {
  if (a.algebra_ != b.algebra_)
    throw std::invalid_argument("multiplying polynomials over different algebras");
  StarPolynomial out(a.algebra_);
  for (const auto& [wa, ca] : a.terms_)
    for (const auto& [wb, cb] : b.terms_) {
      Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      out.add_term(w, ca * cb);
    }
  return out;
}

StarPolynomial operator*(const Rational& c, const StarPolynomial& a) {
  StarPolynomial out(a.algebra_);
  if (c == 0)
    return out;
  for (const auto& [w, x] : a.terms_)
    out.terms_[w] = x * c;
  return out;
}

StarPolynomial StarPolynomial::adjoint() const {
  // coefficients are real
  StarPolynomial out(algebra_);
  for (const auto& [w, c] : terms_) {
    Word r;
    for (auto it = w.rbegin(); it != w.rend(); ++it)
      r.push_back(it->adjoint());
    out.add_term(r, c);
  }
  return out;
}

StarPolynomial
StarPolynomial::substitute(Algebra target,
                           const std::function<StarPolynomial(const GeneratorSymbol&)>& f) const {
  StarPolynomial out(target);
  for (const auto& [w, c] : terms_) {
    StarPolynomial prod = identity_word(target);
    for (const GeneratorSymbol& g : w) {
      prod = prod * f(g);
      if (prod.is_zero())
        break;
    }
    out += c * prod;
  }
  return out;
}

int StarPolynomial::max_excursion() const {
  int best = 0;
  for (const auto& [w, c] : terms_) {
    int level = 0;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      level += it->excursion();
      best = std::max(best, level);
    }
  }
  return best;
}

std::string StarPolynomial::to_string() const {
  if (terms_.empty())
    return "0";
  std::string s;
  bool first = true;
  for (const auto& [w, c] : terms_) {
    Rational mag = abs(c);
    s += first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ");
    first = false;
    bool unit = mag == 1;
    if (!unit)
      s += ultra::to_string(mag);
    if (w.empty()) {
      if (unit)
        s += "1";
      continue;
    }
    for (std::size_t i = 0; i < w.size(); ++i)
      s += (i || !unit ? " " : "") + w[i].to_string();
  }
  return s;
}

} // namespace ultra
