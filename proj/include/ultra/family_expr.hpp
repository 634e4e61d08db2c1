#pragma once

#include "ultra/rational.hpp"
#include "ultra/vertexset.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace ultra {

/// e(n) = c0 + c1*n + c2*ratio^n. At most one of c1, c2 is nonzero in
/// anything the solver is asked about.
struct FamilyExpr {
  Rational c0, c1, c2;
  Rational ratio{1};

  FamilyExpr() = default;
  FamilyExpr(const Rational& constant) : c0(constant) {}
  static FamilyExpr linear(const Rational& c0, const Rational& c1);
  static FamilyExpr geometric(const Rational& c0, const Rational& c2, const Rational& ratio);

  bool is_constant() const { return c1 == 0 && c2 == 0; }
  bool is_geometric() const { return c2 != 0; }
  Rational at(std::int64_t n) const;
  /// n -> n + d
  FamilyExpr shifted(std::int64_t d) const;
  std::string to_string() const;

  FamilyExpr& operator+=(const FamilyExpr& o);
  FamilyExpr& operator-=(const FamilyExpr& o);
  friend FamilyExpr operator+(FamilyExpr a, const FamilyExpr& b) { return a += b; }
  friend FamilyExpr operator-(FamilyExpr a, const FamilyExpr& b) { return a -= b; }
  friend FamilyExpr operator*(const Rational& k, const FamilyExpr& a);
  friend bool operator==(const FamilyExpr&, const FamilyExpr&) = default;

private:
  void normalize();
};

/// Contiguous index range [lo, hi] (hi absent: unbounded), possibly empty.
struct IndexRange {
  Index lo = 1;
  std::optional<Index> hi;
  bool empty = false;

  static IndexRange none() { return {1, Index(0), true}; }
  static IndexRange from(Index lo) { return {lo, std::nullopt, false}; }
  static IndexRange between(Index lo, Index hi);
  bool contains(Index n) const;
  bool bounded() const { return empty || hi.has_value(); }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

IndexRange intersect(const IndexRange& a, const IndexRange& b);
/// Members of the range in {first, first+step, ...}; throws std::length_error for huge finite ranges.
VertexSet range_in_class(const IndexRange& r, Index first, Index step);

enum class Cmp { Lt, Le, Eq };

/// {n >= lower : e(n) cmp 0}, decided exactly. e must be constant, linear
/// or geometric with ratio in (0,1).
IndexRange solve(const FamilyExpr& e, Cmp cmp, Index lower);

} // namespace ultra
