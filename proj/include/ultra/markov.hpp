#pragma once

#include "ultra/family_expr.hpp"
#include "ultra/rational.hpp"
#include "ultra/ultragraph.hpp"
#include "ultra/vertexset.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ultra {

/// Rational interval with independently open or closed ends.
struct Interval {
  Rational lo, hi;
  bool lo_closed = true, hi_closed = true;

  static Interval closed(const Rational& a, const Rational& b) { return {a, b, true, true}; }
  static Interval open(const Rational& a, const Rational& b) { return {a, b, false, false}; }
  static Interval point(const Rational& a) { return {a, a, true, true}; }

  bool empty() const;
  bool contains(const Rational& x) const;
  bool is_point() const { return !empty() && lo == hi; }
  /// Some point strictly inside, or the point itself for degenerate intervals.
  Rational sample() const;
  std::string to_string() const;
  friend bool operator==(const Interval&, const Interval&) = default;
};

Interval intersect(const Interval& a, const Interval& b);
bool contains(const Interval& outer, const Interval& inner);

/// Affine branch x -> slope*x + intercept on a subinterval.
struct Piece {
  Interval domain;
  Rational slope, intercept;

  Rational apply(const Rational& x) const { return slope * x + intercept; }
  Rational inverse(const Rational& y) const { return (y - intercept) / slope; }
  Interval image() const;
  friend bool operator==(const Piece&, const Piece&) = default;
};

/// Piece whose endpoints and intercept depend on the interval index n.
struct PieceTemplate {
  FamilyExpr lo, hi;
  bool lo_closed = true, hi_closed = true;
  Rational slope;
  FamilyExpr intercept;

  Piece at(Index n) const;
  friend bool operator==(const PieceTemplate&, const PieceTemplate&) = default;
};

struct OverrideTemplate {
  FamilyExpr point, value;
  friend bool operator==(const OverrideTemplate&, const OverrideTemplate&) = default;
};

/// Branch data for n in {first, first+step, ...}.
struct MapFamily {
  Index first = 1;
  Index step = 1;
  std::vector<PieceTemplate> pieces;
  std::vector<OverrideTemplate> overrides;

  bool covers(Index n) const { return n >= first && (n - first) % step == 0; }
  friend bool operator==(const MapFamily&, const MapFamily&) = default;
};

/// I_n = [lo(n), hi(n)] for n >= first.
struct IntervalFamily {
  Index first = 1;
  FamilyExpr lo, hi;
  friend bool operator==(const IntervalFamily&, const IntervalFamily&) = default;
};

struct PointOverride {
  Rational point, value;
  friend bool operator==(const PointOverride&, const PointOverride&) = default;
};

/// Piecewise affine map on a closed interval partition of [a, b).
/// Configuration data is public; call finalize() after filling it in.
class MarkovMap {
public:
  Rational ambient_lo;
  std::optional<Rational> ambient_hi; ///< empty: +infinity
  std::vector<Interval> intervals;    ///< explicit I_1..I_k, closed
  std::optional<IntervalFamily> family;
  std::vector<Piece> pieces;               ///< explicit pieces, any interval
  std::vector<PointOverride> overrides;    ///< explicit point assignments
  std::vector<MapFamily> map_families;

  /// Assigns explicit pieces to intervals. Throws on pieces that do not lie
  /// inside exactly one interval.
  void finalize();

  bool infinite() const { return family.has_value(); }
  Index explicit_count() const { return intervals.size(); }
  /// Number of intervals, or nothing when infinite.
  std::optional<Index> count() const;
  bool has_interval(Index n) const;
  Interval interval(Index n) const;
  /// Open gap E_n between I_n and I_{n+1} (or up to b after the last interval).
  Interval gap(Index n) const;

  std::vector<Piece> pieces_of(Index n) const;
  std::vector<PointOverride> overrides_of(Index n) const;
  /// Pieces with override points cut out of their domains.
  std::vector<Piece> effective_pieces(Index n) const;
  /// Which explicit pieces cover interval n, if any.
  bool has_explicit_pieces(Index n) const;
  const MapFamily* family_for(Index n) const;

  /// Intervals containing x, ascending (two at a shared endpoint).
  std::vector<Index> locate(const Rational& x) const;
  bool in_domain(const Rational& x) const { return !locate(x).empty(); }
  bool in_ambient(const Rational& x) const;
  std::optional<Index> gap_index(const Rational& x) const;
  bool in_gamma(const Rational& x) const;

  /// g restricted to I_n; throws if x is outside I_n or not covered.
  Rational apply(Index n, const Rational& x) const;
  /// g(x) using the lowest-index interval containing x.
  std::optional<Rational> eval(const Rational& x) const;

  friend bool operator==(const MarkovMap& a, const MarkovMap& b);

private:
  std::map<Index, std::vector<Piece>> assigned_;
};

// ---------------------------------------------------------------- validation

struct Violation {
  int condition = 0; ///< 1, 2 or 3
  Index interval = 0;
  Rational witness;
  std::string message;
};

struct Certification {
  bool certified = true;
  std::vector<Violation> violations;
  std::vector<std::string> notes;
  Index horizon = 0;
};

Certification validate_markov(const MarkovMap& m, Index horizon);

/// Row i of A_g: {j : I_j is contained in g(I_i)}.
struct RowResult {
  VertexSet row;
  std::vector<Violation> violations;
};

RowResult transition_row(const MarkovMap& m, Index i);

struct TransitionMatrix {
  Index horizon = 0;
  std::vector<VertexSet> rows;           ///< rows[i-1], i <= horizon (or count)
  std::vector<EdgeFamily> family_rules;  ///< offset rules for all but finitely many rows
  std::map<Index, VertexSet> explicit_rows; ///< rows not covered by a rule
};

/// Throws std::domain_error when rows cannot be expressed in offset form.
TransitionMatrix transition_matrix(const MarkovMap& m, Index horizon);
Ultragraph induced_ultragraph(const TransitionMatrix& t, const MarkovMap& m);

// ---------------------------------------------------------------- orbits

struct EscapeData {
  Rational x;
  Index tau = 0;
  Index J = 0;
  Rational target;
};

struct EscapeResult {
  std::optional<EscapeData> data; ///< empty: did not escape within the bound
  Index bound = 0;
};

EscapeResult escape_data(const MarkovMap& m, const Rational& x, Index bound);

struct PreimagePoint {
  Rational point;
  Index interval = 0;
  friend bool operator==(const PreimagePoint&, const PreimagePoint&) = default;
};

struct PreimagePoints {
  std::vector<PreimagePoint> points; ///< ascending by point, intervals <= horizon
  /// first interval index beyond the horizon holding a preimage, with the point
  std::optional<PreimagePoint> overflow;
};

PreimagePoints preimage_set(const MarkovMap& m, const Rational& target, Index horizon);

struct PreimageIntervals {
  std::vector<std::pair<Index, Interval>> parts; ///< intervals <= horizon
  VertexSet beyond; ///< indices > horizon whose pieces meet the preimage
};

PreimageIntervals preimage_set(const MarkovMap& m, const Interval& target, Index horizon);
/// Concrete pieces of the preimage inside interval n (any n).
std::vector<Interval> preimage_in(const MarkovMap& m, const Interval& target, Index n);

struct OrbitNode {
  Rational point;
  int depth = 0;
  Index interval = 0;
  Rational image; ///< g(point)
};

struct OrbitTree {
  Rational target;
  int depth_bound = 0;
  Index horizon = 0;
  std::vector<OrbitNode> nodes; ///< by depth, then point
  /// preimages beyond the horizon: (depth they would have, point, interval)
  std::vector<std::pair<int, PreimagePoint>> overflows;
  std::vector<Rational> recurrences;
  /// Every point of depth <= complete_depth whose forward path stays in
  /// I_1..I_horizon is present. The scan below the horizon is exact, so this
  /// is the depth bound; the node set is closed under g.
  int complete_depth = 0;

  const OrbitNode* find(const Rational& y) const;
};

OrbitTree backward_orbit(const MarkovMap& m, const Rational& target, int depth, Index horizon);
/// Node-level checks: interior, not in Gamma, forward orbit hits target at its depth.
std::vector<std::string> orbit_invariant_failures(const MarkovMap& m, const OrbitTree& t);

struct HypothesisEntry {
  Index vertex = 0;
  bool holds = true;
  std::optional<Rational> witness;
};

struct HypothesisResult {
  std::vector<HypothesisEntry> entries; ///< v in X with index <= horizon
  bool beyond_holds = true;             ///< symbolic verdict for X beyond the horizon
  std::optional<HypothesisEntry> beyond_failure;
  bool holds() const;
};

/// Checks that the interior of I_i misses g^{-1}(E_J) for every i in X.
HypothesisResult x_hypothesis_check(const MarkovMap& m, const EscapeData& ed, const VertexSet& X,
                                    Index horizon);

} // namespace ultra
