#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ultra {

using Index = std::uint64_t;

/// Eventually periodic subset of {1, 2, 3, ...}.
///
/// j is a member iff j is in the explicit part (all below the threshold),
/// or j >= threshold and bit (j - threshold) mod period of the pattern is set.
/// Values are always canonical, so == is extensional equality.
class VertexSet {
public:
  VertexSet() = default;

  static VertexSet canonicalize(const std::set<Index>& explicit_part, Index threshold,
                                const std::vector<bool>& pattern, bool primed = false);
  static VertexSet finite(const std::set<Index>& members, bool primed = false);
  static VertexSet singleton(Index v) { return finite({v}); }
  static VertexSet range(Index lo, Index hi); ///< {lo..hi}
  static VertexSet tail(Index t);             ///< {j >= t}
  /// {first, first+step, first+2*step, ...}
  static VertexSet progression(Index first, Index step);

  const std::set<Index>& explicit_part() const { return explicit_; }
  Index threshold() const { return threshold_; }
  const std::vector<bool>& pattern() const { return pattern_; }
  Index period() const { return pattern_.size(); }
  bool primed() const { return primed_; }

  bool contains(Index j) const;
  bool is_finite() const;
  bool empty() const;
  std::vector<Index> enumerate_up_to(Index n) const;
  /// All members; throws std::domain_error for infinite sets.
  std::vector<Index> elements() const;
  std::optional<Index> min() const;
  /// Largest member for finite sets.
  std::optional<Index> max() const;
  /// Upper bound past which membership is purely periodic.
  Index stable_from() const;
  /// Number of members, finite sets only.
  std::size_t size() const;

  VertexSet as_primed() const;
  VertexSet as_unprimed() const;
  /// {j + d : j in this, j + d >= 1}
  VertexSet shifted(std::int64_t d) const;

  std::string to_string() const;
  static VertexSet parse(std::string_view text);

  friend bool operator==(const VertexSet&, const VertexSet&) = default;
  friend std::strong_ordering operator<=>(const VertexSet& a, const VertexSet& b);

private:
  std::set<Index> explicit_;
  Index threshold_ = 1;
  std::vector<bool> pattern_{false};
  bool primed_ = false;
};

VertexSet set_union(const VertexSet& a, const VertexSet& b);
VertexSet intersect(const VertexSet& a, const VertexSet& b);
VertexSet difference(const VertexSet& a, const VertexSet& b);
bool is_subset(const VertexSet& a, const VertexSet& b);
bool intersects(const VertexSet& a, const VertexSet& b);

/// Element of E_X: Z = A u (B n Y)'.
struct EXSet {
  VertexSet unprimed;
  VertexSet primed{VertexSet().as_primed()};

  EXSet() = default;
  explicit EXSet(VertexSet a);
  EXSet(VertexSet a, VertexSet b);

  bool empty() const { return unprimed.empty() && primed.empty(); }
  std::string to_string() const;
  static EXSet parse(std::string_view text);

  friend bool operator==(const EXSet&, const EXSet&) = default;
  friend std::strong_ordering operator<=>(const EXSet& a, const EXSet& b);
};

EXSet set_union(const EXSet& a, const EXSet& b);
EXSet intersect(const EXSet& a, const EXSet& b);
EXSet difference(const EXSet& a, const EXSet& b);

} // namespace ultra
