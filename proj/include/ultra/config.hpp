#pragma once

#include "ultra/markov.hpp"
#include "ultra/ultragraph.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ultra {

class ConfigError : public std::runtime_error {
public:
  ConfigError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_, column_;
};

struct RunParameters {
  std::optional<VertexSet> X;
  std::optional<Rational> x;
  int depth = 6;
  Index horizon = 32;
  CycleScope cycles{4, 10};
  int witness_bound = 8;
  Index scope = 6; ///< relation scope: sets, edges and vertices up to this index
  Index escape_bound = 64;
  friend bool operator==(const RunParameters&, const RunParameters&) = default;
};

/// Parsed configuration file: a Markov map, an ultragraph, or both.
struct Workspace {
  std::optional<MarkovMap> map;
  std::optional<Ultragraph> graph;
  RunParameters run;
  friend bool operator==(const Workspace&, const Workspace&) = default;
};

/// Throws ConfigError with the line and column of the offending token.
Workspace parse_config(std::string_view text);
Workspace load_config(const std::string& path);
/// Canonical text; parse_config(emit(w)) == w.
std::string emit(const Workspace& w);

/// slope*x + intercept(n), the right-hand side of a piece.
struct AffineExpr {
  Rational slope;
  FamilyExpr intercept;
  std::string to_string() const;
};

/// Expression in x and n, e.g. "3x-2n-3" or "3-4*(1/2)^n".
AffineExpr parse_affine(std::string_view text);

} // namespace ultra
