#pragma once

#include "ultra/rational.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace ultra {

/// Square sparse matrix over the rationals, stored by column.
class SparseMatrix {
public:
  using Column = std::map<std::size_t, Rational>;

  explicit SparseMatrix(std::size_t n = 0) : cols_(n) {}
  static SparseMatrix identity(std::size_t n);

  std::size_t size() const { return cols_.size(); }
  void set(std::size_t row, std::size_t col, const Rational& v);
  Rational get(std::size_t row, std::size_t col) const;
  const Column& column(std::size_t col) const { return cols_.at(col); }

  SparseMatrix operator*(const SparseMatrix& o) const;
  SparseMatrix operator+(const SparseMatrix& o) const;
  SparseMatrix operator-(const SparseMatrix& o) const;
  SparseMatrix scaled(const Rational& c) const;
  SparseMatrix transpose() const;

  bool is_zero() const;
  std::size_t nonzeros() const;
  bool is_diagonal_01() const;
  /// Entries in {0,1}, at most one nonzero per row and per column.
  bool is_partial_permutation() const;
  /// (row, col) of the first nonzero in a column accepted by keep.
  template <class Pred>
  std::optional<std::pair<std::size_t, std::size_t>> first_nonzero(Pred keep) const {
    for (std::size_t c = 0; c < cols_.size(); ++c)
      if (keep(c) && !cols_[c].empty())
        return std::make_pair(cols_[c].begin()->first, c);
    return std::nullopt;
  }

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

private:
  std::vector<Column> cols_;
  void check_same(const SparseMatrix& o) const;
};

} // namespace ultra
