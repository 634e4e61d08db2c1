#include "ultra/sparse_matrix.hpp"

#include <stdexcept>

namespace ultra {

SparseMatrix SparseMatrix::identity(std::size_t n) {
  SparseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    m.cols_[i][i] = 1;
  return m;
}

void SparseMatrix::check_same(const SparseMatrix& o) const {
  if (o.size() != size())
    throw std::invalid_argument("matrix dimensions differ");
}

void SparseMatrix::set(std::size_t row, std::size_t col, const Rational& v) {
  if (row >= size() || col >= size())
    throw std::out_of_range("matrix index out of range");
  if (v == 0)
    cols_[col].erase(row);
  else
    cols_[col][row] = v;
}

Rational SparseMatrix::get(std::size_t row, std::size_t col) const {
  const Column& c = cols_.at(col);
  auto it = c.find(row);
  return it == c.end() ? Rational(0) : it->second;
}

SparseMatrix SparseMatrix::operator*(const SparseMatrix& o) const {
  check_same(o);
  SparseMatrix out(size());
  for (std::size_t j = 0; j < size(); ++j) {
    Column& dst = out.cols_[j];
    for (const auto& [k, b] : o.cols_[j])
      for (const auto& [i, a] : cols_[k]) {
        Rational& slot = dst[i];
        slot += a * b;
        if (slot == 0)
          dst.erase(i);
      }
  }
  return out;
}

SparseMatrix SparseMatrix::operator+(const SparseMatrix& o) const {
  check_same(o);
  SparseMatrix out = *this;
  for (std::size_t j = 0; j < size(); ++j)
    for (const auto& [i, v] : o.cols_[j]) {
      Rational& slot = out.cols_[j][i];
      slot += v;
      if (slot == 0)
        out.cols_[j].erase(i);
    }
  return out;
}

SparseMatrix SparseMatrix::operator-(const SparseMatrix& o) const { return *this + o.scaled(-1); }

SparseMatrix SparseMatrix::scaled(const Rational& c) const {
  SparseMatrix out(size());
  if (c == 0)
    return out;
  for (std::size_t j = 0; j < size(); ++j)
    for (const auto& [i, v] : cols_[j])
      out.cols_[j][i] = v * c;
  return out;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix out(size());
  for (std::size_t j = 0; j < size(); ++j)
    for (const auto& [i, v] : cols_[j])
      out.cols_[i][j] = v;
  return out;
}

bool SparseMatrix::is_zero() const {
  for (const Column& c : cols_)
    if (!c.empty())
      return false;
  return true;
}

std::size_t SparseMatrix::nonzeros() const {
  std::size_t n = 0;
  for (const Column& c : cols_)
    n += c.size();
  return n;
}

bool SparseMatrix::is_diagonal_01() const {
  for (std::size_t j = 0; j < size(); ++j)
    for (const auto& [i, v] : cols_[j])
      if (i != j || v != 1)
        return false;
  return true;
}

bool SparseMatrix::is_partial_permutation() const {
  std::vector<bool> row_used(size(), false);
  for (const Column& c : cols_) {
    if (c.size() > 1)
      return false;
    for (const auto& [i, v] : c) {
      if (v != 1 || row_used[i])
        return false;
      row_used[i] = true;
    }
  }
  return true;
}

} // namespace ultra
