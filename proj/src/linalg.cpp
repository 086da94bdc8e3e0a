#include <algorithm>
#include <optional>

#include "fmmkit/matrix.hpp"

namespace fmmkit {

std::size_t matrix_rank(const RationalMatrix& m) {
  RationalMatrix a = m;
  const std::size_t rows = a.rows(), cols = a.cols();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::optional<std::size_t> pivot;
    for (std::size_t r = rank; r < rows; ++r) {
      if (a(r, c).is_zero()) continue;
      if (!pivot || a(r, c).height() < a(*pivot, c).height()) pivot = r;
    }
    if (!pivot) continue;
    for (std::size_t j = 0; j < cols; ++j) std::swap(a(rank, j), a(*pivot, j));
    const Rational inv = Rational(1) / a(rank, c);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (a(r, c).is_zero()) continue;
      const Rational factor = a(r, c) * inv;
      for (std::size_t j = c; j < cols; ++j)
        if (!a(rank, j).is_zero()) a(r, j) -= factor * a(rank, j);
    }
    ++rank;
  }
  return rank;
}

namespace {

// Shifts a row so that its lowest exponent is zero (row scaling by a unit).
void normalize_row(LaurentMatrix& a, std::size_t r) {
  std::optional<int> low;
  for (std::size_t j = 0; j < a.cols(); ++j) low = min_order(low, a(r, j).order());
  if (!low || *low == 0) return;
  for (std::size_t j = 0; j < a.cols(); ++j) a(r, j) = a(r, j).shifted(-*low);
}

}  // namespace

// Division-free elimination over the integral domain ℚ[e, 1/e]; its rank equals
// the rank over the fraction field ℚ(e).
std::size_t matrix_rank(const LaurentMatrix& m) {
  LaurentMatrix a = m;
  const std::size_t rows = a.rows(), cols = a.cols();
  for (std::size_t r = 0; r < rows; ++r) normalize_row(a, r);
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::optional<std::size_t> pivot;
    for (std::size_t r = rank; r < rows; ++r) {
      const auto& v = a(r, c);
      if (v.is_zero()) continue;
      if (!pivot) {
        pivot = r;
        continue;
      }
      const auto& best = a(*pivot, c);
      if (*v.order() < *best.order() || (*v.order() == *best.order() && v.height() < best.height())) pivot = r;
    }
    if (!pivot) continue;
    for (std::size_t j = 0; j < cols; ++j) std::swap(a(rank, j), a(*pivot, j));
    const LaurentScalar p = a(rank, c);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (a(r, c).is_zero()) continue;
      const LaurentScalar f = a(r, c);
      for (std::size_t j = c; j < cols; ++j) a(r, j) = p * a(r, j) - f * a(rank, j);
      normalize_row(a, r);
    }
    ++rank;
  }
  return rank;
}

RationalMatrix inverse(const RationalMatrix& m) {
  if (m.rows() != m.cols()) throw ContractError("inverse of a non-square matrix");
  const std::size_t n = m.rows();
  RationalMatrix a = m;
  RationalMatrix inv = RationalMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && a(pivot, c).is_zero()) ++pivot;
    if (pivot == n) throw ContractError("matrix is singular");
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(a(c, j), a(pivot, j));
      std::swap(inv(c, j), inv(pivot, j));
    }
    const Rational s = Rational(1) / a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) *= s;
      inv(c, j) *= s;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a(r, c).is_zero()) continue;
      const Rational f = a(r, c);
      for (std::size_t j = 0; j < n; ++j) {
        if (!a(c, j).is_zero()) a(r, j) -= f * a(c, j);
        if (!inv(c, j).is_zero()) inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

}  // namespace fmmkit
