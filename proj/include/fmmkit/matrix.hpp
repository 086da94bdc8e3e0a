#pragma once

#include <cstddef>
#include <functional>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

#include "fmmkit/error.hpp"
#include "fmmkit/laurent.hpp"
#include "fmmkit/rational.hpp"

namespace fmmkit {

/// Dense row-major matrix over an exact scalar type.
template <class T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw ShapeError("matrix data length does not match its shape");
  }

  static Matrix identity(std::size_t n) {
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = T(1);
    return out;
  }
  /// Matrix unit: a single 1 at (i, j).
  static Matrix unit(std::size_t rows, std::size_t cols, std::size_t i, std::size_t j) {
    Matrix out(rows, cols);
    out(i, j) = T(1);
    return out;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  const std::vector<T>& data() const noexcept { return data_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool is_zero() const {
    for (const auto& v : data_)
      if (!v.is_zero()) return false;
    return true;
  }
  std::size_t nonzero_count() const {
    std::size_t n = 0;
    for (const auto& v : data_) n += v.is_zero() ? 0 : 1;
    return n;
  }

  Matrix transpose() const {
    Matrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  Matrix& operator+=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw ShapeError("matrix product inner dimensions differ");
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik.is_zero()) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          if (!b(k, j).is_zero()) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

  template <class F>
  auto map(F&& f) const -> Matrix<std::invoke_result_t<F, const T&>> {
    std::vector<std::invoke_result_t<F, const T&>> out;
    out.reserve(data_.size());
    for (const auto& v : data_) out.push_back(f(v));
    return {rows_, cols_, std::move(out)};
  }

 private:
  void require_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeError("matrix shapes differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RationalMatrix = Matrix<Rational>;
using LaurentMatrix = Matrix<LaurentScalar>;

/// Kronecker product; entry ((i·b.rows + i'), (j·b.cols + j')) = a(i,j)·b(i',j').
template <class T>
Matrix<T> kron(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j).is_zero()) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          if (!b(k, l).is_zero()) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    }
  return out;
}

/// Frobenius inner product  Σ_ij a_ij b_ij  (= Trace(aᵀ b)).
template <class T>
T frobenius(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("inner product of differently shaped matrices");
  T acc{};
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a.data()[i].is_zero() && !b.data()[i].is_zero()) acc += a.data()[i] * b.data()[i];
  return acc;
}

inline LaurentMatrix to_laurent(const RationalMatrix& m) {
  return m.map([](const Rational& r) { return LaurentScalar(r); });
}
/// e^0 coefficients of every entry.
inline RationalMatrix constant_part(const LaurentMatrix& m) {
  return m.map([](const LaurentScalar& s) { return s.constant(); });
}
inline bool is_rational(const LaurentMatrix& m) {
  for (const auto& v : m.data())
    if (!v.is_rational()) return false;
  return true;
}

/// Exact rank over ℚ.
std::size_t matrix_rank(const RationalMatrix& m);
/// Exact rank over the rational function field ℚ(e).
std::size_t matrix_rank(const LaurentMatrix& m);
/// Exact inverse over ℚ. Throws ContractError for singular or non-square input.
RationalMatrix inverse(const RationalMatrix& m);

template <class T>
std::string to_string(const Matrix<T>& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ", ";
      out += m(i, j).to_string();
    }
    out += '\n';
  }
  return out;
}

}  // namespace fmmkit
