#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <string_view>
#include <utility>
#include <vector>

#include "fmmkit/rational.hpp"

namespace fmmkit {

/// Finite sum  Σ c_k · e^k  with rational coefficients and integer exponents:
/// an element of the Laurent polynomial ring ℚ[e, 1/e].
///
/// Terms are stored by increasing exponent; no stored coefficient is zero, so
/// the empty sum is the zero scalar and equality is structural.
class LaurentScalar {
 public:
  using Term = std::pair<int, Rational>;

  LaurentScalar() = default;
  LaurentScalar(long v) : LaurentScalar(Rational(v)) {}  // NOLINT(google-explicit-constructor)
  LaurentScalar(const Rational& c) : LaurentScalar(c, 0) {}  // NOLINT(google-explicit-constructor)
  LaurentScalar(const Rational& c, int exponent);

  /// `c · e^exponent`.
  static LaurentScalar monomial(const Rational& c, int exponent) { return {c, exponent}; }

  /// Parses the tensor-file scalar grammar, e.g. "-3/2" or "1/2*e^-3 + 2".
  static LaurentScalar parse(std::string_view text);

  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  /// True when the scalar has no e-dependence (zero included).
  bool is_rational() const noexcept {
    return terms_.empty() || (terms_.size() == 1 && terms_.front().first == 0);
  }
  bool is_monomial() const noexcept { return terms_.size() == 1; }

  /// Coefficient of e^k (zero when absent).
  Rational coefficient(int k) const;
  /// The e^0 coefficient; exact value for rational scalars.
  Rational constant() const { return coefficient(0); }

  /// Lowest exponent with a nonzero coefficient; nullopt stands for +∞ (the zero scalar).
  std::optional<int> order() const {
    if (terms_.empty()) return std::nullopt;
    return terms_.front().first;
  }
  std::optional<int> max_exponent() const {
    if (terms_.empty()) return std::nullopt;
    return terms_.back().first;
  }
  /// Leading (lowest-order) monomial; requires a nonzero scalar.
  LaurentScalar leading_monomial() const;
  /// Largest coefficient height, used as a pivoting tie-break.
  std::size_t height() const;

  /// Multiplies by e^k.
  LaurentScalar shifted(int k) const;

  /// Canonical text: monomials by increasing exponent joined by " + ".
  std::string to_string() const;

  template <class Real>
  Real evaluate(const Real& eps) const {
    Real total = 0;
    for (const auto& [k, c] : terms_) {
      Real power = 1;
      for (int i = 0; i < (k < 0 ? -k : k); ++i) power *= eps;
      if (k < 0) power = Real(1) / power;
      Real coeff;
      if constexpr (std::is_floating_point_v<Real>)
        coeff = c.to_double();
      else
        coeff = Real(c.numerator().get_str()) / Real(c.denominator().get_str());
      total += coeff * power;
    }
    return total;
  }

  LaurentScalar operator-() const;
  LaurentScalar& operator+=(const LaurentScalar& o);
  LaurentScalar& operator-=(const LaurentScalar& o);
  LaurentScalar& operator*=(const LaurentScalar& o);
  /// Exact division by a monomial (a unit of the ring). Throws ContractError otherwise.
  LaurentScalar divided_by_monomial(const LaurentScalar& unit) const;

  friend LaurentScalar operator+(LaurentScalar a, const LaurentScalar& b) { return a += b; }
  friend LaurentScalar operator-(LaurentScalar a, const LaurentScalar& b) { return a -= b; }
  friend LaurentScalar operator*(const LaurentScalar& a, const LaurentScalar& b);
  friend bool operator==(const LaurentScalar&, const LaurentScalar&) = default;

 private:
  std::vector<Term> terms_;
};

/// Minimum over nullopt-as-infinity orders.
inline std::optional<int> min_order(std::optional<int> a, std::optional<int> b) {
  if (!a) return b;
  if (!b) return a;
  return *a < *b ? a : b;
}

}  // namespace fmmkit
