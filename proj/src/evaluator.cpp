#include "fmmkit/evaluator.hpp"

#include <cfloat>
#include <cmath>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "fmmkit/parallel.hpp"

namespace fmmkit {

namespace {

struct ExactTerm {
  RationalMatrix P, Q, S;
};

std::vector<ExactTerm> exact_terms(const FmmTensor& t) {
  std::vector<ExactTerm> out;
  out.reserve(t.rank());
  for (const auto& term : t.terms()) {
    if (!is_rational(term.P) || !is_rational(term.Q) || !is_rational(term.S))
      throw ContractError("exact evaluation needs a tensor without e-dependent entries");
    out.push_back({constant_part(term.P), constant_part(term.Q), constant_part(term.S)});
  }
  return out;
}

void check_operands(const Dims& d, std::size_t ar, std::size_t ac, std::size_t br, std::size_t bc) {
  if (ar != d.m || ac != d.n || br != d.n || bc != d.p)
    throw ShapeError("operands " + std::to_string(ar) + "x" + std::to_string(ac) + " and " + std::to_string(br) +
                     "x" + std::to_string(bc) + " do not fit a " + d.to_string() + " scheme");
}

template <class Accessor>
void check_support(const FmmTensor& t, Accessor is_nonzero) {
  if (!t.support()) return;
  const SupportMask& mask = *t.support();
  for (std::size_t i = 0; i < mask.rows(); ++i)
    for (std::size_t j = 0; j < mask.cols(); ++j)
      if (!mask.allowed(i, j) && is_nonzero(i, j))
        throw ContractError("A has a nonzero entry at masked position " + std::to_string(i + 1) + "," +
                            std::to_string(j + 1));
}

// Σ_ij coeff(i,j)·block(i,j) over the nonzero coefficients.
RationalMatrix linear_combination(const RationalMatrix& coeff, const RationalMatrix& X, std::size_t h,
                                  std::size_t w) {
  RationalMatrix out(h, w);
  for (std::size_t bi = 0; bi < coeff.rows(); ++bi)
    for (std::size_t bj = 0; bj < coeff.cols(); ++bj) {
      const Rational& c = coeff(bi, bj);
      if (c.is_zero()) continue;
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) {
          const Rational& x = X(bi * h + i, bj * w + j);
          if (!x.is_zero()) out(i, j) += c * x;
        }
    }
  return out;
}

RationalMatrix multiply_level(const std::vector<std::vector<ExactTerm>>& levels, const std::vector<Dims>& dims,
                              std::size_t level, const RationalMatrix& A, const RationalMatrix& B,
                              std::atomic<std::uint64_t>* counter) {
  if (level == levels.size()) {
    if (counter) counter->fetch_add(1, std::memory_order_relaxed);
    RationalMatrix out(1, 1);
    out(0, 0) = A(0, 0) * B(0, 0);
    return out;
  }
  const Dims& d = dims[level];
  const std::size_t h = A.rows() / d.m, w = A.cols() / d.n, z = B.cols() / d.p;
  const auto& terms = levels[level];
  std::vector<RationalMatrix> products(terms.size());
  auto body = [&](std::size_t r) {
    const RationalMatrix left = linear_combination(terms[r].P, A, h, w);
    const RationalMatrix right = linear_combination(terms[r].Q, B, w, z);
    products[r] = multiply_level(levels, dims, level + 1, left, right, counter);
  };
  if (level == 0)
    parallel_for(terms.size(), body);
  else
    for (std::size_t r = 0; r < terms.size(); ++r) body(r);

  RationalMatrix C(A.rows(), B.cols());
  for (std::size_t r = 0; r < terms.size(); ++r) {
    const RationalMatrix& S = terms[r].S;
    for (std::size_t k = 0; k < S.rows(); ++k)
      for (std::size_t i = 0; i < S.cols(); ++i) {
        const Rational& c = S(k, i);
        if (c.is_zero()) continue;
        for (std::size_t a = 0; a < h; ++a)
          for (std::size_t b = 0; b < z; ++b) {
            const Rational& x = products[r](a, b);
            if (!x.is_zero()) C(i * h + a, k * z + b) += c * x;
          }
      }
  }
  return C;
}

}  // namespace

RationalMatrix apply_bilinear(const FmmTensor& t, const RationalMatrix& A, const RationalMatrix& B) {
  check_operands(t.dims(), A.rows(), A.cols(), B.rows(), B.cols());
  check_support(t, [&](std::size_t i, std::size_t j) { return !A(i, j).is_zero(); });
  const auto terms = exact_terms(t);
  RationalMatrix C(t.dims().m, t.dims().p);
  for (const auto& term : terms) {
    const Rational left = frobenius(term.P, A);
    if (left.is_zero()) continue;
    const Rational right = frobenius(term.Q, B);
    if (right.is_zero()) continue;
    const Rational w = left * right;
    for (std::size_t k = 0; k < term.S.rows(); ++k)
      for (std::size_t i = 0; i < term.S.cols(); ++i)
        if (!term.S(k, i).is_zero()) C(i, k) += w * term.S(k, i);
  }
  return C;
}

RecursionSchedule::RecursionSchedule(std::vector<FmmTensor> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw ContractError("recursion schedule needs at least one level");
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    const FmmTensor& t = levels_[l];
    if (t.support()) throw ContractError("level " + std::to_string(l + 1) + " is a partial scheme");
    for (const auto& term : t.terms())
      if (!is_rational(term.P) || !is_rational(term.Q) || !is_rational(term.S))
        throw ContractError("level " + std::to_string(l + 1) + " has e-dependent entries");
    const FmmTensor exact = t.field_mode() == FieldMode::rational ? t : FmmTensor(t.dims(), FieldMode::rational, t.terms());
    if (!verify_exact(exact).passed)
      throw ContractError("level " + std::to_string(l + 1) + " (" + t.dims().to_string() + ") does not verify");
  }
}

Dims RecursionSchedule::composite_dims() const {
  Dims d{1, 1, 1};
  for (const auto& t : levels_) d = {d.m * t.dims().m, d.n * t.dims().n, d.p * t.dims().p};
  return d;
}

RationalMatrix multiply_recursive(const RecursionSchedule& s, const RationalMatrix& A, const RationalMatrix& B,
                                  std::atomic<std::uint64_t>* counter) {
  check_operands(s.composite_dims(), A.rows(), A.cols(), B.rows(), B.cols());
  std::vector<std::vector<ExactTerm>> levels;
  std::vector<Dims> dims;
  for (const auto& t : s.levels()) {
    levels.push_back(exact_terms(t));
    dims.push_back(t.dims());
  }
  return multiply_level(levels, dims, 0, A, B, counter);
}

std::uint64_t count_multiplications(const RecursionSchedule& s) {
  std::uint64_t n = 1;
  for (const auto& t : s.levels()) n *= t.rank();
  return n;
}

RationalMatrix classical_multiply(const RationalMatrix& A, const RationalMatrix& B) { return A * B; }

namespace {

using Extended = boost::multiprecision::cpp_bin_float_50;

template <class Real>
double relative_error(const FmmTensor& t, const NumericMatrix& A, const NumericMatrix& B, double eps_value) {
  const Dims& d = t.dims();
  const Real eps(eps_value);
  std::vector<Real> C(d.m * d.p, Real(0)), ref(d.m * d.p, Real(0));
  for (const auto& term : t.terms()) {
    Real left(0), right(0);
    for (std::size_t i = 0; i < d.m; ++i)
      for (std::size_t j = 0; j < d.n; ++j)
        if (!term.P(i, j).is_zero() && A(i, j) != 0.0) left += term.P(i, j).evaluate(eps) * Real(A(i, j));
    if (left == 0) continue;
    for (std::size_t j = 0; j < d.n; ++j)
      for (std::size_t k = 0; k < d.p; ++k)
        if (!term.Q(j, k).is_zero() && B(j, k) != 0.0) right += term.Q(j, k).evaluate(eps) * Real(B(j, k));
    if (right == 0) continue;
    const Real w = left * right;
    for (std::size_t k = 0; k < d.p; ++k)
      for (std::size_t i = 0; i < d.m; ++i)
        if (!term.S(k, i).is_zero()) C[i * d.p + k] += w * term.S(k, i).evaluate(eps);
  }
  for (std::size_t i = 0; i < d.m; ++i)
    for (std::size_t k = 0; k < d.p; ++k)
      for (std::size_t j = 0; j < d.n; ++j) ref[i * d.p + k] += Real(A(i, j)) * Real(B(j, k));
  Real num(0), den(0);
  for (std::size_t x = 0; x < C.size(); ++x) {
    const Real diff = C[x] - ref[x];
    num += diff * diff;
    den += ref[x] * ref[x];
  }
  if (den == 0) return num == 0 ? 0.0 : INFINITY;
  using std::sqrt;
  return static_cast<double>(sqrt(num / den));
}

}  // namespace

ErrorScan epsilon_error_scan(const FmmTensor& t, const NumericMatrix& A, const NumericMatrix& B,
                             const std::vector<double>& eps_values, ScanPrecision precision) {
  check_operands(t.dims(), static_cast<std::size_t>(A.rows()), static_cast<std::size_t>(A.cols()),
                 static_cast<std::size_t>(B.rows()), static_cast<std::size_t>(B.cols()));
  check_support(t, [&](std::size_t i, std::size_t j) { return A(i, j) != 0.0; });
  if (!A.allFinite() || !B.allFinite()) throw ContractError("error scan inputs must be finite");
  for (std::size_t i = 0; i < eps_values.size(); ++i) {
    if (!(eps_values[i] > 0.0)) throw ContractError("eps values must be positive");
    if (i && !(eps_values[i] < eps_values[i - 1])) throw ContractError("eps values must be strictly decreasing");
  }

  ErrorScan scan;
  for (double eps : eps_values) {
    const double err = precision == ScanPrecision::extended ? relative_error<Extended>(t, A, B, eps)
                                                            : relative_error<double>(t, A, B, eps);
    if (!std::isfinite(err)) {
      std::ostringstream msg;
      msg << "eps " << eps << ": evaluation overflowed";
      scan.diagnostics.push_back(msg.str());
    }
    scan.samples.push_back({eps, err});
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const auto& s : scan.samples) {
    if (!std::isfinite(s.relative_error) || s.relative_error <= 100 * DBL_EPSILON) continue;
    const double x = std::log(s.eps), y = std::log(s.relative_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n >= 2) {
    const double denom = n * sxx - sx * sx;
    if (denom != 0.0) scan.fitted_slope = (n * sxy - sx * sy) / denom;
  }
  if (n < scan.samples.size())
    scan.diagnostics.push_back(std::to_string(scan.samples.size() - n) +
                               " sample(s) at or below the rounding floor were left out of the fit");
  return scan;
}

}  // namespace fmmkit
