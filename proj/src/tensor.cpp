#include "fmmkit/tensor.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

#include "fmmkit/parallel.hpp"

namespace fmmkit {

std::string Dims::to_string() const {
  return std::to_string(m) + "x" + std::to_string(n) + "x" + std::to_string(p);
}

const char* to_string(FieldMode mode) { return mode == FieldMode::rational ? "rational" : "laurent"; }

SupportMask::SupportMask(std::size_t rows, std::size_t cols, std::vector<bool> allowed)
    : rows_(rows), cols_(cols), allowed_(std::move(allowed)) {
  if (allowed_.size() != rows_ * cols_) throw ShapeError("support mask data does not match its shape");
  if (allowed_count() == 0) throw ContractError("support mask allows no entry");
}

std::size_t SupportMask::allowed_count() const {
  return static_cast<std::size_t>(std::count(allowed_.begin(), allowed_.end(), true));
}

namespace {

void check_factor(const LaurentMatrix& f, std::size_t rows, std::size_t cols, const char* slot, std::size_t term,
                  FieldMode mode) {
  const std::string where = std::string(slot) + " factor of term " + std::to_string(term + 1);
  if (f.rows() != rows || f.cols() != cols)
    throw ShapeError(where + " is " + std::to_string(f.rows()) + "x" + std::to_string(f.cols()) + ", expected " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  if (f.is_zero()) throw ContractError(where + " is identically zero");
  if (mode == FieldMode::rational && !is_rational(f)) throw ContractError(where + " depends on e in rational mode");
}

}  // namespace

FmmTensor::FmmTensor(Dims dims, FieldMode mode, std::vector<RankOneTerm> terms, std::optional<SupportMask> support)
    : dims_(dims), mode_(mode), terms_(std::move(terms)), support_(std::move(support)) {
  if (dims_.m == 0 || dims_.n == 0 || dims_.p == 0) throw ShapeError("tensor dimensions must be positive");
  if (terms_.empty()) throw ContractError("tensor must have at least one term");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    check_factor(terms_[i].P, dims_.m, dims_.n, "P", i, mode_);
    check_factor(terms_[i].Q, dims_.n, dims_.p, "Q", i, mode_);
    check_factor(terms_[i].S, dims_.p, dims_.m, "S", i, mode_);
  }
  if (support_ && (support_->rows() != dims_.m || support_->cols() != dims_.n))
    throw ShapeError("support mask shape does not match m x n");
}

FmmTensor FmmTensor::lifted() const { return {dims_, FieldMode::laurent, terms_, support_}; }

FmmTensor classical_tensor(const Dims& d, const std::optional<SupportMask>& support) {
  std::vector<RankOneTerm> terms;
  for (std::size_t i = 0; i < d.m; ++i)
    for (std::size_t j = 0; j < d.n; ++j) {
      if (support && !support->allowed(i, j)) continue;
      for (std::size_t k = 0; k < d.p; ++k)
        terms.push_back({LaurentMatrix::unit(d.m, d.n, i, j), LaurentMatrix::unit(d.n, d.p, j, k),
                         LaurentMatrix::unit(d.p, d.m, k, i)});
    }
  return {d, FieldMode::rational, std::move(terms), support};
}

LaurentScalar contract(const FmmTensor& t, const LaurentMatrix& A, const LaurentMatrix& B, const LaurentMatrix& C) {
  const Dims& d = t.dims();
  if (A.rows() != d.m || A.cols() != d.n || B.rows() != d.n || B.cols() != d.p || C.rows() != d.p ||
      C.cols() != d.m)
    throw ShapeError("contract: A, B, C must be m x n, n x p and p x m");
  LaurentScalar total;
  for (const auto& term : t.terms()) total += frobenius(term.P, A) * frobenius(term.Q, B) * frobenius(term.S, C);
  return total;
}

namespace {

template <class T>
struct Entry {
  std::size_t row, col;
  T value;
};

template <class T>
std::vector<Entry<T>> nonzeros(const Matrix<T>& m) {
  std::vector<Entry<T>> out;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!m(i, j).is_zero()) out.push_back({i, j, m(i, j)});
  return out;
}

// Dense (mn)·(np)·(pm) coefficient array of Σ P⊗Q⊗S minus the classical
// target scaled by `target`, computed slice by slice over the P-row index i.
// Calls sink(index, residual) for every nonzero residual in increasing index order.
template <class T, class Factors, class Sink>
void expand_residual(const Dims& d, const std::vector<Factors>& terms, const std::optional<SupportMask>& support,
                     const T& target, Sink&& sink) {
  const std::size_t np = d.n * d.p, pm = d.p * d.m;
  const std::size_t slice = d.n * np * pm;
  std::vector<std::vector<std::pair<BrentIndex, T>>> found(d.m);
  parallel_for(d.m, [&](std::size_t i) {
    std::vector<T> acc(slice);
    for (const auto& [P, Q, S] : terms)
      for (const auto& a : P) {
        if (a.row != i) continue;
        for (const auto& b : Q) {
          const T ab = a.value * b.value;
          const std::size_t base = (a.col * np + b.row * d.p + b.col) * pm;
          for (const auto& c : S) acc[base + c.row * d.m + c.col] += ab * c.value;
        }
      }
    for (std::size_t j = 0; j < d.n; ++j) {
      if (support && !support->allowed(i, j)) continue;
      for (std::size_t k = 0; k < d.p; ++k) acc[(j * np + j * d.p + k) * pm + k * d.m + i] -= target;
    }
    for (std::size_t idx = 0; idx < slice; ++idx) {
      if (acc[idx].is_zero()) continue;
      const std::size_t j = idx / (np * pm), q = (idx / pm) % np, s = idx % pm;
      found[i].push_back({BrentIndex{i, j, q / d.p, q % d.p, s / d.m, s % d.m}, std::move(acc[idx])});
    }
  });
  for (auto& bucket : found)
    for (auto& [index, value] : bucket) sink(index, std::move(value));
}

template <class T>
using FactorEntries = std::array<std::vector<Entry<T>>, 3>;

}  // namespace

namespace {

// Coordinates of masked A-entries carry no equation.
std::size_t equation_count(const Dims& d, const std::optional<SupportMask>& support) {
  return (support ? support->allowed_count() : d.m * d.n) * d.n * d.p * d.p * d.m;
}

}  // namespace

VerificationReport verify_exact(const FmmTensor& t) {
  if (t.field_mode() != FieldMode::rational) throw ContractError("verify_exact requires a rational-mode tensor");
  const Dims& d = t.dims();
  std::vector<FactorEntries<Rational>> factors;
  factors.reserve(t.rank());
  for (const auto& term : t.terms())
    factors.push_back({nonzeros(constant_part(term.P)), nonzeros(constant_part(term.Q)),
                       nonzeros(constant_part(term.S))});
  VerificationReport report;
  report.total_equations = equation_count(d, t.support());
  expand_residual(d, factors, t.support(), Rational(1), [&](const BrentIndex& idx, Rational r) {
    report.failing_equations.push_back({idx, LaurentScalar(r)});
  });
  report.passed = report.failing_equations.empty();
  return report;
}

ApproxReport verify_approximate(const FmmTensor& t, ApproxMode mode) {
  const Dims& d = t.dims();
  std::vector<FactorEntries<LaurentScalar>> factors;
  factors.reserve(t.rank());
  for (const auto& term : t.terms()) factors.push_back({nonzeros(term.P), nonzeros(term.Q), nonzeros(term.S)});

  ApproxReport report;
  report.total_equations = equation_count(d, t.support());

  if (mode == ApproxMode::scaled) {
    // The smallest exponent present in the expansion fixes the candidate scale q.
    std::optional<int> lowest;
    expand_residual(d, factors, t.support(), LaurentScalar(),
                    [&](const BrentIndex&, const LaurentScalar& v) { lowest = min_order(lowest, v.order()); });
    report.target_scale = std::max(0, lowest.value_or(0));
  }
  const int q = report.target_scale;
  expand_residual(d, factors, t.support(), LaurentScalar::monomial(1, q),
                  [&](const BrentIndex& idx, LaurentScalar r) {
                    if (q != 0) r = r.shifted(-q);
                    report.discrepancy_order = min_order(report.discrepancy_order, r.order());
                    if (*r.order() < 1) report.offending_equations.push_back({idx, std::move(r)});
                  });
  report.valid = report.offending_equations.empty();
  return report;
}

TypePolynomial::TypePolynomial(std::map<Exponents, std::size_t> monomials) {
  for (const auto& [e, c] : monomials) add(e, c);
}

void TypePolynomial::add(const Exponents& e, std::size_t multiplicity) {
  if (multiplicity == 0) return;
  monomials_[e] += multiplicity;
}

std::size_t TypePolynomial::total_multiplicity() const {
  std::size_t total = 0;
  for (const auto& [e, c] : monomials_) total += c;
  return total;
}

TypePolynomial TypePolynomial::parse(const std::string& text) {
  TypePolynomial out;
  std::string compact;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c)) && c != '*') compact += c;
  std::size_t pos = 0;
  auto read_int = [&](std::size_t fallback) {
    const std::size_t start = pos;
    while (pos < compact.size() && std::isdigit(static_cast<unsigned char>(compact[pos]))) ++pos;
    return pos == start ? fallback : static_cast<std::size_t>(std::stoul(compact.substr(start, pos - start)));
  };
  while (pos < compact.size()) {
    const std::size_t coeff = read_int(1);
    Exponents e{0, 0, 0};
    while (pos < compact.size() && compact[pos] != '+') {
      const char var = compact[pos++];
      const int slot = var == 'X' ? 0 : var == 'Y' ? 1 : var == 'Z' ? 2 : -1;
      if (slot < 0) throw ParseError(std::string("unexpected character '") + var + "' in type polynomial");
      std::size_t power = 1;
      if (pos < compact.size() && compact[pos] == '^') {
        ++pos;
        power = read_int(0);
        if (power == 0) throw ParseError("missing exponent in type polynomial");
      }
      e[slot] += power;
    }
    if (e[0] == 0 || e[1] == 0 || e[2] == 0) throw ParseError("type polynomial monomial must contain X, Y and Z");
    out.add(e, coeff);
    if (pos < compact.size()) ++pos;  // '+'
  }
  return out;
}

std::string TypePolynomial::to_string() const {
  std::vector<std::pair<Exponents, std::size_t>> ordered(monomials_.begin(), monomials_.end());
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    const auto da = a.first[0] + a.first[1] + a.first[2], db = b.first[0] + b.first[1] + b.first[2];
    if (da != db) return da > db;
    return a.first > b.first;
  });
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : ordered) {
    if (!first) os << " + ";
    first = false;
    if (c != 1) os << c;
    const char names[3] = {'X', 'Y', 'Z'};
    for (int s = 0; s < 3; ++s) {
      if (e[s] == 0) continue;
      os << names[s];
      if (e[s] != 1) os << '^' << e[s];
    }
  }
  return os.str();
}

TypePolynomial type_polynomial(const FmmTensor& t) {
  TypePolynomial out;
  for (const auto& term : t.terms()) {
    if (t.field_mode() == FieldMode::rational)
      out.add({matrix_rank(constant_part(term.P)), matrix_rank(constant_part(term.Q)),
               matrix_rank(constant_part(term.S))});
    else
      out.add({matrix_rank(term.P), matrix_rank(term.Q), matrix_rank(term.S)});
  }
  return out;
}

}  // namespace fmmkit
