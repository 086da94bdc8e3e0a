#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fmmkit/matrix.hpp"

namespace fmmkit {

/// Shape ⟨m,n,p⟩ of the product of an m×n matrix A by an n×p matrix B.
struct Dims {
  std::size_t m = 1;
  std::size_t n = 1;
  std::size_t p = 1;

  friend bool operator==(const Dims&, const Dims&) = default;
  std::string to_string() const;
};

enum class FieldMode { rational, laurent };

const char* to_string(FieldMode mode);

/// Allowed A-entries of a partial product; `false` marks an entry known to be zero.
class SupportMask {
 public:
  SupportMask(std::size_t rows, std::size_t cols, std::vector<bool> allowed);
  static SupportMask full(std::size_t rows, std::size_t cols) {
    return {rows, cols, std::vector<bool>(rows * cols, true)};
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool allowed(std::size_t i, std::size_t j) const { return allowed_[i * cols_ + j]; }
  std::size_t allowed_count() const;
  friend bool operator==(const SupportMask&, const SupportMask&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<bool> allowed_;
};

/// One summand P ⊗ Q ⊗ S. P is m×n (pairs with A), Q is n×p (pairs with B),
/// S is p×m (pairs with the dual matrix C; the output coefficient matrix is Sᵀ).
struct RankOneTerm {
  LaurentMatrix P;
  LaurentMatrix Q;
  LaurentMatrix S;

  friend bool operator==(const RankOneTerm&, const RankOneTerm&) = default;
};

/// A bilinear matrix-product scheme stored as a sum of rank-one tensors.
///
/// Construction validates the shapes of every factor, rejects all-zero
/// factors and, in rational mode, any e-dependent entry. Validity as a matrix
/// product is not checked here; see verify_exact / verify_approximate.
class FmmTensor {
 public:
  FmmTensor(Dims dims, FieldMode mode, std::vector<RankOneTerm> terms,
            std::optional<SupportMask> support = std::nullopt);

  const Dims& dims() const noexcept { return dims_; }
  FieldMode field_mode() const noexcept { return mode_; }
  const std::vector<RankOneTerm>& terms() const noexcept { return terms_; }
  const RankOneTerm& term(std::size_t i) const { return terms_.at(i); }
  std::size_t rank() const noexcept { return terms_.size(); }
  const std::optional<SupportMask>& support() const noexcept { return support_; }

  /// Same terms, laurent field mode.
  FmmTensor lifted() const;

  friend bool operator==(const FmmTensor&, const FmmTensor&) = default;

 private:
  Dims dims_;
  FieldMode mode_;
  std::vector<RankOneTerm> terms_;
  std::optional<SupportMask> support_;
};

/// Σ_{i,j,k} E_i^j ⊗ E_j^k ⊗ E_k^i over the (i, j) allowed by `support`.
FmmTensor classical_tensor(const Dims& d, const std::optional<SupportMask>& support = std::nullopt);

/// Σ_i ⟨P_i,A⟩⟨Q_i,B⟩⟨S_i,C⟩. Equals Trace(A·B·C) for a valid scheme.
LaurentScalar contract(const FmmTensor& t, const LaurentMatrix& A, const LaurentMatrix& B, const LaurentMatrix& C);

/// Coordinate of one Brent equation: the coefficient of a_ij·b_j'k·c_k'i'.
struct BrentIndex {
  std::size_t i, j, jp, k, kp, ip;
  friend bool operator==(const BrentIndex&, const BrentIndex&) = default;
};

struct FailingEquation {
  BrentIndex index;
  LaurentScalar residual;
};

struct VerificationReport {
  bool passed = false;
  std::vector<FailingEquation> failing_equations;
  std::size_t total_equations = 0;
};

enum class ApproxMode {
  strict,  ///< expanded − classical has e-order ≥ 1 everywhere
  scaled,  ///< expanded = e^q·classical + higher order for the smallest q ≥ 0
};

struct ApproxReport {
  bool valid = false;
  /// min e-order of expanded − target; nullopt means +∞ (exact agreement).
  std::optional<int> discrepancy_order;
  /// Equations whose residual has order < 1 (only these make the scheme invalid).
  std::vector<FailingEquation> offending_equations;
  std::size_t total_equations = 0;
  /// Power q of e multiplying the classical target (always 0 in strict mode).
  int target_scale = 0;
};

/// Exact Brent-system check over ℚ. Throws ContractError on a laurent-mode tensor.
VerificationReport verify_exact(const FmmTensor& t);
/// e-order analysis of expanded(t) − classical. Rational tensors are lifted.
ApproxReport verify_approximate(const FmmTensor& t, ApproxMode mode = ApproxMode::strict);

/// Multiset of factor-rank triples (rank P, rank Q, rank S).
class TypePolynomial {
 public:
  using Exponents = std::array<std::size_t, 3>;

  TypePolynomial() = default;
  explicit TypePolynomial(std::map<Exponents, std::size_t> monomials);

  void add(const Exponents& e, std::size_t multiplicity = 1);
  const std::map<Exponents, std::size_t>& monomials() const noexcept { return monomials_; }
  std::size_t total_multiplicity() const;

  /// Parses text such as "17X^2Y^2Z^2 + 2XY^4Z + 7XYZ"; each monomial carries X, Y and Z.
  static TypePolynomial parse(const std::string& text);
  /// Monomials by decreasing total degree, then decreasing exponent triple.
  std::string to_string() const;

  friend bool operator==(const TypePolynomial&, const TypePolynomial&) = default;

 private:
  std::map<Exponents, std::size_t> monomials_;
};

TypePolynomial type_polynomial(const FmmTensor& t);

}  // namespace fmmkit
