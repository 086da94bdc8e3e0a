#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fmmkit/tensor.hpp"

namespace fmmkit {

/// C = Σ_i ⟨P_i,A⟩·⟨Q_i,B⟩·S_iᵀ using exactly rank(t) products of linear-form values.
/// `t` must be an exact scheme with constant entries; entries of A outside the
/// support mask must be zero.
RationalMatrix apply_bilinear(const FmmTensor& t, const RationalMatrix& A, const RationalMatrix& B);

/// Ordered levels of a recursive algorithm, outermost first. Every level is
/// checked with verify_exact on construction.
class RecursionSchedule {
 public:
  explicit RecursionSchedule(std::vector<FmmTensor> levels);

  const std::vector<FmmTensor>& levels() const noexcept { return levels_; }
  /// Componentwise product of the level dims.
  Dims composite_dims() const;

 private:
  std::vector<FmmTensor> levels_;
};

/// Block-recursive product following `s`. Each base-level scalar product adds one
/// to `counter` when given.
RationalMatrix multiply_recursive(const RecursionSchedule& s, const RationalMatrix& A, const RationalMatrix& B,
                                  std::atomic<std::uint64_t>* counter = nullptr);

/// Product of the level ranks.
std::uint64_t count_multiplications(const RecursionSchedule& s);

/// Schoolbook product, the oracle for the evaluator tests.
RationalMatrix classical_multiply(const RationalMatrix& A, const RationalMatrix& B);

using NumericMatrix = Eigen::MatrixXd;

struct ErrorSample {
  double eps;
  double relative_error;
};

struct ErrorScan {
  std::vector<ErrorSample> samples;
  /// Least-squares slope of log(error) against log(eps); absent with fewer than two usable samples.
  std::optional<double> fitted_slope;
  std::vector<std::string> diagnostics;
};

enum class ScanPrecision {
  extended,  ///< 50 decimal digits
  binary64,  ///< plain double; large e^-k coefficients swamp the error at small eps
};

/// Relative Frobenius error ‖C_eps − A·B‖ / ‖A·B‖ of the scheme evaluated at each eps.
/// Samples at or below 100× machine epsilon are excluded from the slope.
ErrorScan epsilon_error_scan(const FmmTensor& t, const NumericMatrix& A, const NumericMatrix& B,
                             const std::vector<double>& eps_values,
                             ScanPrecision precision = ScanPrecision::extended);

}  // namespace fmmkit
