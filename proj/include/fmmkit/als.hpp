#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fmmkit/tensor.hpp"

namespace fmmkit {

/// Real factor stacks, one row per rank-one term. Row layouts are row-major:
/// P(i,j) → column i·n+j, Q(j,k) → j·p+k, S(k,i) → k·m+i.
struct FactorSet {
  Eigen::MatrixXd P;  ///< r × (m·n)
  Eigen::MatrixXd Q;  ///< r × (n·p)
  Eigen::MatrixXd S;  ///< r × (p·m)

  Eigen::Index rank() const { return P.rows(); }
  static FactorSet zeros(const Dims& d, std::size_t rank);
  static FactorSet from_tensor(const FmmTensor& t);
};

/// ‖Σ_r P_r⊗Q_r⊗S_r − classical‖² over all (mn)(np)(pm) coefficients.
double brent_residual(const FactorSet& f, const Dims& d);

/// Residual plus λ·(‖P−P̃‖² + ‖Q−Q̃‖² + ‖S−S̃‖²).
double regularized_objective(const FactorSet& f, const FactorSet& models, double lambda, const Dims& d);

struct SweepStats {
  /// Objective after each of the P, Q and S solves.
  double objective_after[3] = {0, 0, 0};
  /// Number of block solves whose normal matrix needed the 1e-12·I jitter.
  int jittered_solves = 0;
};

/// One Gauss–Seidel pass P → Q → S; each block solves
/// (KᵀK + λI) x = Kᵀt + λ x̃ with the other two stacks fixed.
FactorSet als_sweep(const FactorSet& f, const FactorSet& models, double lambda, const Dims& d,
                    SweepStats* stats = nullptr);

/// Elementwise nearest grid value (ties toward 0, then toward the smaller magnitude).
Rational snap_to_grid(double x, const std::vector<Rational>& grid);
FactorSet snap(const FactorSet& f, const std::vector<Rational>& grid);

/// Snaps to the grid, drops terms with a zero factor and returns the exact
/// tensor if it passes verify_exact.
std::optional<FmmTensor> rationalize(const FactorSet& f, const std::vector<Rational>& grid, const Dims& d);

std::vector<Rational> default_snap_grid();

struct SearchConfig {
  Dims dims{2, 2, 2};
  std::size_t rank = 7;
  double lambda_init = 0.3;
  double lambda_decay = 0.95;
  std::vector<Rational> snap_grid = default_snap_grid();
  /// Fraction of each restart's sweeps whose models snap only to the integer
  /// members of snap_grid; the remaining sweeps use the whole grid.
  double coarse_fraction = 0.5;
  std::size_t max_sweeps = 2000;
  std::size_t restarts = 10;
  std::uint64_t seed = 1;
  double tol = 1e-10;
  /// Lifts the mnp ≤ 36 desk-scale cap.
  bool allow_large = false;

  /// Throws ContractError on an invalid configuration.
  void validate() const;
};

struct TraceEntry {
  std::size_t sweep;
  double residual;
  double lambda;
};

struct SearchResult {
  double best_residual = 0;
  FactorSet factors;
  std::size_t sweeps_used = 0;
  std::optional<FmmTensor> rationalized;
  /// Sweeps of the selected restart.
  std::vector<TraceEntry> trace;
  std::size_t restart_index = 0;
  std::size_t successful_restarts = 0;
  std::size_t jittered_solves = 0;
};

/// Seeded multi-restart ALS search. A restart stops once both the iterate and
/// its grid snap have residual below tol, or after max_sweeps. Fully deterministic for a given config,
/// independent of FMMKIT_THREADS.
SearchResult search(const SearchConfig& cfg);

/// `sweep <k> residual <float> lambda <float>` lines.
std::string format_trace(const std::vector<TraceEntry>& trace);

}  // namespace fmmkit
