#include "fmmkit/als.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>

#include "fmmkit/parallel.hpp"

namespace fmmkit {

namespace {

void check_shapes(const FactorSet& f, const Dims& d) {
  const Eigen::Index r = f.P.rows();
  if (f.Q.rows() != r || f.S.rows() != r || f.P.cols() != Eigen::Index(d.m * d.n) ||
      f.Q.cols() != Eigen::Index(d.n * d.p) || f.S.cols() != Eigen::Index(d.p * d.m))
    throw ShapeError("factor stacks do not match rank " + std::to_string(r) + " and dims " + d.to_string());
}

// Σ_r X_r ⊗ Y_r ⊗ Z_r as a dense (mn)·(np)·(pm) array.
std::vector<double> expand(const FactorSet& f, const Dims& d) {
  const std::size_t a = d.m * d.n, b = d.n * d.p, c = d.p * d.m;
  std::vector<double> T(a * b * c, 0.0);
  for (Eigen::Index r = 0; r < f.rank(); ++r)
    for (std::size_t x = 0; x < a; ++x) {
      const double px = f.P(r, x);
      if (px == 0.0) continue;
      for (std::size_t y = 0; y < b; ++y) {
        const double pq = px * f.Q(r, y);
        if (pq == 0.0) continue;
        double* row = &T[(x * b + y) * c];
        for (std::size_t z = 0; z < c; ++z) row[z] += pq * f.S(r, z);
      }
    }
  return T;
}

// Right-hand side Kᵀt of the first-slot update for ⟨m,n,p⟩: entry (r, i·n+j) = Σ_k Y_r(j,k)·Z_r(k,i).
Eigen::MatrixXd classical_rhs(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Z, const Dims& d) {
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(Y.rows(), Eigen::Index(d.m * d.n));
  for (std::size_t i = 0; i < d.m; ++i)
    for (std::size_t j = 0; j < d.n; ++j)
      for (std::size_t k = 0; k < d.p; ++k)
        R.col(Eigen::Index(i * d.n + j)) += Y.col(Eigen::Index(j * d.p + k)).cwiseProduct(Z.col(Eigen::Index(k * d.m + i)));
  return R;
}

// Minimizes over X with Y, Z fixed; returns true if jitter was needed.
bool solve_block(Eigen::MatrixXd& X, const Eigen::MatrixXd& model, const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Z,
                 double lambda, const Dims& d) {
  const Eigen::Index r = X.rows();
  Eigen::MatrixXd G = (Y * Y.transpose()).cwiseProduct(Z * Z.transpose());
  G.diagonal().array() += lambda;
  const Eigen::MatrixXd rhs = classical_rhs(Y, Z, d) + lambda * model;
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  bool jittered = false;
  if (llt.info() != Eigen::Success) {
    G += 1e-12 * Eigen::MatrixXd::Identity(r, r);
    llt.compute(G);
    jittered = true;
  }
  X = llt.solve(rhs);
  return jittered;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

FactorSet FactorSet::zeros(const Dims& d, std::size_t rank) {
  const auto r = Eigen::Index(rank);
  return {Eigen::MatrixXd::Zero(r, Eigen::Index(d.m * d.n)), Eigen::MatrixXd::Zero(r, Eigen::Index(d.n * d.p)),
          Eigen::MatrixXd::Zero(r, Eigen::Index(d.p * d.m))};
}

FactorSet FactorSet::from_tensor(const FmmTensor& t) {
  const Dims& d = t.dims();
  FactorSet f = zeros(d, t.rank());
  for (std::size_t r = 0; r < t.rank(); ++r) {
    const RankOneTerm& term = t.term(r);
    if (!is_rational(term.P) || !is_rational(term.Q) || !is_rational(term.S))
      throw ContractError("only e-free tensors convert to real factors");
    const auto row = Eigen::Index(r);
    for (std::size_t i = 0; i < d.m; ++i)
      for (std::size_t j = 0; j < d.n; ++j) f.P(row, Eigen::Index(i * d.n + j)) = term.P(i, j).constant().to_double();
    for (std::size_t j = 0; j < d.n; ++j)
      for (std::size_t k = 0; k < d.p; ++k) f.Q(row, Eigen::Index(j * d.p + k)) = term.Q(j, k).constant().to_double();
    for (std::size_t k = 0; k < d.p; ++k)
      for (std::size_t i = 0; i < d.m; ++i) f.S(row, Eigen::Index(k * d.m + i)) = term.S(k, i).constant().to_double();
  }
  return f;
}

double brent_residual(const FactorSet& f, const Dims& d) {
  check_shapes(f, d);
  std::vector<double> T = expand(f, d);
  const std::size_t b = d.n * d.p, c = d.p * d.m;
  for (std::size_t i = 0; i < d.m; ++i)
    for (std::size_t j = 0; j < d.n; ++j)
      for (std::size_t k = 0; k < d.p; ++k) T[((i * d.n + j) * b + (j * d.p + k)) * c + (k * d.m + i)] -= 1.0;
  double sum = 0.0;
  for (double v : T) sum += v * v;
  return sum;
}

double regularized_objective(const FactorSet& f, const FactorSet& models, double lambda, const Dims& d) {
  check_shapes(models, d);
  return brent_residual(f, d) +
         lambda * ((f.P - models.P).squaredNorm() + (f.Q - models.Q).squaredNorm() + (f.S - models.S).squaredNorm());
}

FactorSet als_sweep(const FactorSet& f, const FactorSet& models, double lambda, const Dims& d, SweepStats* stats) {
  check_shapes(f, d);
  check_shapes(models, d);
  if (!(lambda >= 0.0)) throw ContractError("lambda must be non-negative");
  FactorSet g = f;
  const Dims dq{d.n, d.p, d.m}, ds{d.p, d.m, d.n};
  int jitters = 0;
  jitters += solve_block(g.P, models.P, g.Q, g.S, lambda, d);
  if (stats) stats->objective_after[0] = regularized_objective(g, models, lambda, d);
  jitters += solve_block(g.Q, models.Q, g.S, g.P, lambda, dq);
  if (stats) stats->objective_after[1] = regularized_objective(g, models, lambda, d);
  jitters += solve_block(g.S, models.S, g.P, g.Q, lambda, ds);
  if (stats) {
    stats->objective_after[2] = regularized_objective(g, models, lambda, d);
    stats->jittered_solves = jitters;
  }
  return g;
}

Rational snap_to_grid(double x, const std::vector<Rational>& grid) {
  if (grid.empty()) throw ContractError("snap grid is empty");
  const Rational* best = &grid.front();
  double best_dist = std::abs(x - best->to_double());
  for (const auto& g : grid) {
    const double dist = std::abs(x - g.to_double());
    if (dist < best_dist) {
      best = &g;
      best_dist = dist;
    } else if (dist == best_dist && !(g == *best)) {
      if (g.is_zero() || (!best->is_zero() && abs(g) < abs(*best))) best = &g;
    }
  }
  return *best;
}

FactorSet snap(const FactorSet& f, const std::vector<Rational>& grid) {
  const auto snap_all = [&](const Eigen::MatrixXd& m) {
    return m.unaryExpr([&](double x) { return snap_to_grid(x, grid).to_double(); }).eval();
  };
  return {snap_all(f.P), snap_all(f.Q), snap_all(f.S)};
}

std::optional<FmmTensor> rationalize(const FactorSet& f, const std::vector<Rational>& grid, const Dims& d) {
  check_shapes(f, d);
  std::vector<RankOneTerm> terms;
  for (Eigen::Index r = 0; r < f.rank(); ++r) {
    RankOneTerm t{LaurentMatrix(d.m, d.n), LaurentMatrix(d.n, d.p), LaurentMatrix(d.p, d.m)};
    for (std::size_t i = 0; i < d.m; ++i)
      for (std::size_t j = 0; j < d.n; ++j) t.P(i, j) = snap_to_grid(f.P(r, Eigen::Index(i * d.n + j)), grid);
    for (std::size_t j = 0; j < d.n; ++j)
      for (std::size_t k = 0; k < d.p; ++k) t.Q(j, k) = snap_to_grid(f.Q(r, Eigen::Index(j * d.p + k)), grid);
    for (std::size_t k = 0; k < d.p; ++k)
      for (std::size_t i = 0; i < d.m; ++i) t.S(k, i) = snap_to_grid(f.S(r, Eigen::Index(k * d.m + i)), grid);
    if (t.P.is_zero() || t.Q.is_zero() || t.S.is_zero()) continue;
    terms.push_back(std::move(t));
  }
  if (terms.empty()) return std::nullopt;
  FmmTensor t(d, FieldMode::rational, std::move(terms));
  if (!verify_exact(t).passed) return std::nullopt;
  return t;
}

std::vector<Rational> default_snap_grid() {
  return {Rational(0), Rational(1), Rational(-1), Rational(1, 2), Rational(-1, 2)};
}

void SearchConfig::validate() const {
  if (dims.m == 0 || dims.n == 0 || dims.p == 0) throw ContractError("dims must be positive");
  if (rank == 0) throw ContractError("rank must be positive");
  if (!(lambda_init > 0.0)) throw ContractError("lambda_init must be positive");
  if (!(lambda_decay > 0.0 && lambda_decay < 1.0)) throw ContractError("lambda_decay must lie in (0, 1)");
  if (!(tol > 0.0)) throw ContractError("tol must be positive");
  if (!(coarse_fraction >= 0.0 && coarse_fraction <= 1.0)) throw ContractError("coarse_fraction must lie in [0, 1]");
  if (restarts == 0) throw ContractError("restarts must be positive");
  bool has_zero = false;
  for (const auto& g : snap_grid) has_zero = has_zero || g.is_zero();
  if (!has_zero) throw ContractError("snap grid must contain 0");
  if (dims.m * dims.n * dims.p > 36 && !allow_large)
    throw ContractError("mnp = " + std::to_string(dims.m * dims.n * dims.p) +
                        " exceeds the desk-scale cap of 36; pass the large-problem flag to override");
}

namespace {

constexpr std::size_t kStagnationWindow = 25;
constexpr double kStagnationDrop = 1e-3;

SearchResult run_restart(const SearchConfig& cfg, std::size_t restart) {
  const Dims& d = cfg.dims;
  std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(restart)));
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  FactorSet f = FactorSet::zeros(d, cfg.rank);
  for (Eigen::MatrixXd* m : {&f.P, &f.Q, &f.S})
    for (Eigen::Index i = 0; i < m->rows(); ++i)
      for (Eigen::Index j = 0; j < m->cols(); ++j) (*m)(i, j) = uniform(rng);

  SearchResult out;
  out.restart_index = restart;
  out.best_residual = brent_residual(f, d);
  out.factors = f;
  std::vector<Rational> coarse;
  for (const auto& g : cfg.snap_grid)
    if (g.is_integer()) coarse.push_back(g);
  if (coarse.size() < 2) coarse = cfg.snap_grid;
  const auto coarse_sweeps = std::size_t(cfg.coarse_fraction * double(cfg.max_sweeps));
  double lambda = cfg.lambda_init;
  double previous = out.best_residual;
  std::vector<double> history;
  std::size_t last_reset = 0;
  for (std::size_t k = 1; k <= cfg.max_sweeps; ++k) {
    SweepStats stats;
    const FactorSet models = snap(f, k <= coarse_sweeps ? coarse : cfg.snap_grid);
    f = als_sweep(f, models, lambda, d, &stats);
    out.jittered_solves += std::size_t(stats.jittered_solves);
    const double res = brent_residual(f, d);
    out.trace.push_back({k, res, lambda});
    out.sweeps_used = k;
    history.push_back(res);
    if (!std::isfinite(res)) break;
    if (res < out.best_residual) {
      out.best_residual = res;
      out.factors = f;
    }
    if (res < cfg.tol) {
      const FactorSet snapped = snap(f, cfg.snap_grid);
      if (brent_residual(snapped, d) < cfg.tol) {
        out.best_residual = res;
        out.factors = f;
        break;
      }
    }
    if (res < previous) lambda *= cfg.lambda_decay;
    if (k - last_reset > kStagnationWindow) {
      const double before = history[k - 1 - kStagnationWindow];
      if (before - res < kStagnationDrop * before) {
        lambda = cfg.lambda_init;
        last_reset = k;
      }
    }
    previous = res;
  }
  out.rationalized = rationalize(out.factors, cfg.snap_grid, d);
  out.successful_restarts = out.rationalized ? 1 : 0;
  return out;
}

bool better(const SearchResult& a, const SearchResult& b) {
  if (a.rationalized.has_value() != b.rationalized.has_value()) return a.rationalized.has_value();
  if (a.best_residual != b.best_residual) return a.best_residual < b.best_residual;
  return a.restart_index < b.restart_index;
}

}  // namespace

SearchResult search(const SearchConfig& cfg) {
  cfg.validate();
  if (cfg.dims.m * cfg.dims.n * cfg.dims.p > 36)
    std::cerr << "warning: search at mnp = " << cfg.dims.m * cfg.dims.n * cfg.dims.p
              << " is beyond desk scale and may be slow\n";
  std::vector<SearchResult> results(cfg.restarts);
  parallel_for(cfg.restarts, [&](std::size_t i) { results[i] = run_restart(cfg, i); });
  std::size_t best = 0, successes = 0, jitters = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    successes += results[i].successful_restarts;
    jitters += results[i].jittered_solves;
    if (better(results[i], results[best])) best = i;
  }
  SearchResult out = std::move(results[best]);
  out.successful_restarts = successes;
  out.jittered_solves = jitters;
  return out;
}

std::string format_trace(const std::vector<TraceEntry>& trace) {
  std::string out;
  char buf[96];
  for (const auto& e : trace) {
    std::snprintf(buf, sizeof buf, "sweep %zu residual %.17g lambda %.17g\n", e.sweep, e.residual, e.lambda);
    out += buf;
  }
  return out;
}

}  // namespace fmmkit
