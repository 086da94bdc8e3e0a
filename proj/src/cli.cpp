#include "fmmkit/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "fmmkit/algebra.hpp"
#include "fmmkit/als.hpp"
#include "fmmkit/evaluator.hpp"
#include "fmmkit/io.hpp"

namespace fmmkit {

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string format_index(const BrentIndex& b) {
  return "a" + std::to_string(b.i + 1) + std::to_string(b.j + 1) + "*b" + std::to_string(b.jp + 1) +
         std::to_string(b.k + 1) + "*c" + std::to_string(b.kp + 1) + std::to_string(b.ip + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// 1-based comma list → 0-based indices.
std::vector<std::size_t> parse_indices(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(text)) {
    std::size_t pos = 0;
    const unsigned long v = std::stoul(item, &pos);
    if (pos != item.size() || v == 0) throw ParseError("bad 1-based index '" + item + "'");
    out.push_back(v - 1);
  }
  return out;
}

void emit_tensor(const FmmTensor& t, const std::string& path, std::ostream& out) {
  if (path.empty())
    out << write_tensor(t);
  else
    save_tensor(path, t);
}

RecursionSchedule load_schedule(const std::string& list) {
  std::vector<FmmTensor> levels;
  for (const auto& path : split_list(list)) levels.push_back(load_tensor(path));
  return RecursionSchedule(std::move(levels));
}

const char* slot_name(Slot s) {
  switch (s) {
    case Slot::P:
      return "A";
    case Slot::Q:
      return "B";
    case Slot::S:
      return "C";
  }
  return "?";
}

int run_verify(const std::string& file, bool approx, const std::string& mode, std::ostream& out) {
  FmmTensor t = load_tensor(file);
  if (!approx && t.field_mode() == FieldMode::rational) {
    const VerificationReport r = verify_exact(t);
    const std::size_t ok = r.total_equations - r.failing_equations.size();
    out << (r.passed ? "PASS " : "FAIL ") << ok << "/" << r.total_equations << " equations\n";
    for (std::size_t i = 0; i < r.failing_equations.size() && i < 10; ++i)
      out << "  " << format_index(r.failing_equations[i].index) << ": residual "
          << r.failing_equations[i].residual.to_string() << "\n";
    return r.passed ? kOk : kFailed;
  }
  const ApproxReport r = verify_approximate(t, mode == "scaled" ? ApproxMode::scaled : ApproxMode::strict);
  const std::string order = r.discrepancy_order ? std::to_string(*r.discrepancy_order) : "inf";
  const std::size_t ok = r.total_equations - r.offending_equations.size();
  out << (r.valid ? "PASS " : "FAIL ") << ok << "/" << r.total_equations << " equations, discrepancy order "
      << order;
  if (r.target_scale != 0) out << ", target scale e^" << r.target_scale;
  out << "\n";
  for (std::size_t i = 0; i < r.offending_equations.size() && i < 10; ++i)
    out << "  " << format_index(r.offending_equations[i].index) << ": residual "
        << r.offending_equations[i].residual.to_string() << "\n";
  return r.valid ? kOk : kFailed;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and approximate fast matrix multiplication tensors", "fmmkit"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "check the Brent equations of a tensor file");
  std::string verify_file, verify_mode = "strict";
  bool verify_approx = false;
  verify->add_option("file", verify_file)->required();
  verify->add_flag("--approx", verify_approx, "e-order analysis instead of exact equality");
  verify->add_option("--mode", verify_mode)->check(CLI::IsMember({"strict", "scaled"}));

  auto* type = app.add_subcommand("type", "print the type polynomial");
  std::string type_file;
  type->add_option("file", type_file)->required();

  auto* compose = app.add_subcommand("compose", "build a new tensor from existing ones");
  std::string op, out_path, axis = "m", u_path, v_path, w_path, matrix_path, rows, cols, bcols;
  std::vector<std::string> inputs;
  std::vector<std::size_t> classical_dims;
  int times = 1;
  std::size_t group = 0;
  bool up_to_scalar = false;
  compose->add_option("--op", op)
      ->required()
      ->check(CLI::IsMember({"dsum", "kron", "rotate", "transpose", "isotropy", "serendipity", "embed", "classical"}));
  compose->add_option("inputs", inputs, "input tensor files");
  compose->add_option("--out", out_path, "output file (default: standard output)");
  compose->add_option("--axis", axis, "dsum axis")->check(CLI::IsMember({"m", "n", "p"}));
  compose->add_option("--times", times, "rotation count");
  compose->add_option("--u", u_path);
  compose->add_option("--v", v_path);
  compose->add_option("--w", w_path);
  compose->add_option("--group", group, "1-based serendipity group to transform");
  compose->add_option("--matrix", matrix_path, "recombination matrix file");
  compose->add_flag("--up-to-scalar", up_to_scalar, "group factors equal up to c*e^k");
  compose->add_option("--rows", rows, "embed: 1-based A rows of the block");
  compose->add_option("--cols", cols, "embed: 1-based A cols of the block");
  compose->add_option("--bcols", bcols, "embed: 1-based B cols of the block");
  compose->add_option("--dims", classical_dims, "classical: m n p")->expected(3);

  auto* multiply = app.add_subcommand("multiply", "multiply matrix files through a recursion schedule");
  std::string schedule, a_path, b_path, c_path;
  multiply->add_option("--schedule", schedule)->required();
  multiply->add_option("--a", a_path)->required();
  multiply->add_option("--b", b_path)->required();
  multiply->add_option("--out", c_path);

  auto* count = app.add_subcommand("count", "number of scalar multiplications of a schedule");
  std::string count_schedule;
  count->add_option("--schedule", count_schedule)->required();

  auto* errscan = app.add_subcommand("errscan", "numerical error of an approximate scheme against eps");
  std::string scan_file, eps_list = "1e-1,1e-2,1e-3,1e-4", precision = "extended";
  std::uint64_t scan_seed = 1;
  errscan->add_option("file", scan_file)->required();
  errscan->add_option("--eps", eps_list);
  errscan->add_option("--seed", scan_seed);
  errscan->add_option("--precision", precision)->check(CLI::IsMember({"extended", "double"}));

  auto* search_cmd = app.add_subcommand("search", "seeded alternating least squares search");
  SearchConfig cfg;
  std::vector<std::size_t> search_dims;
  std::string grid, search_out;
  bool trace = false;
  search_cmd->add_option("--dims", search_dims)->required()->expected(3);
  search_cmd->add_option("--rank", cfg.rank)->required();
  search_cmd->add_option("--seed", cfg.seed);
  search_cmd->add_option("--restarts", cfg.restarts);
  search_cmd->add_option("--tol", cfg.tol);
  search_cmd->add_option("--max-sweeps", cfg.max_sweeps);
  search_cmd->add_option("--lambda", cfg.lambda_init);
  search_cmd->add_option("--decay", cfg.lambda_decay);
  search_cmd->add_option("--coarse-fraction", cfg.coarse_fraction);
  search_cmd->add_option("--grid", grid, "comma-separated rationals");
  search_cmd->add_flag("--allow-large", cfg.allow_large);
  search_cmd->add_flag("--trace", trace, "print the sweep trace of the selected restart");
  search_cmd->add_option("--out", search_out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (*verify) return run_verify(verify_file, verify_approx, verify_mode, out);

    if (*type) {
      out << type_polynomial(load_tensor(type_file)).to_string() << "\n";
      return kOk;
    }

    if (*compose) {
      auto need = [&](std::size_t n) {
        if (inputs.size() != n)
          throw CLI::ValidationError("--op " + op + " takes " + std::to_string(n) + " input file(s)");
      };
      if (op == "classical") {
        need(0);
        if (classical_dims.size() != 3) throw CLI::ValidationError("--op classical needs --dims m n p");
        emit_tensor(classical_tensor({classical_dims[0], classical_dims[1], classical_dims[2]}), out_path, out);
      } else if (op == "dsum" || op == "kron") {
        need(2);
        const FmmTensor a = load_tensor(inputs[0]), b = load_tensor(inputs[1]);
        const Axis ax = axis == "n" ? Axis::N : axis == "p" ? Axis::P : Axis::M;
        emit_tensor(op == "dsum" ? direct_sum(a, b, ax) : kronecker(a, b), out_path, out);
      } else if (op == "rotate" || op == "transpose") {
        need(1);
        emit_tensor(symmetry_apply(load_tensor(inputs[0]), op == "rotate" ? times : 0, op == "transpose"), out_path,
                    out);
      } else if (op == "isotropy") {
        need(1);
        const FmmTensor t = load_tensor(inputs[0]);
        const Dims& d = t.dims();
        const IsotropyElement g{u_path.empty() ? RationalMatrix::identity(d.m) : load_matrix(u_path),
                                v_path.empty() ? RationalMatrix::identity(d.n) : load_matrix(v_path),
                                w_path.empty() ? RationalMatrix::identity(d.p) : load_matrix(w_path)};
        emit_tensor(isotropy_apply(t, g), out_path, out);
      } else if (op == "serendipity") {
        need(1);
        const FmmTensor t = load_tensor(inputs[0]);
        const auto groups = serendipity_find(t, {up_to_scalar});
        if (matrix_path.empty()) {
          out << groups.size() << " groups\n";
          for (std::size_t g = 0; g < groups.size(); ++g) {
            out << g + 1 << " " << slot_name(groups[g].slot) << " terms";
            for (std::size_t i : groups[g].term_indices) out << " " << i + 1;
            out << "\n";
          }
        } else {
          if (group == 0 || group > groups.size())
            throw CLI::ValidationError("--group must be between 1 and " + std::to_string(groups.size()));
          emit_tensor(serendipity_transform(t, groups[group - 1], load_matrix(matrix_path)), out_path, out);
        }
      } else if (op == "embed") {
        need(2);
        emit_tensor(embed_and_add(load_tensor(inputs[0]), load_tensor(inputs[1]),
                                  {parse_indices(rows), parse_indices(cols), parse_indices(bcols)}),
                    out_path, out);
      }
      return kOk;
    }

    if (*multiply) {
      const RecursionSchedule s = load_schedule(schedule);
      std::atomic<std::uint64_t> counter{0};
      const RationalMatrix C = multiply_recursive(s, load_matrix(a_path), load_matrix(b_path), &counter);
      if (c_path.empty()) {
        out << write_matrix(C);
        err << "multiplications " << counter.load() << "\n";
      } else {
        save_matrix(c_path, C);
        out << "multiplications " << counter.load() << "\n";
      }
      return kOk;
    }

    if (*count) {
      out << count_multiplications(load_schedule(count_schedule)) << "\n";
      return kOk;
    }

    if (*errscan) {
      const FmmTensor t = load_tensor(scan_file);
      std::vector<double> eps;
      for (const auto& e : split_list(eps_list)) {
        std::size_t pos = 0;
        eps.push_back(std::stod(e, &pos));
        if (pos != e.size()) throw ParseError("bad eps value '" + e + "'");
      }
      const Dims& d = t.dims();
      std::mt19937_64 rng(scan_seed);
      std::uniform_real_distribution<double> uniform(-1.0, 1.0);
      NumericMatrix A(Eigen::Index(d.m), Eigen::Index(d.n)), B(Eigen::Index(d.n), Eigen::Index(d.p));
      for (std::size_t i = 0; i < d.m; ++i)
        for (std::size_t j = 0; j < d.n; ++j) {
          const double v = uniform(rng);
          A(Eigen::Index(i), Eigen::Index(j)) = !t.support() || t.support()->allowed(i, j) ? v : 0.0;
        }
      for (std::size_t j = 0; j < d.n; ++j)
        for (std::size_t k = 0; k < d.p; ++k) B(Eigen::Index(j), Eigen::Index(k)) = uniform(rng);
      const ErrorScan scan = epsilon_error_scan(t, A, B, eps,
                                                precision == "double" ? ScanPrecision::binary64 : ScanPrecision::extended);
      for (const auto& s : scan.samples)
        out << "eps " << format_double(s.eps) << " error " << format_double(s.relative_error) << "\n";
      out << "slope " << (scan.fitted_slope ? format_double(*scan.fitted_slope) : std::string("absent")) << "\n";
      for (const auto& msg : scan.diagnostics) err << msg << "\n";
      return kOk;
    }

    if (*search_cmd) {
      cfg.dims = {search_dims[0], search_dims[1], search_dims[2]};
      if (!grid.empty()) {
        cfg.snap_grid.clear();
        for (const auto& g : split_list(grid)) cfg.snap_grid.push_back(Rational::parse(g));
      }
      const SearchResult r = search(cfg);
      if (trace) out << format_trace(r.trace);
      if (!r.rationalized) {
        out << "NOT FOUND best residual " << format_double(r.best_residual) << " (restart " << r.restart_index + 1
            << " of " << cfg.restarts << ")\n";
        return kFailed;
      }
      out << "FOUND " << r.rationalized->dims().to_string() << " rank " << r.rationalized->rank() << " (restart "
          << r.restart_index + 1 << ", " << r.successful_restarts << " of " << cfg.restarts
          << " restarts verified)\n";
      if (!search_out.empty()) save_tensor(search_out, *r.rationalized);
      return kOk;
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: bad number: " << e.what() << "\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "error: number out of range: " << e.what() << "\n";
    return kUsage;
  }
  err << app.help();
  return kUsage;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace fmmkit
