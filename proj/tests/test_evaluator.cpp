#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common.hpp"
#include "fmmkit/algebra.hpp"
#include "fmmkit/evaluator.hpp"

using namespace fmmkit;

TEST_CASE("apply_bilinear on Strassen") {
  const FmmTensor s = bundled("strassen.fmm");
  const RationalMatrix I = RationalMatrix::identity(2);
  CHECK(apply_bilinear(s, I, I) == I);
  CHECK(apply_bilinear(s, RationalMatrix::unit(2, 2, 0, 1), RationalMatrix::unit(2, 2, 1, 0)) ==
        RationalMatrix::unit(2, 2, 0, 0));
  CHECK_THROWS_AS(apply_bilinear(s, RationalMatrix(2, 3), I), ShapeError);
}

TEST_CASE("apply_bilinear equals schoolbook on 100 random inputs per bundled exact tensor") {
  std::mt19937_64 rng(1);
  for (const char* name : {"strassen.fmm", "3x5x5_58.fmm"}) {
    const FmmTensor t = bundled(name);
    const Dims& d = t.dims();
    for (int it = 0; it < 100; ++it) {
      const RationalMatrix A = random_matrix(rng, d.m, d.n), B = random_matrix(rng, d.n, d.p);
      REQUIRE(apply_bilinear(t, A, B) == classical_multiply(A, B));
    }
  }
}

TEST_CASE("masked entries of A must be zero") {
  const SupportMask mask(2, 2, {true, true, false, true});
  const FmmTensor partial = classical_tensor({2, 2, 2}, mask);
  RationalMatrix A = RationalMatrix::identity(2);
  CHECK(apply_bilinear(partial, A, A) == A);
  A(1, 0) = 1;
  CHECK_THROWS_AS(apply_bilinear(partial, A, A), ContractError);
}

TEST_CASE("recursive multiplication and its counter") {
  const FmmTensor s = bundled("strassen.fmm");
  std::mt19937_64 rng(2);

  const RecursionSchedule ss({s, s});
  CHECK(ss.composite_dims() == Dims{4, 4, 4});
  CHECK(count_multiplications(ss) == 49);
  const FmmTensor flat = kronecker(s, s);
  for (int it = 0; it < 100; ++it) {
    const RationalMatrix A = random_matrix(rng, 4, 4), B = random_matrix(rng, 4, 4);
    std::atomic<std::uint64_t> counter{0};
    const RationalMatrix C = multiply_recursive(ss, A, B, &counter);
    REQUIRE(C == classical_multiply(A, B));
    REQUIRE(C == apply_bilinear(flat, A, B));
    REQUIRE(counter.load() == 49);
  }

  const RecursionSchedule one({classical_tensor({1, 1, 1})});
  std::atomic<std::uint64_t> counter{0};
  const RationalMatrix a(1, 1, {Rational(3, 2)}), b(1, 1, {Rational(-4)});
  CHECK(multiply_recursive(one, a, b, &counter)(0, 0) == Rational(-6));
  CHECK(counter.load() == 1);
  CHECK(count_multiplications(RecursionSchedule({s})) == 7);
  CHECK_THROWS_AS(multiply_recursive(ss, RationalMatrix(4, 4), RationalMatrix(3, 4)), ShapeError);
}

TEST_CASE("two-level 10x10 schedule through a rank-108 5x5x5 scheme") {
  const FmmTensor s = bundled("strassen.fmm");
  const FmmTensor t108 = direct_sum(bundled("3x5x5_58.fmm"), classical_tensor({2, 5, 5}), Axis::M);
  const RecursionSchedule sched({s, t108});
  CHECK(count_multiplications(sched) == 756);
  std::mt19937_64 rng(8);
  for (int it = 0; it < 3; ++it) {
    const RationalMatrix A = random_matrix(rng, 10, 10), B = random_matrix(rng, 10, 10);
    std::atomic<std::uint64_t> counter{0};
    REQUIRE(multiply_recursive(sched, A, B, &counter) == classical_multiply(A, B));
    REQUIRE(counter.load() == 756);
  }
}

TEST_CASE("schedules reject invalid levels") {
  const FmmTensor s = bundled("strassen.fmm");
  std::vector<RankOneTerm> terms = s.terms();
  terms.pop_back();
  CHECK_THROWS_AS(RecursionSchedule({FmmTensor(s.dims(), FieldMode::rational, terms)}), ContractError);
  CHECK_THROWS_AS(RecursionSchedule({bundled("teps.fmm")}), ContractError);
  CHECK_THROWS_AS(RecursionSchedule(std::vector<FmmTensor>{}), ContractError);
}

TEST_CASE("epsilon error scan of the completed approximate scheme") {
  const FmmTensor full = embed_and_add(bundled("teps.fmm"), classical_tensor({3, 3, 5}),
                                       {{0, 1, 2}, {2, 3, 4}, {0, 1, 2, 3, 4}});
  const int order = *verify_approximate(full).discrepancy_order;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  NumericMatrix A(5, 5), B(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      A(i, j) = u(rng);
      B(i, j) = u(rng);
    }
  const ErrorScan scan = epsilon_error_scan(full, A, B, {1e-1, 1e-2, 1e-3, 1e-4});
  REQUIRE(scan.samples.size() == 4);
  REQUIRE(scan.fitted_slope);
  CHECK(std::abs(*scan.fitted_slope - order) <= 0.3);
  for (std::size_t i = 1; i < scan.samples.size(); ++i)
    CHECK(scan.samples[i].relative_error <= scan.samples[i - 1].relative_error);

  const ErrorScan single = epsilon_error_scan(full, A, B, {1e-2});
  CHECK(single.samples.size() == 1);
  CHECK_FALSE(single.fitted_slope);

  CHECK_THROWS_AS(epsilon_error_scan(full, A, B, {1e-2, 1e-1}), ContractError);
  CHECK_THROWS_AS(epsilon_error_scan(full, A, B, {-1.0}), ContractError);
}

TEST_CASE("exact tensors show only rounding error in a scan") {
  const FmmTensor lifted = bundled("3x5x5_58.fmm").lifted();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1, 1);
  NumericMatrix A(3, 5), B(5, 5);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 5; ++j) A(i, j) = u(rng);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) B(i, j) = u(rng);
  for (auto precision : {ScanPrecision::extended, ScanPrecision::binary64}) {
    const ErrorScan scan = epsilon_error_scan(lifted, A, B, {1e-1, 1e-2, 1e-3}, precision);
    for (const auto& s : scan.samples) CHECK(s.relative_error < 1e-13);
    CHECK_FALSE(scan.fitted_slope);
  }
}

TEST_CASE("masked A entries are rejected by the scan") {
  const FmmTensor teps = bundled("teps.fmm");
  NumericMatrix A = NumericMatrix::Ones(5, 5), B = NumericMatrix::Ones(5, 5);
  CHECK_THROWS_AS(epsilon_error_scan(teps, A, B, {1e-1}), ContractError);
}
