#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common.hpp"
#include "fmmkit/tensor.hpp"

using namespace fmmkit;

namespace {

const char* const kType3x5x5 =
    "17X^2Y^2Z^2 + 2XY^4Z + X^3Y^2Z + XY^2Z^3 + 5X^3YZ + 5XYZ^3 + 2X^2Y^2Z + 2XY^2Z^2 + XY^3Z + X^2YZ + XYZ^2 + "
    "13XY^2Z + 7XYZ";
const char* const kTypeTeps = "20X^2Y^2Z^2 + 3X^2Y^2Z + 2X^2YZ^2 + 4XY^2Z^2 + 7X^2YZ + 6XY^2Z + 8XYZ^2 + 5XYZ";

LaurentMatrix with_entry(LaurentMatrix m, std::size_t i, std::size_t j, const LaurentScalar& v) {
  m(i, j) = v;
  return m;
}

}  // namespace

TEST_CASE("classical tensors verify and have the expected size") {
  for (const Dims d : {Dims{1, 1, 1}, Dims{2, 2, 2}, Dims{2, 3, 4}, Dims{3, 5, 5}}) {
    const FmmTensor t = classical_tensor(d);
    CHECK(t.rank() == d.m * d.n * d.p);
    const VerificationReport r = verify_exact(t);
    CHECK(r.passed);
    CHECK(r.total_equations == d.m * d.n * d.n * d.p * d.p * d.m);
    CHECK(type_polynomial(t).to_string() == (t.rank() == 1 ? std::string() : std::to_string(t.rank())) + "XYZ");
  }
  const SupportMask mask(2, 2, {true, false, true, true});
  CHECK(classical_tensor({2, 2, 2}, mask).rank() == 6);
  CHECK(classical_tensor({5, 5, 5}, bundled("teps.fmm").support()).rank() == 80);
}

TEST_CASE("a rank-one term with a nonzero factor is required") {
  LaurentMatrix p(1, 1), q(1, 1), s(1, 1);
  q(0, 0) = 1;
  s(0, 0) = 1;
  CHECK_THROWS_AS(FmmTensor({1, 1, 1}, FieldMode::rational, {{p, q, s}}), ContractError);
  p(0, 0) = LaurentScalar(Rational(1), 1);
  CHECK_THROWS_AS(FmmTensor({1, 1, 1}, FieldMode::rational, {{p, q, s}}), ContractError);
  CHECK_NOTHROW(FmmTensor({1, 1, 1}, FieldMode::laurent, {{p, q, s}}));
  CHECK_THROWS_AS(FmmTensor({1, 2, 1}, FieldMode::laurent, {{p, q, s}}), ShapeError);
}

TEST_CASE("Strassen passes all 64 equations and every single-coefficient mutation fails") {
  const FmmTensor t = bundled("strassen.fmm");
  CHECK(t.rank() == 7);
  const VerificationReport r = verify_exact(t);
  CHECK(r.passed);
  CHECK(r.total_equations == 64);
  CHECK(type_polynomial(t).to_string() == "X^2Y^2Z^2 + 6XYZ");

  std::size_t mutations = 0;
  for (std::size_t term = 0; term < t.rank(); ++term)
    for (int slot = 0; slot < 3; ++slot)
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
          std::vector<RankOneTerm> terms = t.terms();
          LaurentMatrix& f = slot == 0 ? terms[term].P : slot == 1 ? terms[term].Q : terms[term].S;
          f(i, j) += LaurentScalar(1);
          if (f.is_zero()) continue;
          const VerificationReport m = verify_exact(FmmTensor(t.dims(), FieldMode::rational, terms));
          CHECK_FALSE(m.passed);
          CHECK(!m.failing_equations.empty());
          ++mutations;
        }
  CHECK(mutations > 70);
}

TEST_CASE("contract of a valid scheme is Trace(ABC)") {
  const FmmTensor t = bundled("strassen.fmm");
  std::mt19937_64 rng(3);
  for (int it = 0; it < 20; ++it) {
    const LaurentMatrix A = to_laurent(random_matrix(rng, 2, 2)), B = to_laurent(random_matrix(rng, 2, 2)),
                        C = to_laurent(random_matrix(rng, 2, 2));
    const LaurentMatrix abc = A * B * C;
    CHECK(contract(t, A, B, C) == abc(0, 0) + abc(1, 1));
  }
}

TEST_CASE("the 3x5x5 rank-58 scheme") {
  const FmmTensor t = bundled("3x5x5_58.fmm");
  CHECK(t.dims() == Dims{3, 5, 5});
  CHECK(t.rank() == 58);
  const VerificationReport r = verify_exact(t);
  CHECK(r.passed);
  CHECK(r.total_equations == 5625);
  const TypePolynomial tp = type_polynomial(t);
  CHECK(tp == TypePolynomial::parse(kType3x5x5));
  CHECK(tp.to_string() == TypePolynomial::parse(kType3x5x5).to_string());
  CHECK(tp.total_multiplicity() == 58);
}

TEST_CASE("T_eps is a valid approximate partial scheme") {
  const FmmTensor t = bundled("teps.fmm");
  REQUIRE(t.support());
  CHECK(t.field_mode() == FieldMode::laurent);
  CHECK(t.rank() == 55);
  CHECK(25 - t.support()->allowed_count() == 9);
  const ApproxReport r = verify_approximate(t);
  CHECK(r.valid);
  REQUIRE(r.discrepancy_order);
  CHECK(*r.discrepancy_order >= 1);
  CHECK(r.offending_equations.empty());
  CHECK(r.total_equations == 16 * 25 * 25);
  const TypePolynomial tp = type_polynomial(t);
  CHECK(tp == TypePolynomial::parse(kTypeTeps));
  CHECK(tp.total_multiplicity() == 55);
  CHECK_THROWS_AS(verify_exact(t), ContractError);
}

TEST_CASE("approximate verification flags an order-0 discrepancy") {
  const FmmTensor t = bundled("teps.fmm");
  std::vector<RankOneTerm> terms = t.terms();
  terms[0].P = with_entry(terms[0].P, 0, 1, terms[0].P(0, 1) + LaurentScalar(Rational(1), 3));
  const ApproxReport r = verify_approximate(FmmTensor(t.dims(), t.field_mode(), terms, t.support()));
  CHECK_FALSE(r.valid);
  CHECK(!r.offending_equations.empty());
  CHECK(*r.discrepancy_order <= 0);
}

TEST_CASE("scaled mode recovers the power of e on the target") {
  const FmmTensor s = bundled("strassen.fmm");
  std::vector<RankOneTerm> terms = s.terms();
  for (auto& t : terms) t.S = t.S * LaurentScalar(Rational(1), 2);
  const FmmTensor scaled(s.dims(), FieldMode::laurent, terms);
  CHECK_FALSE(verify_approximate(scaled, ApproxMode::strict).valid);
  const ApproxReport r = verify_approximate(scaled, ApproxMode::scaled);
  CHECK(r.valid);
  CHECK(r.target_scale == 2);
  CHECK(r.discrepancy_order == std::nullopt);
  const ApproxReport exact = verify_approximate(s);
  CHECK(exact.valid);
  CHECK(exact.discrepancy_order == std::nullopt);
}

TEST_CASE("type polynomial text form") {
  const TypePolynomial p = TypePolynomial::parse("2XY^4Z + 17X^2Y^2Z^2 + 7XYZ");
  CHECK(p.total_multiplicity() == 26);
  CHECK(p.to_string() == "17X^2Y^2Z^2 + 2XY^4Z + 7XYZ");
  CHECK_THROWS_AS(TypePolynomial::parse("3XY"), ParseError);
  CHECK_THROWS_AS(TypePolynomial::parse("X^Y"), ParseError);
}
