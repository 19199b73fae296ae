#include <catch_amalgamated.hpp>

#include <clarklab/charfun.hpp>
#include <clarklab/errors.hpp>

#include "generators.hpp"

using namespace clarklab;

namespace {
Mat scalar(cplx a) { return Mat::Constant(1, 1, a); }
}  // namespace

TEST_CASE("Nagy-Foias coefficients examples", "[charfun]") {
  const auto d1 = nagy_foias_coeffs(build_frame(MatFunction::monomial(1, 1), 8), 4);
  CHECK(std::abs(d1[1](0, 0) - 1.0) < 1e-12);
  for (int k = 2; k <= 4; ++k) CHECK(std::abs(d1[k](0, 0)) < 1e-12);

  const auto d2 = nagy_foias_coeffs(build_frame(MatFunction::monomial(1, 2), 8), 4);
  for (int k = 1; k <= 4; ++k) CHECK(std::abs(d2[k](0, 0) - (k == 2 ? 1.0 : 0.0)) < 1e-12);

  gen::Source src(51);
  const auto theta = src.rational_inner(2, 3);
  const auto frame = build_frame(theta, 12);
  const auto d = nagy_foias_coeffs(frame, 6);
  CHECK(d.provenance == Provenance::frame);
  CHECK(max_difference(d, taylor_coeffs(frame.taylor_series(), 6)) <= 1e-6);
  CHECK_THROWS_AS(nagy_foias_coeffs(frame, 7), PreconditionError);
}

TEST_CASE("Nagy-Foias coefficients match Taylor coefficients", "[charfun]") {
  gen::Source src(52);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = src.integer(1, 3);
    const auto theta = trial % 2 ? src.rational_inner(n, 3) : scaled(src.rational_inner(n, 2), 0.8);
    const auto frame = build_frame(theta, 16);
    const auto d = nagy_foias_coeffs(frame, 8);
    CHECK(max_difference(d, taylor_coeffs(frame.taylor_series(), 8)) <= 1e-8);
    // same frame, no retuning
    const Mat A = src.contraction(n);
    CHECK(max_difference(gamma_coeffs(frame, A, 8), gamma_series_coeffs(frame.taylor_series(), A, 8)) <= 1e-8);
    // band stability
    const auto wide = nagy_foias_coeffs(build_frame(theta, 32), 16);
    for (int k = 1; k <= 4; ++k) CHECK(op_norm(wide[k] - d[k]) <= 1e-8);
  }
}

TEST_CASE("Gamma coefficients", "[charfun]") {
  gen::Source src(53);
  const auto theta = src.rational_inner(2, 3);
  const auto frame = build_frame(theta, 12);
  CHECK(max_difference(gamma_coeffs(frame, Mat::Zero(2, 2), 6), taylor_coeffs(frame.taylor_series(), 6)) <= 1e-12);

  const cplx a(0.3, 0.5);
  const auto g = gamma_coeffs(build_frame(MatFunction::monomial(1, 1), 12), scalar(a), 6);
  for (int k = 1; k <= 6; ++k) CHECK(std::abs(g[k](0, 0) - std::pow(std::conj(a), k - 1)) < 1e-12);

  const Mat U = src.unitary(2);
  CHECK(max_difference(gamma_coeffs(frame, U, 6), gamma_series_coeffs(frame.taylor_series(), U, 6)) <= 1e-6);
  CHECK_THROWS_AS(gamma_coeffs(frame, 2.0 * eye(2), 3), PreconditionError);
}

TEST_CASE("Gamma series recurrence", "[charfun]") {
  gen::Source src(54);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = src.integer(1, 3);
    const auto theta = src.rational_inner(n, 3);
    const auto c = taylor(theta, 12);
    CHECK(gamma_recurrence_residual(c, src.contraction(n), 12) <= 1e-10);
  }
}

TEST_CASE("Lifschitz characteristic function", "[charfun]") {
  const auto f1 = build_frame(MatFunction::monomial(1, 1), 6);
  CHECK(std::abs(lifschitz_charfun(f1, eye(1), 0.5)(0, 0) - 0.5) < 1e-12);
  const auto f2 = build_frame(MatFunction::monomial(1, 2), 6);
  CHECK(std::abs(lifschitz_charfun(f2, eye(1), cplx(0, 0.4))(0, 0) + 0.16) < 1e-12);
  CHECK_THROWS_AS(lifschitz_charfun(f1, eye(1), 1.0 - 1e-7), NumericalError);

  gen::Source src(55);
  const auto b3 = MatFunction::blaschke({0.0, src.in_disc(0.7), src.in_disc(0.7)});
  const auto f3 = build_frame(b3, 12);
  for (int p = 0; p < 10; ++p) {
    const cplx z = src.in_disc(0.9);
    CHECK(std::abs(lifschitz_charfun(f3, scalar(src.on_circle()), z)(0, 0) - b3.eval(z)(0, 0)) <= 1e-7);
  }

  for (int trial = 0; trial < 4; ++trial) {
    const auto theta = src.rational_inner(2, 3);
    const auto frame = build_frame(theta, 16);
    const Mat U = src.unitary(2);
    const cplx z = src.in_disc(0.8);
    CHECK(max_abs(lifschitz_charfun(frame, U, z) - theta.eval(z)) <= 1e-7);
  }
}
