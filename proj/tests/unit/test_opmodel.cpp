#include <catch_amalgamated.hpp>

#include <clarklab/errors.hpp>
#include <clarklab/opmodel.hpp>

#include "generators.hpp"

using namespace clarklab;

namespace {
Mat scalar(cplx a) { return Mat::Constant(1, 1, a); }
}  // namespace

TEST_CASE("frame examples", "[opmodel]") {
  const auto f0 = build_frame(MatFunction::zero(2), 3);
  CHECK(max_abs(f0.gram() - eye(14)) < 1e-12);
  CHECK(f0.rank() == 14);

  const auto f1 = build_frame(MatFunction::monomial(1, 1), 2);
  CHECK(max_abs(f1.gram() - Mat::Ones(5, 5)) < 1e-12);
  CHECK(f1.rank() == 1);

  const auto f2 = build_frame(MatFunction::monomial(1, 2), 2);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) CHECK(std::abs(f2.gram()(a, b) - ((a - b) % 2 == 0 ? 1.0 : 0.0)) < 1e-12);
  CHECK(f2.rank() == 2);

  CHECK_THROWS_AS(build_frame(MatFunction::blaschke({0.4}), 3), PreconditionError);
}

TEST_CASE("frame invariants", "[opmodel]") {
  gen::Source src(31);
  for (int trial = 0; trial < 4; ++trial) {
    const auto theta = src.rational_inner(src.integer(1, 3), 4);
    const auto fr = build_frame(theta, 8);
    CHECK(max_abs(fr.gram() - fr.gram().adjoint()) == 0.0);
    CHECK(fr.eigenvalues()(0) >= -1e-10);
    int count = 0;
    for (int i = 0; i < fr.size(); ++i) count += fr.eigenvalues()(i) > fr.tau();
    CHECK(count == fr.rank());
    // rank stabilizes in K at the det-degree (Omega is atomic with total rank d)
    CHECK(fr.rank() == theta.det_degree());
    CHECK(build_frame(theta, 12).rank() == theta.det_degree());
  }
}

TEST_CASE("clark operator examples", "[opmodel]") {
  const auto f1 = build_frame(MatFunction::monomial(1, 1), 4);
  const cplx a(0.3, -0.4);
  const auto op = clark_operator(f1, scalar(a));
  REQUIRE(op.compressed.rows() == 1);
  CHECK(std::abs(op.compressed(0, 0) - a) < 1e-12);

  const auto f2 = build_frame(MatFunction::monomial(1, 2), 4);
  const auto shift = clark_operator(f2, eye(1));
  for (int r = 0; r < f2.size(); ++r)
    for (int c = 0; c < f2.size(); ++c) CHECK(shift.coefficients(r, c) == cplx(r == c + 1 ? 1.0 : 0.0));

  // A = 0, Theta = z^2: partial isometry, M^# M = 1 - P_{D+}
  const auto pi = clark_operator(f2, Mat::Zero(1, 1));
  const Mat& C = pi.compressed;
  const Mat bplus = f2.basis_coords(-1);
  CHECK(max_abs(C.adjoint() * C - (eye(static_cast<int>(C.rows())) - bplus * bplus.adjoint())) < 1e-10);
}

TEST_CASE("gram adjoint identities on the retained subspace", "[opmodel]") {
  gen::Source src(32);
  const auto theta = src.rational_inner(2, 4);
  const auto fr = build_frame(theta, 6);
  const auto op = clark_operator(fr, src.contraction(2));
  const Mat Pi = op.retained_projector();
  const Mat Ms = op.gram_adjoint();
  for (int t = 0; t < 10; ++t) {
    const Vec x = Pi * src.gaussian_matrix(fr.size(), 1);
    const Vec y = Pi * src.gaussian_matrix(fr.size(), 1);
    const cplx lhs = fr.inner(op.coefficients * x, y);
    const cplx rhs = fr.inner(x, Ms * y);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(lhs)));
  }
  const Mat twice = fr.pinv() * Ms.adjoint() * fr.gram();
  CHECK(max_abs(Pi * (twice - op.coefficients) * Pi) <= 1e-9);
}

TEST_CASE("compressed operator is unitary for unitary parameters", "[opmodel]") {
  gen::Source src(33);
  const auto theta = src.rational_inner(2, 4);
  const auto fr = build_frame(theta, 10);
  const auto op = clark_operator(fr, src.unitary(2));
  CHECK(unitarity_defect(op.compressed) <= 1e-9);
}

TEST_CASE("compressed moment examples", "[opmodel]") {
  const cplx a(0.6, 0.2);
  const auto f1 = build_frame(MatFunction::monomial(1, 1), 10);
  for (int k = 0; k <= 5; ++k)
    CHECK(std::abs(compressed_moment(f1, scalar(a), k)(0, 0) - std::pow(std::conj(a), k)) < 1e-12);
  const auto f2 = build_frame(MatFunction::monomial(1, 2), 10);
  CHECK(std::abs(compressed_moment(f2, eye(1), 2)(0, 0) - 1.0) < 1e-12);
  CHECK_THROWS_AS(compressed_moment(f2, eye(1), 6), PreconditionError);
}

TEST_CASE("compressed moments equal recurrence moments", "[opmodel]") {
  gen::Source src(34);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = src.integer(1, 3);
    const auto theta = src.rational_inner(n, 4);
    const auto fr = build_frame(theta, 40);
    const Mat A = trial % 2 == 0 ? src.unitary(n) : src.contraction(n);
    const auto l = recurrence_moments(theta, A, 8);
    for (int k = 0; k <= 8; ++k) CHECK(max_abs(compressed_moment(fr, A, k) - l[k]) <= 1e-6);
  }
}

TEST_CASE("spectral measure examples", "[opmodel]") {
  const cplx u = unit(1.1);
  const auto s1 = spectral_measure(build_frame(MatFunction::monomial(1, 1), 4), scalar(u), {});
  REQUIRE(s1.measure.atoms.size() == 1);
  CHECK(std::abs(s1.measure.atoms[0].point - u) < 1e-10);
  CHECK(std::abs(s1.measure.atoms[0].weight(0, 0) - 1.0) < 1e-10);

  const auto f2 = build_frame(MatFunction::monomial(1, 2), 6);
  for (cplx U : {cplx(1.0), cplx(-1.0)}) {
    const auto s = spectral_measure(f2, scalar(U), {{0.0, kPi}, {kPi, 2.0 * kPi}});
    REQUIRE(s.measure.atoms.size() == 2);
    for (const auto& at : s.measure.atoms) {
      CHECK(std::abs(at.point * at.point - U) < 1e-10);
      CHECK(std::abs(at.weight(0, 0) - 0.5) < 1e-10);
    }
  }
}

TEST_CASE("spectral atoms agree with point masses", "[opmodel]") {
  gen::Source src(35);
  for (int trial = 0; trial < 3; ++trial) {
    const int n = src.integer(1, 3);
    const auto theta = src.rational_inner(n, 4);
    const Mat U = src.unitary(n);
    const auto s = spectral_measure(build_frame(theta, 10), U, {{0.0, 2.0 * kPi}});
    CHECK(max_abs(s.arc_weights[0] - eye(n)) <= 1e-8);
    for (const auto& at : s.measure.atoms) {
      const auto pm = point_mass(theta, U, at.point);
      REQUIRE(pm.status == PointMassStatus::atom);
      CHECK(max_abs(pm.weight - at.weight) <= 1e-5);
    }
  }
}
