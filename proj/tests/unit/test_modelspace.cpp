#include <catch_amalgamated.hpp>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <clarklab/errors.hpp>
#include <clarklab/modelspace.hpp>
#include <clarklab/opmodel.hpp>

#include "generators.hpp"

using namespace clarklab;

namespace {
Mat scalar(cplx a) { return Mat::Constant(1, 1, a); }

MatFunction half_plus_half_z() { return MatFunction(1, {}, std::vector<Mat>{scalar(0.5), scalar(0.5)}, {}, std::nullopt, {}); }

// diag(z, exp(-(1+z)/(1-z)))
MatFunction diag_z_singular() {
  Mat p1 = Mat::Zero(2, 2), p2 = Mat::Zero(2, 2);
  p1(0, 0) = 1.0;
  p2(1, 1) = 1.0;
  return MatFunction(2, {{0.0, p1}}, std::nullopt, {{1.0, 1.0, p2}}, std::nullopt, {.inner = true});
}

std::shared_ptr<const MatFunction> share(MatFunction f) { return std::make_shared<const MatFunction>(std::move(f)); }
}  // namespace

TEST_CASE("kernel examples", "[modelspace]") {
  const auto zero = MatFunction::zero(2);
  const cplx w(0.3, -0.2), z(-0.1, 0.5);
  CHECK(max_abs(kernel(zero, w, z) - eye(2) / (1.0 - z * std::conj(w))) < 1e-15);

  gen::Source src(41);
  const auto theta = src.rational_inner(2, 3);
  CHECK(max_abs(kernel(theta, 0.0, z) - eye(2)) < 1e-14);

  const auto z2 = MatFunction::monomial(1, 2);
  CHECK(std::abs(kernel(z2, 1.0, 1.0)(0, 0) - 2.0) < 1e-12);
  CHECK(std::abs(kernel(z2, kI, kI)(0, 0) - 2.0) < 1e-12);
  CHECK_THROWS_AS(kernel(MatFunction::scalar_singular(1.0), 1.0, 0.2), DomainError);
  CHECK_THROWS_AS(kernel(half_plus_half_z(), -1.0, 0.2), DomainError);
}

TEST_CASE("kernel Gram matrices are positive semidefinite", "[modelspace]") {
  gen::Source src(42);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = src.integer(1, 3);
    auto theta = share(trial % 2 ? src.rational_inner(n, 3) : scaled(src.rational_inner(n, 3), 0.7));
    std::vector<KernelVector> ks;
    for (int j = 0; j < 10; ++j) ks.push_back(kernel_vector(theta, src.in_disc(0.95), src.unit_vector(n)));
    Mat G(10, 10);
    for (int a = 0; a < 10; ++a)
      for (int b = 0; b < 10; ++b) G(b, a) = kernel_inner(ks[a], ks[b]);
    CHECK(max_abs(G - G.adjoint()) < 1e-10);
    CHECK(min_hermitian_eigenvalue(G) >= -1e-10);
  }
}

TEST_CASE("angular limit agrees with the kernel diagonal", "[modelspace]") {
  gen::Source src(43);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = src.integer(1, 3);
    const auto theta = src.rational_inner(n, 3);
    const cplx zeta = src.on_circle();
    const auto cad = cad_test(theta, zeta);
    REQUIRE(cad.status == CadStatus::exists);
    const Mat d = kernel(theta, zeta, zeta);
    CHECK(max_abs(d - *cad.angular_limit) <= 1e-5 * std::max(1.0, op_norm(d)));
    CHECK(min_hermitian_eigenvalue(d) >= -1e-10);
  }
}

TEST_CASE("Cauchy transform of modified kernels", "[modelspace]") {
  gen::Source src(44);
  const auto theta = share(src.rational_inner(2, 3));
  const int band = 60;
  const CauchyTransform V(theta, band);
  std::vector<std::pair<cplx, int>> ks;
  for (int j = 0; j < 8; ++j) ks.emplace_back(src.in_disc(0.5), src.integer(0, 1));
  for (auto [a, i] : ks) {
    const Vec f = modified_kernel(*theta, a, i, band);
    for (int p = 0; p < 5; ++p) {
      const cplx z = src.in_disc(0.85);
      CHECK((V(f, z) - kernel(*theta, a, z).col(i)).norm() < 1e-9);
    }
  }
  // isometry
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto [a, i] = ks[src.integer(0, 7)];
    const auto [b, j] = ks[src.integer(0, 7)];
    const cplx lhs = V.inner(modified_kernel(*theta, a, i, band), modified_kernel(*theta, b, j, band));
    worst = std::max(worst, std::abs(lhs - kernel(*theta, a, b)(j, i)));
  }
  CHECK(worst <= 1e-8);

  const CauchyTransform V0(share(MatFunction::zero(2)), 3);
  Vec e1 = Vec::Zero(8);
  e1(1) = 1.0;
  CHECK((V0(e1, cplx(0.3, 0.4)) - Vec::Unit(2, 1)).norm() < 1e-15);
  CHECK_THROWS_AS(V0.integral(e1, 1.0), DomainError);
}

TEST_CASE("backward shift intertwining", "[modelspace]") {
  CHECK(intertwine_residual(MatFunction::zero(2), 10) < 1e-14);
  CHECK(intertwine_residual(MatFunction::monomial(1, 2), 20) <= 1e-9);
  gen::Source src(45);
  CHECK(intertwine_residual(src.rational_inner(2, 3), 40) <= 1e-7);
}

TEST_CASE("extreme point test", "[modelspace]") {
  CHECK(extreme_test(MatFunction::monomial(1, 1)).classification == Extremality::extreme);
  CHECK(extreme_test(diag_z_singular()).classification == Extremality::extreme);
  const auto zero = extreme_test(MatFunction::zero(2));
  CHECK(zero.classification == Extremality::non_extreme);
  CHECK(std::abs(zero.estimate) < 1e-15);

  const auto half = extreme_test(half_plus_half_z());
  CHECK(half.classification == Extremality::non_extreme);
  // 1 - |cos(t/2)| = 2 sin^2(t/4) on [0, pi]; the integrand is symmetric about pi.
  boost::math::quadrature::tanh_sinh<double> ts;
  const double ref = ts.integrate([](double t, double tc) {
    const double s = std::sin((tc < 0.0 ? -tc : t) / 4.0);
    return s > 0.0 ? std::log(2.0) + 2.0 * std::log(s) : 0.0;
  }, 0.0, kPi) / kPi;
  CHECK(std::abs(ref + std::log(2.0) + 4.0 * boost::math::constants::catalan<double>() / kPi) < 1e-9);
  CHECK(std::abs(half.estimate - ref) < 1e-7);
  REQUIRE(half.suspects.size() == 1);
  CHECK(std::abs(half.suspects[0]) < 1e-6);

  // 0.9 z: log integrand is smooth.
  const auto c = extreme_test(scaled(MatFunction::monomial(1, 1), 0.9));
  CHECK(c.classification == Extremality::non_extreme);
  CHECK(std::abs(c.estimate - std::log(0.1)) < 1e-12);
}

TEST_CASE("CAD test examples", "[modelspace]") {
  const auto z = cad_test(MatFunction::monomial(1, 1), 1.0);
  CHECK(z.status == CadStatus::exists);
  REQUIRE(z.derivative);
  CHECK(std::abs((*z.derivative)(0, 0) - 1.0) < 1e-14);

  CHECK(cad_test(half_plus_half_z(), -1.0).status == CadStatus::absent);

  const auto s = cad_test(MatFunction::scalar_singular(1.0), 1.0, Vec::Ones(1));
  CHECK(s.status == CadStatus::absent);
  for (std::size_t i = 1; i < s.ladder.size(); ++i) CHECK(s.ladder[i] >= 1.9 * s.ladder[i - 1]);

  const auto d = diag_z_singular();
  CHECK(cad_test(d, 1.0, Vec::Unit(2, 0)).status == CadStatus::exists);
  CHECK(cad_test(d, 1.0, Vec::Unit(2, 1)).status == CadStatus::absent);
  CHECK(cad_test(d, 1.0).status == CadStatus::absent);
  CHECK_THROWS_AS(cad_test(d, 0.5), DomainError);
}

TEST_CASE("dense definedness", "[modelspace]") {
  CHECK(densely_defined_test(MatFunction::monomial(1, 1)).value == Tristate::no);
  CHECK(densely_defined_test(MatFunction::scalar_singular(1.0)).value == Tristate::yes);
  CHECK(densely_defined_test(diag_z_singular()).value == Tristate::no);
}

TEST_CASE("regular points", "[modelspace]") {
  std::vector<cplx> pts;
  for (int j = 0; j < 12; ++j) pts.push_back(unit(2.0 * kPi * j / 12));
  for (auto c : regular_points(MatFunction::monomial(1, 1), pts)) CHECK(c == PointClass::regular);
  const auto s = regular_points(MatFunction::scalar_singular(1.0), pts);
  CHECK(s[0] == PointClass::spectrum);
  for (std::size_t j = 1; j < s.size(); ++j) CHECK(s[j] == PointClass::regular);
  for (auto c : regular_points(half_plus_half_z(), pts)) CHECK(c == PointClass::spectrum);
}

TEST_CASE("Clark eigensystem examples", "[modelspace]") {
  const auto z2 = clark_eigensystem(share(MatFunction::monomial(1, 2)), eye(1));
  REQUIRE(z2.nodes.size() == 2);
  CHECK(std::abs(z2.nodes[0].lambda - 1.0) < 1e-12);
  CHECK(std::abs(z2.nodes[1].lambda + 1.0) < 1e-12);
  for (const auto& node : z2.nodes) CHECK(std::abs(node.kernel_norm2 - 2.0) < 1e-12);
  for (const auto& cl : z2.clusters) CHECK(std::abs(cl.weight(0, 0) - 0.5) < 1e-12);

  const cplx u = unit(0.7);
  const auto z1 = clark_eigensystem(share(MatFunction::monomial(1, 1)), scalar(u));
  REQUIRE(z1.nodes.size() == 1);
  CHECK(std::abs(z1.nodes[0].lambda - u) < 1e-12);

  gen::Source src(46);
  const Mat U = src.unitary(2);
  const auto dz = clark_eigensystem(share(MatFunction::monomial(2, 1)), U);
  REQUIRE(dz.nodes.size() == 2);
  const Eigen::ComplexEigenSolver<Mat> es(U);
  for (const auto& node : dz.nodes) {
    CHECK((U * node.direction - node.lambda * node.direction).norm() < 1e-9);
    bool found = false;
    for (int j = 0; j < 2; ++j) found = found || std::abs(es.eigenvalues()(j) - node.lambda) < 1e-9;
    CHECK(found);
  }

  // Theta = z 1_2, U = 1: one eigenvalue of multiplicity two.
  const auto dbl = clark_eigensystem(share(MatFunction::monomial(2, 1)), eye(2));
  CHECK(dbl.clusters.size() == 1);
  CHECK(dbl.clusters[0].multiplicity == 2);
  CHECK(dbl.nodes.size() == 2);

  // Inner polynomials given by Taylor coefficients: z^2 and diag(z, z^2).
  const MatFunction z2_poly(1, {}, std::vector<Mat>{scalar(0.0), scalar(0.0), scalar(1.0)}, {}, std::nullopt,
                            {.inner = true, .vanishes_at_zero = true});
  const auto zp = clark_eigensystem(share(z2_poly), scalar(-1.0));
  REQUIRE(zp.nodes.size() == 2);
  CHECK(std::abs(zp.nodes[0].lambda - kI) < 1e-12);
  CHECK(std::abs(zp.nodes[1].lambda + kI) < 1e-12);
  for (const auto& cl : zp.clusters) CHECK(std::abs(cl.weight(0, 0) - 0.5) < 1e-12);
  Mat e1 = Mat::Zero(2, 2), e2 = Mat::Zero(2, 2);
  e1(0, 0) = 1.0;
  e2(1, 1) = 1.0;
  const MatFunction mixed(2, {}, std::vector<Mat>{Mat::Zero(2, 2), e1, e2}, {}, std::nullopt,
                          {.inner = true, .vanishes_at_zero = true});
  const auto mp = clark_eigensystem(share(mixed), eye(2));
  CHECK(mp.nodes.size() == 3);
  Mat total = Mat::Zero(2, 2);
  for (const auto& cl : mp.clusters) total += cl.weight;
  CHECK(max_abs(total - eye(2)) < 1e-10);
  CHECK(mp.max_gram_offdiag < 1e-10);

  CHECK_THROWS_AS(clark_eigensystem(share(half_plus_half_z()), eye(1)), PreconditionError);
  CHECK_THROWS_AS(clark_eigensystem(share(MatFunction::monomial(1, 2)), scalar(2.0)), PreconditionError);
}

TEST_CASE("Clark systems are complete and orthogonal", "[modelspace]") {
  gen::Source src(47);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = src.integer(1, 3);
    auto theta = share(src.rational_inner(n, 3));
    const Mat U = src.unitary(n);
    const auto sys = clark_eigensystem(theta, U);
    CHECK(static_cast<int>(sys.nodes.size()) == theta->det_degree());
    int total = 0;
    for (const auto& cl : sys.clusters) total += cl.multiplicity;
    CHECK(total == sys.dimension);
    CHECK(sys.max_eigen_residual <= 1e-9);
    CHECK(sys.max_gram_offdiag <= 1e-8);
    for (const auto& node : sys.nodes) CHECK(std::abs(std::abs(node.lambda) - 1.0) < 1e-14);

    // The Clark atoms are the spectral atoms of the compressed model operator.
    const auto frame = build_frame(*theta, 12);
    const auto sm = spectral_measure(frame, U, {});
    REQUIRE(sm.measure.atoms.size() == sys.clusters.size());
    for (const auto& cl : sys.clusters) {
      double best = 1e300;
      for (const auto& at : sm.measure.atoms)
        if (std::abs(at.point - cl.lambda) < 1e-6) best = max_abs(at.weight - cl.weight);
      CHECK(best < 1e-6);
    }
  }
}

TEST_CASE("reconstruction from Clark samples", "[modelspace]") {
  gen::Source src(48);
  {
    auto theta = share(src.rational_inner(2, 3));
    const auto sys = clark_eigensystem(theta, src.unitary(2));
    const Vec x = src.unit_vector(2);
    const auto samples = sys.sample([&](cplx) { return x; });
    for (int p = 0; p < 10; ++p) CHECK((reconstruct(sys, samples, src.in_disc(0.99)) - x).norm() < 1e-9);
    CHECK_THROWS_AS(reconstruct(sys, std::vector<cplx>(1), 0.1), PreconditionError);
  }
  {
    auto theta = share(MatFunction::monomial(1, 2));
    const auto sys = clark_eigensystem(theta, eye(1));
    const cplx w(0.3, 0.1);
    const auto samples = sys.sample([&](cplx l) { return Vec(kernel(*theta, w, l).col(0)); });
    for (int p = 0; p < 10; ++p) {
      const cplx z = src.in_disc(0.99);
      CHECK((reconstruct(sys, samples, z) - kernel(*theta, w, z).col(0)).norm() < 1e-9);
    }
  }
  {
    auto theta = share(src.rational_inner(2, 3));
    const auto sys = clark_eigensystem(theta, src.unitary(2));
    std::vector<std::tuple<cplx, Vec, cplx>> terms;
    for (int j = 0; j < 3; ++j) terms.emplace_back(src.in_disc(0.9), src.unit_vector(2), src.gaussian());
    auto f = [&](cplx z) {
      Vec v = Vec::Zero(2);
      for (const auto& [w, y, c] : terms) v += c * kernel(*theta, w, z) * y;
      return v;
    };
    const auto samples = sys.sample(f);
    double worst = 0.0;
    for (int p = 0; p < 50; ++p) {
      const cplx z = src.in_disc(0.99);
      worst = std::max(worst, (reconstruct(sys, samples, z) - f(z)).norm());
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("half-plane transfer", "[modelspace]") {
  CHECK(std::abs(cayley_inverse(-1.0)) < 1e-15);
  auto z2 = share(MatFunction::monomial(1, 2));
  const auto hs = to_halfplane(clark_eigensystem(z2, scalar(-1.0)));
  REQUIRE(hs.nodes.size() == 2);
  std::vector<double> ts{hs.nodes[0].t, hs.nodes[1].t};
  std::sort(ts.begin(), ts.end());
  CHECK(std::abs(ts[0] + 1.0) < 1e-12);
  CHECK(std::abs(ts[1] - 1.0) < 1e-12);
  CHECK_THROWS_AS(to_halfplane(clark_eigensystem(z2, eye(1))), DomainError);

  gen::Source src(49);
  auto theta = share(src.rational_inner(2, 3));
  CHECK(max_abs(cayley_compose(*theta, kI)) < 1e-15);
  const auto sys = clark_eigensystem(theta, src.unitary(2));
  const auto half = to_halfplane(sys);
  const cplx w(0.2, -0.4);
  const Vec y = src.unit_vector(2);
  auto f = [&](cplx z) { return Vec(kernel(*theta, w, z) * y); };
  const auto disc = sys.sample(f);
  const auto hsamples = half.transfer_samples(disc);
  for (int p = 0; p < 10; ++p) {
    const cplx z(src.uniform(-3.0, 3.0), src.uniform(0.05, 3.0));
    const cplx mz = cayley(z);
    const Vec lhs = (1.0 - mz) / std::sqrt(kPi) * reconstruct(sys, disc, mz);
    CHECK((lhs - reconstruct(half, hsamples, z)).norm() <= 1e-8);
  }

  const auto kv = to_halfplane(kernel_vector(theta, 0.0, y));
  CHECK(std::abs(kv.base - kI) < 1e-15);
}
