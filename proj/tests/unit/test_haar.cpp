#include <catch_amalgamated.hpp>

#include <clarklab/errors.hpp>
#include <clarklab/haar.hpp>

#include "generators.hpp"

using namespace clarklab;

TEST_CASE("counter rng streams are reproducible and distinct", "[haar]") {
  CounterRng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  const auto a0 = a(), a1 = a();
  CHECK(a0 == b());
  CHECK(a1 == b());
  CHECK(a0 != c());
  CHECK(a0 != d());
  const HaarSampler s(3, 99);
  CHECK(s.sample(5) == s.sample(5));
  HaarSampler t(3, 99, 5);
  CHECK(t.next() == s.sample(5));
  CHECK(t.counter() == 6);
}

TEST_CASE("haar samples are unitary", "[haar]") {
  HaarSampler s(4, 1);
  for (int i = 0; i < 200; ++i) CHECK(unitarity_defect(s.next()) <= 1e-12);
}

TEST_CASE("haar sample statistics", "[haar]") {
  const auto mean = haar_average(1, 10000, 5, [](const Mat& u) { return u; });
  CHECK(std::abs(mean.mean(0, 0)) <= 0.03);
  const auto tr2 = haar_average(2, 10000, 6, [](const Mat& u) { return Mat::Constant(1, 1, std::norm(u.trace())); });
  CHECK(tr2.mean(0, 0).real() >= 0.9);
  CHECK(tr2.mean(0, 0).real() <= 1.1);
}

TEST_CASE("weyl grid weights", "[haar]") {
  for (int n = 1; n <= 3; ++n) {
    const WeylGrid g(n, 16);
    CHECK(std::abs(g.total_weight() - 1.0) <= 1e-10);
  }
  // swapping two nodes leaves the weight unchanged
  std::vector<cplx> z{unit(0.3), unit(1.7), unit(-2.2)};
  std::vector<cplx> w{z[1], z[0], z[2]};
  CHECK(std::abs(vandermonde_abs2(z) - vandermonde_abs2(w)) <= 1e-14);
}

TEST_CASE("weyl integrate examples", "[haar]") {
  const WeylGrid g2(2, 64, 200, 3);
  CHECK(std::abs(weyl_integrate([](const Mat&) { return cplx(1.0); }, g2) - 1.0) <= 1e-12);
  CHECK(std::abs(weyl_integrate([](const Mat& u) { return u.trace(); }, g2)) <= 1e-12);
  CHECK(std::abs(weyl_integrate([](const Mat& u) { return cplx(std::norm(u.trace())); }, g2) - 1.0) <= 0.05);
  const WeylGrid g1(1, 32);
  CHECK(std::abs(weyl_integrate([](const Mat& u) { return u(0, 0) * u(0, 0); }, g1)) <= 1e-14);
}

TEST_CASE("class function integrals", "[haar]") {
  for (int n = 1; n <= 3; ++n) {
    CHECK(std::abs(class_function_integrate([](const auto&) { return cplx(1.0); }, n, 16) - 1.0) <= 1e-12);
    const cplx tr2 = class_function_integrate([](const std::vector<cplx>& z) {
      cplx t = 0.0;
      for (cplx v : z) t += v;
      return cplx(std::norm(t));
    }, n, 16);
    CHECK(std::abs(tr2 - 1.0) <= 1e-10);
  }
  // z_1^{k_1} ... z_n^{k_n} with k >= 0, some k_l >= 1, integrates to zero
  gen::Source src(41);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = src.integer(1, 3);
    std::vector<int> k(n);
    for (auto& v : k) v = src.integer(0, 3);
    k[src.integer(0, n - 1)] = src.integer(1, 3);
    const cplx v = class_function_integrate([&](const std::vector<cplx>& z) {
      cplx p = 1.0;
      for (int i = 0; i < n; ++i) p *= std::pow(z[i], k[i]);
      return p;
    }, n, 16);
    CHECK(std::abs(v) <= 1e-12);
  }
}

TEST_CASE("weyl quadrature and Monte Carlo agree", "[haar]") {
  gen::Source src(42);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = src.integer(1, 3);
    const int a = src.integer(1, 3), b = src.integer(0, 2);
    const cplx w = src.gaussian();
    auto cls = [=](const Mat& u) {
      Mat ua = u, ub = eye(n);
      for (int i = 1; i < a; ++i) ua = ua * u;
      for (int i = 0; i < b; ++i) ub = ub * u;
      return Mat::Constant(1, 1, std::norm(ua.trace()) + w * ub.trace());
    };
    const cplx exact = class_function_integrate([&](const std::vector<cplx>& z) {
      const Vec d = Eigen::Map<const Vec>(z.data(), n);
      return cls(Mat(d.asDiagonal()))(0, 0);
    }, n, 24);
    const auto mc = haar_average(n, 4000, 100 + trial, cls);
    CHECK(std::abs(mc.mean(0, 0) - exact) <= 3.0 * std::abs(mc.standard_error(0, 0)) + 1e-12);
  }
  for (int trial = 0; trial < 10; ++trial) {
    const int n = src.integer(2, 3);
    const int i = src.integer(0, n - 1), j = src.integer(0, n - 1);
    auto f = [=](const Mat& u) { return Mat::Constant(1, 1, std::norm(u(i, j)) + u(i, j) * u(j, i)); };
    const auto m1 = haar_average(n, 3000, 200 + trial, f);
    const auto m2 = haar_average(n, 3000, 300 + trial, f);
    const double s = std::hypot(std::abs(m1.standard_error(0, 0)), std::abs(m2.standard_error(0, 0)));
    CHECK(std::abs(m1.mean(0, 0) - m2.mean(0, 0)) <= 3.0 * s);
  }
}

TEST_CASE("trigonometric polynomial parsing", "[haar]") {
  const auto f = TrigPolynomial::parse("1,0,1");
  CHECK(f.degree == 1);
  CHECK(f.coeff(-1) == cplx(1.0));
  CHECK(f.coeff(1) == cplx(1.0));
  CHECK_THROWS_AS(TrigPolynomial::parse("0,1"), PreconditionError);
  CHECK_THROWS_AS(TrigPolynomial::parse("1,x,3"), PreconditionError);
  const auto h = TrigPolynomial::parse("0.5:-1,2,3");
  CHECK(h.coeff(-1) == cplx(0.5, -1.0));
  CHECK(std::abs(h(unit(0.4)) - (cplx(0.5, -1.0) * unit(-0.4) + 2.0 + 3.0 * unit(0.4))) < 1e-14);
}

TEST_CASE("filtration check examples", "[haar]") {
  gen::Source src(43);
  const auto one = TrigPolynomial::parse("1");
  const auto r1 = filtration_check(src.rational_inner(2, 4), one, 200);
  CHECK(max_abs(r1.lhs - eye(2)) <= 1e-13);
  CHECK(r1.within_band);

  const auto zeta = TrigPolynomial::parse("0,0,1");
  const auto r2 = filtration_check(MatFunction::monomial(1, 2), zeta, 2000);
  CHECK(max_abs(r2.rhs) == 0.0);
  CHECK(r2.within_band);

  // zeta^2 + conj(zeta)
  const auto r3 = filtration_check(src.rational_inner(2, 4), TrigPolynomial::parse("0,1,0,0,1"), 2000);
  CHECK(r3.within_band);
}

TEST_CASE("filtration error scales like one over root S", "[haar]") {
  gen::Source src(44);
  const auto theta = src.rational_inner(2, 3);
  const auto f = TrigPolynomial::parse("0.3,1,0.5,0,2");
  const auto a = filtration_check(theta, f, 500, 11);
  const auto b = filtration_check(theta, f, 2000, 11);
  const auto c = filtration_check(theta, f, 8000, 11);
  CHECK(a.within_band);
  CHECK(b.within_band);
  CHECK(c.within_band);
  CHECK(a.max_sigma / b.max_sigma == Catch::Approx(2.0).epsilon(0.25));
  CHECK(b.max_sigma / c.max_sigma == Catch::Approx(2.0).epsilon(0.25));
}

TEST_CASE("scalar disintegration over the circle", "[haar]") {
  gen::Source src(45);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<cplx> zeros{0.0, src.in_disc(0.7), src.in_disc(0.7)};
    const auto theta = MatFunction::blaschke(zeros);
    TrigPolynomial f{3, {}};
    for (int k = 0; k < 7; ++k) f.coeffs.push_back(src.gaussian());
    const auto r = filtration_check_circle(theta, f, 4096);
    CHECK(r.abs_err <= 1e-3);
  }
}
