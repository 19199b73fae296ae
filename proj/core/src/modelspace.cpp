#include "clarklab/modelspace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "clarklab/errors.hpp"
#include "clarklab/parallel.hpp"

namespace clarklab {

namespace {

constexpr double kOnCircle = 1e-12;

bool on_circle(cplx z) { return std::abs(std::abs(z) - 1.0) <= kOnCircle; }

Mat kernel_formula(const MatFunction& theta, cplx w, cplx z) {
  const int n = theta.dim();
  return (eye(n) - theta.eval(z) * theta.eval(w).adjoint()) / (1.0 - z * std::conj(w));
}

// Angular limit of Delta_lambda at lambda, given a certified CAD.
Mat boundary_diagonal(const MatFunction& theta, cplx lambda, const CadResult& cad) {
  if (!theta.is_singular_atom(lambda, 1e-9))
    return lambda * theta.derivative(lambda) * theta.eval(lambda).adjoint();
  return *cad.angular_limit;
}

CadResult certify(const MatFunction& theta, cplx w) {
  CadResult cad = cad_test(theta, w);
  if (cad.status != CadStatus::exists)
    throw DomainError("boundary point has no angular derivative; kernel undefined");
  return cad;
}

Mat disc_kernel(const MatFunction& theta, cplx w, cplx z, const CadResult* cad) {
  if (on_circle(w) && std::abs(z - w) <= kOnCircle) return boundary_diagonal(theta, w / std::abs(w), *cad);
  return kernel_formula(theta, w, z);
}

// Phi'(t) for Phi = Theta o mu.
Mat phi_derivative(const MatFunction& theta, cplx t) {
  const cplx d = t + kI;
  return theta.derivative(cayley(t)) * (2.0 * kI / (d * d));
}

Vec halfplane_kernel(const MatFunction& theta, cplx w, const Vec& x, cplx z) {
  const int n = theta.dim();
  const Mat phiw = cayley_compose(theta, w);
  if (std::abs(z - w) <= 1e-13 && std::abs(w.imag()) <= 1e-13)
    return (kI / (2.0 * kPi)) * (-phi_derivative(theta, w) * phiw.adjoint()) * x;
  return (kI / (2.0 * kPi)) * ((eye(n) - cayley_compose(theta, z) * phiw.adjoint()) / (z - std::conj(w))) * x;
}

// 16-point Gauss-Legendre rule on [-1, 1].
const std::pair<std::array<double, 16>, std::array<double, 16>>& gauss_legendre16() {
  static const auto rule = [] {
    constexpr int N = 16;
    std::array<double, N> x{}, w{};
    for (int i = 0; i < N; ++i) {
      double z = std::cos(kPi * (i + 0.75) / (N + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p1 = 1.0, p2 = 0.0;
        for (int j = 1; j <= N; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        pp = N * (z * p1 - p2) / (z * z - 1.0);
        const double dz = p1 / pp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return std::make_pair(x, w);
  }();
  return rule;
}

template <class F>
double gauss16(F&& f, double a, double b) {
  const auto& [x, w] = gauss_legendre16();
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  double s = 0.0;
  for (int i = 0; i < 16; ++i) s += w[i] * f(c + h * x[i]);
  return s * h;
}

}  // namespace

Mat kernel(const MatFunction& theta, cplx w, cplx z) {
  if (std::abs(w) > 1.0 + kOnCircle || std::abs(z) > 1.0 + kOnCircle) throw DomainError("kernel point outside the closed disc");
  if (on_circle(w)) {
    const CadResult cad = certify(theta, w / std::abs(w));
    return disc_kernel(theta, w, z, &cad);
  }
  return kernel_formula(theta, w, z);
}

Vec KernelVector::operator()(cplx z) const {
  if (side == Side::halfplane) return halfplane_kernel(*theta, base, direction, z);
  if (on_circle(base) && std::abs(z - base) <= kOnCircle) {
    const CadResult cad = certify(*theta, base);
    return boundary_diagonal(*theta, base, cad) * direction;
  }
  return kernel_formula(*theta, base, z) * direction;
}

KernelVector kernel_vector(std::shared_ptr<const MatFunction> theta, cplx w, Vec x) {
  if (!theta) throw PreconditionError("kernel vector needs a function");
  if (x.size() != theta->dim()) throw PreconditionError("direction has wrong dimension");
  if (std::abs(w) > 1.0 + kOnCircle) throw DomainError("kernel base point outside the closed disc");
  if (on_circle(w)) {
    w /= std::abs(w);
    certify(*theta, w);
  }
  return {std::move(theta), w, std::move(x), Side::disc};
}

cplx kernel_inner(const KernelVector& a, const KernelVector& b) {
  if (a.side != b.side || a.theta.get() != b.theta.get())
    throw PreconditionError("kernels belong to different spaces");
  return b.direction.dot(a(b.base));
}

KernelVector to_halfplane(const KernelVector& k) {
  if (k.side == Side::halfplane) return k;
  return {k.theta, cayley_inverse(k.base), k.direction, Side::halfplane};
}

CauchyTransform::CauchyTransform(std::shared_ptr<const MatFunction> theta, int band, double max_radius)
    : theta_(std::move(theta)),
      band_(band),
      max_radius_(max_radius),
      tail_terms_(static_cast<int>(std::ceil(std::log(1e-17) / std::log(max_radius)))),
      table_(*theta_, eye(theta_->dim()), band + tail_terms_) {
  if (band < 0) throw PreconditionError("band must be non-negative");
  if (!(max_radius > 0.0 && max_radius < 1.0)) throw PreconditionError("max radius must lie in (0, 1)");
}

Mat CauchyTransform::transfer(cplx z) const {
  const int n = dim();
  if (std::abs(z) >= 1.0) throw DomainError("Cauchy transform needs |z| < 1");
  if (std::abs(z) > max_radius_ + 1e-15) throw PreconditionError("point beyond the transform's tail bound");
  const int terms = std::abs(z) == 0.0 ? 0 : std::min(tail_terms_, static_cast<int>(std::ceil(std::log(1e-17) / std::log(std::abs(z)))));
  std::vector<cplx> zp(static_cast<std::size_t>(terms) + 1, 1.0);
  for (int m = 1; m <= terms; ++m) zp[m] = zp[m - 1] * z;
  Mat W = Mat::Zero(n, (band_ + 1) * n);
  for (int k = 0; k <= band_; ++k) {
    auto blk = W.middleCols(k * n, n);
    for (int m = 0; m <= terms; ++m) blk += zp[m] * table_.m(k - m);
  }
  return W;
}

Vec CauchyTransform::integral(const Vec& coeffs, cplx z) const {
  if (coeffs.size() != (band_ + 1) * dim()) throw PreconditionError("coefficient vector has wrong length");
  return transfer(z) * coeffs;
}

Vec CauchyTransform::operator()(const Vec& coeffs, cplx z) const {
  return (eye(dim()) - theta_->eval(z)) * integral(coeffs, z);
}

cplx CauchyTransform::inner(const Vec& f, const Vec& g) const {
  const int n = dim();
  cplx s = 0.0;
  for (int kp = 0; kp <= band_; ++kp)
    for (int k = 0; k <= band_; ++k) s += g.segment(kp * n, n).dot(table_.m(k - kp) * f.segment(k * n, n));
  return s;
}

Vec modified_kernel(const MatFunction& theta, cplx a, int i, int band) {
  const int n = theta.dim();
  if (std::abs(a) >= 1.0) throw DomainError("modified kernel needs |a| < 1");
  const Vec c = (eye(n) - theta.eval(a).adjoint()).col(i);
  Vec out(static_cast<Eigen::Index>(band + 1) * n);
  cplx p = 1.0;
  for (int k = 0; k <= band; ++k) {
    out.segment(k * n, n) = p * c;
    p *= std::conj(a);
  }
  return out;
}

double intertwine_residual(const MatFunction& theta, int K) {
  if (!theta.vanishes_at_zero()) throw PreconditionError("intertwining check requires Theta(0) = 0");
  const int n = theta.dim();
  auto shared = std::make_shared<const MatFunction>(theta);
  const CauchyTransform ct(shared, K, 0.8);
  std::vector<cplx> probes;
  for (int j = 0; j < 20; ++j)
    probes.push_back(std::polar(0.2 + 0.6 * (j % 5) / 4.0, 2.0 * kPi * std::fmod(0.1 + 0.6180339887 * j, 1.0)));

  const Mat W0 = ct.transfer(0.0);
  // g = f - E_0 C f(0) for every basis vector f at once
  Mat G = eye((K + 1) * n);
  G.topRows(n) -= W0;
  const auto per_probe = parallel_map(probes.size(), [&](std::size_t j) {
    const cplx z = probes[j];
    const Mat Wz = ct.transfer(z);
    const Mat one_minus = eye(n) - theta.eval(z);
    const Mat lhs = (one_minus * Wz - W0) / z;
    const Mat rhs = one_minus * (Wz - W0) * G / z;
    return (lhs - rhs).colwise().norm().maxCoeff();
  });
  return *std::max_element(per_probe.begin(), per_probe.end());
}

ExtremeResult extreme_test(const MatFunction& theta) {
  const int n = theta.dim();
  auto values = [&](double phi) -> Eigen::VectorXd {
    const Eigen::JacobiSVD<Mat> svd(theta.eval(unit(phi)));
    return svd.singularValues();
  };
  auto integrand = [&](double phi) {
    const auto s = values(phi);
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += std::log(std::max(1.0 - s(i), 1e-300));
    return v;
  };
  auto gap = [&](double phi) { return 1.0 - values(phi)(0); };

  ExtremeResult out;
  constexpr int kScan = 4096;
  std::vector<double> g(kScan, 1.0);
  int saturated = 0;
  for (int i = 0; i < kScan; ++i) {
    const double phi = 2.0 * kPi * (i + 0.5) / kScan;
    if (theta.is_singular_atom(unit(phi), 1e-12)) continue;
    g[i] = gap(phi);
    if (g[i] <= 1e-12) ++saturated;
  }
  if (saturated >= kScan / 100) {
    out.classification = Extremality::extreme;
    out.estimate = out.lower = out.upper = -std::numeric_limits<double>::infinity();
    return out;
  }

  const double h = 2.0 * kPi / kScan;
  for (int i = 0; i < kScan; ++i) {
    const double gl = g[(i + kScan - 1) % kScan], gr = g[(i + 1) % kScan];
    if (!(g[i] < 1e-2 && g[i] <= gl && g[i] <= gr)) continue;
    double a = 2.0 * kPi * (i + 0.5) / kScan - h, b = a + 2.0 * h;
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 120 && b - a > 1e-15; ++it) {
      const double m1 = b - ratio * (b - a), m2 = a + ratio * (b - a);
      if (gap(m1) < gap(m2)) b = m2; else a = m1;
    }
    double phi = std::fmod(0.5 * (a + b) + 2.0 * kPi, 2.0 * kPi);
    if (!out.suspects.empty() && std::abs(phi - out.suspects.back()) < 1e-6) continue;
    out.suspects.push_back(phi);
  }
  for (const auto& s : theta.singular_factors()) out.suspects.push_back(std::fmod(std::arg(s.atom) + 2.0 * kPi, 2.0 * kPi));
  std::sort(out.suspects.begin(), out.suspects.end());
  out.suspects.erase(std::unique(out.suspects.begin(), out.suspects.end(),
                                 [](double x, double y) { return std::abs(x - y) < 1e-6; }),
                     out.suspects.end());
  if (out.suspects.size() > 1 && out.suspects.back() - out.suspects.front() > 2.0 * kPi - 1e-6) out.suspects.pop_back();

  double total = 0.0;
  bool converged = true;
  bool diverged = false;
  if (out.suspects.empty()) {
    constexpr int panels = 512;
    for (int p = 0; p < panels; ++p) total += gauss16(integrand, 2.0 * kPi * p / panels, 2.0 * kPi * (p + 1) / panels);
  } else {
    const std::size_t m = out.suspects.size();
    for (std::size_t j = 0; j < m; ++j) {
      const double a = out.suspects[j];
      const double b = j + 1 < m ? out.suspects[j + 1] : out.suspects[0] + 2.0 * kPi;
      const double half = 0.5 * (b - a);
      // graded toward a (dir = +1) and toward b (dir = -1)
      for (int dir : {+1, -1}) {
        const double end = dir > 0 ? a : b;
        std::vector<double> shells;
        // Suspect angles are only resolved to about sqrt(eps), so the grading
        // stops there and the rest is a geometric tail.
        for (int s = 0; half * std::ldexp(1.0, -s) > 1e-7; ++s) {
          const double outer = half * std::ldexp(1.0, -s), inner = 0.5 * outer;
          const int pieces = s < 4 ? 8 : 1;
          double c = 0.0;
          for (int q = 0; q < pieces; ++q) {
            const double lo = inner + (outer - inner) * q / pieces, hi = inner + (outer - inner) * (q + 1) / pieces;
            c += dir > 0 ? gauss16(integrand, end + lo, end + hi) : gauss16(integrand, end - hi, end - lo);
          }
          shells.push_back(c);
          total += c;
        }
        const std::size_t L = shells.size();
        if (L >= 2 && std::abs(shells[L - 2]) > 1e-300) {
          const double r = shells[L - 1] / shells[L - 2];
          if (r > 0.0 && r < 0.9) total += shells[L - 1] * r / (1.0 - r);
        }
        if (L < 12) {
          converged = false;
          continue;
        }
        bool decays = true, flat = true;
        for (std::size_t s = L - 8; s < L; ++s) {
          const double prev = std::abs(shells[s - 1]), cur = std::abs(shells[s]);
          if (cur > 1e-300 && prev > 1e-300) {
            decays = decays && cur <= 0.8 * prev;
            flat = flat && cur >= 0.9 * prev;
          } else {
            flat = false;
          }
        }
        if (!decays) converged = false;
        if (flat && !decays) diverged = true;
      }
    }
  }
  out.estimate = total / (2.0 * kPi);
  out.upper = out.estimate;
  if (diverged || out.estimate < -1e3) {
    out.classification = Extremality::extreme;
    out.lower = -std::numeric_limits<double>::infinity();
  } else if (converged) {
    out.classification = Extremality::non_extreme;
    out.lower = out.estimate;
  } else {
    out.classification = Extremality::indeterminate;
    out.lower = -1e3;
  }
  return out;
}

CadResult cad_test(const MatFunction& theta, cplx zeta, const std::optional<Vec>& direction, const CadOptions& opts) {
  const int n = theta.dim();
  if (!on_circle(zeta)) throw DomainError("cad_test needs a point on the unit circle");
  zeta /= std::abs(zeta);
  if (direction && direction->size() != n) throw PreconditionError("direction has wrong dimension");
  const bool atom = theta.is_singular_atom(zeta, 1e-12);

  CadResult out;
  out.boundary_value = atom ? theta.eval((1.0 - std::ldexp(1.0, -45)) * zeta) : theta.eval(zeta);
  Vec x;
  if (direction) x = *direction / direction->norm();

  std::vector<Mat> radial;
  for (int m = opts.first_rung; m <= opts.last_rung; ++m) {
    const double r = 1.0 - std::ldexp(1.0, -m);
    const double denom = 1.0 - r * r;
    const Mat t = theta.eval(r * zeta);
    double c;
    if (direction) c = (1.0 - (t * x).squaredNorm()) / denom;
    else c = op_norm((eye(n) - t * out.boundary_value.adjoint()) / denom);
    out.ladder.push_back(c);
    radial.push_back((eye(n) - t * t.adjoint()) / denom);
  }
  const auto& L = out.ladder;
  const std::size_t len = L.size();
  out.c_liminf = *std::min_element(L.end() - std::min<std::size_t>(5, len), L.end());

  const bool unitary_value = direction ? std::abs(1.0 - (out.boundary_value * x).norm()) <= 1e-8
                                       : unitarity_defect(out.boundary_value) <= 1e-8;
  bool growing = true;
  for (std::size_t i = len - 4; i < len; ++i) growing = growing && L[i] >= opts.growth_ratio * L[i - 1];
  bool stable = true;
  for (std::size_t i = len - 4; i < len; ++i)
    stable = stable && std::abs(L[i] - L[i - 1]) <= opts.stable_relative * std::max(std::abs(L[i]), 1e-300);

  if (!unitary_value || growing || L.back() > opts.bound) {
    out.status = CadStatus::absent;
    return out;
  }
  if (!stable) {
    out.status = CadStatus::indeterminate;
    return out;
  }
  out.status = CadStatus::exists;
  // Richardson step on the O(1 - r) error of the radial Julia quotient.
  out.angular_limit = hermitian_part(2.0 * radial[len - 1] - radial[len - 2]);
  if (!atom && !direction) {
    const Mat d = theta.derivative(zeta);
    const Mat A = zeta * d * out.boundary_value.adjoint();
    const double scale = std::max(1.0, op_norm(A));
    if (max_abs(A - A.adjoint()) > 1e-8 * scale || min_hermitian_eigenvalue(A) < -1e-8 * scale)
      throw InternalError("angular derivative identity violated: zeta Theta' Theta* is not positive");
    out.derivative = d;
  } else if (!atom) {
    out.derivative = theta.derivative(zeta);
  }
  return out;
}

DenseResult densely_defined_test(const MatFunction& theta, const CadOptions& opts) {
  const int n = theta.dim();
  const double r = 1.0 - std::ldexp(1.0, -opts.last_rung);
  const Mat t = theta.eval(r);
  const Mat ladder = hermitian_part((eye(n) - t.adjoint() * t) / (1.0 - r * r));
  const Eigen::SelfAdjointEigenSolver<Mat> es(ladder);
  DenseResult out;
  bool any_exists = false, all_absent = true;
  for (int i = 0; i < n; ++i) {
    const Vec x = es.eigenvectors().col(i);
    auto res = cad_test(theta, 1.0, x, opts);
    any_exists = any_exists || res.status == CadStatus::exists;
    all_absent = all_absent && res.status == CadStatus::absent;
    out.directions.push_back(x);
    out.per_direction.push_back(std::move(res));
  }
  out.value = any_exists ? Tristate::no : (all_absent ? Tristate::yes : Tristate::indeterminate);
  return out;
}

std::vector<PointClass> regular_points(const MatFunction& theta, const std::vector<cplx>& points) {
  std::vector<PointClass> out;
  for (cplx p : points) {
    if (!on_circle(p)) throw DomainError("regular_points classifies points of the unit circle");
    const cplx zeta = p / std::abs(p);
    bool regular = !theta.is_singular_atom(zeta, 1e-9);
    for (double eps : {0.0, 1e-4, 1e-3}) {
      for (int sgn : {-1, 1}) {
        if (!regular) break;
        const cplx q = zeta * unit(sgn * eps);
        if (theta.is_singular_atom(q, 1e-12)) continue;
        regular = unitarity_defect(theta.eval(q)) <= 1e-8;
      }
    }
    out.push_back(regular ? PointClass::regular : PointClass::spectrum);
  }
  return out;
}

namespace {

Mat polynomial_part(const MatFunction& theta, cplx z) {
  const int n = theta.dim();
  if (!theta.taylor_tail()) return eye(n);
  const auto& c = *theta.taylor_tail();
  Mat p = Mat::Zero(n, n);
  for (std::size_t k = c.size(); k-- > 0;) p = p * z + c[k];
  return p;
}

int polynomial_degree(const MatFunction& theta) {
  return theta.taylor_tail() ? std::max(0, static_cast<int>(theta.taylor_tail()->size()) - 1) : 0;
}

std::vector<cplx> dft_coefficients(const std::vector<cplx>& values) {
  const int L = static_cast<int>(values.size());
  std::vector<cplx> coeffs(static_cast<std::size_t>(L));
  for (int k = 0; k < L; ++k) {
    cplx s = 0.0;
    for (int j = 0; j < L; ++j) s += values[j] * unit(-2.0 * kPi * static_cast<double>((static_cast<long long>(j) * k) % L) / L);
    coeffs[k] = s / static_cast<double>(L);
  }
  double top = 0.0;
  for (cplx c : coeffs) top = std::max(top, std::abs(c));
  while (coeffs.size() > 1 && std::abs(coeffs.back()) <= 1e-12 * top) coeffs.pop_back();
  return coeffs;
}

// An inner matrix polynomial has det T(z) = c z^r; returns r.
int polynomial_det_degree(const MatFunction& theta) {
  if (!theta.taylor_tail()) return 0;
  const int L = theta.dim() * polynomial_degree(theta) + 1;
  std::vector<cplx> values(static_cast<std::size_t>(L));
  for (int j = 0; j < L; ++j) values[j] = polynomial_part(theta, unit(2.0 * kPi * j / L)).determinant();
  const auto c = dft_coefficients(values);
  return static_cast<int>(c.size()) - 1;
}

std::vector<cplx> determinant_polynomial(const MatFunction& theta, const Mat& U) {
  const int n = theta.dim();
  const auto& bp = theta.bp_factors();
  const int L = n * (static_cast<int>(bp.size()) + polynomial_degree(theta)) + 1;
  const Mat V = theta.const_unitary().value_or(eye(n));
  std::vector<cplx> values(static_cast<std::size_t>(L));
  for (int j = 0; j < L; ++j) {
    const cplx z = unit(2.0 * kPi * j / L);
    Mat N = eye(n);
    cplx q = 1.0;
    for (const auto& f : bp) {
      const cplx den = 1.0 - std::conj(f.zero) * z;
      N = N * (den * (eye(n) - f.projection) + (z - f.zero) * f.projection);
      q *= den;
    }
    values[j] = (N * polynomial_part(theta, z) * V - q * U).determinant();
  }
  return dft_coefficients(values);
}

std::pair<cplx, cplx> horner(const std::vector<cplx>& c, cplx z) {
  cplx p = 0.0, dp = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[k];
  }
  return {p, dp};
}

std::vector<cplx> polynomial_roots(const std::vector<cplx>& c) {
  const int D = static_cast<int>(c.size()) - 1;
  if (D < 1) return {};
  Mat comp = Mat::Zero(D, D);
  for (int i = 1; i < D; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < D; ++i) comp(i, D - 1) = -c[i] / c[D];
  const Eigen::ComplexEigenSolver<Mat> es(comp, false);
  std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + D);
  for (auto& z : roots) {
    for (int it = 0; it < 3; ++it) {
      const auto [p, dp] = horner(c, z);
      if (std::abs(dp) == 0.0) break;
      const cplx next = z - p / dp;
      if (std::abs(horner(c, next).first) >= std::abs(p)) break;
      z = next;
    }
  }
  return roots;
}

}  // namespace

ClarkSystem clark_eigensystem(std::shared_ptr<const MatFunction> theta_ptr, const Mat& U, const ClarkOptions& opts) {
  if (!theta_ptr) throw PreconditionError("clark_eigensystem needs a function");
  const MatFunction& theta = *theta_ptr;
  const int n = theta.dim();
  const bool rational = theta.singular_factors().empty() && (theta.is_rational_inner() || theta.is_inner());
  if (!rational || (theta.bp_factors().empty() && !theta.taylor_tail()))
    throw PreconditionError("clark_eigensystem needs a rational inner function (Blaschke-Potapov factors and an inner polynomial)");
  if (!theta.vanishes_at_zero()) throw PreconditionError("clark_eigensystem requires Theta(0) = 0");
  if (U.rows() != n || !is_unitary(U)) throw PreconditionError("U must be an n x n unitary");

  const int d = theta.det_degree() + polynomial_det_degree(theta);
  auto roots = polynomial_roots(determinant_polynomial(theta, U));
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    return std::abs(std::log(std::abs(a))) < std::abs(std::log(std::abs(b)));
  });
  if (static_cast<int>(roots.size()) < d) throw InternalError("determinant polynomial has fewer roots than expected");
  if (static_cast<int>(roots.size()) > d && std::abs(std::log(std::abs(roots[d]))) < 1e-4)
    throw InternalError("unexpected extra root of det(Theta - U) near the circle");
  roots.resize(static_cast<std::size_t>(d));
  auto turn = [](cplx z) {
    const double t = std::arg(z);
    return t < -1e-9 ? t + 2.0 * kPi : std::max(t, 0.0);
  };
  std::sort(roots.begin(), roots.end(), [&](cplx a, cplx b) { return turn(a) < turn(b); });

  std::vector<std::vector<cplx>> groups;
  for (cplx z : roots) {
    if (!groups.empty() && std::abs(z - groups.back().back()) <= opts.merge_tol) groups.back().push_back(z);
    else groups.push_back({z});
  }
  if (groups.size() > 1 && std::abs(groups.front().front() - groups.back().back()) <= opts.merge_tol) {
    groups.front().insert(groups.front().end(), groups.back().begin(), groups.back().end());
    groups.pop_back();
  }

  ClarkSystem sys;
  sys.theta = theta_ptr;
  sys.U = U;
  sys.dimension = d;
  for (const auto& group : groups) {
    cplx mean = std::accumulate(group.begin(), group.end(), cplx(0.0)) / static_cast<double>(group.size());
    if (std::abs(std::abs(mean) - 1.0) > opts.circle_tol)
      throw InternalError("root of det(Theta - U) off the unit circle by " + std::to_string(std::abs(std::abs(mean) - 1.0)));
    const cplx lambda = mean / std::abs(mean);
    const int k = static_cast<int>(group.size());
    const Mat T = theta.eval(lambda);
    const Mat M = T.adjoint() - U.adjoint();
    const Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(n - k) > opts.null_tol || (k < n && sv(n - k - 1) <= opts.null_tol))
      throw InternalError("eigenspace rank differs from root multiplicity");
    const Mat X = svd.matrixV().rightCols(k);
    const Mat delta = lambda * theta.derivative(lambda) * T.adjoint();
    const Mat H = hermitian_part(X.adjoint() * delta * X);
    const Eigen::SelfAdjointEigenSolver<Mat> es(H);
    ClarkCluster cl{lambda, k, Mat::Zero(n, n)};
    for (int j = 0; j < k; ++j) {
      const double h = es.eigenvalues()(j);
      if (!(h > 0.0)) throw InternalError("non-positive kernel norm at a Clark eigenvalue");
      Vec x = X * es.eigenvectors().col(j);
      x /= x.norm();
      sys.max_eigen_residual = std::max(sys.max_eigen_residual, (M * x).norm());
      cl.weight += x * x.adjoint() / h;
      sys.nodes.push_back({lambda, x, h, static_cast<int>(sys.clusters.size())});
    }
    cl.weight = hermitian_part(cl.weight);
    sys.clusters.push_back(std::move(cl));
  }

  for (std::size_t a = 0; a < sys.nodes.size(); ++a)
    for (std::size_t b = 0; b < sys.nodes.size(); ++b) {
      if (a == b) continue;
      const auto& na = sys.nodes[a];
      const auto& nb = sys.nodes[b];
      const Mat K = na.cluster == nb.cluster ? Mat(na.lambda * theta.derivative(na.lambda) * theta.eval(na.lambda).adjoint())
                                             : kernel_formula(theta, na.lambda, nb.lambda);
      const double g = std::abs(nb.direction.dot(K * na.direction)) / std::sqrt(na.kernel_norm2 * nb.kernel_norm2);
      sys.max_gram_offdiag = std::max(sys.max_gram_offdiag, g);
    }
  return sys;
}

Vec reconstruct(const ClarkSystem& system, const std::vector<cplx>& samples, cplx z) {
  if (samples.size() != system.nodes.size())
    throw PreconditionError("missing sample: expected " + std::to_string(system.nodes.size()) + ", got " +
                            std::to_string(samples.size()));
  if (std::abs(z) > 1.0 + kOnCircle) throw DomainError("reconstruction point outside the closed disc");
  const MatFunction& theta = *system.theta;
  Vec out = Vec::Zero(theta.dim());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const auto& node = system.nodes[j];
    const Mat K = std::abs(z - node.lambda) <= kOnCircle
                      ? Mat(node.lambda * theta.derivative(node.lambda) * theta.eval(node.lambda).adjoint())
                      : kernel_formula(theta, node.lambda, z);
    out += samples[j] * (K * node.direction) / node.kernel_norm2;
  }
  return out;
}

HalfPlaneSystem to_halfplane(const ClarkSystem& system) {
  HalfPlaneSystem hs;
  hs.theta = system.theta;
  for (const auto& node : system.nodes) {
    if (std::abs(node.lambda - 1.0) <= 1e-12) throw DomainError("node at infinity: lambda = 1 has no finite Cayley image");
    const double t = cayley_inverse(node.lambda).real();
    const Vec k = halfplane_kernel(*system.theta, t, node.direction, t);
    hs.nodes.push_back({t, node.lambda, node.direction, node.direction.dot(k).real()});
  }
  return hs;
}

std::vector<cplx> HalfPlaneSystem::transfer_samples(const std::vector<cplx>& disc_samples) const {
  if (disc_samples.size() != nodes.size()) throw PreconditionError("missing sample");
  std::vector<cplx> out;
  for (std::size_t j = 0; j < nodes.size(); ++j)
    out.push_back((1.0 - nodes[j].lambda) / std::sqrt(kPi) * disc_samples[j]);
  return out;
}

Vec reconstruct(const HalfPlaneSystem& system, const std::vector<cplx>& samples, cplx z) {
  if (samples.size() != system.nodes.size()) throw PreconditionError("missing sample");
  if (z.imag() < -1e-14) throw DomainError("half-plane reconstruction needs Im z >= 0");
  Vec out = Vec::Zero(system.theta->dim());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const auto& node = system.nodes[j];
    out += samples[j] * halfplane_kernel(*system.theta, node.t, node.direction, z) / node.kernel_norm2;
  }
  return out;
}

const char* to_string(Extremality e) {
  switch (e) {
    case Extremality::extreme: return "extreme";
    case Extremality::non_extreme: return "non_extreme";
    case Extremality::indeterminate: return "indeterminate";
  }
  return "unknown";
}

const char* to_string(CadStatus s) {
  switch (s) {
    case CadStatus::exists: return "exists";
    case CadStatus::absent: return "absent";
    case CadStatus::indeterminate: return "indeterminate";
  }
  return "unknown";
}

const char* to_string(Tristate t) {
  switch (t) {
    case Tristate::yes: return "true";
    case Tristate::no: return "false";
    case Tristate::indeterminate: return "indeterminate";
  }
  return "unknown";
}

const char* to_string(PointClass p) { return p == PointClass::regular ? "regular" : "spectrum"; }

}  // namespace clarklab
