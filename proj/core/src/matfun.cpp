#include "clarklab/matfun.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "clarklab/errors.hpp"
#include "clarklab/parallel.hpp"

namespace clarklab {

namespace {

constexpr double kBoundarySlack = 1e-13;

cplx blaschke_scalar(cplx w, cplx z) { return (z - w) / (1.0 - std::conj(w) * z); }

cplx blaschke_scalar_derivative(cplx w, cplx z) {
  const cplx d = 1.0 - std::conj(w) * z;
  return (1.0 - std::norm(w)) / (d * d);
}

template <class Pairs>
Mat product_rule(const Pairs& factors, int n) {
  // factors: (value, derivative) in multiplication order.
  const std::size_t m = factors.size();
  std::vector<Mat> prefix(m + 1, eye(n));
  for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] * factors[i].first;
  Mat suffix = eye(n);
  Mat out = Mat::Zero(n, n);
  for (std::size_t i = m; i-- > 0;) {
    out += prefix[i] * factors[i].second * suffix;
    suffix = factors[i].first * suffix;
  }
  return out;
}

}  // namespace

int BlaschkePotapovFactor::rank() const {
  return static_cast<int>(std::lround(projection.trace().real()));
}

Mat BlaschkePotapovFactor::value(cplx z) const {
  const auto n = projection.rows();
  return Mat::Identity(n, n) - projection + blaschke_scalar(zero, z) * projection;
}

Mat BlaschkePotapovFactor::derivative(cplx z) const {
  return blaschke_scalar_derivative(zero, z) * projection;
}

cplx SingularAtom::scalar(cplx z) const { return std::exp(-mass * (atom + z) / (atom - z)); }

Mat SingularAtom::value(cplx z, int dim) const {
  const cplx s = scalar(z);
  if (projection.size() == 0) return s * eye(dim);
  return eye(dim) - projection + s * projection;
}

Mat SingularAtom::derivative(cplx z, int dim) const {
  const cplx d = atom - z;
  const cplx ds = scalar(z) * (-mass * 2.0 * atom / (d * d));
  if (projection.size() == 0) return ds * eye(dim);
  return ds * projection;
}

MatFunction::MatFunction(int dim, std::vector<BlaschkePotapovFactor> bp,
                         std::optional<std::vector<Mat>> taylor_tail,
                         std::vector<SingularAtom> singular, std::optional<Mat> const_unitary,
                         MatFunctionFlags flags)
    : dim_(dim),
      bp_(std::move(bp)),
      taylor_(std::move(taylor_tail)),
      singular_(std::move(singular)),
      unitary_(std::move(const_unitary)),
      flags_(flags) {
  if (dim_ < 1) throw PreconditionError("dimension must be positive");
  for (std::size_t i = 0; i < bp_.size(); ++i) {
    const auto& f = bp_[i];
    const std::string where = "bp factor " + std::to_string(i);
    if (std::abs(f.zero) >= 1.0) throw PreconditionError(where + ": zero must lie in the open disc");
    if (f.projection.rows() != dim_ || f.projection.cols() != dim_)
      throw PreconditionError(where + ": projection has wrong shape");
    if (!is_projection(f.projection)) throw PreconditionError(where + ": not an orthogonal projection");
  }
  if (taylor_) {
    if (taylor_->empty()) throw PreconditionError("taylor tail must have at least one coefficient");
    for (const auto& c : *taylor_)
      if (c.rows() != dim_ || c.cols() != dim_)
        throw PreconditionError("taylor coefficient has wrong shape");
  }
  for (std::size_t i = 0; i < singular_.size(); ++i) {
    auto& s = singular_[i];
    const std::string where = "singular factor " + std::to_string(i);
    if (std::abs(std::abs(s.atom) - 1.0) > 1e-12) throw PreconditionError(where + ": atom must lie on the circle");
    s.atom /= std::abs(s.atom);
    if (!(s.mass > 0.0)) throw PreconditionError(where + ": mass must be positive");
    if (s.projection.size() != 0) {
      if (s.projection.rows() != dim_ || s.projection.cols() != dim_)
        throw PreconditionError(where + ": projection has wrong shape");
      if (!is_projection(s.projection)) throw PreconditionError(where + ": not an orthogonal projection");
    }
  }
  if (unitary_) {
    if (unitary_->rows() != dim_ || unitary_->cols() != dim_)
      throw PreconditionError("constant unitary has wrong shape");
    if (!is_unitary(*unitary_)) throw PreconditionError("constant post-factor is not unitary");
  }

  if (taylor_) {
    // Maximum principle: a polynomial is contractive on the disc iff on the circle.
    for (int j = 0; j < 128; ++j) {
      const cplx z = unit(2.0 * kPi * (j + 0.5) / 128.0);
      Mat t = Mat::Zero(dim_, dim_);
      for (auto it = taylor_->rbegin(); it != taylor_->rend(); ++it) t = t * z + *it;
      if (op_norm(t) > 1.0 + 1e-12) throw PreconditionError("taylor tail is not contractive on the circle");
    }
  }
  const double theta0 = op_norm(eval(0.0));
  if (!(theta0 < 1.0)) throw PreconditionError("function is not purely contractive: |Theta(0)| >= 1");
  if (flags_.vanishes_at_zero && theta0 > 1e-14)
    throw PreconditionError("flag vanishes_at_zero set but Theta(0) != 0");
  if (flags_.inner) {
    for (int j = 0; j < 61; ++j) {
      const cplx z = unit(2.0 * kPi * (j + 0.37) / 61.0);
      if (is_singular_atom(z, 1e-6)) continue;
      if (unitarity_defect(eval(z)) > 1e-8)
        throw PreconditionError("flag inner set but boundary values are not unitary");
    }
  }
}

MatFunction MatFunction::zero(int dim) {
  return MatFunction(dim, {}, std::vector<Mat>{Mat::Zero(dim, dim)}, {}, std::nullopt,
                     {.inner = false, .vanishes_at_zero = true});
}

MatFunction MatFunction::monomial(int dim, int k) {
  if (k < 1) throw PreconditionError("monomial degree must be at least 1");
  std::vector<BlaschkePotapovFactor> bp(static_cast<std::size_t>(k), {0.0, eye(dim)});
  return MatFunction(dim, std::move(bp), std::nullopt, {}, std::nullopt,
                     {.inner = true, .vanishes_at_zero = true});
}

MatFunction MatFunction::blaschke(const std::vector<cplx>& zeros) {
  if (zeros.empty()) throw PreconditionError("blaschke product needs at least one zero");
  std::vector<BlaschkePotapovFactor> bp;
  bool vanishes = false;
  for (cplx w : zeros) {
    bp.push_back({w, eye(1)});
    vanishes = vanishes || w == 0.0;
  }
  return MatFunction(1, std::move(bp), std::nullopt, {}, std::nullopt,
                     {.inner = true, .vanishes_at_zero = vanishes});
}

MatFunction MatFunction::scalar_singular(double mass, cplx atom) {
  return MatFunction(1, {}, std::nullopt, {{atom, mass, Mat()}}, std::nullopt,
                     {.inner = true, .vanishes_at_zero = false});
}

bool MatFunction::is_rational_inner() const { return taylor_ == std::nullopt && singular_.empty(); }

int MatFunction::det_degree() const {
  int d = 0;
  for (const auto& f : bp_) d += f.rank();
  return d;
}

bool MatFunction::is_singular_atom(cplx z, double tol) const {
  return std::any_of(singular_.begin(), singular_.end(),
                     [&](const SingularAtom& s) { return std::abs(z - s.atom) <= tol; });
}

void MatFunction::check_domain(cplx z) const {
  const double r = std::abs(z);
  if (r > 1.0 + kBoundarySlack) throw DomainError("evaluation outside the closed disc");
  if (r >= 1.0 - 1e-14 && is_singular_atom(z, 1e-14))
    throw DomainError("evaluation at a singular atom");
}

Mat MatFunction::eval(cplx z) const {
  check_domain(z);
  Mat out = eye(dim_);
  for (const auto& f : bp_) out = out * f.value(z);
  if (taylor_) {
    Mat t = Mat::Zero(dim_, dim_);
    for (auto it = taylor_->rbegin(); it != taylor_->rend(); ++it) t = t * z + *it;
    out = out * t;
  }
  for (const auto& s : singular_) out = out * s.value(z, dim_);
  if (unitary_) out = out * *unitary_;
  return out;
}

Mat MatFunction::derivative(cplx z) const {
  check_domain(z);
  std::vector<std::pair<Mat, Mat>> factors;
  for (const auto& f : bp_) factors.emplace_back(f.value(z), f.derivative(z));
  if (taylor_) {
    Mat t = Mat::Zero(dim_, dim_);
    Mat dt = Mat::Zero(dim_, dim_);
    const auto& c = *taylor_;
    for (std::size_t k = c.size(); k-- > 0;) {
      dt = dt * z + t;
      t = t * z + c[k];
    }
    factors.emplace_back(t, dt);
  }
  for (const auto& s : singular_) factors.emplace_back(s.value(z, dim_), s.derivative(z, dim_));
  Mat d = product_rule(factors, dim_);
  if (unitary_) d = d * *unitary_;
  return d;
}

MatFunction scaled(const MatFunction& theta, double factor) {
  if (!(std::abs(factor) <= 1.0))
    throw PreconditionError("scaling factor must have modulus at most 1");
  std::vector<Mat> tail = theta.taylor_tail().value_or(std::vector<Mat>{eye(theta.dim())});
  for (auto& c : tail) c *= factor;
  MatFunctionFlags flags = theta.flags();
  flags.inner = flags.inner && std::abs(factor) == 1.0;
  return MatFunction(theta.dim(), theta.bp_factors(), std::move(tail), theta.singular_factors(),
                     theta.const_unitary(), flags);
}

Mat herglotz(const MatFunction& theta, const Mat& A, cplx z) {
  if (!is_contraction(A)) throw PreconditionError("A must be a contraction");
  if (A.rows() != theta.dim()) throw PreconditionError("A has wrong dimension");
  if (std::abs(z) >= 1.0) throw DomainError("herglotz transform needs |z| < 1");
  const int n = theta.dim();
  const Mat x = theta.eval(z) * A.adjoint();
  const Eigen::PartialPivLU<Mat> lu(eye(n) - x);
  if (!(lu.rcond() > 1e-14)) throw InternalError("1 - Theta(z) A* is numerically singular");
  return lu.solve(eye(n) + x);
}

Mat herglotz_imag(const Mat& b) { return (b - b.adjoint()) / (2.0 * kI); }

cplx cayley(cplx z_up) {
  if (std::abs(z_up + kI) < 1e-300) throw DomainError("cayley transform undefined at -i");
  return (z_up - kI) / (z_up + kI);
}

cplx cayley_inverse(cplx w) {
  if (std::abs(1.0 - w) < 1e-14) throw DomainError("node at infinity: mu^{-1}(1) is not finite");
  return kI * (1.0 + w) / (1.0 - w);
}

Mat cayley_compose(const MatFunction& theta, cplx z_up) {
  if (z_up.imag() < -1e-14) throw DomainError("point below the real axis");
  return theta.eval(cayley(z_up));
}

Mat TaylorSeries::partial_sum(cplx z) const {
  Mat out = Mat::Zero(coefficients.front().rows(), coefficients.front().cols());
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) out = out * z + *it;
  return out;
}

namespace {

std::vector<Mat> contour_coefficients(const MatFunction& theta, int K, int nodes, double r) {
  const int n = theta.dim();
  std::vector<cplx> twiddle(static_cast<std::size_t>(nodes));
  for (int j = 0; j < nodes; ++j) twiddle[j] = unit(-2.0 * kPi * j / nodes);
  const std::vector<Mat> samples = parallel_map(static_cast<std::size_t>(nodes), [&](std::size_t j) {
    return theta.eval(r * std::conj(twiddle[j]));
  });
  std::vector<Mat> c(static_cast<std::size_t>(K) + 1, Mat::Zero(n, n));
  for (int k = 0; k <= K; ++k) {
    Mat acc = Mat::Zero(n, n);
    long long idx = 0;
    for (int j = 0; j < nodes; ++j) {
      acc += twiddle[static_cast<std::size_t>(idx)] * samples[j];
      idx += k;
      if (idx >= nodes) idx -= nodes;
    }
    c[k] = acc / (nodes * std::pow(r, k));
  }
  return c;
}

}  // namespace

TaylorSeries taylor(const MatFunction& theta, int K, const TaylorOptions& opts) {
  if (K < 0) throw PreconditionError("taylor order must be non-negative");
  const int n = theta.dim();
  TaylorSeries out;

  if (theta.bp_factors().empty() && theta.singular_factors().empty()) {
    // Pure polynomial: read off the coefficients.
    const auto& tail = *theta.taylor_tail();
    const Mat v = theta.const_unitary().value_or(eye(n));
    for (int k = 0; k <= K; ++k)
      out.coefficients.push_back(k < static_cast<int>(tail.size()) ? Mat(tail[k] * v) : Mat(Mat::Zero(n, n)));
    out.radius = 1.0;
    return out;
  }

  int nodes = opts.nodes;
  while (nodes < 4 * (K + 1)) nodes *= 2;
  double r1 = opts.r_inner;
  double r2 = opts.r_outer;
  double disc = INFINITY;
  for (int attempt = 0; attempt <= opts.max_refinements; ++attempt) {
    auto c1 = contour_coefficients(theta, K, nodes, r1);
    auto c2 = contour_coefficients(theta, K, nodes, r2);
    disc = 0.0;
    for (int k = 0; k <= K; ++k) disc = std::max(disc, max_abs(c1[k] - c2[k]));
    if (disc <= opts.tolerance) {
      if (theta.vanishes_at_zero()) c2[0].setZero();
      out.coefficients = std::move(c2);
      out.radius = r2;
      out.discrepancy = disc;
      return out;
    }
    r1 = 0.5 * (1.0 + r1);
    r2 = 0.5 * (1.0 + r2);
  }
  throw NumericalError("taylor coefficients did not converge: radii disagree by " + std::to_string(disc));
}

}  // namespace clarklab
