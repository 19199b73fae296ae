#include "clarklab/moments.hpp"

#include <algorithm>
#include <cmath>

#include "clarklab/errors.hpp"
#include "clarklab/parallel.hpp"

namespace clarklab {

namespace {

void require_contraction(const Mat& A, int n) {
  if (A.rows() != n || A.cols() != n) throw PreconditionError("contraction has wrong dimension");
  if (!is_contraction(A)) throw PreconditionError("A must be a contraction");
}

void require_vanishing(const MatFunction& theta) {
  if (!theta.vanishes_at_zero()) throw PreconditionError("Theta(0) = 0 required (vanishes_at_zero flag)");
}

constexpr std::size_t kQuadratureChunks = 64;

}  // namespace

std::vector<Mat> elliott_moments(const MatFunction& theta, const Mat& A, int K, const QuadratureOptions& opts) {
  require_vanishing(theta);
  const int n = theta.dim();
  require_contraction(A, n);
  if (K < 0) throw PreconditionError("moment order must be non-negative");
  if (opts.nodes < 2 * (K + 1)) throw PreconditionError("too few quadrature nodes for the requested order");
  const int M = opts.nodes;
  const double rho = opts.radius;
  const Mat As = A.adjoint();

  // Fixed chunking keeps the summation order independent of the thread count.
  const std::size_t chunks = std::min<std::size_t>(kQuadratureChunks, static_cast<std::size_t>(M));
  auto partial = parallel_map(chunks, [&](std::size_t c) {
    std::vector<Mat> acc(static_cast<std::size_t>(K) + 1, Mat::Zero(n, n));
    const int lo = static_cast<int>(c * M / chunks);
    const int hi = static_cast<int>((c + 1) * M / chunks);
    for (int j = lo; j < hi; ++j) {
      const double phi = 2.0 * kPi * (j + 0.5) / M;
      const cplx z = rho * unit(phi);
      const Mat x = theta.eval(z) * As;
      Mat power = eye(n);
      Mat sum = Mat::Zero(n, n);
      const cplx step = std::conj(unit(phi)) / rho;
      cplx weight = 1.0;
      for (int k = 1; k <= K; ++k) {
        power = power * x;
        sum += power;
        weight *= step;
        acc[k] += weight * sum;
      }
    }
    return acc;
  });

  std::vector<Mat> l(static_cast<std::size_t>(K) + 1);
  l[0] = eye(n);
  std::vector<Mat> pieces(chunks);
  for (int k = 1; k <= K; ++k) {
    for (std::size_t c = 0; c < chunks; ++c) pieces[c] = partial[c][k];
    l[k] = pairwise_sum(pieces) / static_cast<double>(M);
  }
  return l;
}

Mat elliott_moment(const MatFunction& theta, const Mat& A, int k, const QuadratureOptions& opts) {
  require_vanishing(theta);
  require_contraction(A, theta.dim());
  if (k == 0) return eye(theta.dim());
  const int kk = std::abs(k);
  const auto l = elliott_moments(theta, A, kk, opts);
  return k < 0 ? l[kk] : Mat(l[kk].adjoint());
}

std::vector<Mat> recurrence_moments(const TaylorSeries& c, const Mat& A, int K) {
  if (c.order() < K) throw PreconditionError("not enough Taylor coefficients for the requested order");
  const int n = static_cast<int>(c[0].rows());
  require_contraction(A, n);
  if (max_abs(c[0]) > 1e-14) throw PreconditionError("Theta(0) = 0 required for the moment recurrence");
  const Mat As = A.adjoint();
  std::vector<Mat> l(static_cast<std::size_t>(K) + 1);
  l[0] = eye(n);
  for (int k = 1; k <= K; ++k) {
    Mat acc = c[k] * As;
    for (int j = 1; j < k; ++j) acc += c[j] * As * l[k - j];
    l[k] = acc;
  }
  double scale = 1.0;
  double gap = 0.0;
  for (int k = 1; k <= K; ++k) {
    Mat alt = c[k] * As;
    for (int j = 1; j < k; ++j) alt += l[j] * c[k - j] * As;
    gap = std::max(gap, max_abs(alt - l[k]));
    scale = std::max(scale, max_abs(l[k]));
  }
  if (gap > 1e-12 * scale)
    throw InternalError("moment recurrences disagree by " + std::to_string(gap));
  return l;
}

std::vector<Mat> recurrence_moments(const MatFunction& theta, const Mat& A, int K, const TaylorOptions& topts) {
  require_vanishing(theta);
  return recurrence_moments(taylor(theta, K, topts), A, K);
}

double mixed_recurrence_residual(const TaylorSeries& c, const Mat& A, int K) {
  const int n = static_cast<int>(c[0].rows());
  const auto l1 = recurrence_moments(c, eye(n), K);
  const auto la = recurrence_moments(c, A, K);
  const Mat As = A.adjoint();
  const Mat D = As - eye(n);
  double residual = 0.0;
  for (int k = 1; k <= K; ++k) {
    Mat rhs = l1[k] * As;
    for (int j = 1; j < k; ++j) rhs += l1[j] * D * la[k - j];
    residual = std::max(residual, op_norm(la[k] - rhs));
  }
  return residual;
}

double crosscheck_mixed_recurrence(const MatFunction& theta, const Mat& A, int K, const TaylorOptions& topts) {
  require_vanishing(theta);
  require_contraction(A, theta.dim());
  return mixed_recurrence_residual(taylor(theta, K, topts), A, K);
}

std::vector<Mat> theta_coeffs_from_moments(const std::vector<Mat>& l) {
  if (l.empty()) throw PreconditionError("empty moment list");
  const auto n = l[0].rows();
  std::vector<Mat> c(l.size(), Mat::Zero(n, n));
  for (std::size_t k = 1; k < l.size(); ++k) {
    Mat acc = l[k];
    for (std::size_t i = 1; i < k; ++i) acc -= l[i] * c[k - i];
    c[k] = acc;
  }
  return c;
}

MomentTable::MomentTable(const MatFunction& theta, const Mat& A, int order, const TaylorOptions& topts)
    : MomentTable(taylor(theta, order, topts), A, order) {}

MomentTable::MomentTable(const TaylorSeries& c, const Mat& A, int order) {
  if (c.order() < order) throw PreconditionError("not enough Taylor coefficients for the moment table");
  const int n = static_cast<int>(c[0].rows());
  require_contraction(A, n);
  const Mat As = A.adjoint();
  const Eigen::PartialPivLU<Mat> lu(eye(n) - c[0] * As);
  const Mat s0 = lu.solve(eye(n));
  std::vector<Mat> s(static_cast<std::size_t>(order) + 1);
  s[0] = s0;
  for (int k = 1; k <= order; ++k) {
    Mat acc = Mat::Zero(n, n);
    for (int j = 1; j <= k; ++j) acc += c[j] * As * s[k - j];
    s[k] = s0 * acc;
  }
  m0_ = hermitian_part(2.0 * s0 - eye(n));
  l_ = std::move(s);
  l_[0] = m0_;
}

Mat MomentTable::m(int r) const {
  if (std::abs(r) > order()) throw PreconditionError("moment index beyond table order");
  if (r == 0) return m0_;
  if (r < 0) return l_[static_cast<std::size_t>(-r)];
  return l_[static_cast<std::size_t>(r)].adjoint();
}

Mat MatMeasure::atom_mass() const {
  Mat out = Mat::Zero(dim, dim);
  for (const auto& a : atoms) out += a.weight;
  return out;
}

Mat MatMeasure::density_mass() const {
  Mat out = Mat::Zero(dim, dim);
  if (density_grid == 0) return out;
  for (const auto& s : density) out += s.value;
  return out / static_cast<double>(density_grid);
}

void MatMeasure::set_moments(const MomentTable& table, int K) {
  moment_order = K;
  moments.clear();
  for (int k = -K; k <= K; ++k) moments.push_back(table.m(k));
}

Mat DensityResult::integral() const {
  if (samples.empty()) return Mat();
  Mat out = Mat::Zero(samples[0].value.rows(), samples[0].value.cols());
  for (const auto& s : samples) out += s.value;
  return out / static_cast<double>(grid_size);
}

DensityResult ac_density(const MatFunction& theta, const Mat& U, int grid_size) {
  const int n = theta.dim();
  if (grid_size < 1) throw PreconditionError("grid size must be positive");
  if (U.rows() != n || !is_unitary(U)) throw PreconditionError("U must be an n x n unitary");
  const Mat Us = U.adjoint();
  struct Point {
    bool ok = false;
    Mat w;
  };
  const auto points = parallel_map(static_cast<std::size_t>(grid_size), [&](std::size_t m) {
    const cplx z = unit(2.0 * kPi * (m + 0.5) / grid_size);
    Point p;
    if (theta.is_singular_atom(z, 1e-9)) return p;
    const Mat t = theta.eval(z);
    const Eigen::PartialPivLU<Mat> lu(eye(n) - t * Us);
    if (!(lu.rcond() > 1e-8)) return p;
    const Mat left = lu.inverse();
    Mat w = left * (eye(n) - t * t.adjoint()) * left.adjoint();
    p.w = hermitian_part(w);
    p.ok = true;
    return p;
  });
  DensityResult out;
  out.grid_size = grid_size;
  for (int m = 0; m < grid_size; ++m) {
    if (points[m].ok) out.samples.push_back({2.0 * kPi * (m + 0.5) / grid_size, points[m].w});
    else ++out.skipped;
  }
  out.warning = out.skipped > 0.05 * grid_size;
  return out;
}

PointMassResult point_mass(const MatFunction& theta, const Mat& U, cplx lambda, const LadderOptions& opts) {
  const int n = theta.dim();
  if (U.rows() != n || !is_unitary(U)) throw PreconditionError("U must be an n x n unitary");
  if (std::abs(std::abs(lambda) - 1.0) > 1e-12) throw DomainError("lambda must lie on the unit circle");
  lambda /= std::abs(lambda);

  std::vector<Mat> v;
  PointMassResult out;
  for (int m = opts.first_rung; m <= opts.last_rung; ++m) {
    const double r = 1.0 - std::ldexp(1.0, -m);
    const cplx z = r * lambda;
    const Eigen::PartialPivLU<Mat> lu(U - theta.eval(z));
    Mat f = (1.0 - z * std::conj(lambda)) * U * lu.inverse();
    out.ladder.push_back(op_norm(f));
    v.push_back(std::move(f));
  }
  // First-order error in (1 - r): one Richardson step.
  std::vector<Mat> rich;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) rich.push_back(2.0 * v[i + 1] - v[i]);

  const std::size_t need = static_cast<std::size_t>(opts.stable_rungs);
  const double last_norm = out.ladder.back();
  bool decaying = last_norm <= 1e-12;
  if (!decaying && out.ladder.size() > need) {
    decaying = true;
    for (std::size_t i = out.ladder.size() - need; i < out.ladder.size(); ++i)
      decaying = decaying && out.ladder[i] <= 0.75 * out.ladder[i - 1];
  }
  if (decaying) {
    out.status = PointMassStatus::zero;
    out.weight = Mat::Zero(n, n);
    return out;
  }
  bool stable = rich.size() > need;
  for (std::size_t i = rich.size() - need; stable && i < rich.size(); ++i) {
    const double scale = std::max(op_norm(rich[i]), 1e-300);
    stable = op_norm(rich[i] - rich[i - 1]) <= opts.stable_relative * scale;
  }
  if (stable) {
    out.status = PointMassStatus::atom;
    out.weight = hermitian_part(rich.back());
  }
  return out;
}

Mat total_mass(const MatFunction& theta, const Mat& U) {
  if (U.rows() != theta.dim() || !is_unitary(U)) throw PreconditionError("U must be an n x n unitary");
  return hermitian_part(herglotz(theta, U, 0.0));
}

const char* to_string(PointMassStatus s) {
  switch (s) {
    case PointMassStatus::atom: return "atom";
    case PointMassStatus::zero: return "zero";
    case PointMassStatus::indeterminate: return "indeterminate";
  }
  return "unknown";
}

}  // namespace clarklab
