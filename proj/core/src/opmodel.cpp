#include "clarklab/opmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "clarklab/errors.hpp"

namespace clarklab {

FrameSpace build_frame(const MatFunction& theta, int K, const FrameOptions& opts) {
  if (K < 1) throw PreconditionError("frame band must be at least 1");
  if (!theta.vanishes_at_zero()) throw PreconditionError("frame requires Theta(0) = 0 (vanishes_at_zero flag)");
  const int n = theta.dim();
  const int top = 2 * K + 1;

  auto d = std::make_shared<FrameSpace::Data>();
  d->n = n;
  d->K = K;
  d->taylor = taylor(theta, top, opts.taylor);
  const auto rec = recurrence_moments(d->taylor, eye(n), top);
  QuadratureOptions q = opts.quadrature;
  q.nodes = std::max(q.nodes, 4 * (top + 1));
  const auto ell = elliott_moments(theta, eye(n), top, q);
  for (int j = 1; j <= top; ++j) d->oracle_gap = std::max(d->oracle_gap, max_abs(rec[j] - ell[j]));
  if (d->oracle_gap > opts.oracle_tolerance)
    throw NumericalError("frame build: quadrature and recurrence moments disagree by " +
                         std::to_string(d->oracle_gap));

  d->moments.resize(static_cast<std::size_t>(2 * top + 1));
  for (int r = -top; r <= top; ++r)
    d->moments[r + top] = r == 0 ? eye(n) : (r < 0 ? rec[-r] : Mat(rec[r].adjoint()));

  const int size = (2 * K + 1) * n;
  d->gram.resize(size, size);
  d->shift_gram.resize(size, size);
  for (int kp = -K; kp <= K; ++kp) {
    for (int k = -K; k <= K; ++k) {
      d->gram.block((kp + K) * n, (k + K) * n, n, n) = d->moments[k - kp + top];
      d->shift_gram.block((kp + K) * n, (k + K) * n, n, n) = d->moments[k + 1 - kp + top];
    }
  }
  d->gram = hermitian_part(d->gram);

  Eigen::SelfAdjointEigenSolver<Mat> es(d->gram);
  d->eigenvalues = es.eigenvalues();
  d->eigenvectors = es.eigenvectors();
  const double lmax = std::max(d->eigenvalues(size - 1), 0.0);
  d->tau = opts.tau_relative * lmax;
  d->rank = 0;
  for (int i = 0; i < size; ++i)
    if (d->eigenvalues(i) > d->tau) ++d->rank;
  const int r = d->rank;
  d->basis = d->eigenvectors.rightCols(r);
  for (int a = 0; a < r; ++a) d->basis.col(a) /= std::sqrt(d->eigenvalues(size - r + a));
  d->pinv = d->basis * d->basis.adjoint();
  return FrameSpace(std::move(d));
}

Mat FrameSpace::block(int k) const {
  if (std::abs(k) > band()) throw PreconditionError("exponent outside the frame band");
  Mat e = Mat::Zero(size(), dim());
  for (int i = 0; i < dim(); ++i) e(index(k, i), i) = 1.0;
  return e;
}

Mat FrameSpace::basis_coords(int k) const { return orthonormal_basis().adjoint() * gram() * block(k); }

Mat FrameSpace::moment(int r) const {
  const int top = 2 * band() + 1;
  if (std::abs(r) > top) throw PreconditionError("moment index outside the frame table");
  return d_->moments[static_cast<std::size_t>(r + top)];
}

namespace {

void require_parameter(const FrameSpace& frame, const Mat& A) {
  if (A.rows() != frame.dim() || A.cols() != frame.dim()) throw PreconditionError("parameter has wrong dimension");
  if (!is_contraction(A)) throw PreconditionError("parameter must be a contraction");
}

}  // namespace

FrameOperator clark_operator(const FrameSpace& frame, const Mat& A) {
  require_parameter(frame, A);
  const int n = frame.dim();
  const int K = frame.band();
  const int size = frame.size();
  Mat shift = Mat::Zero(size, size);
  for (int k = -K; k < K; ++k)
    for (int i = 0; i < n; ++i) shift(frame.index(k + 1, i), frame.index(k, i)) = 1.0;
  const Mat e0 = frame.block(0);
  const Mat D = A - eye(n);

  FrameOperator op{frame, A, Mat(), Mat(), K - 1};
  op.coefficients = shift + e0 * D * (e0.transpose() * frame.gram() * shift);

  const Mat& Q = frame.orthonormal_basis();
  const Mat zc = Q.adjoint() * frame.shift_gram() * Q;
  const Mat b = frame.basis_coords(0);
  op.compressed = zc + b * D * b.adjoint() * zc;
  return op;
}

Mat FrameOperator::gram_adjoint() const {
  return frame.pinv() * coefficients.adjoint() * frame.gram();
}

Mat FrameOperator::retained_projector() const { return frame.pinv() * frame.gram(); }

Mat compressed_moment(const FrameSpace& frame, const Mat& A, int k) {
  require_parameter(frame, A);
  if (k < 0) throw PreconditionError("moment index must be non-negative");
  if (2 * k > frame.band()) throw PreconditionError("moment index beyond the valid band (k <= K/2)");
  if (frame.rank() < frame.dim()) throw PreconditionError("frame rank below n");
  const int n = frame.dim();
  const int K = frame.band();
  const Mat& G = frame.gram();
  const Mat row0 = G.middleRows(frame.index(0, 0), n);  // E_0^T G
  const Mat Dstar = A.adjoint() - eye(n);

  Mat X = frame.block(0);
  for (int step = 0; step < k; ++step) {
    Mat Y = X;
    Y.middleRows(frame.index(0, 0), n) += Dstar * (row0 * X);
    // multiplication by conj(zeta): exponent k -> k - 1
    Mat Z = Mat::Zero(X.rows(), X.cols());
    Z.topRows((2 * K) * n) = Y.bottomRows((2 * K) * n);
    if (Y.topRows(n).cwiseAbs().maxCoeff() != 0.0) throw InternalError("coefficient support left the band");
    X = std::move(Z);
  }
  return row0 * X;
}

bool Arc::contains(double angle) const {
  const double span = end - start;
  if (span >= 2.0 * kPi) return true;
  double t = std::fmod(angle - start, 2.0 * kPi);
  if (t < 0) t += 2.0 * kPi;
  return t < span;
}

SpectralMeasure spectral_measure(const FrameSpace& frame, const Mat& U, const std::vector<Arc>& arcs,
                                 double cluster_tol, double max_deviation) {
  if (U.rows() != frame.dim() || !is_unitary(U)) throw PreconditionError("U must be an n x n unitary");
  const FrameOperator op = clark_operator(frame, U);
  const Mat& C = op.compressed;
  const int r = static_cast<int>(C.rows());
  SpectralMeasure out;
  out.unitarity_deviation = unitarity_defect(C);
  if (out.unitarity_deviation > max_deviation)
    throw PreconditionError("compressed Z(U) deviates from unitarity by " + std::to_string(out.unitarity_deviation) +
                            "; increase the band");

  Eigen::ComplexSchur<Mat> schur(C);
  const Mat& T = schur.matrixT();
  const Mat& W = schur.matrixU();
  std::vector<int> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return std::arg(T(a, a)) < std::arg(T(b, b)); });

  // Single-linkage clustering along the sorted angles, wrapping around -pi.
  std::vector<std::vector<int>> clusters;
  for (int idx : order) {
    if (!clusters.empty() && std::abs(T(idx, idx) - T(clusters.back().back(), clusters.back().back())) <= cluster_tol)
      clusters.back().push_back(idx);
    else
      clusters.push_back({idx});
  }
  if (clusters.size() > 1 &&
      std::abs(T(clusters.front().front(), clusters.front().front()) - T(clusters.back().back(), clusters.back().back())) <=
          cluster_tol) {
    clusters.front().insert(clusters.front().end(), clusters.back().begin(), clusters.back().end());
    clusters.pop_back();
  }

  const Mat b = frame.basis_coords(0);
  out.measure.dim = frame.dim();
  for (const auto& cl : clusters) {
    cplx point = 0.0;
    Mat Wc(r, static_cast<Eigen::Index>(cl.size()));
    for (std::size_t j = 0; j < cl.size(); ++j) {
      point += T(cl[j], cl[j]);
      Wc.col(static_cast<Eigen::Index>(j)) = W.col(cl[j]);
    }
    point /= std::abs(point);
    const Mat proj_b = Wc.adjoint() * b;
    out.measure.atoms.push_back({point, hermitian_part(proj_b.adjoint() * proj_b)});
    out.cluster_sizes.push_back(static_cast<int>(cl.size()));
  }
  for (const auto& arc : arcs) {
    Mat w = Mat::Zero(frame.dim(), frame.dim());
    for (const auto& a : out.measure.atoms)
      if (arc.contains(std::arg(a.point))) w += a.weight;
    out.arc_weights.push_back(std::move(w));
  }
  return out;
}

}  // namespace clarklab
