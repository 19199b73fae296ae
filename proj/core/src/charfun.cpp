#include "clarklab/charfun.hpp"

#include <algorithm>

#include "clarklab/errors.hpp"
#include "clarklab/moments.hpp"

namespace clarklab {

namespace {

void require_band(const FrameSpace& frame, int K) {
  if (K < 1) throw PreconditionError("coefficient count must be positive");
  if (2 * K > frame.band()) throw PreconditionError("frame band too small: need band >= 2K");
}

// Iterates X <- Z^{-1}(1 + P(D - 1)) X, starting from Z^{-1} e_i, and
// reads off P X at every step. D = 0 gives the Nagy-Foias coefficients.
CoeffSeries ladder(const FrameSpace& frame, const Mat& Dstar, int K) {
  const int n = frame.dim();
  const int band = frame.band();
  const Mat row0 = frame.gram().middleRows(frame.index(0, 0), n);
  auto down = [&](const Mat& Y) {
    if (Y.topRows(n).cwiseAbs().maxCoeff() != 0.0) throw InternalError("coefficient support left the band");
    Mat Z = Mat::Zero(Y.rows(), Y.cols());
    Z.topRows(2 * band * n) = Y.bottomRows(2 * band * n);
    return Z;
  };
  CoeffSeries out{{Mat::Zero(n, n)}, K, Provenance::frame};
  Mat X = frame.block(-1);
  for (int k = 1; k <= K; ++k) {
    out.coeffs.push_back(row0 * X);
    Mat Y = X;
    Y.middleRows(frame.index(0, 0), n) += (Dstar - eye(n)) * (row0 * X);
    X = down(Y);
  }
  return out;
}

}  // namespace

double max_difference(const CoeffSeries& a, const CoeffSeries& b) {
  const int top = std::min(a.band, b.band);
  double worst = 0.0;
  for (int k = 1; k <= top; ++k) worst = std::max(worst, op_norm(a[k] - b[k]));
  return worst;
}

CoeffSeries nagy_foias_coeffs(const FrameSpace& frame, int K) {
  require_band(frame, K);
  return ladder(frame, Mat::Zero(frame.dim(), frame.dim()), K);
}

CoeffSeries gamma_coeffs(const FrameSpace& frame, const Mat& A, int K) {
  require_band(frame, K);
  if (A.rows() != frame.dim() || A.cols() != frame.dim()) throw PreconditionError("contraction has wrong dimension");
  if (!is_contraction(A)) throw PreconditionError("A must be a contraction");
  return ladder(frame, A.adjoint(), K);
}

CoeffSeries taylor_coeffs(const TaylorSeries& c, int K) {
  if (K > c.order()) throw PreconditionError("Taylor series shorter than the requested band");
  return {std::vector<Mat>(c.coefficients.begin(), c.coefficients.begin() + K + 1), K, Provenance::series};
}

CoeffSeries gamma_series_coeffs(const TaylorSeries& c, const Mat& A, int K) {
  if (K > c.order()) throw PreconditionError("Taylor series shorter than the requested band");
  const int n = static_cast<int>(c[0].rows());
  if (A.rows() != n || A.cols() != n) throw PreconditionError("contraction has wrong dimension");
  if (op_norm(c[0]) > 1e-12) throw PreconditionError("Gamma series expects Theta(0) = 0");
  const Mat As = A.adjoint();
  std::vector<Mat> s{eye(n)};
  CoeffSeries b{{Mat::Zero(n, n)}, K, Provenance::series};
  for (int k = 1; k <= K; ++k) {
    Mat sk = Mat::Zero(n, n), bk = Mat::Zero(n, n);
    for (int j = 1; j <= k; ++j) {
      sk += As * c[j] * s[static_cast<std::size_t>(k - j)];
      bk += c[j] * s[static_cast<std::size_t>(k - j)];
    }
    s.push_back(std::move(sk));
    b.coeffs.push_back(std::move(bk));
  }
  return b;
}

double gamma_recurrence_residual(const TaylorSeries& c, const Mat& A, int K) {
  const int n = static_cast<int>(c[0].rows());
  const auto b = gamma_series_coeffs(c, A, K);
  const auto l = recurrence_moments(c, eye(n), K);
  const Mat D = A.adjoint() - eye(n);
  double worst = 0.0;
  for (int m = 1; m <= K; ++m) {
    Mat r = b[m] - l[static_cast<std::size_t>(m)];
    for (int j = 1; j < m; ++j) r -= l[static_cast<std::size_t>(j)] * D * b[m - j];
    worst = std::max(worst, op_norm(r));
  }
  return worst;
}

Mat lifschitz_charfun(const FrameSpace& frame, const Mat& U_ref, cplx z) {
  if (std::abs(z) >= 1.0) throw DomainError("characteristic function needs |z| < 1");
  if (!is_unitary(U_ref)) throw PreconditionError("U_ref must be unitary");
  const FrameOperator op = clark_operator(frame, U_ref);
  const Mat& C = op.compressed;
  const int r = static_cast<int>(C.rows());
  const Eigen::ComplexEigenSolver<Mat> es(C, false);
  for (int j = 0; j < r; ++j)
    if (std::abs(es.eigenvalues()(j) - z) <= 1e-6) throw NumericalError("z is within 1e-6 of an eigenvalue of Z(U_ref)");
  const Mat beta = frame.basis_coords(-1);
  const Eigen::PartialPivLU<Mat> lu(C - z * eye(r));
  const Mat Rb = lu.solve(beta);
  const Mat RCb = lu.solve(C * beta);
  // Entries are laid out as beta* R beta (row = test vector); with this
  // layout and the left factor U_ref the result equals Theta itself.
  const Mat A = z * (beta.adjoint() * Rb);
  const Mat B = beta.adjoint() * RCb;
  return U_ref * A * B.inverse();
}

const char* to_string(Provenance p) { return p == Provenance::frame ? "frame" : "series"; }

}  // namespace clarklab
