#include "clarklab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace clarklab {

Mat eye(int n) { return Mat::Identity(n, n); }

double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

double max_abs(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double unitarity_defect(const Mat& u) {
  if (u.rows() != u.cols()) return INFINITY;
  return op_norm(u.adjoint() * u - eye(static_cast<int>(u.rows())));
}

bool is_unitary(const Mat& u, double tol) { return unitarity_defect(u) <= tol; }

bool is_projection(const Mat& p, double tol) {
  if (p.rows() != p.cols()) return false;
  return max_abs(p - p.adjoint()) <= tol && max_abs(p * p - p) <= tol;
}

bool is_contraction(const Mat& a, double tol) {
  return a.rows() == a.cols() && op_norm(a) <= 1.0 + tol;
}

Mat hermitian_part(const Mat& m) { return 0.5 * (m + m.adjoint()); }

double min_hermitian_eigenvalue(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

namespace {

template <class T, class Zero>
T tree_sum(std::span<const T> xs, Zero zero) {
  if (xs.empty()) return zero();
  if (xs.size() == 1) return xs[0];
  const std::size_t half = xs.size() / 2;
  T left = tree_sum(xs.first(half), zero);
  left += tree_sum(xs.subspan(half), zero);
  return left;
}

}  // namespace

Mat pairwise_sum(std::span<const Mat> terms) {
  return tree_sum(terms, [] { return Mat(); });
}

cplx pairwise_sum(std::span<const cplx> terms) {
  return tree_sum(terms, [] { return cplx{}; });
}

double pairwise_sum(std::span<const double> terms) {
  return tree_sum(terms, [] { return 0.0; });
}

Mat hermitian_pinv(const Mat& h, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
  const auto& lam = es.eigenvalues();
  const Mat& v = es.eigenvectors();
  Mat out = Mat::Zero(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) > cutoff) out += (1.0 / lam(i)) * v.col(i) * v.col(i).adjoint();
  }
  return out;
}

}  // namespace clarklab
