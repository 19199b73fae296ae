#pragma once

#include <memory>
#include <vector>

#include "clarklab/linalg.hpp"
#include "clarklab/matfun.hpp"
#include "clarklab/moments.hpp"

namespace clarklab {

struct FrameOptions {
  double tau_relative = 1e-8;
  double oracle_tolerance = 1e-6;
  TaylorOptions taylor;
  QuadratureOptions quadrature;
};

// Truncation of L^2_Theta to the span of zeta^k e_i, |k| <= K. Coordinates
// are ordered (k, i) -> (k + K) n + i; (f, g)_Theta = y* G x.
class FrameSpace {
 public:
  int dim() const { return d_->n; }
  int band() const { return d_->K; }
  int size() const { return (2 * band() + 1) * dim(); }
  double tau() const { return d_->tau; }
  int rank() const { return d_->rank; }
  double oracle_gap() const { return d_->oracle_gap; }

  const Mat& gram() const { return d_->gram; }
  // (zeta psi_c, psi_c') for frame vectors psi_c.
  const Mat& shift_gram() const { return d_->shift_gram; }
  const Eigen::VectorXd& eigenvalues() const { return d_->eigenvalues; }
  const Mat& eigenvectors() const { return d_->eigenvectors; }
  // G^+ from the cached eigendecomposition.
  const Mat& pinv() const { return d_->pinv; }
  // Q = V_r diag(lambda_r)^{-1/2}: frame coordinates of an orthonormal basis
  // of the retained subspace.
  const Mat& orthonormal_basis() const { return d_->basis; }
  // Coordinates of the constants e_i (b_i^-) and of zeta^{-1} e_i (b_i^+) in that basis.
  Mat basis_coords(int k) const;

  Eigen::Index index(int k, int i) const { return static_cast<Eigen::Index>((k + band()) * dim() + i); }
  // size x n selector of the exponent-k block.
  Mat block(int k) const;
  // m_r for |r| <= 2K + 1.
  Mat moment(int r) const;
  const TaylorSeries& taylor_series() const { return d_->taylor; }
  cplx inner(const Vec& x, const Vec& y) const { return y.dot(d_->gram * x); }

 private:
  struct Data {
    int n = 0;
    int K = 0;
    double tau = 0.0;
    int rank = 0;
    double oracle_gap = 0.0;
    TaylorSeries taylor;
    std::vector<Mat> moments;  // m_{-(2K+1)} .. m_{2K+1}
    Mat gram, shift_gram, pinv, basis, eigenvectors;
    Eigen::VectorXd eigenvalues;
  };
  explicit FrameSpace(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;

  friend FrameSpace build_frame(const MatFunction&, int, const FrameOptions&);
};

FrameSpace build_frame(const MatFunction& theta, int K, const FrameOptions& opts = {});

// Z(A) = Z + P_-(A - 1)P_- Z with A acting on the basis b_i^- by its matrix.
struct FrameOperator {
  FrameSpace frame;
  Mat parameter;
  // Action on frame coordinates; the top exponent row is dropped.
  Mat coefficients;
  // Exact compression to the retained subspace in the orthonormal basis.
  Mat compressed;
  int valid_band = 0;

  Mat gram_adjoint() const;
  // Orthogonal projector of frame coordinates onto range(G).
  Mat retained_projector() const;
};

FrameOperator clark_operator(const FrameSpace& frame, const Mat& A);

// P_-(Z(A)*)^k P_- on the constants. Each step is applied exactly in
// coefficient space, so the value for k <= K is untouched by truncation.
Mat compressed_moment(const FrameSpace& frame, const Mat& A, int k);

struct Arc {
  double start;  // radians
  double end;
  bool contains(double angle) const;
};

struct SpectralMeasure {
  MatMeasure measure;
  std::vector<Mat> arc_weights;
  double unitarity_deviation = 0.0;
  std::vector<int> cluster_sizes;
};

SpectralMeasure spectral_measure(const FrameSpace& frame, const Mat& U, const std::vector<Arc>& arcs,
                                 double cluster_tol = 1e-6, double max_deviation = 0.1);

}  // namespace clarklab
