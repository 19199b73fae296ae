#pragma once

#include <vector>

#include "clarklab/linalg.hpp"
#include "clarklab/matfun.hpp"

namespace clarklab {

// Moment convention throughout: l_k(A) = \int zeta^{-k} d Omega_{Theta A*},
// so the k-th Fourier moment m_k = \int zeta^k dOmega is l_{-k} for k < 0 and
// l_k^* for k > 0. Moment lists are indexed by k with entry 0 holding m_0.

struct QuadratureOptions {
  int nodes = 4096;
  double radius = 1.0;
};

// \int zeta^k dOmega_{Theta A*} by trapezoid quadrature. Requires the
// vanishes_at_zero flag.
Mat elliott_moment(const MatFunction& theta, const Mat& A, int k, const QuadratureOptions& opts = {});
// l_0(A) .. l_K(A) by quadrature.
std::vector<Mat> elliott_moments(const MatFunction& theta, const Mat& A, int K,
                                 const QuadratureOptions& opts = {});

// l_0(A) .. l_K(A) from the Taylor coefficients alone. Both orderings of the
// recurrence are evaluated and must agree.
std::vector<Mat> recurrence_moments(const TaylorSeries& c, const Mat& A, int K);
std::vector<Mat> recurrence_moments(const MatFunction& theta, const Mat& A, int K,
                                    const TaylorOptions& topts = {});

// max_k |l_k(A) - l_k A* - sum_j l_j (A* - 1) l_{k-j}(A)| with l_j = l_j(1).
double mixed_recurrence_residual(const TaylorSeries& c, const Mat& A, int K);
double crosscheck_mixed_recurrence(const MatFunction& theta, const Mat& A, int K,
                                   const TaylorOptions& topts = {});

// Inverse of recurrence_moments(., 1, K): l_0..l_K -> c_0..c_K (c_0 = 0).
std::vector<Mat> theta_coeffs_from_moments(const std::vector<Mat>& l);

// Moments of Omega_{Theta A*} for arbitrary Theta(0), read from the series of
// (1 - Theta A*)^{-1}; m_0 is the Hermitian part of the Herglotz value at 0.
class MomentTable {
 public:
  MomentTable(const MatFunction& theta, const Mat& A, int order, const TaylorOptions& topts = {});
  MomentTable(const TaylorSeries& c, const Mat& A, int order);

  int dim() const { return static_cast<int>(m0_.rows()); }
  int order() const { return static_cast<int>(l_.size()) - 1; }
  const Mat& l(int k) const { return l_.at(static_cast<std::size_t>(k)); }
  // \int zeta^r dOmega for |r| <= order.
  Mat m(int r) const;
  const std::vector<Mat>& backward() const { return l_; }

 private:
  std::vector<Mat> l_;
  Mat m0_;
};

struct MeasureAtom {
  cplx point;
  Mat weight;
};

struct DensitySample {
  double angle;
  Mat value;
};

struct MatMeasure {
  int dim = 0;
  std::vector<MeasureAtom> atoms;
  std::vector<DensitySample> density;
  int density_grid = 0;       // points of the full grid, skipped ones included
  std::vector<Mat> moments;   // m_{-K} .. m_K
  int moment_order = 0;

  Mat moment(int k) const { return moments.at(static_cast<std::size_t>(k + moment_order)); }
  Mat atom_mass() const;
  // Midpoint-rule integral of the sampled density; skipped points count as 0.
  Mat density_mass() const;
  void set_moments(const MomentTable& table, int K);
};

struct DensityResult {
  std::vector<DensitySample> samples;
  int grid_size = 0;
  int skipped = 0;
  bool warning = false;

  Mat integral() const;
};

// Density of the absolutely continuous part of Omega_{Theta U*} on the
// midpoint grid angle_m = 2 pi (m + 1/2) / grid_size.
DensityResult ac_density(const MatFunction& theta, const Mat& U, int grid_size);

enum class PointMassStatus { atom, zero, indeterminate };

struct PointMassResult {
  PointMassStatus status = PointMassStatus::indeterminate;
  Mat weight;
  std::vector<double> ladder;  // norms along the radial ladder
};

struct LadderOptions {
  int first_rung = 4;
  int last_rung = 20;
  double stable_relative = 1e-4;
  int stable_rungs = 3;
};

PointMassResult point_mass(const MatFunction& theta, const Mat& U, cplx lambda,
                           const LadderOptions& opts = {});

// Omega_{Theta U*}(T) = Re B_{Theta U*}(0).
Mat total_mass(const MatFunction& theta, const Mat& U);

const char* to_string(PointMassStatus s);

}  // namespace clarklab
