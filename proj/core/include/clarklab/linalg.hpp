#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace clarklab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

Mat eye(int n);

// Largest singular value.
double op_norm(const Mat& m);
double max_abs(const Mat& m);

double unitarity_defect(const Mat& u);
bool is_unitary(const Mat& u, double tol = 1e-10);
bool is_projection(const Mat& p, double tol = 1e-10);
bool is_contraction(const Mat& a, double tol = 1e-12);

Mat hermitian_part(const Mat& m);
double min_hermitian_eigenvalue(const Mat& h);

// Deterministic balanced-tree reduction; the bracketing depends only on
// the number of terms, never on how they were produced.
Mat pairwise_sum(std::span<const Mat> terms);
cplx pairwise_sum(std::span<const cplx> terms);
double pairwise_sum(std::span<const double> terms);

// Moore-Penrose inverse of a Hermitian PSD matrix from its eigenpairs,
// discarding eigenvalues at or below `cutoff`.
Mat hermitian_pinv(const Mat& h, double cutoff);

inline cplx unit(double angle) { return std::polar(1.0, angle); }

}  // namespace clarklab
