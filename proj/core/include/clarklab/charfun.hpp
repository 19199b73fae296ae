#pragma once

#include <string>
#include <vector>

#include "clarklab/linalg.hpp"
#include "clarklab/matfun.hpp"
#include "clarklab/opmodel.hpp"

namespace clarklab {

enum class Provenance { frame, series };

// Power series coefficients [0] .. [band].
struct CoeffSeries {
  std::vector<Mat> coeffs;
  int band = 0;
  Provenance provenance = Provenance::series;

  const Mat& operator[](int k) const { return coeffs.at(static_cast<std::size_t>(k)); }
};

// max_k ||a_k - b_k|| over 1 <= k <= min(band).
double max_difference(const CoeffSeries& a, const CoeffSeries& b);

// d_k = P (Z^{-1}(1 - P))^{k-1} Z^{-1} P on the constants, k = 1..K, where P
// projects onto the constants and Z is multiplication by zeta. Needs 2K <= band.
CoeffSeries nagy_foias_coeffs(const FrameSpace& frame, int K);

// g_k = P (Z(A)*)^{k-1} Z^{-1} P, the coefficients of Gamma.
CoeffSeries gamma_coeffs(const FrameSpace& frame, const Mat& A, int K);

// Coefficients of Theta (1 - A* Theta)^{-1} by Neumann recursion on c_0 .. c_K.
CoeffSeries gamma_series_coeffs(const TaylorSeries& c, const Mat& A, int K);
CoeffSeries taylor_coeffs(const TaylorSeries& c, int K);

// max_m ||b_m - l_m - sum_{0<j<m} l_j (A* - 1) b_{m-j}|| with l the moments
// of Omega_Theta and b the series coefficients of Gamma.
double gamma_recurrence_residual(const TaylorSeries& c, const Mat& A, int K);

// U_ref A(z) B(z)^{-1} from resolvents of the compressed Z(U_ref) on the
// basis zeta^{-1} e_i. The U_ref factor fixes the coincidence gauge.
Mat lifschitz_charfun(const FrameSpace& frame, const Mat& U_ref, cplx z);

const char* to_string(Provenance p);

}  // namespace clarklab
