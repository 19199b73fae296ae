#pragma once

#include <vector>

#include <clarklab/matfun.hpp>

namespace oracle {

using clarklab::cplx;
using clarklab::Mat;

// Maclaurin coefficients of a product of Blaschke-Potapov factors times the
// constant unitary, by multiplying truncated power series of each factor.
inline std::vector<Mat> bp_series(const clarklab::MatFunction& theta, int K) {
  const int n = theta.dim();
  std::vector<Mat> acc(K + 1, Mat::Zero(n, n));
  acc[0] = Mat::Identity(n, n);
  for (const auto& f : theta.bp_factors()) {
    // b_w(z) = -w + sum_{k>=1} (1 - |w|^2) conj(w)^{k-1} z^k
    std::vector<Mat> s(K + 1, Mat::Zero(n, n));
    const cplx w = f.zero;
    s[0] = Mat::Identity(n, n) - f.projection - w * f.projection;
    cplx p = 1.0;
    for (int k = 1; k <= K; ++k) {
      s[k] = (1.0 - std::norm(w)) * p * f.projection;
      p *= std::conj(w);
    }
    std::vector<Mat> next(K + 1, Mat::Zero(n, n));
    for (int i = 0; i <= K; ++i)
      for (int j = 0; i + j <= K; ++j) next[i + j] += acc[i] * s[j];
    acc = std::move(next);
  }
  if (theta.const_unitary())
    for (auto& c : acc) c = c * *theta.const_unitary();
  return acc;
}

// Tangential central difference of Theta along the circle at zeta.
inline Mat circle_derivative(const clarklab::MatFunction& theta, cplx zeta, double h = 1e-5) {
  const cplx zp = zeta * std::polar(1.0, h);
  const cplx zm = zeta * std::polar(1.0, -h);
  return (theta.eval(zp) - theta.eval(zm)) / (zp - zm);
}

}  // namespace oracle
