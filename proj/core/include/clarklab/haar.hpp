#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "clarklab/linalg.hpp"
#include "clarklab/matfun.hpp"

namespace clarklab {

// SplitMix64 run from a key derived from (seed, stream). The i-th output of a
// stream is a pure function of (seed, stream, i), so disjoint streams can be
// handed to different workers and the results never depend on scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  result_type operator()();
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  std::uint64_t state_;
};

// Haar unitary from QR of a complex Ginibre matrix, with the phases of R's
// diagonal moved into Q.
Mat haar_unitary(int n, CounterRng& rng);

class HaarSampler {
 public:
  HaarSampler(int n, std::uint64_t seed, std::uint64_t counter = 0);

  int dim() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  // Sample number `index` of this seed; stream `index` is reserved for it.
  Mat sample(std::uint64_t index) const;
  Mat next() { return sample(counter_++); }

 private:
  int n_;
  std::uint64_t seed_;
  std::uint64_t counter_;
};

struct MonteCarloEstimate {
  Mat mean;
  Mat standard_error;  // entrywise, sqrt(E|X - mean|^2 / S)
};

// Plain Haar Monte Carlo average of f over `samples` draws.
MonteCarloEstimate haar_average(int n, int samples, std::uint64_t seed,
                                const std::function<Mat(const Mat&)>& f);

// Torus grid (z_j = e^{2 pi i m_j / M}) with Weyl weights |Delta|^2 / (n! M^n)
// and S outer Haar draws for the conjugating unitary.
class WeylGrid {
 public:
  WeylGrid(int n, int nodes_per_circle, int outer_samples = 1, std::uint64_t seed = 7);

  int dim() const { return n_; }
  int nodes_per_circle() const { return M_; }
  int outer_samples() const { return S_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t node_count() const { return weights_.size(); }
  const std::vector<cplx>& node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  // Sum of the unnormalized weights; 1 up to rounding for M >= n.
  double total_weight() const { return total_; }

 private:
  int n_, M_, S_;
  std::uint64_t seed_;
  std::vector<std::vector<cplx>> nodes_;
  std::vector<double> weights_;  // normalized to sum 1
  double total_ = 0.0;
};

double vandermonde_abs2(const std::vector<cplx>& z);

Mat weyl_integrate(const std::function<Mat(const Mat&)>& f, const WeylGrid& grid);
cplx weyl_integrate(const std::function<cplx(const Mat&)>& f, const WeylGrid& grid);

// Torus quadrature for a class function given on eigenvalues.
cplx class_function_integrate(const std::function<cplx(const std::vector<cplx>&)>& f, int n, int M);

// f(zeta) = sum_{|k| <= d} f_k zeta^k.
struct TrigPolynomial {
  int degree = 0;
  std::vector<cplx> coeffs;  // f_{-d} .. f_d

  cplx coeff(int k) const;
  cplx operator()(cplx zeta) const;
  // Comma separated f_{-d},...,f_d; complex entries written re:im.
  static TrigPolynomial parse(const std::string& text);
};

struct FiltrationResult {
  Mat lhs;
  Mat rhs;
  Mat sigma;       // entrywise standard error of lhs
  double abs_err = 0.0;
  double max_sigma = 0.0;
  bool within_band = false;  // every entry within 3 sigma
  int samples = 0;
};

// lhs = Haar average of \int f dOmega_{Theta U*}, rhs = f_0 1_n.
FiltrationResult filtration_check(const MatFunction& theta, const TrigPolynomial& f, int samples,
                                  std::uint64_t seed = 7);
// n = 1: the average over `grid` equispaced alpha on the circle.
FiltrationResult filtration_check_circle(const MatFunction& theta, const TrigPolynomial& f, int grid = 4096);

}  // namespace clarklab
