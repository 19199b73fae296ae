#pragma once

#include <optional>
#include <vector>

#include "clarklab/linalg.hpp"

namespace clarklab {

// B(z) = 1 - P + b_w(z) P with b_w(z) = (z - w) / (1 - conj(w) z).
struct BlaschkePotapovFactor {
  cplx zero;
  Mat projection;

  int rank() const;
  Mat value(cplx z) const;
  Mat derivative(cplx z) const;
};

// S(z) = 1 - P + s(z) P with s(z) = exp(-mass (atom + z) / (atom - z)).
// An empty projection means P = 1, i.e. a scalar factor.
struct SingularAtom {
  cplx atom;
  double mass;
  Mat projection;

  cplx scalar(cplx z) const;
  Mat value(cplx z, int dim) const;
  Mat derivative(cplx z, int dim) const;
};

struct MatFunctionFlags {
  bool inner = false;
  bool vanishes_at_zero = false;
};

// Theta(z) = B_1(z) ... B_m(z) T(z) S_1(z) ... S_p(z) V with T a matrix
// polynomial, S_i singular inner factors and V a constant unitary. Immutable.
class MatFunction {
 public:
  MatFunction(int dim, std::vector<BlaschkePotapovFactor> bp,
              std::optional<std::vector<Mat>> taylor_tail,
              std::vector<SingularAtom> singular, std::optional<Mat> const_unitary,
              MatFunctionFlags flags);

  static MatFunction zero(int dim);
  // z^k * 1_n.
  static MatFunction monomial(int dim, int k);
  // Scalar Blaschke product with the given zeros (n = 1).
  static MatFunction blaschke(const std::vector<cplx>& zeros);
  // exp(-mass (atom + z) / (atom - z)), n = 1.
  static MatFunction scalar_singular(double mass, cplx atom = 1.0);

  int dim() const { return dim_; }
  const std::vector<BlaschkePotapovFactor>& bp_factors() const { return bp_; }
  const std::optional<std::vector<Mat>>& taylor_tail() const { return taylor_; }
  const std::vector<SingularAtom>& singular_factors() const { return singular_; }
  const std::optional<Mat>& const_unitary() const { return unitary_; }
  const MatFunctionFlags& flags() const { return flags_; }

  bool is_inner() const { return flags_.inner; }
  bool vanishes_at_zero() const { return flags_.vanishes_at_zero; }
  // Only Blaschke-Potapov factors and a constant unitary.
  bool is_rational_inner() const;
  // Degree of det Theta for a rational inner function: sum of projection ranks.
  int det_degree() const;
  bool is_singular_atom(cplx z, double tol = 1e-12) const;

  Mat eval(cplx z) const;
  Mat derivative(cplx z) const;
  Mat operator()(cplx z) const { return eval(z); }

 private:
  void check_domain(cplx z) const;

  int dim_;
  std::vector<BlaschkePotapovFactor> bp_;
  std::optional<std::vector<Mat>> taylor_;
  std::vector<SingularAtom> singular_;
  std::optional<Mat> unitary_;
  MatFunctionFlags flags_;
};

// factor * Theta, folded into the polynomial part. Clears the inner flag.
MatFunction scaled(const MatFunction& theta, double factor);

// B_{Theta A}(z) = (1 + Theta(z) A*)(1 - Theta(z) A*)^{-1}.
Mat herglotz(const MatFunction& theta, const Mat& A, cplx z);
// (B - B*) / (2i).
Mat herglotz_imag(const Mat& b);

// mu(z) = (z - i) / (z + i) and its inverse i (1 + w) / (1 - w).
cplx cayley(cplx z_up);
cplx cayley_inverse(cplx w);
Mat cayley_compose(const MatFunction& theta, cplx z_up);

struct TaylorOptions {
  int nodes = 4096;
  double r_inner = 0.7;
  double r_outer = 0.8;
  double tolerance = 1e-9;
  int max_refinements = 10;
};

struct TaylorSeries {
  std::vector<Mat> coefficients;  // c_0 .. c_K
  double radius = 0.0;
  double discrepancy = 0.0;

  int order() const { return static_cast<int>(coefficients.size()) - 1; }
  const Mat& operator[](int k) const { return coefficients.at(static_cast<std::size_t>(k)); }
  Mat partial_sum(cplx z) const;
};

TaylorSeries taylor(const MatFunction& theta, int K, const TaylorOptions& opts = {});

}  // namespace clarklab
