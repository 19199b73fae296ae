#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "clarklab/linalg.hpp"
#include "clarklab/matfun.hpp"
#include "clarklab/moments.hpp"

namespace clarklab {

// Delta_w(z) = (1 - Theta(z) Theta(w)*) / (1 - z conj(w)). A boundary base
// point needs a Caratheodory angular derivative there; on the diagonal
// w = z in T the value is the angular limit lambda Theta'(lambda) Theta(lambda)*.
Mat kernel(const MatFunction& theta, cplx w, cplx z);

enum class Side { disc, halfplane };

// delta_w^x = Delta_w(.) x on the disc, or the half-plane kernel
// (i / 2 pi)(1 - Phi(z) Phi(w)*) / (z - conj(w)) x with Phi = Theta o mu.
struct KernelVector {
  std::shared_ptr<const MatFunction> theta;
  cplx base;
  Vec direction;
  Side side = Side::disc;

  Vec operator()(cplx z) const;
};

KernelVector kernel_vector(std::shared_ptr<const MatFunction> theta, cplx w, Vec x);
// <a, b> = (a(b.base), b.direction).
cplx kernel_inner(const KernelVector& a, const KernelVector& b);
KernelVector to_halfplane(const KernelVector& k);

// Cauchy transform against Omega_Theta for H^2 frame elements given by
// coefficients of zeta^k e_i, 0 <= k <= band, at (k n + i).
class CauchyTransform {
 public:
  CauchyTransform(std::shared_ptr<const MatFunction> theta, int band, double max_radius = 0.9);

  int band() const { return band_; }
  int dim() const { return theta_->dim(); }
  // n x (band + 1) n matrix W with C_Theta f(z) = W f.
  Mat transfer(cplx z) const;
  // C_Theta f(z).
  Vec integral(const Vec& coeffs, cplx z) const;
  // V_Theta f(z) = (1 - Theta(z)) C_Theta f(z).
  Vec operator()(const Vec& coeffs, cplx z) const;
  // (f, g)_Theta.
  cplx inner(const Vec& f, const Vec& g) const;
  const MomentTable& moments() const { return table_; }

 private:
  std::shared_ptr<const MatFunction> theta_;
  int band_;
  double max_radius_;
  int tail_terms_;
  MomentTable table_;
};

// Coefficients of k^_a^i = sum_k conj(a)^k zeta^k (1 - Theta(a)*) e_i up to `band`.
Vec modified_kernel(const MatFunction& theta, cplx a, int i, int band);

// Backward-shift intertwining defect on the basis zeta^k e_i, 0 <= k <= K,
// at 20 probe points.
double intertwine_residual(const MatFunction& theta, int K);

enum class Extremality { extreme, non_extreme, indeterminate };

struct ExtremeResult {
  Extremality classification = Extremality::indeterminate;
  double estimate = 0.0;  // -inf when the integrand is -inf on a set of positive measure
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> suspects;  // angles where the top singular value reaches 1
};

// Decides whether \int tr ln(1 - |Theta|) dm = -inf.
ExtremeResult extreme_test(const MatFunction& theta);

enum class CadStatus { exists, absent, indeterminate };

struct CadResult {
  CadStatus status = CadStatus::indeterminate;
  std::optional<Mat> derivative;     // Theta'(zeta) when Theta is analytic at zeta
  std::optional<Mat> angular_limit;  // lim (1 - Theta Theta*) / (1 - |z|^2) along the radius
  double c_liminf = 0.0;
  std::vector<double> ladder;
  Mat boundary_value;
};

struct CadOptions {
  int first_rung = 4;
  int last_rung = 26;
  double bound = 1e6;
  double growth_ratio = 1.5;
  double stable_relative = 1e-3;
};

// Radial Julia-quotient ladder at zeta; `direction` selects the vector
// criterion for Theta x, otherwise the matrix criterion is used.
CadResult cad_test(const MatFunction& theta, cplx zeta, const std::optional<Vec>& direction = std::nullopt,
                   const CadOptions& opts = {});

enum class Tristate { yes, no, indeterminate };

struct DenseResult {
  Tristate value = Tristate::indeterminate;
  std::vector<Vec> directions;
  std::vector<CadResult> per_direction;
};

// True iff no direction x admits an angular derivative of Theta x at 1.
DenseResult densely_defined_test(const MatFunction& theta, const CadOptions& opts = {});

enum class PointClass { regular, spectrum };

std::vector<PointClass> regular_points(const MatFunction& theta, const std::vector<cplx>& points);

struct ClarkNode {
  cplx lambda;
  Vec direction;
  double kernel_norm2 = 0.0;
  int cluster = 0;
};

struct ClarkCluster {
  cplx lambda;
  int multiplicity = 0;
  Mat weight;  // Omega_{Theta U*}({lambda})
};

struct ClarkSystem {
  std::shared_ptr<const MatFunction> theta;
  Mat U;
  int dimension = 0;
  std::vector<ClarkNode> nodes;
  std::vector<ClarkCluster> clusters;
  double max_eigen_residual = 0.0;  // max |(Theta(lambda)* - U*) x|
  double max_gram_offdiag = 0.0;    // normalized

  // Samples (f(lambda_j), x_j) of a function given pointwise.
  template <class F>
  std::vector<cplx> sample(F&& f) const {
    std::vector<cplx> s;
    for (const auto& node : nodes) s.push_back(node.direction.dot(f(node.lambda)));
    return s;
  }
};

struct ClarkOptions {
  double merge_tol = 1e-6;
  double circle_tol = 1e-8;
  double null_tol = 1e-6;
};

ClarkSystem clark_eigensystem(std::shared_ptr<const MatFunction> theta, const Mat& U, const ClarkOptions& opts = {});

// sum_j s_j delta_j(z) / |delta_j|^2.
Vec reconstruct(const ClarkSystem& system, const std::vector<cplx>& samples, cplx z);

struct HalfPlaneNode {
  double t;
  cplx lambda;
  Vec direction;
  double kernel_norm2 = 0.0;
};

struct HalfPlaneSystem {
  std::shared_ptr<const MatFunction> theta;
  std::vector<HalfPlaneNode> nodes;

  // Half-plane samples (F(t_j), x_j) of F = (1 - mu) / sqrt(pi) f o mu.
  std::vector<cplx> transfer_samples(const std::vector<cplx>& disc_samples) const;
};

HalfPlaneSystem to_halfplane(const ClarkSystem& system);
Vec reconstruct(const HalfPlaneSystem& system, const std::vector<cplx>& samples, cplx z);

const char* to_string(Extremality e);
const char* to_string(CadStatus s);
const char* to_string(Tristate t);
const char* to_string(PointClass p);

}  // namespace clarklab
