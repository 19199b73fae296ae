#include "clarklab/haar.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "clarklab/errors.hpp"
#include "clarklab/moments.hpp"
#include "clarklab/parallel.hpp"

namespace clarklab {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Mat ginibre(int n, CounterRng& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  Mat z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      z(i, j) = {re, im};
    }
  return z;
}

// Entrywise mean and standard error with deterministic pairwise sums.
MonteCarloEstimate summarize(const std::vector<Mat>& xs) {
  const double S = static_cast<double>(xs.size());
  MonteCarloEstimate est;
  est.mean = pairwise_sum(xs) / S;
  std::vector<Mat> dev;
  dev.reserve(xs.size());
  for (const auto& x : xs) dev.push_back((x - est.mean).cwiseAbs2().cast<cplx>());
  const Mat var = pairwise_sum(dev) / std::max(S - 1.0, 1.0);
  est.standard_error = (var.real() / S).cwiseSqrt().cast<cplx>();
  return est;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : state_(mix64(seed ^ mix64(stream + kGolden))) {}

CounterRng::result_type CounterRng::operator()() {
  state_ += kGolden;
  return mix64(state_);
}

Mat haar_unitary(int n, CounterRng& rng) {
  if (n < 1) throw PreconditionError("dimension must be positive");
  const Eigen::HouseholderQR<Mat> qr(ginibre(n, rng));
  Mat q = qr.householderQ();
  const Mat& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= a > 0.0 ? d / a : cplx(1.0);
  }
  return q;
}

HaarSampler::HaarSampler(int n, std::uint64_t seed, std::uint64_t counter) : n_(n), seed_(seed), counter_(counter) {
  if (n < 1) throw PreconditionError("dimension must be positive");
}

Mat HaarSampler::sample(std::uint64_t index) const {
  CounterRng rng(seed_, index);
  return haar_unitary(n_, rng);
}

MonteCarloEstimate haar_average(int n, int samples, std::uint64_t seed, const std::function<Mat(const Mat&)>& f) {
  if (samples < 2) throw PreconditionError("need at least two samples");
  const HaarSampler sampler(n, seed);
  const auto values = parallel_map(static_cast<std::size_t>(samples), [&](std::size_t s) { return f(sampler.sample(s)); });
  return summarize(values);
}

double vandermonde_abs2(const std::vector<cplx>& z) {
  double v = 1.0;
  for (std::size_t j = 0; j < z.size(); ++j)
    for (std::size_t k = j + 1; k < z.size(); ++k) v *= std::norm(z[j] - z[k]);
  return v;
}

WeylGrid::WeylGrid(int n, int nodes_per_circle, int outer_samples, std::uint64_t seed)
    : n_(n), M_(nodes_per_circle), S_(outer_samples), seed_(seed) {
  if (n < 1 || M_ < 1 || S_ < 1) throw PreconditionError("Weyl grid parameters must be positive");
  std::size_t count = 1;
  for (int i = 0; i < n; ++i) {
    if (count > 50'000'000 / static_cast<std::size_t>(M_)) throw PreconditionError("Weyl grid too large");
    count *= static_cast<std::size_t>(M_);
  }
  double factorial = 1.0;
  for (int i = 2; i <= n; ++i) factorial *= i;
  nodes_.reserve(count);
  weights_.reserve(count);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<cplx> z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[i] = unit(2.0 * kPi * idx[i] / M_);
    weights_.push_back(vandermonde_abs2(z) / (factorial * static_cast<double>(count)));
    nodes_.push_back(std::move(z));
    for (int i = 0; i < n && ++idx[i] == M_; ++i) idx[i] = 0;
  }
  total_ = pairwise_sum(weights_);
  for (auto& w : weights_) w /= total_;
}

Mat weyl_integrate(const std::function<Mat(const Mat&)>& f, const WeylGrid& grid) {
  const int n = grid.dim();
  const HaarSampler sampler(n, grid.seed());
  const auto outer = parallel_map(static_cast<std::size_t>(grid.outer_samples()), [&](std::size_t s) {
    const Mat V = n == 1 ? eye(1) : sampler.sample(s);
    std::vector<Mat> terms;
    terms.reserve(grid.node_count());
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
      if (grid.weight(i) == 0.0) continue;
      const auto& z = grid.node(i);
      const Vec d = Eigen::Map<const Vec>(z.data(), n);
      terms.push_back(grid.weight(i) * f(V * d.asDiagonal() * V.adjoint()));
    }
    return pairwise_sum(terms);
  });
  return pairwise_sum(outer) / static_cast<double>(grid.outer_samples());
}

cplx weyl_integrate(const std::function<cplx(const Mat&)>& f, const WeylGrid& grid) {
  return weyl_integrate([&](const Mat& u) { return Mat::Constant(1, 1, f(u)); }, grid)(0, 0);
}

cplx class_function_integrate(const std::function<cplx(const std::vector<cplx>&)>& f, int n, int M) {
  const WeylGrid grid(n, M);
  std::vector<cplx> terms;
  terms.reserve(grid.node_count());
  for (std::size_t i = 0; i < grid.node_count(); ++i)
    if (grid.weight(i) != 0.0) terms.push_back(grid.weight(i) * f(grid.node(i)));
  return pairwise_sum(terms);
}

cplx TrigPolynomial::coeff(int k) const {
  if (std::abs(k) > degree) return 0.0;
  return coeffs[static_cast<std::size_t>(k + degree)];
}

cplx TrigPolynomial::operator()(cplx zeta) const {
  cplx s = 0.0;
  for (int k = -degree; k <= degree; ++k) s += coeff(k) * std::pow(zeta, k);
  return s;
}

TrigPolynomial TrigPolynomial::parse(const std::string& text) {
  std::vector<cplx> c;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    try {
      std::size_t used = 0;
      if (colon == std::string::npos) {
        const double re = std::stod(item, &used);
        if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        c.emplace_back(re, 0.0);
      } else {
        c.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
      }
    } catch (const std::exception&) {
      throw PreconditionError("malformed trigonometric coefficient '" + item + "'");
    }
  }
  if (c.size() % 2 != 1) throw PreconditionError("trigonometric polynomial needs 2d+1 coefficients f_{-d}..f_d");
  return {static_cast<int>(c.size() / 2), std::move(c)};
}

namespace {

// \int f dOmega from l_k = \int zeta^{-k} dOmega (l_0 = 1).
Mat integrate_against(const TrigPolynomial& f, const std::vector<Mat>& l) {
  Mat out = f.coeff(0) * l[0];
  for (int k = 1; k <= f.degree; ++k) out += f.coeff(-k) * l[k] + f.coeff(k) * l[k].adjoint();
  return out;
}

void finish(FiltrationResult& r) {
  const Mat err = r.lhs - r.rhs;
  r.abs_err = max_abs(err);
  r.max_sigma = max_abs(r.sigma);
  r.within_band = true;
  for (Eigen::Index i = 0; i < err.rows(); ++i)
    for (Eigen::Index j = 0; j < err.cols(); ++j) {
      const double band = std::max(3.0 * std::abs(r.sigma(i, j)), 1e-12);
      r.within_band = r.within_band && std::abs(err(i, j)) <= band;
    }
}

}  // namespace

FiltrationResult filtration_check(const MatFunction& theta, const TrigPolynomial& f, int samples, std::uint64_t seed) {
  if (!theta.vanishes_at_zero()) throw PreconditionError("disintegration requires Theta(0) = 0");
  const int n = theta.dim();
  const int d = std::max(f.degree, 1);
  const TaylorSeries c = taylor(theta, d);
  const auto est = haar_average(n, samples, seed, [&](const Mat& U) {
    return integrate_against(f, recurrence_moments(c, U, d));
  });
  FiltrationResult r;
  r.lhs = est.mean;
  r.sigma = est.standard_error;
  r.rhs = f.coeff(0) * eye(n);
  r.samples = samples;
  finish(r);
  return r;
}

FiltrationResult filtration_check_circle(const MatFunction& theta, const TrigPolynomial& f, int grid) {
  if (theta.dim() != 1) throw PreconditionError("circle average is defined for n = 1");
  if (!theta.vanishes_at_zero()) throw PreconditionError("disintegration requires Theta(0) = 0");
  const int d = std::max(f.degree, 1);
  const TaylorSeries c = taylor(theta, d);
  std::vector<Mat> values(static_cast<std::size_t>(grid));
  for (int j = 0; j < grid; ++j)
    values[j] = integrate_against(f, recurrence_moments(c, Mat::Constant(1, 1, unit(2.0 * kPi * j / grid)), d));
  FiltrationResult r;
  r.lhs = pairwise_sum(values) / static_cast<double>(grid);
  r.sigma = Mat::Zero(1, 1);
  r.rhs = f.coeff(0) * eye(1);
  r.samples = grid;
  finish(r);
  return r;
}

}  // namespace clarklab
