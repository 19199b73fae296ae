#include <benchmark/benchmark.h>

#include <memory>

#include <clarklab/charfun.hpp>
#include <clarklab/haar.hpp>
#include <clarklab/modelspace.hpp>
#include <clarklab/moments.hpp>
#include <clarklab/opmodel.hpp>

using namespace clarklab;

namespace {

MatFunction sample_theta(int n) {
  std::vector<BlaschkePotapovFactor> bp{{0.0, eye(n)}};
  const cplx zeros[] = {{0.3, -0.2}, {-0.4, 0.1}, {0.1, 0.6}};
  for (cplx w : zeros) {
    Mat p = Mat::Zero(n, n);
    p(0, 0) = 1.0;
    bp.push_back({w, p});
  }
  return MatFunction(n, bp, std::nullopt, {}, std::nullopt, {.inner = true, .vanishes_at_zero = true});
}

Mat sample_contraction(int n) {
  Mat a = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) a(i, (i + 1) % n) = cplx(0.5, 0.2);
  return a;
}

void BM_RecurrenceMoments(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto theta = sample_theta(n);
  const Mat A = sample_contraction(n);
  for (auto _ : state) benchmark::DoNotOptimize(recurrence_moments(theta, A, 10));
}
BENCHMARK(BM_RecurrenceMoments)->Arg(1)->Arg(2)->Arg(3);

void BM_ElliottMoments(benchmark::State& state) {
  const auto theta = sample_theta(2);
  const Mat A = sample_contraction(2);
  const int nodes = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(elliott_moments(theta, A, 10, {nodes, 1.0}));
}
BENCHMARK(BM_ElliottMoments)->Arg(1024)->Arg(4096);

void BM_BuildFrame(benchmark::State& state) {
  const auto theta = sample_theta(2);
  const int K = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_frame(theta, K));
}
BENCHMARK(BM_BuildFrame)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_CompressedMoment(benchmark::State& state) {
  const auto frame = build_frame(sample_theta(2), 40);
  const Mat A = sample_contraction(2);
  for (auto _ : state) benchmark::DoNotOptimize(compressed_moment(frame, A, 8));
}
BENCHMARK(BM_CompressedMoment)->Unit(benchmark::kMillisecond);

void BM_HaarSample(benchmark::State& state) {
  const HaarSampler s(static_cast<int>(state.range(0)), 7);
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(s.sample(i++));
}
BENCHMARK(BM_HaarSample)->Arg(2)->Arg(4)->Arg(8);

void BM_ClarkEigensystem(benchmark::State& state) {
  const auto theta = std::make_shared<const MatFunction>(sample_theta(2));
  Mat U = eye(2);
  U(1, 1) = cplx(0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(clark_eigensystem(theta, U));
}
BENCHMARK(BM_ClarkEigensystem);

void BM_NagyFoias(benchmark::State& state) {
  const auto frame = build_frame(sample_theta(2), 12);
  for (auto _ : state) benchmark::DoNotOptimize(nagy_foias_coeffs(frame, 6));
}
BENCHMARK(BM_NagyFoias);

void BM_ExtremeTest(benchmark::State& state) {
  const MatFunction half(1, {}, std::vector<Mat>{Mat::Constant(1, 1, 0.5), Mat::Constant(1, 1, 0.5)}, {},
                         std::nullopt, {});
  for (auto _ : state) benchmark::DoNotOptimize(extreme_test(half));
}
BENCHMARK(BM_ExtremeTest)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
