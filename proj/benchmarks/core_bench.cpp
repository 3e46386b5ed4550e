#include <memory>
#include <vector>

#include <benchmark/benchmark.h>

#include <blockopt/ehvi.hpp>
#include <blockopt/gp.hpp>
#include <blockopt/grid.hpp>
#include <blockopt/gumbel.hpp>
#include <blockopt/objectives.hpp>
#include <blockopt/pareto.hpp>
#include <blockopt/rng.hpp>

using namespace blockopt;

namespace {

std::vector<Point2> random_front(std::size_t n, Rng& rng) {
  std::vector<Point2> pts(n);
  for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
  std::vector<Point2> front;
  for (std::size_t i : non_dominated_indices(pts)) front.push_back(pts[i]);
  return front;
}

void BM_Hypervolume(benchmark::State& state) {
  Rng rng(1);
  std::vector<Point2> pts(static_cast<std::size_t>(state.range(0)));
  for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
  for (auto _ : state) benchmark::DoNotOptimize(hypervolume_2d(pts, {1.0, 1.0}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Hypervolume)->Arg(10)->Arg(100)->Arg(1000);

void BM_EhviExact(benchmark::State& state) {
  Rng rng(2);
  const auto front = random_front(static_cast<std::size_t>(state.range(0)), rng);
  const GaussianPrediction y1{0.4, 0.01}, y2{0.4, 0.02};
  for (auto _ : state) benchmark::DoNotOptimize(ehvi_gaussian(front, {1.0, 1.0}, y1, y2));
}
BENCHMARK(BM_EhviExact)->Arg(1)->Arg(10)->Arg(50);

void BM_GumbelFit(benchmark::State& state) {
  Rng rng(3);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (auto& v : x) v = 1.0 - 0.5 * std::log(-std::log(rng.uniform_open_zero() * 0.999999 + 1e-12));
  const MaximaSample s(x);
  for (auto _ : state) benchmark::DoNotOptimize(fit_map(s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GumbelFit)->Arg(100)->Arg(10000)->Arg(100000);

void BM_BlockMaxima3D(benchmark::State& state) {
  const auto d = generate_synthetic({100, 100, 100}, 0.0, 1.0, 4);
  const int c = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(extract_block_maxima(d, BlockSpec{c, c, c}));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(d.size() * sizeof(double)));
}
BENCHMARK(BM_BlockMaxima3D)->Arg(2)->Arg(20)->Arg(50);

void BM_GpPredictBatch(benchmark::State& state) {
  Rng rng(5);
  const Eigen::Index n = state.range(0);
  Eigen::MatrixXd X(n, 3);
  std::vector<double> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) X(i, j) = rng.uniform();
    y[static_cast<std::size_t>(i)] = std::sin(4.0 * X(i, 0)) + X(i, 1) * X(i, 2);
  }
  GPOptions opts;
  opts.fixed = GPHyperparameters{{0.3, 0.3, 0.3}, 1.0, 1e-4};
  const auto model = GPModel::fit_normalized(X, y, opts);
  Eigen::MatrixXd Q(4096, 3);
  for (Eigen::Index i = 0; i < Q.rows(); ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) Q(i, j) = rng.uniform();
  }
  Eigen::VectorXd mean, var;
  for (auto _ : state) {
    model.predict_batch(Q, mean, var);
    benchmark::DoNotOptimize(mean.data());
  }
  state.SetItemsProcessed(state.iterations() * Q.rows());
}
BENCHMARK(BM_GpPredictBatch)->Arg(20)->Arg(100);

void BM_GpFit(benchmark::State& state) {
  Rng rng(6);
  const Eigen::Index n = state.range(0);
  Eigen::MatrixXd X(n, 3);
  std::vector<double> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) X(i, j) = rng.uniform();
    y[static_cast<std::size_t>(i)] = std::sin(4.0 * X(i, 0)) + X(i, 1) * X(i, 2) + 0.01 * rng.normal();
  }
  for (auto _ : state) benchmark::DoNotOptimize(GPModel::fit_normalized(X, y));
}
BENCHMARK(BM_GpFit)->Arg(20)->Arg(80)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
