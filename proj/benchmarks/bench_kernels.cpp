// Microbenchmarks for the entrywise sparse kernels and the per-iteration
// building blocks. The sparse kernels should scale linearly in the number of
// observed entries at fixed dims and ranks.

#include <benchmark/benchmark.h>

#include <random>
#include <set>
#include <tuple>

#include "tucker/geometry.hpp"
#include "tucker/problem.hpp"
#include "tucker/sparse_kernels.hpp"

namespace {

using namespace tucker;

struct Fixture {
  TuckerPoint x;
  SparseTensor3 omega;
  CompletionProblem problem;
};

Fixture make_fixture(int n, int r, std::int64_t nnz) {
  Fixture f;
  f.x = rand_point({n, n, n}, {r, r, r}, 1);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::normal_distribution<double> val(0.0, 1.0);
  std::vector<SparseEntry> entries;
  entries.reserve(static_cast<std::size_t>(nnz));
  std::set<std::tuple<int, int, int>> seen;
  while (static_cast<std::int64_t>(entries.size()) < nnz) {
    const int i = pick(rng), j = pick(rng), k = pick(rng);
    if (seen.emplace(i, j, k).second) entries.push_back({i, j, k, val(rng)});
  }
  f.omega = SparseTensor3({n, n, n}, std::move(entries));
  f.problem.dims = {n, n, n};
  f.problem.ranks = {r, r, r};
  f.problem.train = f.omega;
  return f;
}

void BM_sparse_eval(benchmark::State& state) {
  const Fixture f = make_fixture(60, 5, state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(sparse_eval_tucker(f.x, f.omega));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          state.range(0));
}
BENCHMARK(BM_sparse_eval)->RangeMultiplier(2)->Range(4096, 65536);

void BM_kron_contract(benchmark::State& state) {
  const Fixture f = make_fixture(60, 5, state.range(0));
  int mode = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sparse_kron_contract(f.omega, f.x, mode));
    mode = mode % 3 + 1;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          state.range(0));
}
BENCHMARK(BM_kron_contract)->RangeMultiplier(2)->Range(4096, 65536);

void BM_core_contract(benchmark::State& state) {
  const Fixture f = make_fixture(60, 5, state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(sparse_core_contract(f.omega, f.x));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          state.range(0));
}
BENCHMARK(BM_core_contract)->RangeMultiplier(2)->Range(4096, 65536);

void BM_riemannian_grad(benchmark::State& state) {
  const Fixture f = make_fixture(60, 5, state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(riemannian_grad(f.problem, f.x));
}
BENCHMARK(BM_riemannian_grad)->RangeMultiplier(2)->Range(8192, 32768);

void BM_project_horizontal(benchmark::State& state) {
  const TuckerPoint x =
      rand_point({static_cast<int>(state.range(0)), 60, 60}, {5, 5, 5}, 3);
  const TuckerTangent eta = project_tangent(x, rand_ambient(x, 4));
  for (auto _ : state)
    benchmark::DoNotOptimize(project_horizontal(x, eta));
}
BENCHMARK(BM_project_horizontal)->Arg(60)->Arg(120)->Arg(240);

void BM_retract(benchmark::State& state) {
  const TuckerPoint x =
      rand_point({static_cast<int>(state.range(0)), 60, 60}, {5, 5, 5}, 5);
  const TuckerTangent xi = rand_tangent(x, 6);
  for (auto _ : state) benchmark::DoNotOptimize(retract(x, xi));
}
BENCHMARK(BM_retract)->Arg(60)->Arg(120)->Arg(240);

void BM_stepsize_guess(benchmark::State& state) {
  const Fixture f = make_fixture(60, 5, state.range(0));
  const TuckerTangent dir = -riemannian_grad(f.problem, f.x);
  for (auto _ : state)
    benchmark::DoNotOptimize(stepsize_guess(f.problem, f.x, dir));
}
BENCHMARK(BM_stepsize_guess)->RangeMultiplier(2)->Range(8192, 32768);

}  // namespace

BENCHMARK_MAIN();
