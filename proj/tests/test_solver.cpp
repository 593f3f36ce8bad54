#include <doctest.h>

#include "oracles.hpp"
#include "tucker/geometry.hpp"
#include "tucker/instance.hpp"
#include "tucker/solver.hpp"

using namespace tucker;

namespace {

CompletionProblem full_sampling_problem(const TuckerPoint& truth) {
  const Dims n = truth.dims();
  std::vector<SparseEntry> entries;
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i)
        entries.push_back({i, j, k, oracle::entry_value(truth, i, j, k)});
  CompletionProblem p;
  p.dims = n;
  p.ranks = truth.ranks();
  p.train = SparseTensor3(n, std::move(entries));
  return p;
}

}  // namespace

TEST_CASE("config validation") {
  SolverConfig bad;
  bad.armijo_c = 1.5;
  CHECK_THROWS_AS(bad.validate(), DimensionError);
  bad = SolverConfig{};
  bad.armijo_contraction = 0.0;
  CHECK_THROWS_AS(bad.validate(), DimensionError);
  CHECK_NOTHROW(SolverConfig{}.validate());
}

TEST_CASE("exact starting point returns immediately") {
  const TuckerPoint truth = rand_point({5, 5, 5}, {2, 2, 2}, 1);
  const CompletionProblem p = full_sampling_problem(truth);
  const SolveResult res = solve(p, truth);
  CHECK(res.trace.status == SolveStatus::Converged);
  CHECK(res.trace.records.size() == 1);
  CHECK(res.trace.iterations() == 0);
  CHECK(res.trace.final_train_mse() < 1e-26);
}

TEST_CASE("rank-(1,1,1) full sampling converges for five seeds") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TuckerPoint truth = rand_point({5, 5, 5}, {1, 1, 1}, 10 + seed);
    const CompletionProblem p = full_sampling_problem(truth);
    const TuckerPoint x0 = rand_point({5, 5, 5}, {1, 1, 1}, 20 + seed);
    SolverConfig cfg;
    cfg.max_iter = 50;
    const SolveResult res = solve(p, x0, cfg);
    CHECK(res.trace.status == SolveStatus::Converged);
    CHECK(res.trace.final_train_mse() <= 1e-12);
    CHECK(res.trace.iterations() <= 50);
  }
}

TEST_CASE("train MSE is nonincreasing across accepted iterations") {
  const InstanceSpec spec{{12, 10, 8}, {2, 2, 2}, 5.0, {}, {}, 0.5, 0.0, 0.5, 3};
  const GeneratedInstance inst = gen_instance(spec);
  const TuckerPoint x0 = rand_point(spec.dims, spec.ranks, 4);
  SolverConfig cfg;
  cfg.max_iter = 60;
  const SolveResult res = solve(inst.problem, x0, cfg);
  REQUIRE(res.trace.records.size() > 2);
  for (std::size_t i = 1; i < res.trace.records.size(); ++i)
    CHECK(res.trace.records[i].train_mse <= res.trace.records[i - 1].train_mse);
  // every accepted iterate stayed on the manifold
  CHECK(orthonormality_error(res.x) <= 1e-10);
}

TEST_CASE("steepest descent and Euclidean geometry both make progress") {
  const InstanceSpec spec{{12, 10, 8}, {2, 2, 2}, 5.0, {}, {}, 0.5, 0.0, 0.5, 5};
  const GeneratedInstance inst = gen_instance(spec);
  const TuckerPoint x0 = rand_point(spec.dims, spec.ranks, 6);

  SolverConfig sd;
  sd.method = Method::SD;
  sd.max_iter = 40;
  const SolveResult res_sd = solve(inst.problem, x0, sd);
  CHECK(res_sd.trace.final_train_mse() < res_sd.trace.records.front().train_mse);

  SolverConfig eu = sd;
  eu.geometry = GeometryKind::Euclidean;
  const SolveResult res_eu = solve(inst.problem, x0, eu);
  CHECK(res_eu.trace.final_train_mse() < res_eu.trace.records.front().train_mse);
}

TEST_CASE("desk-scale instance reaches deep accuracy with NCG") {
  const InstanceSpec spec{{30, 30, 30}, {3, 3, 3}, 10.0, {}, {}, 0.5, 0.0, 0.5, 0};
  const GeneratedInstance inst = gen_instance(spec);
  CHECK(inst.problem.train.nnz() == 2700);
  const TuckerPoint x0 = rand_point(spec.dims, spec.ranks, 99);
  SolverConfig cfg;
  cfg.train_mse_tol = 1e-10;
  const SolveResult res = solve(inst.problem, x0, cfg);
  CHECK(res.trace.status == SolveStatus::Converged);
  CHECK(res.trace.final_train_mse() <= 1e-10);
  CHECK(res.trace.iterations() <= 250);
}

TEST_CASE("traces are reproducible for identical seed and config") {
  const InstanceSpec spec{{12, 10, 8}, {2, 2, 2}, 5.0, {}, {}, 0.5, 0.0, 0.5, 7};
  SolverConfig cfg;
  cfg.max_iter = 25;
  RunTrace a, b;
  for (RunTrace* out : {&a, &b}) {
    const GeneratedInstance inst = gen_instance(spec);
    const TuckerPoint x0 = rand_point(spec.dims, spec.ranks, 8);
    *out = solve(inst.problem, x0, cfg).trace;
  }
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].train_mse == b.records[i].train_mse);
    CHECK(a.records[i].test_mse == b.records[i].test_mse);
    CHECK(a.records[i].grad_norm == b.records[i].grad_norm);
    CHECK(a.records[i].step == b.records[i].step);
    CHECK(a.records[i].backtracks == b.records[i].backtracks);
  }
}

TEST_CASE("validation-based early stopping fires on noisy low sampling") {
  InstanceSpec spec{{14, 14, 14}, {2, 2, 2}, 2.0, {}, {}, 0.6, 0.2, 0.2, 11};
  spec.noise_eps = 3e-2;
  const GeneratedInstance inst = gen_instance(spec);
  REQUIRE(inst.problem.validation.has_value());
  const TuckerPoint x0 = rand_point(spec.dims, spec.ranks, 12);
  SolverConfig cfg;
  cfg.early_stop_on_validation = true;
  const SolveResult res = solve(inst.problem, x0, cfg);
  // overfitting noise at OS=2 must trip the window before the iteration cap
  CHECK(res.trace.status == SolveStatus::ValidationStop);
  CHECK(res.trace.iterations() < cfg.max_iter);
}

TEST_CASE("status reporting on hard line-search budgets") {
  const InstanceSpec spec{{12, 10, 8}, {2, 2, 2}, 5.0, {}, {}, 0.5, 0.0, 0.5, 13};
  const GeneratedInstance inst = gen_instance(spec);
  const TuckerPoint x0 = rand_point(spec.dims, spec.ranks, 14);
  SolverConfig cfg;
  cfg.max_iter = 3;
  const SolveResult res = solve(inst.problem, x0, cfg);
  CHECK(res.trace.status == SolveStatus::MaxIter);
  CHECK(res.trace.iterations() == 3);
  CHECK(to_string(res.trace.status) == "max_iter");
}
