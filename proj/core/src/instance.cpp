#include "tucker/instance.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <unordered_set>

#include "tucker/geometry.hpp"

namespace tucker {

void InstanceSpec::validate() const {
  require(dims[0] > 0 && dims[1] > 0 && dims[2] > 0, "InstanceSpec: dims must be positive");
  require(ranks[0] > 0 && ranks[1] > 0 && ranks[2] > 0,
          "InstanceSpec: ranks must be positive");
  for (int d = 0; d < 3; ++d)
    require(ranks[static_cast<std::size_t>(d)] <= dims[static_cast<std::size_t>(d)],
            "InstanceSpec: rank exceeds dimension");
  require(static_cast<std::int64_t>(ranks[0]) <= static_cast<std::int64_t>(ranks[1]) * ranks[2] &&
              static_cast<std::int64_t>(ranks[1]) <= static_cast<std::int64_t>(ranks[0]) * ranks[2] &&
              static_cast<std::int64_t>(ranks[2]) <= static_cast<std::int64_t>(ranks[0]) * ranks[1],
          "InstanceSpec: each rank must not exceed the product of the others");
  require(os >= 1.0, "InstanceSpec: over-sampling ratio must be >= 1");
  require(train_fraction > 0.0 && validation_fraction >= 0.0 && test_fraction >= 0.0,
          "InstanceSpec: invalid split fractions");
  require(std::abs(train_fraction + validation_fraction + test_fraction - 1.0) < 1e-12,
          "InstanceSpec: split fractions must sum to 1");
  if (condition_number) {
    require(*condition_number >= 1.0, "InstanceSpec: condition number must be >= 1");
    require(ranks[0] == ranks[1] && ranks[1] == ranks[2],
            "InstanceSpec: a superdiagonal core needs equal ranks");
  }
  if (noise_eps) require(*noise_eps >= 0.0, "InstanceSpec: noise level must be >= 0");
}

std::int64_t dim_quotient(const Dims& dims, const Dims& ranks) {
  std::int64_t acc = static_cast<std::int64_t>(ranks[0]) * ranks[1] * ranks[2];
  for (int d = 0; d < 3; ++d) {
    const std::int64_t n = dims[static_cast<std::size_t>(d)];
    const std::int64_t r = ranks[static_cast<std::size_t>(d)];
    acc += n * r - r * r;
  }
  return acc;
}

namespace {

Matrix gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

DenseTensor3 superdiagonal_core(int r, double cn) {
  DenseTensor3 g(r, r, r);
  if (r == 1) {
    require(cn == 1.0, "superdiagonal core of rank 1 cannot realize CN > 1");
    g(0, 0, 0) = 1.0;
    return g;
  }
  // Geometric spacing from 1 at the top down to exactly 1/cn.
  for (int i = 0; i < r; ++i)
    g(i, i, i) = std::pow(1.0 / cn, static_cast<double>(i) / (r - 1.0));
  g(r - 1, r - 1, r - 1) = 1.0 / cn;
  return g;
}

// Draws `count` distinct linear indices from [0, n), sorted draw order.
std::vector<std::int64_t> sample_without_replacement(std::int64_t n,
                                                     std::int64_t count,
                                                     std::mt19937_64& rng) {
  constexpr std::int64_t kShuffleLimit = std::int64_t{1} << 22;
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(count));
  if (n <= kShuffleLimit) {
    std::vector<std::int64_t> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), std::int64_t{0});
    for (std::int64_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::int64_t> pick(i, n - 1);
      std::swap(pool[static_cast<std::size_t>(i)],
                pool[static_cast<std::size_t>(pick(rng))]);
      out.push_back(pool[static_cast<std::size_t>(i)]);
    }
  } else {
    std::unordered_set<std::int64_t> seen;
    seen.reserve(static_cast<std::size_t>(count) * 2);
    std::uniform_int_distribution<std::int64_t> pick(0, n - 1);
    while (static_cast<std::int64_t>(out.size()) < count) {
      const std::int64_t v = pick(rng);
      if (seen.insert(v).second) out.push_back(v);
    }
  }
  return out;
}

SparseTensor3 index_set(const Dims& dims, const std::vector<std::int64_t>& linear,
                        std::size_t lo, std::size_t hi) {
  std::vector<SparseEntry> entries;
  entries.reserve(hi - lo);
  const std::int64_t n1 = dims[0], n2 = dims[1];
  for (std::size_t i = lo; i < hi; ++i) {
    const std::int64_t v = linear[i];
    SparseEntry e;
    e.i1 = static_cast<int>(v % n1);
    e.i2 = static_cast<int>((v / n1) % n2);
    e.i3 = static_cast<int>(v / (n1 * n2));
    entries.push_back(e);
  }
  return SparseTensor3(dims, std::move(entries));
}

}  // namespace

GeneratedInstance gen_instance(const InstanceSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);

  // Draw order is fixed: factors, core, index sample, noise.
  TuckerPoint truth;
  truth.U1 = polar_factor(gaussian(spec.dims[0], spec.ranks[0], rng));
  truth.U2 = polar_factor(gaussian(spec.dims[1], spec.ranks[1], rng));
  truth.U3 = polar_factor(gaussian(spec.dims[2], spec.ranks[2], rng));
  if (spec.condition_number) {
    truth.G = superdiagonal_core(spec.ranks[0], *spec.condition_number);
  } else {
    truth.G = DenseTensor3(spec.ranks[0], spec.ranks[1], spec.ranks[2]);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : truth.G.values()) v = normal(rng);
  }

  const std::int64_t n_train = std::llround(spec.os * static_cast<double>(
                                                          dim_quotient(spec.dims, spec.ranks)));
  const std::int64_t n_validation =
      std::llround(static_cast<double>(n_train) * spec.validation_fraction /
                   spec.train_fraction);
  const std::int64_t n_test = std::llround(
      static_cast<double>(n_train) * spec.test_fraction / spec.train_fraction);
  const std::int64_t total = n_train + n_validation + n_test;
  const std::int64_t capacity =
      static_cast<std::int64_t>(spec.dims[0]) * spec.dims[1] * spec.dims[2];
  if (total > capacity) {
    throw DimensionError("gen_instance: os=" + std::to_string(spec.os) +
                         " requires " + std::to_string(total) +
                         " entries but the tensor has only " +
                         std::to_string(capacity));
  }

  const std::vector<std::int64_t> linear =
      sample_without_replacement(capacity, total, rng);
  const std::size_t t = static_cast<std::size_t>(n_train);
  const std::size_t v = static_cast<std::size_t>(n_validation);

  GeneratedInstance out;
  out.ground_truth = truth;
  out.problem.dims = spec.dims;
  out.problem.ranks = spec.ranks;
  out.problem.train =
      sparse_eval_tucker(truth, index_set(spec.dims, linear, 0, t));
  if (n_validation > 0)
    out.problem.validation =
        sparse_eval_tucker(truth, index_set(spec.dims, linear, t, t + v));
  if (n_test > 0)
    out.problem.test = sparse_eval_tucker(
        truth, index_set(spec.dims, linear, t + v, static_cast<std::size_t>(total)));

  if (spec.noise_eps && *spec.noise_eps > 0.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> noise(out.problem.train.nnz());
    double noise_norm2 = 0.0;
    for (double& e : noise) {
      e = normal(rng);
      noise_norm2 += e * e;
    }
    const double scale =
        *spec.noise_eps * out.problem.train.value_norm() / std::sqrt(noise_norm2);
    std::vector<double> values;
    values.reserve(noise.size());
    const auto& entries = out.problem.train.entries();
    for (std::size_t i = 0; i < noise.size(); ++i)
      values.push_back(entries[i].value + scale * noise[i]);
    out.problem.train = out.problem.train.with_values(std::move(values));
  }

  out.problem.validate();
  return out;
}

TuckerPoint initial_guess(const CompletionProblem& p, std::uint64_t seed) {
  TuckerPoint x0 = rand_point(p.dims, p.ranks, seed);
  const double capacity =
      static_cast<double>(p.dims[0]) * p.dims[1] * p.dims[2];
  const double data_norm = p.train.value_norm();
  if (data_norm > 0.0) {
    const double target = data_norm * std::sqrt(capacity / static_cast<double>(
                                                               p.train.nnz()));
    x0.G *= target / x0.G.norm();
  }
  return x0;
}

}  // namespace tucker
