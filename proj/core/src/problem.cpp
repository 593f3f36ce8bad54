#include "tucker/problem.hpp"

#include <cmath>
#include <thread>

#include "tucker/geometry.hpp"

namespace tucker {

void CompletionProblem::validate() const {
  require(train.nnz() > 0, "CompletionProblem: training set must be nonempty");
  require(train.dims() == dims, "CompletionProblem: train dims mismatch");
  if (test) require(test->dims() == dims, "CompletionProblem: test dims mismatch");
  if (validation)
    require(validation->dims() == dims, "CompletionProblem: validation dims mismatch");
  if (test && !train.disjoint_from(*test))
    throw Error("CompletionProblem: train and test sets overlap");
  if (validation && !train.disjoint_from(*validation))
    throw Error("CompletionProblem: train and validation sets overlap");
  if (test && validation && !test->disjoint_from(*validation))
    throw Error("CompletionProblem: test and validation sets overlap");
}

namespace {

void check_problem_point(const CompletionProblem& p, const TuckerPoint& x) {
  require(x.dims() == p.dims, "problem/point dims mismatch");
  require(x.ranks() == p.ranks, "problem/point ranks mismatch");
}

double mean_squared_error(const SparseTensor3& model, const SparseTensor3& truth) {
  const auto& m = model.entries();
  const auto& t = truth.entries();
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double d = m[i].value - t[i].value;
    acc += d * d;
  }
  return acc / static_cast<double>(m.size());
}

}  // namespace

SparseTensor3 residual(const CompletionProblem& p, const TuckerPoint& x,
                       int threads) {
  check_problem_point(p, x);
  SparseTensor3 model = sparse_eval_tucker(x, p.train, threads);
  const double scale = 2.0 / static_cast<double>(p.train.nnz());
  std::vector<double> values(model.nnz());
  const auto& m = model.entries();
  const auto& y = p.train.entries();
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = scale * (m[i].value - y[i].value);
  return model.with_values(std::move(values));
}

double cost(const CompletionProblem& p, const TuckerPoint& x, int threads) {
  check_problem_point(p, x);
  const SparseTensor3 model = sparse_eval_tucker(x, p.train, threads);
  return mean_squared_error(model, p.train);
}

double mse_on(const CompletionProblem& p, const TuckerPoint& x, EvalSet which,
              int threads) {
  check_problem_point(p, x);
  const SparseTensor3* set = nullptr;
  switch (which) {
    case EvalSet::Train:
      set = &p.train;
      break;
    case EvalSet::Test:
      if (!p.test) throw Error("mse_on: problem has no test set");
      set = &*p.test;
      break;
    case EvalSet::Validation:
      if (!p.validation) throw Error("mse_on: problem has no validation set");
      set = &*p.validation;
      break;
  }
  return mean_squared_error(sparse_eval_tucker(x, *set, threads), *set);
}

TuckerTangent riemannian_grad(const CompletionProblem& p, const TuckerPoint& x,
                              bool ridge, int threads) {
  const SparseTensor3 s = residual(p, x, threads);
  TuckerTangent egrad;
  for (int d = 1; d <= 3; ++d) {
    const Matrix gd = unfold(x.G, d);
    const SpdFactor w = SpdFactor::make(gd * gd.transpose(), ridge);
    egrad.Z(d) = w.apply_inverse_right(sparse_kron_contract(s, x, d, threads));
  }
  egrad.Z_G = sparse_core_contract(s, x, threads);
  return project_tangent(x, egrad, ridge);
}

TuckerTangent euclidean_grad(const CompletionProblem& p, const TuckerPoint& x,
                             int threads) {
  const SparseTensor3 s = residual(p, x, threads);
  TuckerTangent egrad;
  for (int d = 1; d <= 3; ++d) egrad.Z(d) = sparse_kron_contract(s, x, d, threads);
  egrad.Z_G = sparse_core_contract(s, x, threads);
  return euclid_project_tangent(x, egrad);
}

double stepsize_guess(const CompletionProblem& p, const TuckerPoint& x,
                      const TuckerTangent& xi, double fallback, int threads) {
  check_problem_point(p, x);
  check_shapes(x, xi);
  const Dims r = x.ranks();
  const auto& entries = p.train.entries();

  // One pass per entry: a is the model value, b the first-order change along
  // xi. The G x3 u3 partial contraction is shared between the a, xi_U1 and
  // xi_U2 terms.
  struct Partial {
    double numer = 0.0;
    double denom = 0.0;
  };
  const int chunks = std::max(1, std::min<int>(threads, static_cast<int>(entries.size())));
  std::vector<Partial> partial(static_cast<std::size_t>(chunks));

  auto worker = [&](int chunk, std::size_t lo, std::size_t hi) {
    Matrix gxu3(r[0], r[1]), zgxu3(r[0], r[1]), gxu1(r[1], r[2]);
    Vector m1(r[0]), m2(r[1]), m3(r[2]), t1(r[0]);
    const Eigen::Map<const Matrix> g1(x.G.data(), r[0],
                                      static_cast<Eigen::Index>(r[1]) * r[2]);
    const Eigen::Map<const Matrix> zg1(xi.Z_G.data(), r[0],
                                       static_cast<Eigen::Index>(r[1]) * r[2]);
    Partial& acc = partial[static_cast<std::size_t>(chunk)];
    for (std::size_t k = lo; k < hi; ++k) {
      const SparseEntry& e = entries[k];
      const auto u1 = x.U1.row(e.i1);
      const auto u2 = x.U2.row(e.i2);
      const auto u3 = x.U3.row(e.i3);
      const auto z1 = xi.Z_U1.row(e.i1);
      const auto z2 = xi.Z_U2.row(e.i2);
      const auto z3 = xi.Z_U3.row(e.i3);

      gxu3.noalias() = u3(0) * g1.middleCols(0, r[1]);
      zgxu3.noalias() = u3(0) * zg1.middleCols(0, r[1]);
      for (int c = 1; c < r[2]; ++c) {
        gxu3.noalias() += u3(c) * g1.middleCols(static_cast<Eigen::Index>(c) * r[1], r[1]);
        zgxu3.noalias() += u3(c) * zg1.middleCols(static_cast<Eigen::Index>(c) * r[1], r[1]);
      }
      Eigen::Map<Eigen::RowVectorXd>(gxu1.data(),
                                     static_cast<Eigen::Index>(r[1]) * r[2])
          .noalias() = u1 * g1;

      m1.noalias() = gxu3 * u2.transpose();    // (G x2 u2 x3 u3)_a
      m2.noalias() = gxu3.transpose() * u1.transpose();
      m3.noalias() = gxu1.transpose() * u2.transpose();
      t1.noalias() = zgxu3 * u2.transpose();   // (zG x2 u2 x3 u3)_a

      const double a = u1.dot(m1);
      const double b = z1.dot(m1) + z2.dot(m2) + z3.dot(m3) + u1.dot(t1);
      acc.numer += (e.value - a) * b;
      acc.denom += b * b;
    }
  };

  if (chunks == 1) {
    worker(0, 0, entries.size());
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(chunks));
    for (int t = 0; t < chunks; ++t) {
      const std::size_t lo =
          entries.size() * static_cast<std::size_t>(t) / static_cast<std::size_t>(chunks);
      const std::size_t hi = entries.size() * (static_cast<std::size_t>(t) + 1) /
                             static_cast<std::size_t>(chunks);
      pool.emplace_back(worker, t, lo, hi);
    }
    for (std::thread& th : pool) th.join();
  }

  double numer = 0.0, denom = 0.0;
  for (const Partial& q : partial) {
    numer += q.numer;
    denom += q.denom;
  }
  if (denom == 0.0)
    throw Error("stepsize_guess: direction vanishes on every observed entry");
  const double s = numer / denom;
  return s > 0.0 ? s : fallback;
}

}  // namespace tucker
