#pragma once

#include <optional>

#include "tucker/point.hpp"
#include "tucker/sparse_kernels.hpp"
#include "tucker/sparse_tensor.hpp"

namespace tucker {

enum class EvalSet { Train, Test, Validation };

/// A completion instance: observed training entries, optional held-out test
/// and validation entries, and the target multilinear rank.
struct CompletionProblem {
  Dims dims{0, 0, 0};
  Dims ranks{0, 0, 0};
  SparseTensor3 train;
  std::optional<SparseTensor3> test;
  std::optional<SparseTensor3> validation;

  /// Checks train is nonempty, all sets share dims, and the index sets are
  /// pairwise disjoint.
  void validate() const;
};

/// Scaled pointwise residual on the training set:
///   S = (2/|train|) (model - observed), sparse on the training indices.
SparseTensor3 residual(const CompletionProblem& p, const TuckerPoint& x,
                       int threads = 1);

/// Mean squared training error, (1/|train|) sum (model - observed)^2.
double cost(const CompletionProblem& p, const TuckerPoint& x, int threads = 1);

/// Mean squared error on the requested entry set; throws if the set is absent.
double mse_on(const CompletionProblem& p, const TuckerPoint& x, EvalSet which,
              int threads = 1);

/// Gradient of `cost` with respect to the scaled metric: the per-mode partial
/// derivatives S_d (U_c kron U_b) G_d^T are scaled by (G_d G_d^T)^{-1} and the
/// 4-tuple is pushed through the tangent projector. The result is the
/// horizontal lift of the quotient gradient.
TuckerTangent riemannian_grad(const CompletionProblem& p, const TuckerPoint& x,
                              bool ridge = false, int threads = 1);

/// Gradient with respect to the unscaled product metric (baseline geometry):
/// unscaled partial derivatives, Euclidean tangent projection.
TuckerTangent euclidean_grad(const CompletionProblem& p, const TuckerPoint& x,
                             int threads = 1);

/// Minimizer over s of the sampled quadratic
///   q(s) = sum_train (a + s b - y)^2,
/// where a is the current model value and b collects the five first-order
/// directional terms (one xi-block substituted per term). Returns `fallback`
/// if the minimizer is nonpositive; throws if b vanishes on the whole set.
double stepsize_guess(const CompletionProblem& p, const TuckerPoint& x,
                      const TuckerTangent& xi, double fallback = 1.0,
                      int threads = 1);

}  // namespace tucker
