#pragma once

#include <cstdint>
#include <optional>

#include "tucker/problem.hpp"

namespace tucker {

/// Recipe for a synthetic completion instance.
///
/// The training set has exactly round(os * dim_quotient(dims, ranks))
/// entries; validation and test sizes follow from the split fractions
/// relative to the training fraction. All sampling is without replacement
/// and the three sets are pairwise disjoint.
struct InstanceSpec {
  Dims dims{0, 0, 0};
  Dims ranks{0, 0, 0};
  double os = 10.0;  // over-sampling ratio |train| / dim_quotient
  std::optional<double> condition_number;
  std::optional<double> noise_eps;
  double train_fraction = 0.5;
  double validation_fraction = 0.0;
  double test_fraction = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Dimension of the quotient search space:
///   sum_d (n_d r_d - r_d^2) + r1 r2 r3.
std::int64_t dim_quotient(const Dims& dims, const Dims& ranks);

struct GeneratedInstance {
  CompletionProblem problem;
  TuckerPoint ground_truth;
};

/// Draws the ground truth (orthonormalized Gaussian factors, Gaussian core,
/// or a superdiagonal core with geometrically decaying values from 1 down to
/// 1/condition_number when that is set), samples disjoint train/validation/
/// test index sets, and evaluates the truth there. With noise_eps = eps the
/// training values are perturbed by a Gaussian vector rescaled so the
/// perturbation norm is exactly eps * ||observed||. Deterministic per seed.
GeneratedInstance gen_instance(const InstanceSpec& spec);

/// Random start point for a solve: random orthonormal factors and a random
/// core rescaled so the model's energy matches the observed data,
///   ||G||^2 = ||train values||^2 * (n1 n2 n3) / |train|.
/// A start whose core norm sits far above the data scale is prone to
/// spurious stationary points on ill-conditioned instances.
TuckerPoint initial_guess(const CompletionProblem& p, std::uint64_t seed);

}  // namespace tucker
