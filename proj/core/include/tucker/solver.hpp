#pragma once

#include <limits>
#include <string>
#include <vector>

#include "tucker/problem.hpp"

namespace tucker {

enum class Method { NCG, SD };
enum class GeometryKind { Preconditioned, Euclidean };
enum class BetaRule { HestenesStiefel, PolakRibiere, FletcherReeves };

struct SolverConfig {
  int max_iter = 250;
  double train_mse_tol = 1e-12;
  /// Stop when ||grad|| falls below this fraction of the initial ||grad||.
  double grad_norm_tol = 1e-12;
  double armijo_c = 1e-4;
  double armijo_contraction = 0.5;
  int max_backtracks = 25;
  /// Reset to steepest descent when g(d, -grad) <= threshold * |d| * |grad|.
  double cg_restart_threshold = 0.0;
  /// Powell restart: drop the conjugate term when successive gradients stay
  /// strongly correlated, |g(grad_k, T grad_{k-1})| >= threshold * |grad_k|^2.
  /// Nonpositive disables the check (the default).
  double powell_restart_threshold = 0.0;
  /// Doublings of the trial step to probe once the Armijo condition already
  /// holds at the initial guess. 0 disables growth.
  int max_step_growth = 0;
  Method method = Method::NCG;
  GeometryKind geometry = GeometryKind::Preconditioned;
  /// Conjugation coefficient, always clamped at zero.
  BetaRule beta_rule = BetaRule::HestenesStiefel;
  bool early_stop_on_validation = false;
  /// Consecutive validation-MSE increases that trigger the early stop.
  int validation_window = 3;
  bool ridge_regularize = false;
  int threads = 1;

  void validate() const;
};

struct TraceRecord {
  int iter = 0;
  double train_mse = 0.0;
  double test_mse = std::numeric_limits<double>::quiet_NaN();
  double grad_norm = 0.0;
  double step = 0.0;
  int backtracks = 0;
  double time_s = 0.0;  // cumulative wall time
};

enum class SolveStatus { Converged, MaxIter, ValidationStop, Error };

std::string to_string(SolveStatus s);

struct RunTrace {
  std::vector<TraceRecord> records;  // records[0] describes the start point
  SolveStatus status = SolveStatus::Error;
  std::string message;

  int iterations() const {
    return records.empty() ? 0 : records.back().iter;
  }
  double final_train_mse() const {
    return records.empty() ? std::numeric_limits<double>::quiet_NaN()
                           : records.back().train_mse;
  }
  double final_test_mse() const {
    return records.empty() ? std::numeric_limits<double>::quiet_NaN()
                           : records.back().test_mse;
  }
  double total_time_s() const {
    return records.empty() ? 0.0 : records.back().time_s;
  }
};

struct SolveResult {
  TuckerPoint x;
  RunTrace trace;
};

/// Runs nonlinear conjugate gradients (or steepest descent) from x0:
/// search direction -grad + beta * transported previous direction with the
/// Hestenes-Stiefel beta clamped at zero, initial trial step from
/// stepsize_guess, Armijo backtracking on the retracted cost.
SolveResult solve(const CompletionProblem& p, const TuckerPoint& x0,
                  const SolverConfig& cfg = {});

}  // namespace tucker
