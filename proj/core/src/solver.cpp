#include "tucker/solver.hpp"

#include <cassert>
#include <chrono>
#include <cmath>

#include "tucker/geometry.hpp"

namespace tucker {

void SolverConfig::validate() const {
  require(max_iter >= 0, "SolverConfig: max_iter must be nonnegative");
  require(armijo_c > 0.0 && armijo_c < 1.0, "SolverConfig: armijo_c must be in (0,1)");
  require(armijo_contraction > 0.0 && armijo_contraction < 1.0,
          "SolverConfig: armijo_contraction must be in (0,1)");
  require(max_backtracks > 0, "SolverConfig: max_backtracks must be positive");
  require(validation_window > 0, "SolverConfig: validation_window must be positive");
  require(threads >= 1, "SolverConfig: threads must be >= 1");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::ValidationStop: return "validation_stop";
    case SolveStatus::Error: return "error";
  }
  return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

// The two geometries differ in gradient, inner product and the transport
// used to combine conjugate directions.
struct Geom {
  const SolverConfig& cfg;

  TuckerTangent gradient(const CompletionProblem& p, const TuckerPoint& x) const {
    if (cfg.geometry == GeometryKind::Preconditioned)
      return riemannian_grad(p, x, cfg.ridge_regularize, cfg.threads);
    return euclidean_grad(p, x, cfg.threads);
  }
  double inner(const TuckerPoint& x, const TuckerTangent& a,
               const TuckerTangent& b) const {
    if (cfg.geometry == GeometryKind::Preconditioned) return metric(x, a, b);
    return euclid_metric(x, a, b);
  }
  double norm(const TuckerPoint& x, const TuckerTangent& a) const {
    return std::sqrt(std::max(0.0, inner(x, a, a)));
  }
  TuckerTangent transport(const TuckerPoint& y, const TuckerTangent& v) const {
    if (cfg.geometry == GeometryKind::Preconditioned)
      return transport_to(y, v, cfg.ridge_regularize);
    return euclid_project_tangent(y, v);
  }
};

}  // namespace

SolveResult solve(const CompletionProblem& p, const TuckerPoint& x0,
                  const SolverConfig& cfg) {
  cfg.validate();
  p.validate();
  check_point(x0, 1e-8);
  const Geom geom{cfg};

  SolveResult result;
  result.x = x0;
  RunTrace& trace = result.trace;
  const auto t_start = Clock::now();
  const auto elapsed = [&t_start] {
    return std::chrono::duration<double>(Clock::now() - t_start).count();
  };

  TuckerPoint x = x0;
  double f = cost(p, x, cfg.threads);
  const bool has_test = p.test.has_value();
  const bool has_validation = p.validation.has_value();
  auto test_mse = [&](const TuckerPoint& pt) {
    return has_test ? mse_on(p, pt, EvalSet::Test, cfg.threads)
                    : std::numeric_limits<double>::quiet_NaN();
  };

  auto record = [&](int iter, double grad_norm, double step, int backtracks) {
    TraceRecord r;
    r.iter = iter;
    r.train_mse = f;
    r.test_mse = test_mse(x);
    r.grad_norm = grad_norm;
    r.step = step;
    r.backtracks = backtracks;
    r.time_s = elapsed();
    trace.records.push_back(r);
  };

  auto finish = [&](SolveStatus status, const std::string& message) {
    trace.status = status;
    trace.message = message;
    result.x = x;
    return result;
  };

  try {
    TuckerTangent grad = geom.gradient(p, x);
    double grad_norm = geom.norm(x, grad);
    const double grad_norm0 = grad_norm;
    record(0, grad_norm, 0.0, 0);

    if (f <= cfg.train_mse_tol)
      return finish(SolveStatus::Converged, "training MSE below tolerance at start");

    TuckerTangent dir = -grad;
    bool have_prev = false;
    TuckerTangent prev_grad, prev_dir;
    double prev_grad_norm2 = 0.0;
    double last_step = 1.0;
    int validation_up = 0;
    double prev_validation = has_validation && cfg.early_stop_on_validation
                                 ? mse_on(p, x, EvalSet::Validation, cfg.threads)
                                 : 0.0;

    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
      if (cfg.method == Method::NCG && have_prev) {
        const TuckerTangent tg = geom.transport(x, prev_grad);
        const TuckerTangent td = geom.transport(x, prev_dir);
        if (cfg.powell_restart_threshold > 0.0 &&
            std::abs(geom.inner(x, grad, tg)) >=
                cfg.powell_restart_threshold * grad_norm * grad_norm) {
          dir = -grad;
        } else {
          const TuckerTangent y = grad - tg;
          double beta = 0.0;
          switch (cfg.beta_rule) {
            case BetaRule::HestenesStiefel: {
              const double denom = geom.inner(x, td, y);
              beta = denom != 0.0 ? geom.inner(x, grad, y) / denom : 0.0;
              break;
            }
            case BetaRule::PolakRibiere: {
              const double denom = prev_grad_norm2;
              beta = denom != 0.0 ? geom.inner(x, grad, y) / denom : 0.0;
              break;
            }
            case BetaRule::FletcherReeves: {
              const double denom = prev_grad_norm2;
              beta = denom != 0.0 ? grad_norm * grad_norm / denom : 0.0;
              break;
            }
          }
          beta = std::max(0.0, beta);
          dir = -grad + beta * td;
        }
      } else {
        dir = -grad;
      }

      double slope = geom.inner(x, grad, dir);
      const double dir_norm = geom.norm(x, dir);
      assert(cfg.geometry != GeometryKind::Preconditioned ||
             horizontality_error(x, dir) <= 1e-9 * std::max(1.0, dir_norm));
      if (-slope <= cfg.cg_restart_threshold * dir_norm * grad_norm) {
        dir = -grad;
        slope = -grad_norm * grad_norm;
      }

      double step = stepsize_guess(p, x, dir, last_step, cfg.threads);
      int backtracks = 0;
      TuckerPoint candidate = retract(x, step * dir);
      double f_candidate = cost(p, candidate, cfg.threads);
      if (cfg.max_step_growth > 0 &&
          f_candidate <= f + cfg.armijo_c * step * slope) {
        // The trial already satisfies the decrease condition; probe larger
        // steps along the same direction while they keep paying off.
        for (int grow = 0; grow < cfg.max_step_growth; ++grow) {
          const double wider = 2.0 * step;
          const TuckerPoint probe = retract(x, wider * dir);
          const double f_probe = cost(p, probe, cfg.threads);
          if (f_probe >= f_candidate) break;
          step = wider;
          candidate = probe;
          f_candidate = f_probe;
        }
      }
      while (f_candidate > f + cfg.armijo_c * step * slope &&
             backtracks < cfg.max_backtracks) {
        step *= cfg.armijo_contraction;
        candidate = retract(x, step * dir);
        f_candidate = cost(p, candidate, cfg.threads);
        ++backtracks;
      }
      if (f_candidate > f + cfg.armijo_c * step * slope) {
        record(iter, grad_norm, 0.0, backtracks);
        return finish(SolveStatus::Error,
                      "line search failed after " +
                          std::to_string(cfg.max_backtracks) + " backtracks");
      }

      prev_grad = grad;
      prev_dir = dir;
      prev_grad_norm2 = grad_norm * grad_norm;
      have_prev = true;
      x = candidate;
      f = f_candidate;
      last_step = step;
      check_point(x, 1e-8);

      grad = geom.gradient(p, x);
      grad_norm = geom.norm(x, grad);
      record(iter, grad_norm, step, backtracks);

      if (f <= cfg.train_mse_tol)
        return finish(SolveStatus::Converged, "training MSE below tolerance");
      if (grad_norm <= cfg.grad_norm_tol * grad_norm0)
        return finish(SolveStatus::Converged, "gradient norm below tolerance");
      if (has_validation && cfg.early_stop_on_validation) {
        const double v = mse_on(p, x, EvalSet::Validation, cfg.threads);
        validation_up = v > prev_validation ? validation_up + 1 : 0;
        prev_validation = v;
        if (validation_up >= cfg.validation_window)
          return finish(SolveStatus::ValidationStop,
                        "validation MSE increased for " +
                            std::to_string(cfg.validation_window) +
                            " consecutive iterations");
      }
    }
    return finish(SolveStatus::MaxIter, "iteration limit reached");
  } catch (const Error& e) {
    return finish(SolveStatus::Error, e.what());
  }
}

}  // namespace tucker
