#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tucker/instance.hpp"
#include "tucker/solver.hpp"

namespace tucker {

/// One configured run within a case (a case may sweep geometry, condition
/// number or noise level across variants).
struct CaseVariant {
  std::string label;
  InstanceSpec instance;
  SolverConfig solver;
};

struct CaseDef {
  std::string id;
  std::string description;
  std::vector<CaseVariant> variants;
};

/// Desk-scale registry (all dims <= 60) or, with full_scale=true, the
/// original large sizes. Throws on unknown id.
CaseDef case_definition(const std::string& id, bool full_scale = false);

std::vector<std::string> registered_cases();

struct RunRecord {
  std::string variant;
  std::uint64_t seed = 0;
  std::string status;
  std::string message;
  int iterations = 0;
  double final_train_mse = 0.0;
  double final_test_mse = 0.0;
  /// First iteration with train MSE <= 1e-8, or max_iter+1 if never reached.
  int iters_to_1e8 = 0;
  double wall_time_s = 0.0;
  /// Only for noisy variants: final test MSE divided by the expected noise
  /// floor eps^2 ||observed||^2 / |test|.
  double noise_floor_ratio = 0.0;
  std::string trace_file;
};

struct VariantSummary {
  std::string variant;
  double median_iters_to_1e8 = 0.0;
  double median_final_test_mse = 0.0;
  double mean_time_s = 0.0;
  double std_time_s = 0.0;
};

struct CaseReport {
  std::string case_id;
  std::string description;
  std::vector<std::uint64_t> seeds;
  std::vector<RunRecord> runs;
  std::vector<VariantSummary> summaries;
};

/// Executes every variant of the case for each seed, writes one trace CSV per
/// run plus a JSON report into out_dir, and returns the report. Solver errors
/// are recorded per run, not fatal to the batch.
CaseReport run_case(const std::string& case_id,
                    const std::vector<std::uint64_t>& seeds,
                    const std::filesystem::path& out_dir,
                    bool full_scale = false, int threads = 1,
                    bool include_timing = true);

/// First iteration index at which the trace reaches train MSE <= tol;
/// `censored` when it never does.
int iterations_to_mse(const RunTrace& trace, double tol, int censored);

double median(std::vector<double> v);

}  // namespace tucker
