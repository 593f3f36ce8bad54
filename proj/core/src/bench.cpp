#include "tucker/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "tucker/geometry.hpp"
#include "tucker/io.hpp"
#include "tucker/sparse_kernels.hpp"

namespace tucker {

namespace {

// The start point must not share the instance stream, otherwise it would be
// correlated with the ground truth.
constexpr std::uint64_t kStartPointSalt = 0x517cc1b727220a95ULL;

InstanceSpec make_spec(Dims dims, Dims ranks, double os) {
  InstanceSpec s;
  s.dims = dims;
  s.ranks = ranks;
  s.os = os;
  return s;
}

CaseDef build_case(const std::string& id, bool full_scale) {
  CaseDef def;
  def.id = id;
  SolverConfig ncg;  // defaults: NCG, preconditioned metric

  if (id == "S1") {
    def.description = "steepest descent, scaled metric vs Euclidean metric";
    InstanceSpec spec = full_scale ? make_spec({200, 200, 200}, {10, 10, 10}, 10)
                                   : make_spec({40, 40, 40}, {4, 4, 4}, 10);
    SolverConfig sd = ncg;
    sd.method = Method::SD;
    sd.train_mse_tol = 1e-8;
    sd.geometry = GeometryKind::Preconditioned;
    def.variants.push_back({"preconditioned", spec, sd});
    sd.geometry = GeometryKind::Euclidean;
    def.variants.push_back({"euclidean", spec, sd});
  } else if (id == "S2") {
    def.description = "small instance, NCG with the scaled metric";
    InstanceSpec spec = full_scale ? make_spec({200, 200, 200}, {10, 10, 10}, 10)
                                   : make_spec({30, 30, 30}, {3, 3, 3}, 10);
    def.variants.push_back({"ncg", spec, ncg});
  } else if (id == "S3") {
    def.description = "larger instance";
    InstanceSpec spec = full_scale
                            ? make_spec({3000, 3000, 3000}, {5, 5, 5}, 10)
                            : make_spec({60, 60, 60}, {5, 5, 5}, 10);
    def.variants.push_back({"ncg", spec, ncg});
  } else if (id == "S4") {
    def.description = "low sampling (OS = 4)";
    InstanceSpec spec = full_scale
                            ? make_spec({10000, 10000, 10000}, {5, 5, 5}, 4)
                            : make_spec({30, 30, 30}, {3, 3, 3}, 4);
    def.variants.push_back({"ncg", spec, ncg});
  } else if (id == "S5") {
    def.description = "ill-conditioned superdiagonal core";
    // The desk variant needs denser sampling than the original: at small n
    // the ill-conditioned landscape grows spurious basins that the large
    // instances do not have.
    InstanceSpec spec = full_scale
                            ? make_spec({10000, 10000, 10000}, {5, 5, 5}, 5)
                            : make_spec({35, 35, 35}, {3, 3, 3}, 25);
    for (double cn : {5.0, 50.0, 100.0}) {
      spec.condition_number = cn;
      def.variants.push_back({"cn" + std::to_string(static_cast<int>(cn)), spec, ncg});
    }
  } else if (id == "S6") {
    def.description = "noisy observations, eps = 1e-4";
    InstanceSpec spec = full_scale
                            ? make_spec({10000, 10000, 10000}, {5, 5, 5}, 10)
                            : make_spec({30, 30, 30}, {3, 3, 3}, 10);
    // Hold out the entire unobserved complement, so the test MSE is
    // comparable to eps^2 ||observed||^2 / |test|.
    spec.train_fraction = 0.1;
    spec.test_fraction = 0.9;
    spec.noise_eps = 1e-4;
    def.variants.push_back({"eps1e-4", spec, ncg});
  } else if (id == "S7") {
    def.description = "asymmetric dims and ranks";
    InstanceSpec a = full_scale ? make_spec({20000, 7000, 7000}, {5, 5, 5}, 10)
                                : make_spec({50, 24, 24}, {3, 3, 3}, 10);
    def.variants.push_back({"dims", a, ncg});
    // ranks strictly inside r_d < prod of the others; at the boundary the
    // square mode-1 unfolding makes desk-scale recovery unreliable, and the
    // uneven ranks need denser sampling than the symmetric cases
    InstanceSpec b = full_scale ? make_spec({10000, 10000, 10000}, {7, 6, 6}, 10)
                                : make_spec({30, 30, 30}, {4, 3, 2}, 15);
    def.variants.push_back({"ranks", b, ncg});
  } else if (id == "S8") {
    def.description = "medium instance";
    InstanceSpec spec = full_scale ? make_spec({500, 500, 500}, {5, 5, 5}, 10)
                                   : make_spec({50, 50, 50}, {4, 4, 4}, 10);
    def.variants.push_back({"ncg", spec, ncg});
  } else {
    throw Error("unknown case id '" + id + "' (expected S1..S8)");
  }
  return def;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

int iterations_to_mse(const RunTrace& trace, double tol, int censored) {
  for (const TraceRecord& r : trace.records)
    if (r.train_mse <= tol) return r.iter;
  return censored;
}

CaseDef case_definition(const std::string& id, bool full_scale) {
  return build_case(id, full_scale);
}

std::vector<std::string> registered_cases() {
  return {"S1", "S2", "S3", "S4", "S5", "S6", "S7", "S8"};
}

CaseReport run_case(const std::string& case_id,
                    const std::vector<std::uint64_t>& seeds,
                    const std::filesystem::path& out_dir, bool full_scale,
                    int threads, bool include_timing) {
  const CaseDef def = case_definition(case_id, full_scale);
  std::filesystem::create_directories(out_dir);

  CaseReport report;
  report.case_id = def.id;
  report.description = def.description;
  report.seeds = seeds;

  for (const CaseVariant& variant : def.variants) {
    std::vector<double> iters, times, test_mses;
    for (std::uint64_t seed : seeds) {
      InstanceSpec spec = variant.instance;
      spec.seed = seed;
      SolverConfig cfg = variant.solver;
      cfg.threads = threads;

      RunRecord rec;
      rec.variant = variant.label;
      rec.seed = seed;
      try {
        const GeneratedInstance inst = gen_instance(spec);
        const TuckerPoint x0 =
            initial_guess(inst.problem, seed ^ kStartPointSalt);
        const SolveResult res = solve(inst.problem, x0, cfg);

        rec.status = to_string(res.trace.status);
        rec.message = res.trace.message;
        rec.iterations = res.trace.iterations();
        rec.final_train_mse = res.trace.final_train_mse();
        rec.final_test_mse = res.trace.final_test_mse();
        rec.iters_to_1e8 = iterations_to_mse(res.trace, 1e-8, cfg.max_iter + 1);
        rec.wall_time_s = res.trace.total_time_s();
        if (spec.noise_eps && *spec.noise_eps > 0 && inst.problem.test) {
          const double clean_norm =
              sparse_eval_tucker(inst.ground_truth, inst.problem.train, threads)
                  .value_norm();
          const double floor = (*spec.noise_eps) * (*spec.noise_eps) *
                               clean_norm * clean_norm /
                               static_cast<double>(inst.problem.test->nnz());
          rec.noise_floor_ratio = rec.final_test_mse / floor;
        }

        const std::string trace_name = def.id + "_" + variant.label + "_seed" +
                                       std::to_string(seed) + ".csv";
        write_trace_csv(res.trace, out_dir / trace_name, include_timing);
        rec.trace_file = trace_name;

        iters.push_back(static_cast<double>(rec.iters_to_1e8));
        times.push_back(rec.wall_time_s);
        test_mses.push_back(rec.final_test_mse);
      } catch (const Error& e) {
        rec.status = "error";
        rec.message = e.what();
      }
      report.runs.push_back(rec);
    }
    VariantSummary summary;
    summary.variant = variant.label;
    summary.median_iters_to_1e8 = median(iters);
    summary.median_final_test_mse = median(test_mses);
    summary.mean_time_s = mean(times);
    summary.std_time_s = stddev(times);
    report.summaries.push_back(summary);
  }

  nlohmann::json j;
  j["case"] = report.case_id;
  j["description"] = report.description;
  j["seeds"] = report.seeds;
  j["runs"] = nlohmann::json::array();
  for (const RunRecord& r : report.runs) {
    nlohmann::json jr;
    jr["variant"] = r.variant;
    jr["seed"] = r.seed;
    jr["status"] = r.status;
    if (!r.message.empty()) jr["message"] = r.message;
    jr["iterations"] = r.iterations;
    jr["final_train_mse"] = r.final_train_mse;
    jr["final_test_mse"] = r.final_test_mse;
    jr["iters_to_1e8"] = r.iters_to_1e8;
    jr["wall_time_s"] = r.wall_time_s;
    if (r.noise_floor_ratio != 0.0) jr["noise_floor_ratio"] = r.noise_floor_ratio;
    jr["trace_file"] = r.trace_file;
    j["runs"].push_back(jr);
  }
  j["summaries"] = nlohmann::json::array();
  for (const VariantSummary& s : report.summaries) {
    nlohmann::json js;
    js["variant"] = s.variant;
    js["median_iters_to_1e8"] = s.median_iters_to_1e8;
    js["median_final_test_mse"] = s.median_final_test_mse;
    js["mean_time_s"] = s.mean_time_s;
    js["std_time_s"] = s.std_time_s;
    j["summaries"].push_back(js);
  }
  std::ofstream out(out_dir / (def.id + "_report.json"));
  if (!out) throw IoError("cannot write report for case " + def.id);
  out << j.dump(2) << '\n';

  return report;
}

}  // namespace tucker
