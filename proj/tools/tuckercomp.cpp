// Command-line front end: generate synthetic completion instances, run the
// solver on COO files, and execute the benchmark case registry.
//
// Exit codes: 0 success, 2 usage or config validation error, 3 I/O or parse
// error, 4 solver failure.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tucker/bench.hpp"
#include "tucker/geometry.hpp"
#include "tucker/instance.hpp"
#include "tucker/io.hpp"
#include "tucker/solver.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitSolver = 4;

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& context) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) known = true;
    if (!known)
      throw ConfigError("unknown key '" + item.key() + "' in " + context);
  }
}

tucker::Dims parse_triple(const json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(context + " must be an array of three integers");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

tucker::InstanceSpec parse_instance(const json& j) {
  check_keys(j,
             {"dims", "ranks", "os", "condition_number", "noise_eps",
              "fractions", "seed"},
             "instance");
  tucker::InstanceSpec spec;
  if (!j.contains("dims") || !j.contains("ranks"))
    throw ConfigError("instance requires 'dims' and 'ranks'");
  spec.dims = parse_triple(j.at("dims"), "instance.dims");
  spec.ranks = parse_triple(j.at("ranks"), "instance.ranks");
  if (j.contains("os")) spec.os = j.at("os").get<double>();
  if (j.contains("condition_number") && !j.at("condition_number").is_null())
    spec.condition_number = j.at("condition_number").get<double>();
  if (j.contains("noise_eps") && !j.at("noise_eps").is_null())
    spec.noise_eps = j.at("noise_eps").get<double>();
  if (j.contains("fractions")) {
    const json& f = j.at("fractions");
    if (!f.is_array() || f.size() != 3)
      throw ConfigError("instance.fractions must be [train, validation, test]");
    spec.train_fraction = f[0].get<double>();
    spec.validation_fraction = f[1].get<double>();
    spec.test_fraction = f[2].get<double>();
  }
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

tucker::SolverConfig parse_solver(const json& j) {
  check_keys(j,
             {"max_iter", "train_mse_tol", "grad_norm_tol", "armijo_c",
              "armijo_contraction", "max_backtracks", "cg_restart_threshold",
              "powell_restart_threshold", "max_step_growth", "beta_rule",
              "method", "geometry", "early_stop_on_validation",
              "validation_window", "ridge_regularize"},
             "solver");
  tucker::SolverConfig cfg;
  if (j.contains("max_iter")) cfg.max_iter = j.at("max_iter").get<int>();
  if (j.contains("train_mse_tol"))
    cfg.train_mse_tol = j.at("train_mse_tol").get<double>();
  if (j.contains("grad_norm_tol"))
    cfg.grad_norm_tol = j.at("grad_norm_tol").get<double>();
  if (j.contains("armijo_c")) cfg.armijo_c = j.at("armijo_c").get<double>();
  if (j.contains("armijo_contraction"))
    cfg.armijo_contraction = j.at("armijo_contraction").get<double>();
  if (j.contains("max_backtracks"))
    cfg.max_backtracks = j.at("max_backtracks").get<int>();
  if (j.contains("cg_restart_threshold"))
    cfg.cg_restart_threshold = j.at("cg_restart_threshold").get<double>();
  if (j.contains("powell_restart_threshold"))
    cfg.powell_restart_threshold = j.at("powell_restart_threshold").get<double>();
  if (j.contains("max_step_growth"))
    cfg.max_step_growth = j.at("max_step_growth").get<int>();
  if (j.contains("beta_rule")) {
    const std::string b = j.at("beta_rule").get<std::string>();
    if (b == "hs")
      cfg.beta_rule = tucker::BetaRule::HestenesStiefel;
    else if (b == "pr")
      cfg.beta_rule = tucker::BetaRule::PolakRibiere;
    else if (b == "fr")
      cfg.beta_rule = tucker::BetaRule::FletcherReeves;
    else
      throw ConfigError("solver.beta_rule must be 'hs', 'pr' or 'fr'");
  }
  if (j.contains("method")) {
    const std::string m = j.at("method").get<std::string>();
    if (m == "ncg")
      cfg.method = tucker::Method::NCG;
    else if (m == "sd")
      cfg.method = tucker::Method::SD;
    else
      throw ConfigError("solver.method must be 'ncg' or 'sd'");
  }
  if (j.contains("geometry")) {
    const std::string g = j.at("geometry").get<std::string>();
    if (g == "preconditioned")
      cfg.geometry = tucker::GeometryKind::Preconditioned;
    else if (g == "euclidean")
      cfg.geometry = tucker::GeometryKind::Euclidean;
    else
      throw ConfigError("solver.geometry must be 'preconditioned' or 'euclidean'");
  }
  if (j.contains("early_stop_on_validation"))
    cfg.early_stop_on_validation = j.at("early_stop_on_validation").get<bool>();
  if (j.contains("validation_window"))
    cfg.validation_window = j.at("validation_window").get<int>();
  if (j.contains("ridge_regularize"))
    cfg.ridge_regularize = j.at("ridge_regularize").get<bool>();
  return cfg;
}

struct OutputConfig {
  std::filesystem::path dir = ".";
  bool save_factors = false;
  bool timing = true;
};

OutputConfig parse_output(const json& j) {
  check_keys(j, {"dir", "save_factors", "timing"}, "output");
  OutputConfig out;
  if (j.contains("dir")) out.dir = j.at("dir").get<std::string>();
  if (j.contains("save_factors")) out.save_factors = j.at("save_factors").get<bool>();
  if (j.contains("timing")) out.timing = j.at("timing").get<bool>();
  return out;
}

struct FilesConfig {
  std::filesystem::path train;
  std::optional<std::filesystem::path> test;
  std::optional<std::filesystem::path> validation;
  std::optional<std::filesystem::path> x0;  // warm start, factor file
};

FilesConfig parse_files(const json& j) {
  check_keys(j, {"train", "test", "validation", "x0"}, "files");
  FilesConfig f;
  if (!j.contains("train")) throw ConfigError("files requires 'train'");
  f.train = j.at("train").get<std::string>();
  if (j.contains("test")) f.test = j.at("test").get<std::string>();
  if (j.contains("validation")) f.validation = j.at("validation").get<std::string>();
  if (j.contains("x0")) f.x0 = j.at("x0").get<std::string>();
  return f;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tucker::IoError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  check_keys(j, {"instance", "solver", "files", "output"}, "config");
  return j;
}

// Flag values win over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> geometry;
  std::optional<std::string> method;
  std::optional<std::string> out_dir;
  int threads = 1;
  bool no_timing = false;
  bool full_scale = false;
};

std::filesystem::path resolve_out_dir(const OutputConfig& cfg,
                                      const Overrides& ov) {
  if (ov.out_dir) return *ov.out_dir;
  if (cfg.dir != ".") return cfg.dir;
  if (const char* env = std::getenv("TUCKERCOMP_OUT_DIR")) return env;
  return cfg.dir;
}

void apply_overrides(tucker::InstanceSpec& spec, tucker::SolverConfig& solver,
                     const Overrides& ov) {
  if (ov.seed) spec.seed = *ov.seed;
  if (ov.geometry)
    solver.geometry = *ov.geometry == "euclidean"
                          ? tucker::GeometryKind::Euclidean
                          : tucker::GeometryKind::Preconditioned;
  if (ov.method)
    solver.method = *ov.method == "sd" ? tucker::Method::SD : tucker::Method::NCG;
  solver.threads = ov.threads;
}

int cmd_gen(const std::string& config_path, const Overrides& ov) {
  const json cfg = load_config(config_path);
  if (!cfg.contains("instance")) throw ConfigError("gen requires an 'instance' block");
  tucker::InstanceSpec spec = parse_instance(cfg.at("instance"));
  tucker::SolverConfig dummy;
  apply_overrides(spec, dummy, ov);
  OutputConfig out = cfg.contains("output") ? parse_output(cfg.at("output"))
                                            : OutputConfig{};
  const std::filesystem::path dir = resolve_out_dir(out, ov);
  std::filesystem::create_directories(dir);

  const tucker::GeneratedInstance inst = tucker::gen_instance(spec);
  tucker::save_coo(inst.problem.train, dir / "train.coo");
  if (inst.problem.test) tucker::save_coo(*inst.problem.test, dir / "test.coo");
  if (inst.problem.validation)
    tucker::save_coo(*inst.problem.validation, dir / "validation.coo");
  tucker::save_factors(inst.ground_truth, dir / "truth.factors");
  std::cout << "wrote instance (|train| = " << inst.problem.train.nnz()
            << ") to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_complete(const std::string& config_path, const Overrides& ov) {
  const json cfg = load_config(config_path);
  if (!cfg.contains("files"))
    throw ConfigError("complete requires a 'files' block");
  if (!cfg.contains("instance"))
    throw ConfigError("complete requires an 'instance' block for ranks and seed");
  const FilesConfig files = parse_files(cfg.at("files"));
  tucker::InstanceSpec spec = parse_instance(cfg.at("instance"));
  tucker::SolverConfig solver = cfg.contains("solver")
                                    ? parse_solver(cfg.at("solver"))
                                    : tucker::SolverConfig{};
  apply_overrides(spec, solver, ov);
  OutputConfig out = cfg.contains("output") ? parse_output(cfg.at("output"))
                                            : OutputConfig{};
  if (ov.no_timing) out.timing = false;
  const std::filesystem::path dir = resolve_out_dir(out, ov);
  std::filesystem::create_directories(dir);

  tucker::CompletionProblem problem;
  problem.train = tucker::load_coo(files.train);
  problem.dims = problem.train.dims();
  problem.ranks = spec.ranks;
  if (files.test) problem.test = tucker::load_coo(*files.test);
  if (files.validation) problem.validation = tucker::load_coo(*files.validation);
  problem.validate();

  const tucker::TuckerPoint x0 = files.x0
                                     ? tucker::load_factors(*files.x0)
                                     : tucker::initial_guess(problem, spec.seed);
  const tucker::SolveResult res = tucker::solve(problem, x0, solver);
  tucker::write_trace_csv(res.trace, dir / "trace.csv", out.timing);
  if (out.save_factors) tucker::save_factors(res.x, dir / "factors.out");

  std::cout << "status: " << tucker::to_string(res.trace.status)
            << "  iterations: " << res.trace.iterations()
            << "  train_mse: " << tucker::format_double(res.trace.final_train_mse())
            << "\n";
  if (res.trace.status == tucker::SolveStatus::Error) {
    std::cerr << "solver error: " << res.trace.message << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

int cmd_bench(const std::vector<std::string>& case_ids, int seed_count,
              const Overrides& ov) {
  std::vector<std::string> ids = case_ids;
  if (ids.size() == 1 && ids[0] == "all") ids = tucker::registered_cases();
  const std::vector<std::string> known = tucker::registered_cases();
  for (const std::string& id : ids) {
    if (std::find(known.begin(), known.end(), id) == known.end())
      throw ConfigError("unknown case id '" + id + "' (expected S1..S8 or 'all')");
  }
  std::vector<std::uint64_t> seeds;
  const std::uint64_t base = ov.seed.value_or(0);
  for (int i = 0; i < seed_count; ++i)
    seeds.push_back(base + static_cast<std::uint64_t>(i));

  const std::filesystem::path dir =
      resolve_out_dir(OutputConfig{}, ov).empty() ? "." : resolve_out_dir(OutputConfig{}, ov);
  for (const std::string& id : ids) {
    const tucker::CaseReport report = tucker::run_case(
        id, seeds, dir, ov.full_scale, ov.threads, !ov.no_timing);
    std::cout << "case " << report.case_id << " (" << report.description << ")\n";
    for (const tucker::VariantSummary& s : report.summaries) {
      std::cout << "  " << s.variant
                << ": median iters to 1e-8 = " << s.median_iters_to_1e8
                << ", median test MSE = "
                << tucker::format_double(s.median_final_test_mse)
                << ", time = " << s.mean_time_s << " +/- " << s.std_time_s
                << " s\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixed-rank completion of 3-order tensors"};
  app.require_subcommand(1);

  Overrides ov;
  std::string config_path;
  std::vector<std::string> case_ids;
  int seed_count = 5;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", ov.seed, "override the instance seed");
    cmd->add_option("--threads", ov.threads, "worker cap for the sparse kernels")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", ov.out_dir, "output directory");
  };

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic instance");
  gen->add_option("--config", config_path, "JSON run config")->required();
  add_common(gen);

  CLI::App* complete =
      app.add_subcommand("complete", "run completion on COO files");
  complete->add_option("--config", config_path, "JSON run config")->required();
  add_common(complete);
  complete->add_option("--geometry", ov.geometry, "preconditioned|euclidean")
      ->check(CLI::IsMember({"preconditioned", "euclidean"}));
  complete->add_option("--method", ov.method, "ncg|sd")
      ->check(CLI::IsMember({"ncg", "sd"}));
  complete->add_flag("--no-timing", ov.no_timing,
                     "write time_s as 0 for byte-reproducible traces");

  CLI::App* bench = app.add_subcommand("bench", "run registered cases");
  bench->add_option("cases", case_ids, "case ids (S1..S8) or 'all'")->required();
  add_common(bench);
  bench->add_option("--seed-count", seed_count, "number of seeds per case")
      ->check(CLI::PositiveNumber);
  bench->add_flag("--full-scale", ov.full_scale,
                  "use the original large sizes instead of the desk registry");
  bench->add_flag("--no-timing", ov.no_timing,
                  "write time_s as 0 for byte-reproducible traces");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(config_path, ov);
    if (complete->parsed()) return cmd_complete(config_path, ov);
    return cmd_bench(case_ids, seed_count, ov);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const tucker::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitIo;
  } catch (const tucker::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const tucker::DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const tucker::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}
