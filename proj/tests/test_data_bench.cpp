#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "tucker/bench.hpp"
#include "tucker/geometry.hpp"
#include "tucker/instance.hpp"
#include "tucker/io.hpp"
#include "tucker/sparse_kernels.hpp"

using namespace tucker;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("tucker_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("dim_quotient arithmetic") {
  CHECK(dim_quotient({100, 100, 100}, {10, 10, 10}) == 3700);
  CHECK(dim_quotient({2, 2, 2}, {1, 1, 1}) == 4);
  CHECK(dim_quotient({30, 30, 30}, {3, 3, 3}) == 270);
}

TEST_CASE("gen_instance: sizes, disjointness, determinism") {
  InstanceSpec spec{{20, 18, 16}, {3, 2, 2}, 4.0, {}, {}, 0.5, 0.1, 0.4, 5};
  spec.validate();
  const GeneratedInstance a = gen_instance(spec);
  const std::int64_t expected = std::llround(4.0 * dim_quotient(spec.dims, spec.ranks));
  CHECK(static_cast<std::int64_t>(a.problem.train.nnz()) == expected);
  REQUIRE(a.problem.validation.has_value());
  REQUIRE(a.problem.test.has_value());
  CHECK(a.problem.train.disjoint_from(*a.problem.test));
  CHECK(a.problem.train.disjoint_from(*a.problem.validation));
  CHECK(a.problem.test->disjoint_from(*a.problem.validation));
  CHECK(orthonormality_error(a.ground_truth) < 1e-12);

  const GeneratedInstance b = gen_instance(spec);
  REQUIRE(a.problem.train.nnz() == b.problem.train.nnz());
  for (std::size_t i = 0; i < a.problem.train.nnz(); ++i) {
    CHECK(a.problem.train.entries()[i].i1 == b.problem.train.entries()[i].i1);
    CHECK(a.problem.train.entries()[i].value == b.problem.train.entries()[i].value);
  }

  // observed values are exact model evaluations of the ground truth
  for (std::size_t i = 0; i < 20; ++i) {
    const SparseEntry& e = a.problem.train.entries()[i];
    CHECK(e.value == doctest::Approx(oracle::entry_value(a.ground_truth, e.i1,
                                                         e.i2, e.i3))
                         .epsilon(1e-12));
  }

  InstanceSpec too_big = spec;
  too_big.os = 1e6;
  CHECK_THROWS_AS(gen_instance(too_big), DimensionError);

  InstanceSpec bad_os = spec;
  bad_os.os = 0.5;
  CHECK_THROWS_AS(bad_os.validate(), DimensionError);
  InstanceSpec bad_fractions = spec;
  bad_fractions.test_fraction = 0.7;
  CHECK_THROWS_AS(bad_fractions.validate(), DimensionError);
}

TEST_CASE("gen_instance: rejection sampling path on large index spaces") {
  // 200^3 linear indices exceed the shuffle cutoff, forcing rejection draws.
  InstanceSpec spec{{200, 200, 200}, {2, 2, 2}, 2.0, {}, {}, 0.5, 0.0, 0.5, 9};
  const GeneratedInstance a = gen_instance(spec);
  const GeneratedInstance b = gen_instance(spec);
  const std::int64_t expected = std::llround(2.0 * dim_quotient(spec.dims, spec.ranks));
  CHECK(static_cast<std::int64_t>(a.problem.train.nnz()) == expected);
  REQUIRE(a.problem.train.nnz() == b.problem.train.nnz());
  for (std::size_t i = 0; i < a.problem.train.nnz(); i += 97) {
    CHECK(a.problem.train.entries()[i].i1 == b.problem.train.entries()[i].i1);
    CHECK(a.problem.train.entries()[i].value == b.problem.train.entries()[i].value);
  }
  CHECK(a.problem.train.disjoint_from(*a.problem.test));
}

TEST_CASE("gen_instance: superdiagonal core with prescribed conditioning") {
  InstanceSpec spec{{20, 20, 20}, {5, 5, 5}, 3.0, {}, {}, 0.5, 0.0, 0.5, 6};
  spec.condition_number = 100.0;
  const GeneratedInstance inst = gen_instance(spec);
  const DenseTensor3& g = inst.ground_truth.G;
  double largest = 0.0, smallest = 1e300;
  for (int i = 0; i < 5; ++i) {
    largest = std::max(largest, g(i, i, i));
    smallest = std::min(smallest, g(i, i, i));
  }
  CHECK(largest / smallest == 100.0);
  CHECK(largest == 1.0);
  for (int c = 0; c < 5; ++c)
    for (int b = 0; b < 5; ++b)
      for (int a = 0; a < 5; ++a)
        if (!(a == b && b == c)) CHECK(g(a, b, c) == 0.0);
  for (int i = 1; i < 5; ++i) CHECK(g(i, i, i) < g(i - 1, i - 1, i - 1));

  InstanceSpec uneven = spec;
  uneven.ranks = {5, 4, 4};
  CHECK_THROWS_AS(uneven.validate(), DimensionError);
}

TEST_CASE("gen_instance: noise scaling is exact") {
  InstanceSpec clean{{20, 18, 16}, {3, 2, 2}, 4.0, {}, {}, 0.5, 0.0, 0.5, 7};
  InstanceSpec noisy = clean;
  noisy.noise_eps = 1e-3;
  const GeneratedInstance a = gen_instance(clean);
  const GeneratedInstance b = gen_instance(noisy);

  REQUIRE(a.problem.train.nnz() == b.problem.train.nnz());
  double diff2 = 0.0;
  for (std::size_t i = 0; i < a.problem.train.nnz(); ++i) {
    const double d =
        b.problem.train.entries()[i].value - a.problem.train.entries()[i].value;
    diff2 += d * d;
  }
  const double clean_norm = a.problem.train.value_norm();
  CHECK(std::sqrt(diff2) == doctest::Approx(1e-3 * clean_norm).epsilon(1e-12));

  InstanceSpec zero_noise = clean;
  zero_noise.noise_eps = 0.0;
  const GeneratedInstance c = gen_instance(zero_noise);
  for (std::size_t i = 0; i < 20; ++i)
    CHECK(c.problem.train.entries()[i].value == a.problem.train.entries()[i].value);
}

TEST_CASE("coo round trip: empty, handwritten, random") {
  const auto dir = temp_dir("coo");

  const SparseTensor3 empty({4, 5, 6}, {});
  save_coo(empty, dir / "empty.coo");
  const SparseTensor3 empty_back = load_coo(dir / "empty.coo");
  CHECK(empty_back.dims() == empty.dims());
  CHECK(empty_back.nnz() == 0);

  const SparseTensor3 hand({4, 5, 6}, {{0, 0, 0, 0.1},
                                       {1, 2, 3, -1.0 / 3.0},
                                       {3, 4, 5, 2.2250738585072014e-308}});
  save_coo(hand, dir / "hand.coo");
  const SparseTensor3 hand_back = load_coo(dir / "hand.coo");
  REQUIRE(hand_back.nnz() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(hand_back.entries()[i].i1 == hand.entries()[i].i1);
    CHECK(hand_back.entries()[i].value == hand.entries()[i].value);  // bitwise
  }

  auto g = oracle::rng(8);
  std::vector<SparseEntry> entries;
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 19);
  while (entries.size() < 1000) {
    SparseEntry e{pick(g), pick(g), pick(g), n(g) * std::pow(10.0, pick(g) - 10)};
    entries.push_back(e);
    try {
      SparseTensor3 probe({20, 20, 20}, entries);
    } catch (const Error&) {
      entries.pop_back();  // duplicate index triple, draw again
    }
  }
  const SparseTensor3 rnd({20, 20, 20}, entries);
  save_coo(rnd, dir / "rnd.coo");
  const SparseTensor3 rnd_back = load_coo(dir / "rnd.coo");
  REQUIRE(rnd_back.nnz() == rnd.nnz());
  for (std::size_t i = 0; i < rnd.nnz(); ++i)
    CHECK(rnd_back.entries()[i].value == rnd.entries()[i].value);
}

TEST_CASE("coo parsing: one-based files and error reporting") {
  const auto dir = temp_dir("coo_err");
  {
    std::ofstream out(dir / "one_based.coo");
    out << "# dims 3 3 3 base=1\n1 1 1 2.5\n3 3 3 -1\n";
  }
  const SparseTensor3 t = load_coo(dir / "one_based.coo");
  REQUIRE(t.nnz() == 2);
  CHECK(t.entries()[0].i1 == 0);
  CHECK(t.entries()[1].i3 == 2);

  {
    std::ofstream out(dir / "bad_header.coo");
    out << "dims 3 3 3 base=0\n";
  }
  CHECK_THROWS_AS(load_coo(dir / "bad_header.coo"), ParseError);

  {
    std::ofstream out(dir / "bad_line.coo");
    out << "# dims 3 3 3 base=0\n0 0 0 1.0\n0 nope 1 2.0\n";
  }
  try {
    load_coo(dir / "bad_line.coo");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }

  {
    std::ofstream out(dir / "out_of_range.coo");
    out << "# dims 3 3 3 base=0\n0 0 5 1.0\n";
  }
  CHECK_THROWS_AS(load_coo(dir / "out_of_range.coo"), ParseError);
  CHECK_THROWS_AS(load_coo(dir / "missing.coo"), IoError);
}

TEST_CASE("factor files round trip losslessly") {
  const auto dir = temp_dir("factors");
  const TuckerPoint x = rand_point({7, 6, 5}, {3, 2, 2}, 9);
  save_factors(x, dir / "x.factors");
  const TuckerPoint back = load_factors(dir / "x.factors");
  for (int d = 1; d <= 3; ++d) CHECK(back.U(d) == x.U(d));
  CHECK(back.G.values() == x.G.values());
}

TEST_CASE("trace csv format and timing suppression") {
  RunTrace trace;
  trace.status = SolveStatus::Converged;
  trace.records.push_back({0, 0.5, 0.25, 1.0, 0.0, 0, 0.125});
  trace.records.push_back({1, 0.25, 0.125, 0.5, 0.75, 2, 0.25});
  const auto dir = temp_dir("trace");
  write_trace_csv(trace, dir / "t.csv", true);
  const std::string text = slurp(dir / "t.csv");
  CHECK(text == "iter,train_mse,test_mse,grad_norm,step,backtracks,time_s\n"
                "0,0.5,0.25,1,0,0,0.125\n"
                "1,0.25,0.125,0.5,0.75,2,0.25\n");
  write_trace_csv(trace, dir / "t0.csv", false);
  const std::string no_time = slurp(dir / "t0.csv");
  CHECK(no_time.find("0.125\n") == std::string::npos);
}

TEST_CASE("case registry lists S1..S8 and rejects unknown ids") {
  CHECK(registered_cases().size() == 8);
  CHECK_THROWS_AS(case_definition("S9"), Error);
  CHECK(case_definition("S1").variants.size() == 2);
  CHECK(case_definition("S5").variants.size() == 3);
  for (const std::string& id : registered_cases()) {
    const CaseDef def = case_definition(id);
    for (const CaseVariant& v : def.variants) {
      v.instance.validate();
      for (int d = 0; d < 3; ++d) CHECK(v.instance.dims[d] <= 60);
    }
    // full-scale variants carry the original sizes
    const CaseDef full = case_definition(id, true);
    CHECK(full.variants.size() == def.variants.size());
  }
}

TEST_CASE("run_case writes traces and a report") {
  const auto dir = temp_dir("bench");
  const CaseReport report = run_case("S2", {0}, dir);
  REQUIRE(report.runs.size() == 1);
  CHECK(report.runs[0].status == "converged");
  CHECK(report.runs[0].final_train_mse <= 1e-12);
  CHECK(report.runs[0].iters_to_1e8 <= 250);
  CHECK(std::filesystem::exists(dir / report.runs[0].trace_file));

  const nlohmann::json j = nlohmann::json::parse(slurp(dir / "S2_report.json"));
  CHECK(j.at("case") == "S2");
  CHECK(j.at("runs").size() == 1);
  CHECK(j.at("summaries").size() == 1);
}

TEST_CASE("run_case records the noise floor ratio for noisy variants") {
  const auto dir = temp_dir("bench_noise");
  const CaseReport report = run_case("S6", {0}, dir);
  REQUIRE(report.runs.size() == 1);
  CHECK(report.runs[0].noise_floor_ratio > 0.0);
  // the solver stalls at the noise floor instead of fitting to 1e-12
  CHECK(report.runs[0].final_train_mse > 1e-14);
}
