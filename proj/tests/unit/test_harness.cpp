#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "../support/oracles.hpp"
#include "carp/generator.hpp"
#include "carp/harness.hpp"
#include "carp/stats.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("carp_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_generated(const fs::path& dir, int n, int m, std::uint64_t seed) {
  const auto inst = carp::generate_instance(n, m, 40, seed);
  const fs::path path = dir / (inst.name() + ".dat");
  std::ofstream out(path);
  carp::write_instance(out, inst);
  return path;
}

carp::Variant quick_variant(const std::string& name, carp::Algorithm a) {
  carp::Variant v{name, {}};
  v.config.algorithm = a;
  v.config.clock = carp::ClockMode::work;
  v.config.max_cycles = 3;
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

carp::RunRecord record(const std::string& inst, const std::string& var, carp::Cost cost) {
  carp::RunRecord r;
  r.instance = inst;
  r.variant = var;
  r.final_cost = cost;
  return r;
}

}  // namespace

TEST_CASE("budget rules") {
  const carp::Instance inst("x", 2500, {carp::Edge{0, 1, 1, 1, 1}}, 0, 5);
  CHECK(carp::BudgetRule::parse("30").limit_for(inst) == 30.0);
  CHECK(carp::BudgetRule::parse("fixed:12.5").limit_for(inst) == 12.5);
  auto rule = carp::BudgetRule::parse("per-knodes:60");
  CHECK(rule.limit_for(inst) == doctest::Approx(150.0));
  rule.multiplier = 0.5;
  CHECK(rule.limit_for(inst) == doctest::Approx(75.0));
  CHECK_THROWS_AS(carp::BudgetRule::parse("per-vertex:3"), std::invalid_argument);
  CHECK_THROWS_AS(carp::BudgetRule::parse("fixed:-1"), std::invalid_argument);
}

TEST_CASE("experiment spec parsing") {
  std::istringstream in(R"(# comment
instance = a.dat
instance = /abs/b.dat
runs = 4
base_seed = 100
budget = per-knodes:30
lambda = 0.1
clock = work
variant = rco algorithm=sahid-rco
variant = rnd algorithm=sahid-random lambda=0.3 idle=5
workers = 2
)");
  const auto spec = carp::parse_experiment_spec(in, "/base");
  REQUIRE(spec.instances.size() == 2);
  CHECK(spec.instances[0] == fs::path("/base/a.dat"));
  CHECK(spec.instances[1] == fs::path("/abs/b.dat"));
  CHECK(spec.runs == 4);
  CHECK(spec.base_seed == 100);
  CHECK(spec.workers == 2);
  CHECK(spec.budget.kind == carp::BudgetRule::Kind::per_knodes);
  REQUIRE(spec.variants.size() == 2);
  CHECK(spec.variants[0].config.rco.lambda == 0.1);
  CHECK(spec.variants[0].config.clock == carp::ClockMode::work);
  CHECK(spec.variants[1].config.algorithm == carp::Algorithm::sahid_random);
  CHECK(spec.variants[1].config.rco.lambda == 0.3);
  CHECK(spec.variants[1].config.idle_limit == 5);

  std::istringstream bad("runs = 3\nfrobnicate = 1\n");
  try {
    (void)carp::parse_experiment_spec(bad);
    FAIL("no error");
  } catch (const carp::ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("three runs give three records, files and a summary") {
  const auto dir = scratch("three");
  carp::ExperimentSpec spec;
  spec.instances = {write_generated(dir, 30, 20, 1)};
  spec.variants = {quick_variant("rco", carp::Algorithm::sahid_rco)};
  spec.runs = 3;
  spec.base_seed = 10;
  spec.out_dir = dir / "out";
  spec.budget = carp::BudgetRule::parse("0.05");
  spec.workers = 2;
  const auto records = carp::run_experiment(spec);
  REQUIRE(records.size() == 3);
  std::vector<double> costs;
  for (int i = 0; i < 3; ++i) {
    const auto& r = records[i];
    CHECK(r.ok);
    CHECK(r.seed == 10 + static_cast<std::uint64_t>(r.run));
    CHECK(fs::exists(r.trace_path));
    CHECK(fs::exists(r.solution_path));
    costs.push_back(static_cast<double>(r.final_cost));
  }
  const auto cells = carp::summarize(records);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].runs == 3);
  CHECK(cells[0].mean == doctest::Approx(carp::mean(costs)));
  CHECK(cells[0].stddev == doctest::Approx(carp::stddev(costs)));
  CHECK_FALSE(cells[0].single_run);
  CHECK(fs::exists(spec.out_dir / "runs.csv"));
  CHECK(fs::exists(spec.out_dir / "summary.csv"));
  CHECK(fs::exists(spec.out_dir / "summary.txt"));

  std::ifstream runs(spec.out_dir / "runs.csv");
  const auto back = carp::read_runs_csv(runs);
  REQUIRE(back.size() == 3);
  CHECK(back[1].final_cost == records[1].final_cost);
  CHECK(back[1].solution_path == records[1].solution_path);
}

TEST_CASE("stored solutions re-validate to their recorded cost") {
  const auto dir = scratch("stored");
  carp::ExperimentSpec spec;
  spec.instances = {write_generated(dir, 30, 25, 2)};
  spec.variants = {quick_variant("cl", carp::Algorithm::cluster_rco)};
  spec.runs = 2;
  spec.out_dir = dir / "out";
  spec.budget = carp::BudgetRule::parse("0.05");
  const auto records = carp::run_experiment(spec);
  const auto inst = carp::load_instance_file(spec.instances[0]);
  const auto dist = carp::shortest_paths(inst);
  for (const auto& r : records) {
    std::ifstream in(r.solution_path);
    const auto s = carp::read_solution(in, inst, dist);
    CHECK(carp::validate(s, inst).feasible());
    CHECK(s.total_cost == r.final_cost);
    CHECK(oracle::solution_cost(inst, s) == r.final_cost);
  }
}

TEST_CASE("identical variants reproduce each other run by run") {
  const auto dir = scratch("twins");
  carp::ExperimentSpec spec;
  spec.instances = {write_generated(dir, 30, 20, 3)};
  spec.variants = {quick_variant("a", carp::Algorithm::sahid_rco),
                   quick_variant("b", carp::Algorithm::sahid_rco)};
  spec.runs = 3;
  spec.out_dir = dir / "out";
  spec.budget = carp::BudgetRule::parse("0.05");
  spec.workers = 3;
  const auto records = carp::run_experiment(spec);
  for (int i = 0; i < 3; ++i) {
    CHECK(records[i].final_cost == records[3 + i].final_cost);
    CHECK(slurp(records[i].trace_path) == slurp(records[3 + i].trace_path));
  }
}

TEST_CASE("single-run cells report a zero std with a flag") {
  const auto cells = carp::summarize({record("i", "v", 17)});
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].stddev == 0.0);
  CHECK(cells[0].single_run);
  std::ostringstream out;
  carp::write_summary_text(out, cells);
  CHECK(out.str().find("single run") != std::string::npos);
}

TEST_CASE("cell failures are recorded, not fatal") {
  const auto dir = scratch("fail");
  carp::ExperimentSpec spec;
  spec.instances = {write_generated(dir, 20, 10, 4)};
  spec.variants = {quick_variant("ok", carp::Algorithm::sahid_rco)};
  spec.runs = 2;
  spec.out_dir = dir / "out";
  spec.budget = carp::BudgetRule::parse("0.05");
  // a file where the instance directory should go
  fs::create_directories(spec.out_dir);
  std::ofstream(spec.out_dir / carp::load_instance_file(spec.instances[0]).name()) << "x";
  const auto records = carp::run_experiment(spec);
  REQUIRE(records.size() == 2);
  for (const auto& r : records) {
    CHECK_FALSE(r.ok);
    CHECK_FALSE(r.error.empty());
  }
  CHECK(carp::summarize(records)[0].failures == 2);
  spec.instances.push_back(dir / "missing.dat");
  CHECK_THROWS(carp::run_experiment(spec));
}

TEST_CASE("significance table") {
  std::vector<carp::RunRecord> recs;
  // identical samples everywhere: all draws
  for (int i = 0; i < 5; ++i) {
    recs.push_back(record("p", "ref", 100 + i));
    recs.push_back(record("p", "other", 100 + i));
  }
  auto rows = carp::significance_table(recs, "ref");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].wins == 0);
  CHECK(rows[0].draws == 1);
  CHECK(rows[0].losses == 0);

  // the reference dominates on k = 3 instances
  recs.clear();
  for (const std::string inst : {"a", "b", "c"}) {
    for (int i = 0; i < 6; ++i) {
      recs.push_back(record(inst, "ref", 10 + i));
      recs.push_back(record(inst, "other", 50 + i));
    }
  }
  rows = carp::significance_table(recs, "ref");
  CHECK(rows[0].wins == 3);
  const std::vector<double> lo{10, 11, 12, 13, 14, 15}, hi{50, 51, 52, 53, 54, 55};
  CHECK(rows[0].comparisons[0].p_value == doctest::Approx(oracle::rank_sum_p(lo, hi)));
  CHECK(rows[0].comparisons[0].p_value < 0.05);

  // mirrored: reference worse on a single instance
  recs.clear();
  for (int i = 0; i < 6; ++i) {
    recs.push_back(record("a", "ref", 50 + i));
    recs.push_back(record("a", "other", 10 + i));
  }
  rows = carp::significance_table(recs, "ref");
  CHECK(rows[0].wins == 0);
  CHECK(rows[0].draws == 0);
  CHECK(rows[0].losses == 1);

  std::ostringstream csv, txt;
  carp::write_wdl_csv(csv, "ref", rows);
  carp::write_wdl_text(txt, "ref", rows);
  CHECK(csv.str().find("0-0-1") != std::string::npos);
  CHECK(txt.str().find("W-D-L 0-0-1") != std::string::npos);

  recs.push_back(record("a", "other", 99));
  CHECK_THROWS_WITH_AS(carp::significance_table(recs, "ref"), doctest::Contains("'a'"),
                       std::invalid_argument);
  CHECK_THROWS_AS(carp::significance_table(recs, "nobody"), std::invalid_argument);
  std::vector<carp::RunRecord> lonely{record("a", "ref", 1), record("a", "ref", 2),
                                      record("a", "ref", 3)};
  CHECK_THROWS_AS(carp::significance_table(lonely, "ref"), std::invalid_argument);
}
