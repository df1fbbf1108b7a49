#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "carp/generator.hpp"
#include "carp/harness.hpp"
#include "carp/instance.hpp"
#include "carp/rank_matrix.hpp"
#include "carp/search.hpp"
#include "carp/solution.hpp"
#include "carp/stats.hpp"

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

carp::ClockMode parse_clock(const std::string& name) {
  if (name == "wall") return carp::ClockMode::wall;
  if (name == "work") return carp::ClockMode::work;
  throw std::invalid_argument("clock must be wall or work");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacitated arc routing with route cutting off decomposition"};
  app.require_subcommand(1);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance");
  std::string solve_instance, solve_out, solve_trace, algorithm = "sahid-rco", clock_name = "wall";
  std::string budget_text;
  carp::SearchConfig config;
  double time_scale = 1.0;
  solve_cmd->add_option("instance", solve_instance, "Instance file (DAT format)")->required();
  solve_cmd->add_option("--algorithm", algorithm,
                        "sahid-rco, sahid-random, cluster-rco, cluster-whole-route or local-only")
      ->capture_default_str();
  solve_cmd->add_option("--seed", config.seed, "Random seed")->capture_default_str();
  solve_cmd->add_option("--time-limit", config.time_limit, "Seconds")->capture_default_str();
  solve_cmd->add_option("--budget", budget_text, "Budget rule: S, fixed:S or per-knodes:S");
  solve_cmd->add_option("--time-scale", time_scale, "Multiplier applied to the time limit")
      ->capture_default_str();
  solve_cmd->add_option("--lambda", config.rco.lambda, "Good-link cut probability")
      ->capture_default_str();
  solve_cmd->add_option("--theta", config.rco.theta, "Poor-link cut probability")
      ->capture_default_str();
  solve_cmd->add_option("--groups", config.cluster.groups, "Sub-route groups")->capture_default_str();
  solve_cmd->add_option("--alpha", config.cluster.fuzziness, "Grouping fuzziness")
      ->capture_default_str();
  solve_cmd->add_option("--scale", config.scale, "Hierarchical clustering scale")
      ->capture_default_str();
  solve_cmd->add_option("--accept", config.accept_threshold, "Acceptance threshold")
      ->capture_default_str();
  solve_cmd->add_option("--idle", config.idle_limit, "Idle iterations before accepting worse")
      ->capture_default_str();
  solve_cmd->add_option("--cycles", config.max_cycles, "Cycle cap of the cluster loop")
      ->capture_default_str();
  solve_cmd->add_option("--pool", config.pool_size, "Incumbent pool of the cluster loop")
      ->capture_default_str();
  solve_cmd->add_option("--clock", clock_name, "wall or work (reproducible logical time)")
      ->capture_default_str();
  solve_cmd->add_option("--trace", solve_trace, "Convergence CSV path");
  solve_cmd->add_option("--out", solve_out, "Solution path (stdout when omitted)");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run a multi-trial experiment");
  std::string bench_spec, bench_out;
  std::optional<unsigned> bench_workers;
  double bench_scale = 1.0;
  bench_cmd->add_option("spec", bench_spec, "Experiment file of key = value lines")->required();
  bench_cmd->add_option("--out-dir", bench_out, "Output directory (overrides out_dir)");
  bench_cmd->add_option("--workers", bench_workers, "Parallel cells (0: hardware threads)");
  bench_cmd->add_option("--time-scale", bench_scale, "Multiplier applied to every budget")
      ->capture_default_str();

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Summary and W-D-L tables for an experiment");
  std::string stats_dir, reference;
  double alpha = 0.05;
  stats_cmd->add_option("dir", stats_dir, "Experiment output directory")->required();
  stats_cmd->add_option("--reference", reference, "Reference variant")->required();
  stats_cmd->add_option("--alpha", alpha, "Significance level")->capture_default_str();

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random instance");
  int vertices = 0, tasks = 0;
  carp::Demand capacity = 0;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen_cmd->add_option("--vertices", vertices, "Vertex count")->required();
  gen_cmd->add_option("--tasks", tasks, "Required edge count")->required();
  gen_cmd->add_option("--capacity", capacity, "Vehicle capacity")->required();
  gen_cmd->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "Output path (stdout when omitted)");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Check a solution; exit 0 iff feasible");
  std::string validate_instance, validate_solution;
  validate_cmd->add_option("instance", validate_instance)->required();
  validate_cmd->add_option("solution", validate_solution)->required();

  // info
  auto* info_cmd = app.add_subcommand("info", "Instance statistics");
  std::string info_instance;
  info_cmd->add_option("instance", info_instance)->required();

  // ranks
  auto* ranks_cmd = app.add_subcommand("ranks", "Dump the task rank matrix as CSV");
  std::string ranks_instance, ranks_out;
  ranks_cmd->add_option("instance", ranks_instance)->required();
  ranks_cmd->add_option("--out", ranks_out, "Output path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) {
      config.algorithm = carp::parse_algorithm(algorithm);
      config.clock = parse_clock(clock_name);
      auto problem = carp::Problem::build(carp::load_instance_file(solve_instance));
      if (!budget_text.empty()) {
        auto rule = carp::BudgetRule::parse(budget_text);
        config.time_limit = rule.limit_for(problem->instance);
      }
      config.time_limit *= time_scale;
      std::ofstream trace_file;
      carp::SearchTrace::Sink sink;
      if (!solve_trace.empty()) {
        trace_file = open_output(solve_trace);
        carp::write_trace_header(trace_file);
        sink = [&trace_file](const carp::TracePoint& p) { carp::write_trace_row(trace_file, p); };
      }
      const carp::SearchResult result = carp::solve(*problem, config, sink);
      for (const auto& w : result.trace.warnings) std::cerr << "warning: " << w << '\n';
      if (solve_out.empty()) {
        carp::write_solution(std::cout, result.best, problem->instance);
      } else {
        auto out = open_output(solve_out);
        carp::write_solution(out, result.best, problem->instance);
      }
      std::cerr << problem->instance.name() << ": cost " << result.best.total_cost << ", "
                << result.best.routes.size() << " routes, " << result.trace.iterations
                << " iterations\n";
      return 0;
    }
    if (*bench_cmd) {
      carp::ExperimentSpec spec = carp::load_experiment_spec(bench_spec);
      if (!bench_out.empty()) spec.out_dir = bench_out;
      if (bench_workers) spec.workers = *bench_workers;
      spec.budget.multiplier *= bench_scale;
      const auto records = carp::run_experiment(spec);
      carp::write_summary_text(std::cout, carp::summarize(records));
      int failed = 0;
      for (const auto& r : records) {
        if (!r.ok) {
          ++failed;
          std::cerr << r.instance << '/' << r.variant << "/run" << r.run << ": " << r.error << '\n';
        }
      }
      return failed == 0 ? 0 : 1;
    }
    if (*stats_cmd) {
      const std::filesystem::path dir = stats_dir;
      std::ifstream in(dir / "runs.csv");
      if (!in) throw std::runtime_error("cannot open " + (dir / "runs.csv").string());
      const auto records = carp::read_runs_csv(in);
      const auto cells = carp::summarize(records);
      const auto rows = carp::significance_table(records, reference, alpha);
      {
        auto out = open_output((dir / "summary.csv").string());
        carp::write_summary_csv(out, cells);
      }
      {
        auto out = open_output((dir / "wdl.csv").string());
        carp::write_wdl_csv(out, reference, rows);
      }
      {
        auto out = open_output((dir / "wdl.txt").string());
        carp::write_wdl_text(out, reference, rows);
      }
      carp::write_summary_text(std::cout, cells);
      std::cout << '\n';
      carp::write_wdl_text(std::cout, reference, rows);
      return 0;
    }
    if (*gen_cmd) {
      const carp::Instance instance = carp::generate_instance(vertices, tasks, capacity, gen_seed);
      if (gen_out.empty()) {
        carp::write_instance(std::cout, instance);
      } else {
        auto out = open_output(gen_out);
        carp::write_instance(out, instance);
      }
      return 0;
    }
    if (*validate_cmd) {
      const carp::Instance instance = carp::load_instance_file(validate_instance);
      const carp::DistanceTable dist = carp::shortest_paths(instance);
      std::ifstream in(validate_solution);
      if (!in) throw std::runtime_error("cannot open " + validate_solution);
      const carp::Solution solution = carp::read_solution(in, instance, dist);
      const carp::ValidationReport report = carp::validate(solution, instance);
      if (report.feasible()) {
        std::cout << "feasible: cost " << solution.total_cost << ", " << solution.routes.size()
                  << " routes\n";
        return 0;
      }
      std::cout << "infeasible: " << report.violations.size() << " violation(s)\n";
      for (const auto& v : report.violations) {
        std::cout << "  " << carp::to_string(v.kind) << ": " << v.message << '\n';
      }
      return 1;
    }
    if (*info_cmd) {
      const carp::Instance instance = carp::load_instance_file(info_instance);
      std::cout << "name          " << instance.name() << '\n'
                << "vertices      " << instance.vertex_count() << '\n'
                << "edges         " << instance.edges().size() << '\n'
                << "tasks         " << instance.task_count() << '\n'
                << "capacity      " << instance.capacity() << '\n'
                << "total demand  " << instance.total_demand() << '\n'
                << "min vehicles  " << carp::min_vehicles(instance) << '\n';
      return 0;
    }
    if (*ranks_cmd) {
      const carp::Instance instance = carp::load_instance_file(ranks_instance);
      const carp::DistanceTable dist = carp::shortest_paths(instance);
      const carp::RankMatrix ranks = carp::build_rank_matrix(instance, dist);
      if (ranks_out.empty()) {
        ranks.write_csv(std::cout, instance);
      } else {
        auto out = open_output(ranks_out);
        ranks.write_csv(out, instance);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
