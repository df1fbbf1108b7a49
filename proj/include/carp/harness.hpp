#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "carp/instance.hpp"
#include "carp/search.hpp"

namespace carp {

// Time limit per run: a fixed number of seconds, or seconds per 1000 vertices.
// The multiplier rescales budgets across machines.
struct BudgetRule {
  enum class Kind { fixed, per_knodes };
  Kind kind = Kind::fixed;
  double seconds = 60.0;
  double multiplier = 1.0;

  // Accepts "S", "fixed:S" and "per-knodes:S".
  static BudgetRule parse(std::string_view text);
  double limit_for(const Instance& instance) const;
  std::string describe() const;
};

struct Variant {
  std::string name;
  SearchConfig config;
};

struct ExperimentSpec {
  std::vector<std::filesystem::path> instances;
  std::vector<Variant> variants;
  int runs = 25;
  std::uint64_t base_seed = 1;
  std::filesystem::path out_dir = "results";
  BudgetRule budget;
  unsigned workers = 1;  // 0: one per hardware thread

  void check() const;
};

// Sets one SearchConfig field from its textual key (lambda, theta, groups,
// alpha, scale, accept, idle, cycles, pool, sub-moves, sub-ms, clock,
// algorithm, parallel). Throws std::invalid_argument on unknown keys or values.
void apply_config_key(SearchConfig& config, std::string_view key, std::string_view value);

// Plain "key = value" lines; '#' starts a comment. Keys:
//   instance = <path>                      (repeatable, relative to base_dir)
//   variant = <name> [key=value ...]       (repeatable)
//   runs, base_seed, budget, time_limit, multiplier, workers, out_dir
//   any apply_config_key key               (default for every variant)
ExperimentSpec parse_experiment_spec(std::istream& in,
                                     const std::filesystem::path& base_dir = {});
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

struct RunRecord {
  std::string instance;
  std::string variant;
  int run = 0;
  std::uint64_t seed = 0;
  Cost final_cost = 0;
  double elapsed_s = 0.0;
  std::size_t routes = 0;
  std::filesystem::path trace_path;
  std::filesystem::path solution_path;
  bool ok = true;
  std::string error;
};

// Runs every (instance, variant, run) cell in a bounded worker pool, writing
// <out>/<instance>/<variant>/run<i>.sol and .trace.csv, then runs.csv,
// summary.csv and summary.txt under <out>. Cell failures are recorded in the
// returned records. Throws if an instance fails to load.
std::vector<RunRecord> run_experiment(const ExperimentSpec& spec);

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_runs_csv(std::istream& in);

struct CellSummary {
  std::string instance;
  std::string variant;
  int runs = 0;       // successful runs
  int failures = 0;
  double mean = 0.0;
  double stddev = 0.0;
  Cost best = 0;
  Cost worst = 0;
  bool single_run = false;  // stddev undefined, reported as 0
};

std::vector<CellSummary> summarize(const std::vector<RunRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells);
void write_summary_text(std::ostream& out, const std::vector<CellSummary>& cells);

enum class Outcome { win, draw, loss };

struct Comparison {
  std::string instance;
  double reference_mean = 0.0;
  double other_mean = 0.0;
  double p_value = 1.0;
  Outcome outcome = Outcome::draw;
};

struct WdlRow {
  std::string variant;
  int wins = 0;    // reference significantly better
  int draws = 0;
  int losses = 0;  // reference significantly worse
  std::vector<Comparison> comparisons;
};

// Compares the reference variant with every other variant per instance using
// the two-sided rank-sum test on final costs (lower is better). Throws
// std::invalid_argument when fewer than two variants exist, the reference is
// missing, or run counts differ within an instance.
std::vector<WdlRow> significance_table(const std::vector<RunRecord>& records,
                                       const std::string& reference, double alpha = 0.05);
void write_wdl_csv(std::ostream& out, const std::string& reference,
                   const std::vector<WdlRow>& rows);
void write_wdl_text(std::ostream& out, const std::string& reference,
                    const std::vector<WdlRow>& rows);

}  // namespace carp
