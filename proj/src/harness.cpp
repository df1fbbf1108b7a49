#include "carp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "carp/stats.hpp"

namespace carp {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw std::invalid_argument("bad boolean '" + std::string(text) + "' for " + std::string(key));
}

std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> words;
  while (true) {
    s = trim(s);
    if (s.empty()) break;
    const auto end = s.find_first_of(" \t");
    words.push_back(s.substr(0, end));
    if (end == std::string_view::npos) break;
    s = s.substr(end);
  }
  return words;
}

std::pair<std::string_view, std::string_view> split_pair(std::string_view s, char sep) {
  const auto pos = s.find(sep);
  if (pos == std::string_view::npos) return {trim(s), {}};
  return {trim(s.substr(0, pos)), trim(s.substr(pos + 1))};
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

std::string format_fixed(double value, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << value;
  return out.str();
}

}  // namespace

BudgetRule BudgetRule::parse(std::string_view text) {
  BudgetRule rule;
  auto [kind, value] = split_pair(text, ':');
  if (value.empty()) {
    value = kind;
    kind = "fixed";
  }
  if (kind == "fixed") {
    rule.kind = Kind::fixed;
  } else if (kind == "per-knodes") {
    rule.kind = Kind::per_knodes;
  } else {
    throw std::invalid_argument("unknown budget rule '" + std::string(text) +
                                "' (expected S, fixed:S or per-knodes:S)");
  }
  rule.seconds = parse_number<double>("budget", value);
  if (!(rule.seconds > 0.0)) throw std::invalid_argument("budget must be positive");
  return rule;
}

double BudgetRule::limit_for(const Instance& instance) const {
  const double base = kind == Kind::fixed
                          ? seconds
                          : seconds * static_cast<double>(instance.vertex_count()) / 1000.0;
  return base * multiplier;
}

std::string BudgetRule::describe() const {
  std::ostringstream out;
  out << (kind == Kind::fixed ? "fixed:" : "per-knodes:") << seconds;
  if (multiplier != 1.0) out << " x" << multiplier;
  return out.str();
}

void ExperimentSpec::check() const {
  if (instances.empty()) throw std::invalid_argument("experiment lists no instances");
  if (variants.empty()) throw std::invalid_argument("experiment lists no variants");
  if (runs < 1) throw std::invalid_argument("runs must be at least 1");
  if (!(budget.multiplier > 0.0)) throw std::invalid_argument("budget multiplier must be positive");
  std::vector<std::string> names;
  for (const Variant& v : variants) {
    v.config.check();
    names.push_back(v.name);
  }
  std::ranges::sort(names);
  if (std::ranges::adjacent_find(names) != names.end()) {
    throw std::invalid_argument("duplicate variant name '" + *std::ranges::adjacent_find(names) + "'");
  }
}

void apply_config_key(SearchConfig& config, std::string_view key, std::string_view value) {
  if (key == "algorithm") {
    config.algorithm = parse_algorithm(value);
  } else if (key == "lambda") {
    config.rco.lambda = parse_number<double>(key, value);
  } else if (key == "theta") {
    config.rco.theta = parse_number<double>(key, value);
  } else if (key == "groups") {
    config.cluster.groups = parse_number<int>(key, value);
  } else if (key == "alpha") {
    config.cluster.fuzziness = parse_number<double>(key, value);
  } else if (key == "scale") {
    config.scale = parse_number<double>(key, value);
  } else if (key == "accept") {
    config.accept_threshold = parse_number<double>(key, value);
  } else if (key == "idle") {
    config.idle_limit = parse_number<std::uint64_t>(key, value);
  } else if (key == "cycles") {
    config.max_cycles = parse_number<int>(key, value);
  } else if (key == "pool") {
    config.pool_size = parse_number<int>(key, value);
  } else if (key == "sub-moves") {
    config.sub_solver_moves = parse_number<std::size_t>(key, value);
  } else if (key == "sub-ms") {
    config.sub_solver_ms = parse_number<double>(key, value);
  } else if (key == "parallel") {
    config.parallel_groups = parse_bool(key, value);
  } else if (key == "clock") {
    if (value == "wall") {
      config.clock = ClockMode::wall;
    } else if (value == "work") {
      config.clock = ClockMode::work;
    } else {
      throw std::invalid_argument("clock must be wall or work, got '" + std::string(value) + "'");
    }
  } else {
    throw std::invalid_argument("unknown configuration key '" + std::string(key) + "'");
  }
}

ExperimentSpec parse_experiment_spec(std::istream& in, const std::filesystem::path& base_dir) {
  ExperimentSpec spec;
  std::vector<std::pair<std::string, std::string>> defaults;
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> variants;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto [key, value] = split_pair(text, '=');
    if (key.empty() || value.empty()) {
      throw ParseError(line_no, "expected 'key = value', got '" + std::string(text) + "'");
    }
    try {
      if (key == "instance") {
        std::filesystem::path p{std::string(value)};
        spec.instances.push_back(p.is_relative() && !base_dir.empty() ? base_dir / p : p);
      } else if (key == "variant") {
        const auto words = split_words(value);
        std::vector<std::pair<std::string, std::string>> overrides;
        for (std::size_t i = 1; i < words.size(); ++i) {
          const auto [k, v] = split_pair(words[i], '=');
          if (v.empty()) throw std::invalid_argument("expected key=value, got '" + std::string(words[i]) + "'");
          overrides.emplace_back(k, v);
        }
        variants.emplace_back(std::string(words.front()), std::move(overrides));
      } else if (key == "runs") {
        spec.runs = parse_number<int>(key, value);
      } else if (key == "base_seed") {
        spec.base_seed = parse_number<std::uint64_t>(key, value);
      } else if (key == "budget") {
        const double multiplier = spec.budget.multiplier;
        spec.budget = BudgetRule::parse(value);
        spec.budget.multiplier = multiplier;
      } else if (key == "time_limit") {
        spec.budget.kind = BudgetRule::Kind::fixed;
        spec.budget.seconds = parse_number<double>(key, value);
      } else if (key == "multiplier") {
        spec.budget.multiplier = parse_number<double>(key, value);
      } else if (key == "workers") {
        spec.workers = parse_number<unsigned>(key, value);
      } else if (key == "out_dir") {
        spec.out_dir = std::string(value);
      } else {
        SearchConfig probe;
        apply_config_key(probe, key, value);
        defaults.emplace_back(key, value);
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  for (auto& [name, overrides] : variants) {
    Variant variant{name, SearchConfig{}};
    for (const auto& [k, v] : defaults) apply_config_key(variant.config, k, v);
    for (const auto& [k, v] : overrides) apply_config_key(variant.config, k, v);
    spec.variants.push_back(std::move(variant));
  }
  return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open experiment spec " + path.string());
  try {
    return parse_experiment_spec(in, path.parent_path());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path.string());
  }
}

std::vector<RunRecord> run_experiment(const ExperimentSpec& spec) {
  spec.check();
  std::vector<std::shared_ptr<const Problem>> problems;
  for (const auto& path : spec.instances) problems.push_back(Problem::build(load_instance_file(path)));

  struct Cell {
    std::size_t instance;
    std::size_t variant;
    int run;
  };
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    for (std::size_t v = 0; v < spec.variants.size(); ++v) {
      for (int r = 0; r < spec.runs; ++r) cells.push_back({i, v, r});
    }
  }
  std::vector<RunRecord> records(cells.size());

  auto run_cell = [&](std::size_t index) {
    const Cell& cell = cells[index];
    const Problem& problem = *problems[cell.instance];
    const Variant& variant = spec.variants[cell.variant];
    RunRecord& record = records[index];
    record.instance = problem.instance.name();
    record.variant = variant.name;
    record.run = cell.run;
    record.seed = spec.base_seed + static_cast<std::uint64_t>(cell.run);
    const auto dir = spec.out_dir / record.instance / variant.name;
    record.trace_path = dir / ("run" + std::to_string(cell.run) + ".trace.csv");
    record.solution_path = dir / ("run" + std::to_string(cell.run) + ".sol");
    try {
      std::filesystem::create_directories(dir);
      SearchConfig config = variant.config;
      config.seed = record.seed;
      config.time_limit = spec.budget.limit_for(problem.instance);
      std::ofstream trace(record.trace_path);
      if (!trace) throw std::runtime_error("cannot write " + record.trace_path.string());
      write_trace_header(trace);
      SearchResult result =
          solve(problem, config, [&trace](const TracePoint& p) { write_trace_row(trace, p); });
      {
        std::ofstream sol(record.solution_path);
        if (!sol) throw std::runtime_error("cannot write " + record.solution_path.string());
        write_solution(sol, result.best, problem.instance);
      }
      std::ifstream check(record.solution_path);
      const Solution stored = read_solution(check, problem.instance, problem.dist);
      const ValidationReport report = validate(stored, problem.instance);
      if (!report.feasible()) {
        throw std::runtime_error("stored solution infeasible: " + report.violations.front().message);
      }
      if (stored.total_cost != result.best.total_cost) {
        throw std::runtime_error("stored solution costs " + std::to_string(stored.total_cost) +
                                 ", search reported " + std::to_string(result.best.total_cost));
      }
      record.final_cost = stored.total_cost;
      record.routes = stored.routes.size();
      record.elapsed_s = result.trace.points().empty()
                             ? 0.0
                             : result.trace.points().back().elapsed_ms / 1000.0;
    } catch (const std::exception& e) {
      record.ok = false;
      record.error = e.what();
    }
  };

  unsigned workers = spec.workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                       : spec.workers;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(cells.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(i);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::filesystem::create_directories(spec.out_dir);
  {
    std::ofstream out(spec.out_dir / "runs.csv");
    write_runs_csv(out, records);
  }
  const auto cells_summary = summarize(records);
  {
    std::ofstream out(spec.out_dir / "summary.csv");
    write_summary_csv(out, cells_summary);
  }
  {
    std::ofstream out(spec.out_dir / "summary.txt");
    write_summary_text(out, cells_summary);
  }
  return records;
}

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "instance,variant,run,seed,final_cost,elapsed_s,routes,trace_path,solution_path,ok,error\n";
  for (const RunRecord& r : records) {
    out << csv_field(r.instance) << ',' << csv_field(r.variant) << ',' << r.run << ',' << r.seed
        << ',' << r.final_cost << ',' << format_fixed(r.elapsed_s, 3) << ',' << r.routes << ','
        << csv_field(r.trace_path.string()) << ',' << csv_field(r.solution_path.string()) << ','
        << (r.ok ? 1 : 0) << ',' << csv_field(r.error) << '\n';
  }
}

std::vector<RunRecord> read_runs_csv(std::istream& in) {
  std::vector<RunRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 11) throw ParseError(line_no, "expected 11 fields, got " + std::to_string(f.size()));
    try {
      RunRecord r;
      r.instance = f[0];
      r.variant = f[1];
      r.run = parse_number<int>("run", f[2]);
      r.seed = parse_number<std::uint64_t>("seed", f[3]);
      r.final_cost = parse_number<Cost>("final_cost", f[4]);
      r.elapsed_s = parse_number<double>("elapsed_s", f[5]);
      r.routes = parse_number<std::size_t>("routes", f[6]);
      r.trace_path = f[7];
      r.solution_path = f[8];
      r.ok = f[9] == "1";
      r.error = f[10];
      records.push_back(std::move(r));
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return records;
}

std::vector<CellSummary> summarize(const std::vector<RunRecord>& records) {
  std::map<std::pair<std::string, std::string>, std::vector<const RunRecord*>> groups;
  std::vector<std::pair<std::string, std::string>> order;
  for (const RunRecord& r : records) {
    auto key = std::make_pair(r.instance, r.variant);
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<CellSummary> cells;
  for (const auto& key : order) {
    CellSummary cell{key.first, key.second};
    std::vector<double> costs;
    for (const RunRecord* r : groups[key]) {
      if (!r->ok) {
        ++cell.failures;
        continue;
      }
      costs.push_back(static_cast<double>(r->final_cost));
      cell.best = costs.size() == 1 ? r->final_cost : std::min(cell.best, r->final_cost);
      cell.worst = costs.size() == 1 ? r->final_cost : std::max(cell.worst, r->final_cost);
    }
    cell.runs = static_cast<int>(costs.size());
    cell.mean = mean(costs);
    cell.stddev = stddev(costs);
    cell.single_run = costs.size() == 1;
    cells.push_back(std::move(cell));
  }
  return cells;
}

void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
  out << "instance,variant,runs,failures,mean,std,best,worst,std_flag\n";
  for (const CellSummary& c : cells) {
    out << csv_field(c.instance) << ',' << csv_field(c.variant) << ',' << c.runs << ','
        << c.failures << ',' << format_fixed(c.mean, 2) << ',' << format_fixed(c.stddev, 2) << ','
        << c.best << ',' << c.worst << ',' << (c.single_run ? "single-run" : "") << '\n';
  }
}

void write_summary_text(std::ostream& out, const std::vector<CellSummary>& cells) {
  std::size_t wi = 8;
  std::size_t wv = 7;
  for (const CellSummary& c : cells) {
    wi = std::max(wi, c.instance.size());
    wv = std::max(wv, c.variant.size());
  }
  out << std::left << std::setw(static_cast<int>(wi)) << "instance" << "  "
      << std::setw(static_cast<int>(wv)) << "variant" << std::right << "  " << std::setw(5)
      << "runs" << "  " << std::setw(12) << "mean" << "  " << std::setw(10) << "std" << "  "
      << std::setw(10) << "best" << "  " << std::setw(10) << "worst" << '\n';
  for (const CellSummary& c : cells) {
    out << std::left << std::setw(static_cast<int>(wi)) << c.instance << "  "
        << std::setw(static_cast<int>(wv)) << c.variant << std::right << "  " << std::setw(5)
        << c.runs << "  " << std::setw(12) << format_fixed(c.mean, 2) << "  " << std::setw(10)
        << format_fixed(c.stddev, 2) << "  " << std::setw(10) << c.best << "  " << std::setw(10)
        << c.worst;
    if (c.single_run) out << "  (single run, std reported as 0)";
    if (c.failures > 0) out << "  (" << c.failures << " failed)";
    out << '\n';
  }
}

std::vector<WdlRow> significance_table(const std::vector<RunRecord>& records,
                                       const std::string& reference, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  std::vector<std::string> instances;
  std::vector<std::string> variants;
  std::map<std::pair<std::string, std::string>, std::vector<double>> costs;
  for (const RunRecord& r : records) {
    if (std::ranges::find(instances, r.instance) == instances.end()) instances.push_back(r.instance);
    if (std::ranges::find(variants, r.variant) == variants.end()) variants.push_back(r.variant);
    auto& sample = costs[{r.instance, r.variant}];
    if (r.ok) sample.push_back(static_cast<double>(r.final_cost));
  }
  if (variants.size() < 2) throw std::invalid_argument("need at least two variants to compare");
  if (std::ranges::find(variants, reference) == variants.end()) {
    throw std::invalid_argument("reference variant '" + reference + "' not found");
  }
  for (const std::string& inst : instances) {
    const std::size_t expected = costs[{inst, reference}].size();
    for (const std::string& var : variants) {
      const std::size_t got = costs[{inst, var}].size();
      if (got != expected) {
        throw std::invalid_argument("run count mismatch at instance '" + inst + "', variant '" + var +
                                    "': " + std::to_string(got) + " vs " +
                                    std::to_string(expected) + " for '" + reference + "'");
      }
    }
  }

  std::vector<WdlRow> rows;
  for (const std::string& var : variants) {
    if (var == reference) continue;
    WdlRow row;
    row.variant = var;
    for (const std::string& inst : instances) {
      const auto& ref = costs[{inst, reference}];
      const auto& other = costs[{inst, var}];
      Comparison cmp{inst, mean(ref), mean(other)};
      cmp.p_value = wilcoxon_rank_sum(ref, other).p_value;
      if (cmp.p_value < alpha && cmp.reference_mean < cmp.other_mean) {
        cmp.outcome = Outcome::win;
        ++row.wins;
      } else if (cmp.p_value < alpha && cmp.reference_mean > cmp.other_mean) {
        cmp.outcome = Outcome::loss;
        ++row.losses;
      } else {
        ++row.draws;
      }
      row.comparisons.push_back(std::move(cmp));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

char outcome_symbol(Outcome o) {
  switch (o) {
    case Outcome::win: return '+';
    case Outcome::loss: return '-';
    case Outcome::draw: return '~';
  }
  return '?';
}

}  // namespace

void write_wdl_csv(std::ostream& out, const std::string& reference, const std::vector<WdlRow>& rows) {
  out << "reference,variant,instance,reference_mean,variant_mean,p_value,outcome\n";
  for (const WdlRow& row : rows) {
    for (const Comparison& c : row.comparisons) {
      out << csv_field(reference) << ',' << csv_field(row.variant) << ',' << csv_field(c.instance)
          << ',' << format_fixed(c.reference_mean, 2) << ',' << format_fixed(c.other_mean, 2) << ','
          << std::setprecision(6) << c.p_value << ',' << outcome_symbol(c.outcome) << '\n';
    }
    out << csv_field(reference) << ',' << csv_field(row.variant) << ",W-D-L,,,,"
        << row.wins << '-' << row.draws << '-' << row.losses << '\n';
  }
}

void write_wdl_text(std::ostream& out, const std::string& reference, const std::vector<WdlRow>& rows) {
  out << "reference: " << reference << " ('+' reference better, '-' worse, '~' comparable)\n";
  for (const WdlRow& row : rows) {
    out << "vs " << row.variant << '\n';
    std::size_t wi = 8;
    for (const Comparison& c : row.comparisons) wi = std::max(wi, c.instance.size());
    for (const Comparison& c : row.comparisons) {
      out << "  " << std::left << std::setw(static_cast<int>(wi)) << c.instance << std::right
          << "  " << std::setw(12) << format_fixed(c.reference_mean, 2) << "  " << std::setw(12)
          << format_fixed(c.other_mean, 2) << "  p=" << std::setw(9) << std::setprecision(4)
          << c.p_value << "  " << outcome_symbol(c.outcome) << '\n';
    }
    out << "  W-D-L " << row.wins << '-' << row.draws << '-' << row.losses << '\n';
  }
}

}  // namespace carp
