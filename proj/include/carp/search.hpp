#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "carp/decomposition.hpp"
#include "carp/instance.hpp"
#include "carp/local_search.hpp"
#include "carp/rank_matrix.hpp"
#include "carp/rco.hpp"
#include "carp/rng.hpp"
#include "carp/solution.hpp"
#include "carp/stopwatch.hpp"

namespace carp {

// Instance plus everything derived from it once. Shared read-only by workers.
struct Problem {
  Instance instance;
  DistanceTable dist;
  RankMatrix ranks;

  static std::shared_ptr<const Problem> build(Instance instance);
};

enum class Algorithm {
  sahid_rco,            // hierarchical decomposition loop, RCO splitting
  sahid_random,         // same loop, one random cut per route
  cluster_rco,          // grouped sub-problem loop, RCO sub-routes
  cluster_whole_route,  // same loop, whole routes
  local_only,           // restarted path scanning + local search
};

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

struct SearchConfig {
  Algorithm algorithm = Algorithm::sahid_rco;
  RcoParams rco;
  ClusterConfig cluster;
  double scale = 0.1;
  double accept_threshold = 1.10;
  std::uint64_t idle_limit = 10000;
  int max_cycles = 50;
  double time_limit = 60.0;  // seconds
  std::uint64_t seed = 1;
  std::size_t sub_solver_moves = 0;  // 0: each sub-problem descends to a local optimum
  double sub_solver_ms = 0.0;        // 0: bounded only by the overall time limit
  int pool_size = 5;                 // incumbent solutions kept by the cluster loop
  bool parallel_groups = true;
  ClockMode clock = ClockMode::wall;

  void check() const;
};

struct TracePoint {
  double elapsed_ms = 0.0;
  Cost best_cost = 0;
};

struct CycleInfo {
  std::uint64_t iteration = 0;
  std::size_t subroutes = 0;
  std::size_t groups = 0;
  Cost candidate_cost = 0;
  bool accepted = false;
};

class SearchTrace {
 public:
  using Sink = std::function<void(const TracePoint&)>;

  void set_sink(Sink sink) { sink_ = std::move(sink); }

  // Appends a sample if it improves on the last one (or is the first).
  void improve(double elapsed_ms, Cost cost);
  // Final sample at termination; always emitted.
  void finish(double elapsed_ms);

  const std::vector<TracePoint>& points() const { return points_; }
  bool monotone() const;

  std::uint64_t iterations = 0;
  std::uint64_t accepted = 0;
  std::vector<CycleInfo> cycles;
  std::vector<std::string> warnings;

 private:
  std::vector<TracePoint> points_;
  Sink sink_;
};

// "elapsed_ms,best_cost" rows under a header.
void write_trace_csv(std::ostream& out, const SearchTrace& trace);
void write_trace_header(std::ostream& out);
void write_trace_row(std::ostream& out, const TracePoint& point);

struct SearchResult {
  Solution best;
  SearchTrace trace;
};

// Greedy constructor: from the end of the current route serve the closest
// unserved task that still fits (ties uniform at random); return to the depot
// when nothing fits.
Solution path_scanning(const Instance& instance, const DistanceTable& dist, Rng& rng);

// Restricts a solution to a task subset: out-of-subset tasks are deleted and
// emptied routes dropped.
Solution project(const Solution& solution, const std::vector<char>& in_subset,
                 const Instance& instance, const DistanceTable& dist);

// Decompose / rebuild / improve loop seeded by hierarchical construction.
SearchResult rco_sahid(const Problem& problem, const SearchConfig& config, Rng& rng,
                       SearchTrace::Sink sink = {});

// Cycle loop that groups sub-routes of the best solution and improves each
// group's projection of the incumbent pool independently.
SearchResult rco_cluster_search(const Problem& problem, const SearchConfig& config, Rng& rng,
                                SearchTrace::Sink sink = {});

SearchResult local_only(const Problem& problem, const SearchConfig& config, Rng& rng,
                        SearchTrace::Sink sink = {});

// Dispatches on config.algorithm with a generator seeded from config.seed.
SearchResult solve(const Problem& problem, const SearchConfig& config, SearchTrace::Sink sink = {});

}  // namespace carp
