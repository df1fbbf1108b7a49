#pragma once

#include <cstdint>
#include <limits>

#include "carp/instance.hpp"
#include "carp/rng.hpp"
#include "carp/solution.hpp"
#include "carp/stopwatch.hpp"

namespace carp {

struct LocalSearchBudget {
  Stopwatch* clock = nullptr;  // charged with every move evaluation; may be null
  double deadline_ms = std::numeric_limits<double>::infinity();
  std::size_t max_moves = 0;   // 0: run until no improving move exists
  bool verify_costs = false;   // recompute every touched route and compare with the delta
};

struct LocalSearchStats {
  std::size_t moves = 0;
  std::uint64_t evaluations = 0;
  bool local_optimum = false;
};

// First-improvement descent over relocation, swap, intra-route segment
// reversal and inter-route tail exchange, all in both service directions.
// Candidates are scanned in randomized order. The result is feasible whenever
// the input is, never costs more, and carries no empty routes.
Solution local_search(Solution solution, const Instance& instance, const DistanceTable& dist,
                      const LocalSearchBudget& budget, Rng& rng, LocalSearchStats* stats = nullptr);

}  // namespace carp
