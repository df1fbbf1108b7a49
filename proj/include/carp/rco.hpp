#pragma once

#include <vector>

#include "carp/instance.hpp"
#include "carp/rank_matrix.hpp"
#include "carp/rng.hpp"
#include "carp/solution.hpp"

namespace carp {

// Per-route cutting probabilities: lambda for one good link, theta for one poor link.
struct RcoParams {
  double lambda = 0.05;
  double theta = 0.2;

  void check() const;
};

// Contiguous slice of a route interior, orientation preserved.
struct SubRoute {
  std::vector<TaskId> ids;
  int route = -1;   // index of the originating route
  int offset = 0;   // position of ids.front() within that route's interior
};

using SubRoutePool = std::vector<SubRoute>;

// Links of a route are indexed by position: link i joins interior[i] and interior[i + 1].
struct LinkPartition {
  std::vector<int> good;
  std::vector<int> poor;
};

// Mean rank over all task-to-task links inside routes; depot connections are
// not links. 0 when the solution has no links.
double average_task_rank(const Solution& solution, const Instance& instance,
                         const RankMatrix& ranks);

// A link is good iff its rank is strictly below `average`.
LinkPartition classify_links(const Route& route, const Instance& instance, const RankMatrix& ranks,
                             double average);

// Splits a route interior at the given link positions (any order, duplicates ignored).
std::vector<SubRoute> cut_route(std::span<const TaskId> interior, int route_index,
                                std::vector<int> cut_links);

// Route Cutting Off: per route, cut one random good link with probability
// lambda and one random poor link with probability theta.
SubRoutePool rco_split(const Solution& solution, const Instance& instance, const RankMatrix& ranks,
                       const RcoParams& params, Rng& rng);

// Baseline decompositions: one uniformly random cut per route with at least
// one link, and no cuts at all.
SubRoutePool random_split(const Solution& solution, Rng& rng);
SubRoutePool whole_routes(const Solution& solution);

}  // namespace carp
