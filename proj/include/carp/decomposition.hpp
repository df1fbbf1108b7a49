#pragma once

#include <string>
#include <vector>

#include "carp/instance.hpp"
#include "carp/rco.hpp"
#include "carp/rng.hpp"
#include "carp/solution.hpp"

namespace carp {

struct ClusterConfig {
  int groups = 2;          // g
  double fuzziness = 5.0;  // alpha

  void check() const;
};

// Mean link cost over all cross pairs of tasks; 0 between identical sub-routes.
double subroute_distance(std::span<const TaskId> a, std::span<const TaskId> b,
                         const Instance& instance, const DistanceTable& dist);

struct Grouping {
  std::vector<int> assignment;            // group of each sub-route
  std::vector<std::vector<int>> members;  // sub-route indices per group
  std::vector<int> medoids;               // sub-route index per group
  int iterations = 0;
  std::string warning;                    // set when the group count was reduced
};

// Fuzzy k-medoid grouping of sub-routes. Medoids start from farthest-point
// selection; each sub-route then joins medoid m with probability proportional
// to distance^(-alpha), and medoids move to the member with the least total
// within-group distance. Stops when assignments repeat or after 20 rounds.
Grouping fuzzy_kmedoid(const SubRoutePool& pool, const ClusterConfig& config,
                       const Instance& instance, const DistanceTable& dist, Rng& rng);

// Task indices of each group, in pool order.
std::vector<std::vector<int>> group_tasks(const SubRoutePool& pool, const Grouping& grouping,
                                          const Instance& instance);

// A task sequence handled as one unit; may be traversed in either direction.
struct VirtualTask {
  std::vector<TaskId> ids;
  Demand demand = 0;
  Cost internal_cost = 0;  // service costs plus deadheading between members
  Vertex head = 0;         // head of the first ID
  Vertex tail = 0;         // tail of the last ID
  bool reversible = true;
};

VirtualTask make_virtual_task(std::vector<TaskId> ids, const Instance& instance,
                              const DistanceTable& dist);
VirtualTask reversed(const VirtualTask& unit, const Instance& instance);

// One virtual task per sub-route. Throws std::invalid_argument on an empty pool.
std::vector<VirtualTask> build_virtual_tasks(const SubRoutePool& pool, const Instance& instance,
                                             const DistanceTable& dist);

// Virtual tasks for every elementary task, each in forward orientation.
std::vector<VirtualTask> elementary_units(const Instance& instance, const DistanceTable& dist);

// Cheapest deadheading between any endpoint of `a` and any endpoint of `b`.
Cost endpoint_distance(const VirtualTask& a, const VirtualTask& b, const DistanceTable& dist);

// Cuts a giant task sequence into routes left to right, opening a new route
// whenever the next task would overflow the capacity.
Solution greedy_split(std::span<const TaskId> sequence, const Instance& instance,
                      const DistanceTable& dist);

// Hierarchical construction: repeatedly cluster units around farthest-point
// medoids (ceil(scale * units) clusters), chain each cluster by randomized
// nearest neighbour into a higher-level unit, until one unit remains; then
// greedy_split it.
Solution hdu(std::vector<VirtualTask> units, const Instance& instance, const DistanceTable& dist,
             double scale, Rng& rng);

}  // namespace carp
