#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "carp/instance.hpp"

namespace carp {

// Task-ID sequence framed by depot sentinels, with cached load and cost.
struct Route {
  std::vector<TaskId> ids{kDepotId, kDepotId};
  Demand load = 0;
  Cost cost = 0;

  std::size_t task_count() const { return ids.size() - 2; }
  bool empty() const { return ids.size() <= 2; }
  std::span<const TaskId> interior() const {
    return std::span<const TaskId>(ids).subspan(1, ids.size() - 2);
  }
};

struct Solution {
  std::vector<Route> routes;
  Cost total_cost = 0;
};

// Sum over consecutive elements of sc(current) + dist(tail(current), head(next)).
Cost route_cost(std::span<const TaskId> ids, const Instance& instance, const DistanceTable& dist);
Demand route_load(std::span<const TaskId> ids, const Instance& instance);

// Frames a task sequence with depot sentinels and fills the caches.
Route make_route(std::span<const TaskId> interior, const Instance& instance,
                 const DistanceTable& dist);
Solution make_solution(const std::vector<std::vector<TaskId>>& interiors, const Instance& instance,
                       const DistanceTable& dist);

// Recomputes cached loads and costs from scratch.
void refresh(Route& route, const Instance& instance, const DistanceTable& dist);
void refresh(Solution& solution, const Instance& instance, const DistanceTable& dist);

// True when every cached value equals its recomputation.
bool caches_consistent(const Solution& solution, const Instance& instance,
                       const DistanceTable& dist);

void strip_empty_routes(Solution& solution);

// Traverses the route backwards, serving every task in the opposite direction.
Route reversed(const Route& route, const Instance& instance);

std::size_t served_task_count(const Solution& solution);

enum class ViolationKind {
  missing_task,
  duplicate_task,
  capacity_exceeded,
  malformed_route,
  unknown_task,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  int route = -1;  // -1 when not tied to a route
  int task = -1;   // task index, -1 when not applicable
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  std::size_t count(ViolationKind kind) const;
};

// Checks depot framing, domain, exactly-once service and capacity.
ValidationReport validate(const Solution& solution, const Instance& instance);

// Same checks for the sub-problem consisting only of `tasks` (task indices).
ValidationReport validate_subset(const Solution& solution, const Instance& instance,
                                 std::span<const int> tasks);

// Capacity lower bound on the number of vehicles: ceil(total demand / Q).
int min_vehicles(const Instance& instance);

// "cost <total>" then "route <k>: (u,v) (u,v) ..." with 1-based head-first pairs.
void write_solution(std::ostream& out, const Solution& solution, const Instance& instance);

// Inverse of write_solution. A pair is matched to the first not-yet-used task ID
// with those endpoints, so parallel required edges are assigned in file order.
Solution read_solution(std::istream& in, const Instance& instance, const DistanceTable& dist);

}  // namespace carp
