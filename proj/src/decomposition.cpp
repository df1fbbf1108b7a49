#include "carp/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "carp/rank_matrix.hpp"
#include "tie_breaker.hpp"

namespace carp {

void ClusterConfig::check() const {
  if (groups < 1) throw std::invalid_argument("group count must be at least 1");
  if (!(fuzziness > 0.0)) throw std::invalid_argument("fuzziness must be positive");
}

double subroute_distance(std::span<const TaskId> a, std::span<const TaskId> b,
                         const Instance& instance, const DistanceTable& dist) {
  if (std::ranges::equal(a, b)) return 0.0;
  Cost sum = 0;
  for (TaskId x : a) {
    const int tx = instance.task_of(x);
    for (TaskId y : b) {
      const int ty = instance.task_of(y);
      if (tx != ty) sum += link_cost_numerator(instance, dist, tx, ty);
    }
  }
  return static_cast<double>(sum) / (4.0 * static_cast<double>(a.size() * b.size()));
}

namespace {

using detail::max_picker;
using detail::min_picker;

// Farthest-point medoid selection over an n x n distance oracle.
template <class Key, class Distance>
std::vector<std::size_t> farthest_point_medoids(std::size_t n, std::size_t k, Distance&& distance,
                                                Rng& rng) {
  std::vector<std::size_t> medoids;
  medoids.push_back(rng.index(n));
  std::vector<Key> nearest(n, std::numeric_limits<Key>::max());
  std::vector<char> chosen(n, 0);
  chosen[medoids.front()] = 1;
  while (medoids.size() < k) {
    const std::size_t last = medoids.back();
    auto pick = max_picker<Key>(rng);
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      nearest[i] = std::min(nearest[i], distance(i, last));
      pick.offer(i, nearest[i]);
    }
    medoids.push_back(pick.best());
    chosen[pick.best()] = 1;
  }
  return medoids;
}

}  // namespace

Grouping fuzzy_kmedoid(const SubRoutePool& pool, const ClusterConfig& config,
                       const Instance& instance, const DistanceTable& dist, Rng& rng) {
  config.check();
  if (pool.empty()) throw std::invalid_argument("cannot cluster an empty sub-route pool");
  const std::size_t n = pool.size();
  Grouping result;
  auto g = static_cast<std::size_t>(config.groups);
  if (g > n) {
    result.warning = "group count reduced from " + std::to_string(g) + " to " + std::to_string(n) +
                     " (only " + std::to_string(n) + " sub-routes)";
    g = n;
  }

  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d[i * n + j] = d[j * n + i] = subroute_distance(pool[i].ids, pool[j].ids, instance, dist);
    }
  }
  auto D = [&](std::size_t i, std::size_t j) { return d[i * n + j]; };

  std::vector<std::size_t> medoids = farthest_point_medoids<double>(n, g, D, rng);
  std::vector<int> assignment(n, -1);
  std::vector<int> previous;
  std::vector<double> weight(g);
  constexpr int kMaxIterations = 20;

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    result.iterations = iter + 1;
    std::vector<int> medoid_group(n, -1);
    for (std::size_t c = 0; c < g; ++c) medoid_group[medoids[c]] = static_cast<int>(c);

    for (std::size_t i = 0; i < n; ++i) {
      if (medoid_group[i] >= 0) {
        assignment[i] = medoid_group[i];
        continue;
      }
      auto closest = min_picker<double>(rng);
      for (std::size_t c = 0; c < g; ++c) closest.offer(c, D(i, medoids[c]));
      const double dmin = closest.key();
      if (dmin <= 0.0) {
        assignment[i] = static_cast<int>(closest.best());
        continue;
      }
      // weights relative to the nearest medoid keep large alpha finite
      double total = 0.0;
      for (std::size_t c = 0; c < g; ++c) {
        weight[c] = std::exp(-config.fuzziness * (std::log(D(i, medoids[c])) - std::log(dmin)));
        total += weight[c];
      }
      double r = rng.uniform01() * total;
      std::size_t chosen = g - 1;
      for (std::size_t c = 0; c < g; ++c) {
        if (r < weight[c]) {
          chosen = c;
          break;
        }
        r -= weight[c];
      }
      assignment[i] = static_cast<int>(chosen);
    }

    // Empty groups take the sub-route farthest from its own medoid.
    std::vector<std::size_t> sizes(g, 0);
    for (int a : assignment) ++sizes[static_cast<std::size_t>(a)];
    for (std::size_t c = 0; c < g; ++c) {
      if (sizes[c] > 0) continue;
      auto far = max_picker<double>(rng);
      for (std::size_t i = 0; i < n; ++i) {
        const auto own = static_cast<std::size_t>(assignment[i]);
        if (sizes[own] > 1) far.offer(i, D(i, medoids[own]));
      }
      const std::size_t moved = far.best();
      --sizes[static_cast<std::size_t>(assignment[moved])];
      assignment[moved] = static_cast<int>(c);
      medoids[c] = moved;
      sizes[c] = 1;
    }

    if (assignment == previous) break;
    previous = assignment;

    for (std::size_t c = 0; c < g; ++c) {
      auto best = min_picker<double>(rng);
      for (std::size_t i = 0; i < n; ++i) {
        if (assignment[i] != static_cast<int>(c)) continue;
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (assignment[j] == static_cast<int>(c)) total += D(i, j);
        }
        best.offer(i, total);
      }
      medoids[c] = best.best();
    }
  }

  result.assignment = assignment;
  result.members.assign(g, {});
  for (std::size_t i = 0; i < n; ++i) {
    result.members[static_cast<std::size_t>(assignment[i])].push_back(static_cast<int>(i));
  }
  result.medoids.assign(medoids.begin(), medoids.end());
  return result;
}

std::vector<std::vector<int>> group_tasks(const SubRoutePool& pool, const Grouping& grouping,
                                          const Instance& instance) {
  std::vector<std::vector<int>> groups(grouping.members.size());
  for (std::size_t c = 0; c < grouping.members.size(); ++c) {
    for (int member : grouping.members[c]) {
      for (TaskId id : pool[static_cast<std::size_t>(member)].ids) {
        groups[c].push_back(instance.task_of(id));
      }
    }
  }
  return groups;
}

VirtualTask make_virtual_task(std::vector<TaskId> ids, const Instance& instance,
                              const DistanceTable& dist) {
  if (ids.empty()) throw std::invalid_argument("a virtual task needs at least one task");
  VirtualTask unit;
  unit.demand = route_load(ids, instance);
  unit.internal_cost = route_cost(ids, instance, dist) + instance.service_cost(ids.back());
  unit.head = instance.head(ids.front());
  unit.tail = instance.tail(ids.back());
  unit.ids = std::move(ids);
  return unit;
}

VirtualTask reversed(const VirtualTask& unit, const Instance& instance) {
  VirtualTask out = unit;
  std::reverse(out.ids.begin(), out.ids.end());
  for (TaskId& id : out.ids) id = instance.inverse(id);
  std::swap(out.head, out.tail);
  return out;
}

std::vector<VirtualTask> build_virtual_tasks(const SubRoutePool& pool, const Instance& instance,
                                             const DistanceTable& dist) {
  if (pool.empty()) throw std::invalid_argument("cannot build virtual tasks from an empty pool");
  std::vector<VirtualTask> units;
  units.reserve(pool.size());
  for (const SubRoute& sub : pool) units.push_back(make_virtual_task(sub.ids, instance, dist));
  return units;
}

std::vector<VirtualTask> elementary_units(const Instance& instance, const DistanceTable& dist) {
  std::vector<VirtualTask> units;
  units.reserve(static_cast<std::size_t>(instance.task_count()));
  for (int t = 0; t < instance.task_count(); ++t) {
    units.push_back(make_virtual_task({instance.forward_id(t)}, instance, dist));
  }
  return units;
}

Cost endpoint_distance(const VirtualTask& a, const VirtualTask& b, const DistanceTable& dist) {
  return std::min({dist(a.head, b.head), dist(a.head, b.tail), dist(a.tail, b.head),
                   dist(a.tail, b.tail)});
}

Solution greedy_split(std::span<const TaskId> sequence, const Instance& instance,
                      const DistanceTable& dist) {
  std::vector<std::vector<TaskId>> routes;
  Demand load = 0;
  for (TaskId id : sequence) {
    if (routes.empty() || load + instance.demand(id) > instance.capacity()) {
      routes.emplace_back();
      load = 0;
    }
    routes.back().push_back(id);
    load += instance.demand(id);
  }
  return make_solution(routes, instance, dist);
}

namespace {

VirtualTask chain_cluster(std::vector<const VirtualTask*> members, const Instance& instance,
                          const DistanceTable& dist, Rng& rng) {
  const std::size_t start = rng.index(members.size());
  std::vector<TaskId> ids;
  auto append = [&](const VirtualTask& unit, bool flip) {
    if (!flip) {
      ids.insert(ids.end(), unit.ids.begin(), unit.ids.end());
    } else {
      for (auto it = unit.ids.rbegin(); it != unit.ids.rend(); ++it) {
        ids.push_back(instance.inverse(*it));
      }
    }
    return flip ? unit.head : unit.tail;
  };

  Vertex end = append(*members[start], rng.bernoulli(0.5));
  std::swap(members[start], members.back());
  members.pop_back();
  while (!members.empty()) {
    auto next = min_picker<Cost>(rng);
    for (std::size_t i = 0; i < members.size(); ++i) {
      next.offer(i, std::min(dist(end, members[i]->head), dist(end, members[i]->tail)));
    }
    const VirtualTask& unit = *members[next.best()];
    const Cost forward = dist(end, unit.head);
    const Cost backward = dist(end, unit.tail);
    const bool flip = forward == backward ? rng.bernoulli(0.5) : backward < forward;
    end = append(unit, flip);
    std::swap(members[next.best()], members.back());
    members.pop_back();
  }
  return make_virtual_task(std::move(ids), instance, dist);
}

}  // namespace

Solution hdu(std::vector<VirtualTask> units, const Instance& instance, const DistanceTable& dist,
             double scale, Rng& rng) {
  if (units.empty()) throw std::invalid_argument("hdu needs at least one unit");
  if (!(scale > 0.0 && scale < 1.0)) throw std::invalid_argument("hdu scale must lie in (0, 1)");

  while (units.size() > 1) {
    const std::size_t m = units.size();
    auto k = static_cast<std::size_t>(std::ceil(scale * static_cast<double>(m)));
    k = std::clamp<std::size_t>(k, 1, m - 1);

    auto distance = [&](std::size_t i, std::size_t j) {
      return endpoint_distance(units[i], units[j], dist);
    };
    std::vector<std::size_t> medoids = farthest_point_medoids<Cost>(m, k, distance, rng);

    std::vector<std::vector<const VirtualTask*>> clusters(k);
    std::vector<int> medoid_cluster(m, -1);
    for (std::size_t c = 0; c < k; ++c) medoid_cluster[medoids[c]] = static_cast<int>(c);
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t cluster = 0;
      if (medoid_cluster[i] >= 0) {
        cluster = static_cast<std::size_t>(medoid_cluster[i]);
      } else {
        auto nearest = min_picker<Cost>(rng);
        for (std::size_t c = 0; c < k; ++c) nearest.offer(c, distance(i, medoids[c]));
        cluster = nearest.best();
      }
      clusters[cluster].push_back(&units[i]);
    }

    std::vector<VirtualTask> next;
    next.reserve(k);
    for (auto& members : clusters) {
      next.push_back(chain_cluster(std::move(members), instance, dist, rng));
    }
    units = std::move(next);
  }
  return greedy_split(units.front().ids, instance, dist);
}

}  // namespace carp
