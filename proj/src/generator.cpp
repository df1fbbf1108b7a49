#include "carp/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "carp/rng.hpp"

namespace carp {

namespace {

constexpr double kSide = 1000.0;
constexpr int kNeighbours = 6;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double length(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

Cost rounded(double d) { return std::max<Cost>(1, std::llround(d)); }

}  // namespace

Instance generate_instance(int vertices, int tasks, Demand capacity, std::uint64_t seed) {
  if (vertices < 2) throw std::invalid_argument("need at least 2 vertices");
  if (tasks < 1) throw std::invalid_argument("need at least 1 task");
  if (capacity < 1) throw std::invalid_argument("capacity must be positive");
  const auto n = static_cast<std::size_t>(vertices);
  const std::size_t max_edges = n * (n - 1) / 2;
  if (static_cast<std::size_t>(tasks) > max_edges) {
    throw std::invalid_argument(std::to_string(tasks) + " tasks exceed the " +
                                std::to_string(max_edges) + " possible edges on " +
                                std::to_string(vertices) + " vertices");
  }

  Rng rng(seed);
  std::vector<Point> points(n);
  for (Point& p : points) p = {rng.uniform01() * kSide, rng.uniform01() * kSide};

  std::set<std::pair<int, int>> chosen;
  auto add = [&](std::size_t a, std::size_t b) {
    return chosen.emplace(static_cast<int>(std::min(a, b)), static_cast<int>(std::max(a, b))).second;
  };

  // Prim's spanning tree on the complete Euclidean graph.
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, 0);
  std::vector<char> in_tree(n, 0);
  best[0] = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t u = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_tree[i] && (u == n || best[i] < best[u])) u = i;
    }
    in_tree[u] = 1;
    if (step > 0) add(u, parent[u]);
    for (std::size_t i = 0; i < n; ++i) {
      if (in_tree[i]) continue;
      const double d = length(points[u], points[i]);
      if (d < best[i]) {
        best[i] = d;
        parent[i] = u;
      }
    }
  }

  const std::size_t target =
      std::min(max_edges, std::max(static_cast<std::size_t>(tasks),
                                   static_cast<std::size_t>(std::ceil(1.27 * static_cast<double>(n)))));
  for (int k = kNeighbours; chosen.size() < target; k *= 2) {
    std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> candidates;
    std::vector<std::pair<double, std::size_t>> row;
    for (std::size_t i = 0; i < n; ++i) {
      row.clear();
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) row.emplace_back(length(points[i], points[j]), j);
      }
      const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), row.size());
      std::partial_sort(row.begin(), row.begin() + static_cast<long>(take), row.end());
      for (std::size_t r = 0; r < take; ++r) candidates.push_back({row[r].first, {i, row[r].second}});
    }
    std::ranges::sort(candidates);
    for (const auto& [d, ends] : candidates) {
      if (chosen.size() >= target) break;
      add(ends.first, ends.second);
    }
  }

  std::vector<Edge> edges;
  edges.reserve(chosen.size());
  for (const auto& [a, b] : chosen) {
    const Cost c = rounded(length(points[static_cast<std::size_t>(a)], points[static_cast<std::size_t>(b)]));
    edges.push_back(Edge{a, b, 0, c, c});
  }
  std::vector<std::size_t> order(edges.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  const Demand max_demand = std::max<Demand>(1, capacity / 3);
  for (int t = 0; t < tasks; ++t) {
    edges[order[static_cast<std::size_t>(t)]].demand =
        1 + static_cast<Demand>(rng.index(static_cast<std::size_t>(max_demand)));
  }

  std::ranges::stable_partition(edges, [](const Edge& e) { return e.demand > 0; });

  std::string name = "gen-n" + std::to_string(vertices) + "-m" + std::to_string(tasks) + "-s" +
                     std::to_string(seed);
  return Instance(std::move(name), vertices, std::move(edges), 0, capacity);
}

}  // namespace carp
