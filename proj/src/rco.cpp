#include "carp/rco.hpp"

#include <algorithm>
#include <stdexcept>

namespace carp {

void RcoParams::check() const {
  if (!(lambda >= 0.0 && lambda <= 1.0) || !(theta >= 0.0 && theta <= 1.0)) {
    throw std::invalid_argument("cutting probabilities must lie in [0, 1]");
  }
}

double average_task_rank(const Solution& solution, const Instance& instance,
                         const RankMatrix& ranks) {
  std::uint64_t sum = 0;
  std::uint64_t links = 0;
  for (const Route& route : solution.routes) {
    auto interior = route.interior();
    for (std::size_t i = 0; i + 1 < interior.size(); ++i) {
      sum += ranks(instance.task_of(interior[i]), instance.task_of(interior[i + 1]));
      ++links;
    }
  }
  return links == 0 ? 0.0 : static_cast<double>(sum) / static_cast<double>(links);
}

LinkPartition classify_links(const Route& route, const Instance& instance, const RankMatrix& ranks,
                             double average) {
  LinkPartition part;
  auto interior = route.interior();
  for (std::size_t i = 0; i + 1 < interior.size(); ++i) {
    double rank = ranks(instance.task_of(interior[i]), instance.task_of(interior[i + 1]));
    (rank < average ? part.good : part.poor).push_back(static_cast<int>(i));
  }
  return part;
}

std::vector<SubRoute> cut_route(std::span<const TaskId> interior, int route_index,
                                std::vector<int> cut_links) {
  std::ranges::sort(cut_links);
  auto dup = std::ranges::unique(cut_links);
  cut_links.erase(dup.begin(), dup.end());

  std::vector<SubRoute> pieces;
  std::size_t begin = 0;
  auto emit = [&](std::size_t end) {
    SubRoute piece;
    piece.ids.assign(interior.begin() + static_cast<std::ptrdiff_t>(begin),
                     interior.begin() + static_cast<std::ptrdiff_t>(end));
    piece.route = route_index;
    piece.offset = static_cast<int>(begin);
    pieces.push_back(std::move(piece));
    begin = end;
  };
  for (int link : cut_links) {
    if (link < 0 || static_cast<std::size_t>(link) + 1 >= interior.size()) {
      throw std::out_of_range("cut position outside the route's links");
    }
    emit(static_cast<std::size_t>(link) + 1);
  }
  if (begin < interior.size()) emit(interior.size());
  return pieces;
}

SubRoutePool rco_split(const Solution& solution, const Instance& instance, const RankMatrix& ranks,
                       const RcoParams& params, Rng& rng) {
  params.check();
  const double average = average_task_rank(solution, instance, ranks);
  SubRoutePool pool;
  for (std::size_t k = 0; k < solution.routes.size(); ++k) {
    const Route& route = solution.routes[k];
    if (route.empty()) continue;
    LinkPartition links = classify_links(route, instance, ranks, average);
    std::vector<int> cuts;
    if (rng.uniform01() < params.lambda && !links.good.empty()) {
      cuts.push_back(links.good[rng.index(links.good.size())]);
    }
    if (rng.uniform01() < params.theta && !links.poor.empty()) {
      cuts.push_back(links.poor[rng.index(links.poor.size())]);
    }
    auto pieces = cut_route(route.interior(), static_cast<int>(k), std::move(cuts));
    std::ranges::move(pieces, std::back_inserter(pool));
  }
  return pool;
}

SubRoutePool random_split(const Solution& solution, Rng& rng) {
  SubRoutePool pool;
  for (std::size_t k = 0; k < solution.routes.size(); ++k) {
    const Route& route = solution.routes[k];
    if (route.empty()) continue;
    std::vector<int> cuts;
    if (route.task_count() >= 2) cuts.push_back(static_cast<int>(rng.index(route.task_count() - 1)));
    auto pieces = cut_route(route.interior(), static_cast<int>(k), std::move(cuts));
    std::ranges::move(pieces, std::back_inserter(pool));
  }
  return pool;
}

SubRoutePool whole_routes(const Solution& solution) {
  SubRoutePool pool;
  for (std::size_t k = 0; k < solution.routes.size(); ++k) {
    const Route& route = solution.routes[k];
    if (route.empty()) continue;
    auto interior = route.interior();
    pool.push_back(SubRoute{std::vector<TaskId>(interior.begin(), interior.end()),
                            static_cast<int>(k), 0});
  }
  return pool;
}

}  // namespace carp
