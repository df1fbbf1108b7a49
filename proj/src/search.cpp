#include "carp/search.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>
#include <stdexcept>

#include "tie_breaker.hpp"

namespace carp {

std::shared_ptr<const Problem> Problem::build(Instance instance) {
  auto problem = std::make_shared<Problem>();
  problem->dist = shortest_paths(instance);
  problem->ranks = build_rank_matrix(instance, problem->dist);
  problem->instance = std::move(instance);
  return problem;
}

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::sahid_rco: return "sahid-rco";
    case Algorithm::sahid_random: return "sahid-random";
    case Algorithm::cluster_rco: return "cluster-rco";
    case Algorithm::cluster_whole_route: return "cluster-whole-route";
    case Algorithm::local_only: return "local-only";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::sahid_rco, Algorithm::sahid_random, Algorithm::cluster_rco,
                      Algorithm::cluster_whole_route, Algorithm::local_only}) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                              "' (expected sahid-rco, sahid-random, cluster-rco, "
                              "cluster-whole-route or local-only)");
}

void SearchConfig::check() const {
  rco.check();
  cluster.check();
  if (!(scale > 0.0 && scale < 1.0)) throw std::invalid_argument("scale must lie in (0, 1)");
  if (!(accept_threshold >= 1.0)) throw std::invalid_argument("accept threshold must be >= 1");
  if (!(time_limit > 0.0)) throw std::invalid_argument("time limit must be positive");
  if (max_cycles < 0) throw std::invalid_argument("max cycles must be non-negative");
  if (pool_size < 1) throw std::invalid_argument("pool size must be at least 1");
  if (sub_solver_ms < 0.0) throw std::invalid_argument("sub-solver time must be non-negative");
}

void SearchTrace::improve(double elapsed_ms, Cost cost) {
  if (!points_.empty() && cost >= points_.back().best_cost) return;
  points_.push_back(TracePoint{elapsed_ms, cost});
  if (sink_) sink_(points_.back());
}

void SearchTrace::finish(double elapsed_ms) {
  if (points_.empty()) return;
  points_.push_back(TracePoint{elapsed_ms, points_.back().best_cost});
  if (sink_) sink_(points_.back());
}

bool SearchTrace::monotone() const {
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (points_[i].best_cost > points_[i - 1].best_cost) return false;
    if (points_[i].elapsed_ms < points_[i - 1].elapsed_ms) return false;
  }
  return true;
}

void write_trace_header(std::ostream& out) { out << "elapsed_ms,best_cost\n"; }

void write_trace_row(std::ostream& out, const TracePoint& point) {
  out << static_cast<long long>(std::llround(point.elapsed_ms)) << ',' << point.best_cost << '\n';
  out.flush();
}

void write_trace_csv(std::ostream& out, const SearchTrace& trace) {
  write_trace_header(out);
  for (const TracePoint& p : trace.points()) write_trace_row(out, p);
}

Solution path_scanning(const Instance& instance, const DistanceTable& dist, Rng& rng) {
  const int m = instance.task_count();
  std::vector<char> served(static_cast<std::size_t>(m), 0);
  std::vector<std::vector<TaskId>> routes;
  int remaining = m;
  while (remaining > 0) {
    std::vector<TaskId> route;
    Demand load = 0;
    Vertex end = instance.depot();
    while (true) {
      auto pick = detail::min_picker<Cost>(rng);
      for (int t = 0; t < m; ++t) {
        if (served[t] || load + instance.tasks()[t].demand > instance.capacity()) continue;
        for (TaskId id : {instance.forward_id(t), instance.reverse_id(t)}) {
          pick.offer(static_cast<std::size_t>(id), dist(end, instance.head(id)));
        }
      }
      if (pick.empty()) break;
      const auto id = static_cast<TaskId>(pick.best());
      route.push_back(id);
      served[instance.task_of(id)] = 1;
      --remaining;
      load += instance.demand(id);
      end = instance.tail(id);
    }
    routes.push_back(std::move(route));
  }
  return make_solution(routes, instance, dist);
}

Solution project(const Solution& solution, const std::vector<char>& in_subset,
                 const Instance& instance, const DistanceTable& dist) {
  std::vector<std::vector<TaskId>> routes;
  for (const Route& route : solution.routes) {
    std::vector<TaskId> kept;
    for (TaskId id : route.interior()) {
      if (in_subset[instance.task_of(id)]) kept.push_back(id);
    }
    if (!kept.empty()) routes.push_back(std::move(kept));
  }
  return make_solution(routes, instance, dist);
}

namespace {

double deadline_ms(const SearchConfig& config) { return config.time_limit * 1000.0; }

// Logical work charged for steps outside the local search.
constexpr std::uint64_t kIterationOverhead = 64;

Solution concatenate(const std::vector<const Solution*>& parts) {
  Solution out;
  for (const Solution* part : parts) {
    out.routes.insert(out.routes.end(), part->routes.begin(), part->routes.end());
    out.total_cost += part->total_cost;
  }
  return out;
}

}  // namespace

SearchResult rco_sahid(const Problem& problem, const SearchConfig& config, Rng& rng,
                       SearchTrace::Sink sink) {
  config.check();
  if (config.algorithm != Algorithm::sahid_rco && config.algorithm != Algorithm::sahid_random) {
    throw std::invalid_argument("rco_sahid runs sahid-rco or sahid-random only");
  }
  const Instance& instance = problem.instance;
  const DistanceTable& dist = problem.dist;
  const auto m = static_cast<std::uint64_t>(instance.task_count());
  Stopwatch clock(config.clock);
  const double deadline = deadline_ms(config);
  SearchResult result;
  result.trace.set_sink(std::move(sink));
  if (m == 0) {
    result.trace.improve(clock.elapsed_ms(), 0);
    result.trace.finish(clock.elapsed_ms());
    return result;
  }

  LocalSearchBudget budget{&clock, deadline, config.sub_solver_moves, false};
  Solution current = hdu(elementary_units(instance, dist), instance, dist, config.scale, rng);
  clock.charge(kIterationOverhead + 4 * m);
  current = local_search(std::move(current), instance, dist, budget, rng);
  result.best = current;
  result.trace.improve(clock.elapsed_ms(), result.best.total_cost);

  std::uint64_t idle = 0;
  // A single task admits exactly one solution.
  while (m > 1 && clock.elapsed_ms() < deadline) {
    ++result.trace.iterations;
    SubRoutePool pool = config.algorithm == Algorithm::sahid_rco
                            ? rco_split(current, instance, problem.ranks, config.rco, rng)
                            : random_split(current, rng);
    auto units = build_virtual_tasks(pool, instance, dist);
    Solution candidate = hdu(std::move(units), instance, dist, config.scale, rng);
    clock.charge(kIterationOverhead + 4 * m);
    candidate = local_search(std::move(candidate), instance, dist, budget, rng);

    bool accepted = false;
    if (candidate.total_cost < current.total_cost) {
      accepted = true;
    } else if (idle > config.idle_limit &&
               static_cast<double>(candidate.total_cost) <=
                   config.accept_threshold * static_cast<double>(current.total_cost)) {
      accepted = true;
      idle = 0;
    }
    result.trace.cycles.push_back(CycleInfo{result.trace.iterations, pool.size(), 0,
                                            candidate.total_cost, accepted});
    if (candidate.total_cost < result.best.total_cost) {
      result.best = candidate;
      result.trace.improve(clock.elapsed_ms(), result.best.total_cost);
      idle = 0;
    } else {
      ++idle;
    }
    if (accepted) {
      ++result.trace.accepted;
      current = std::move(candidate);
    }
  }
  if (m > 1 && result.trace.iterations == 0) {
    result.trace.warnings.push_back(
        "time limit expired before the first decomposition; returning the initial solution");
  }
  result.trace.finish(clock.elapsed_ms());
  return result;
}

SearchResult rco_cluster_search(const Problem& problem, const SearchConfig& config, Rng& rng,
                                SearchTrace::Sink sink) {
  config.check();
  if (config.algorithm != Algorithm::cluster_rco &&
      config.algorithm != Algorithm::cluster_whole_route) {
    throw std::invalid_argument("rco_cluster_search runs cluster-rco or cluster-whole-route only");
  }
  const Instance& instance = problem.instance;
  const DistanceTable& dist = problem.dist;
  const auto m = static_cast<std::uint64_t>(instance.task_count());
  Stopwatch clock(config.clock);
  const double deadline = deadline_ms(config);
  SearchResult result;
  result.trace.set_sink(std::move(sink));
  if (m == 0) {
    result.trace.improve(clock.elapsed_ms(), 0);
    result.trace.finish(clock.elapsed_ms());
    return result;
  }

  LocalSearchBudget budget{&clock, deadline, config.sub_solver_moves, false};
  std::vector<Solution> population;
  for (int p = 0; p < config.pool_size; ++p) {
    Solution s = path_scanning(instance, dist, rng);
    clock.charge(kIterationOverhead + m * m);
    population.push_back(local_search(std::move(s), instance, dist, budget, rng));
  }
  auto best_of = [](const std::vector<Solution>& pop) {
    return std::ranges::min_element(pop, {}, &Solution::total_cost);
  };
  result.best = *best_of(population);
  result.trace.improve(clock.elapsed_ms(), result.best.total_cost);

  for (int cycle = 1; cycle <= config.max_cycles && clock.elapsed_ms() < deadline; ++cycle) {
    ++result.trace.iterations;
    SubRoutePool pool = config.algorithm == Algorithm::cluster_rco
                            ? rco_split(result.best, instance, problem.ranks, config.rco, rng)
                            : whole_routes(result.best);
    Grouping grouping = fuzzy_kmedoid(pool, config.cluster, instance, dist, rng);
    clock.charge(kIterationOverhead + pool.size() * pool.size());
    if (!grouping.warning.empty() && result.trace.warnings.empty()) {
      result.trace.warnings.push_back(grouping.warning);
    }
    const auto groups = group_tasks(pool, grouping, instance);
    const std::size_t g = groups.size();

    std::vector<std::vector<Solution>> subpops(g);
    std::vector<Stopwatch> clocks(g, clock);
    for (auto& c : clocks) c = clock.fork();
    auto solve_group = [&](std::size_t i) {
      Rng group_rng = rng.split(static_cast<std::uint64_t>(cycle) * 1000003ULL + i);
      std::vector<char> mask(static_cast<std::size_t>(m), 0);
      for (int t : groups[i]) mask[static_cast<std::size_t>(t)] = 1;
      double group_deadline = deadline;
      if (config.sub_solver_ms > 0.0) {
        group_deadline = std::min(deadline, clocks[i].elapsed_ms() + config.sub_solver_ms);
      }
      LocalSearchBudget group_budget{&clocks[i], group_deadline, config.sub_solver_moves, false};
      for (const Solution& member : population) {
        Solution sub = project(member, mask, instance, dist);
        subpops[i].push_back(local_search(std::move(sub), instance, dist, group_budget, group_rng));
      }
      std::ranges::stable_sort(subpops[i], {}, &Solution::total_cost);
    };

    if (config.parallel_groups && g > 1) {
      std::vector<std::future<void>> workers;
      for (std::size_t i = 0; i < g; ++i) {
        workers.push_back(std::async(std::launch::async, solve_group, i));
      }
      for (auto& w : workers) w.get();
    } else {
      for (std::size_t i = 0; i < g; ++i) solve_group(i);
    }
    for (const Stopwatch& c : clocks) clock.absorb(c);

    std::vector<Solution> next;
    for (std::size_t j = 0; j < population.size(); ++j) {
      std::vector<const Solution*> parts;
      for (std::size_t i = 0; i < g; ++i) parts.push_back(&subpops[i][j]);
      next.push_back(concatenate(parts));
    }
    population = std::move(next);
    const Solution& candidate = *best_of(population);
    const bool improved = candidate.total_cost < result.best.total_cost;
    result.trace.cycles.push_back(CycleInfo{result.trace.iterations, pool.size(), g,
                                            candidate.total_cost, improved});
    if (improved) {
      result.best = candidate;
      ++result.trace.accepted;
      result.trace.improve(clock.elapsed_ms(), result.best.total_cost);
    }
  }
  if (config.max_cycles > 0 && result.trace.iterations == 0) {
    result.trace.warnings.push_back(
        "time limit expired before the first cycle; returning the initial solution");
  }
  result.trace.finish(clock.elapsed_ms());
  return result;
}

SearchResult local_only(const Problem& problem, const SearchConfig& config, Rng& rng,
                        SearchTrace::Sink sink) {
  config.check();
  const Instance& instance = problem.instance;
  const DistanceTable& dist = problem.dist;
  const auto m = static_cast<std::uint64_t>(instance.task_count());
  Stopwatch clock(config.clock);
  const double deadline = deadline_ms(config);
  SearchResult result;
  result.trace.set_sink(std::move(sink));
  LocalSearchBudget budget{&clock, deadline, config.sub_solver_moves, false};
  bool first = true;
  do {
    ++result.trace.iterations;
    Solution s = path_scanning(instance, dist, rng);
    clock.charge(kIterationOverhead + m * m);
    s = local_search(std::move(s), instance, dist, budget, rng);
    if (first || s.total_cost < result.best.total_cost) {
      result.best = std::move(s);
      result.trace.improve(clock.elapsed_ms(), result.best.total_cost);
      first = false;
    }
  } while (m > 1 && clock.elapsed_ms() < deadline);
  result.trace.finish(clock.elapsed_ms());
  return result;
}

SearchResult solve(const Problem& problem, const SearchConfig& config, SearchTrace::Sink sink) {
  Rng rng(config.seed);
  switch (config.algorithm) {
    case Algorithm::sahid_rco:
    case Algorithm::sahid_random:
      return rco_sahid(problem, config, rng, std::move(sink));
    case Algorithm::cluster_rco:
    case Algorithm::cluster_whole_route:
      return rco_cluster_search(problem, config, rng, std::move(sink));
    case Algorithm::local_only:
      return local_only(problem, config, rng, std::move(sink));
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace carp
