#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "carp/local_search.hpp"
#include "carp/search.hpp"

TEST_CASE("local search keeps feasibility, never worsens and tracks deltas exactly") {
  std::mt19937_64 gen(51);
  carp::Rng rng(51);
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = oracle::random_instance(gen, 6 + trial % 10, 2 + trial % 12, 20, trial % 2);
    const auto dist = carp::shortest_paths(inst);
    const auto start = carp::path_scanning(inst, dist, rng);
    carp::LocalSearchBudget budget;
    budget.verify_costs = true;
    carp::LocalSearchStats stats;
    const auto out = carp::local_search(start, inst, dist, budget, rng, &stats);
    CHECK(carp::validate(out, inst).feasible());
    CHECK(out.total_cost <= start.total_cost);
    CHECK(out.total_cost == oracle::solution_cost(inst, out));
    CHECK(carp::caches_consistent(out, inst, dist));
    CHECK(stats.local_optimum);
    for (const auto& r : out.routes) CHECK_FALSE(r.empty());
  }
}

TEST_CASE("local search improves a deliberately bad solution") {
  std::mt19937_64 gen(52);
  carp::Rng rng(52);
  const auto inst = oracle::random_instance(gen, 12, 10, 1000);
  const auto dist = carp::shortest_paths(inst);
  std::vector<std::vector<carp::TaskId>> singles;
  for (int t = 0; t < 10; ++t) singles.push_back({inst.reverse_id(t)});
  const auto start = carp::make_solution(singles, inst, dist);
  const auto out = carp::local_search(start, inst, dist, {}, rng);
  CHECK(out.total_cost < start.total_cost);
}

TEST_CASE("local search honours move caps and deadlines") {
  std::mt19937_64 gen(53);
  carp::Rng rng(53);
  const auto inst = oracle::random_instance(gen, 30, 30, 60);
  const auto dist = carp::shortest_paths(inst);
  const auto start = carp::path_scanning(inst, dist, rng);

  carp::LocalSearchBudget capped;
  capped.max_moves = 1;
  carp::LocalSearchStats stats;
  (void)carp::local_search(start, inst, dist, capped, rng, &stats);
  CHECK(stats.moves <= 1);

  carp::Stopwatch clock(carp::ClockMode::work);
  carp::LocalSearchBudget timed;
  timed.clock = &clock;
  timed.deadline_ms = 0.0;
  const auto out = carp::local_search(start, inst, dist, timed, rng, &stats);
  CHECK_FALSE(stats.local_optimum);
  CHECK(stats.evaluations <= 256);
  CHECK(clock.elapsed_ms() > 0.0);
  CHECK(carp::validate(out, inst).feasible());
}

TEST_CASE("local search is deterministic for a fixed generator state") {
  std::mt19937_64 gen(54);
  const auto inst = oracle::random_instance(gen, 15, 14, 30);
  const auto dist = carp::shortest_paths(inst);
  carp::Rng seed_rng(1);
  const auto start = carp::path_scanning(inst, dist, seed_rng);
  carp::Rng a(9), b(9);
  const auto x = carp::local_search(start, inst, dist, {}, a);
  const auto y = carp::local_search(start, inst, dist, {}, b);
  REQUIRE(x.routes.size() == y.routes.size());
  for (std::size_t k = 0; k < x.routes.size(); ++k) CHECK(x.routes[k].ids == y.routes[k].ids);
}

TEST_CASE("empty and single-task solutions pass through") {
  std::mt19937_64 gen(55);
  carp::Rng rng(55);
  const auto inst = oracle::random_instance(gen, 4, 1, 10);
  const auto dist = carp::shortest_paths(inst);
  const auto one = carp::make_solution({{1}}, inst, dist);
  const auto out = carp::local_search(one, inst, dist, {}, rng);
  CHECK(out.routes.size() == 1);
  CHECK(out.total_cost <= one.total_cost);
}
