#include <doctest.h>

#include <algorithm>
#include <random>

#include "../support/oracles.hpp"
#include "../support/worked_example.hpp"
#include "carp/rco.hpp"
#include "carp/search.hpp"

namespace {

struct Example {
  carp::Instance inst = example::instance();
  carp::DistanceTable dist = carp::shortest_paths(inst);
  carp::RankMatrix ranks = carp::RankMatrix::from_link_costs(example::kTasks, example::kNumerators);
  carp::Solution solution = example::solution(inst, dist);
};

std::vector<int> sorted_tasks(const carp::SubRoutePool& pool, const carp::Instance& inst) {
  std::vector<int> tasks;
  for (const auto& s : pool) {
    for (carp::TaskId id : s.ids) tasks.push_back(inst.task_of(id));
  }
  std::ranges::sort(tasks);
  return tasks;
}

// Each sub-route must be a contiguous, orientation-preserving slice of its route.
void check_slices(const carp::SubRoutePool& pool, const carp::Solution& s) {
  for (const auto& sub : pool) {
    REQUIRE(sub.route >= 0);
    REQUIRE(static_cast<std::size_t>(sub.route) < s.routes.size());
    const auto interior = s.routes[sub.route].interior();
    REQUIRE(sub.offset + sub.ids.size() <= interior.size());
    CHECK(std::equal(sub.ids.begin(), sub.ids.end(), interior.begin() + sub.offset));
  }
}

}  // namespace

TEST_CASE("worked example: average rank and link classes") {
  Example ex;
  CHECK(carp::average_task_rank(ex.solution, ex.inst, ex.ranks) == 3.0);
  const auto r1 = carp::classify_links(ex.solution.routes[0], ex.inst, ex.ranks, 3.0);
  CHECK(r1.good == std::vector<int>{1});
  CHECK(r1.poor == std::vector<int>{0});
  const auto r2 = carp::classify_links(ex.solution.routes[1], ex.inst, ex.ranks, 3.0);
  CHECK(r2.good == std::vector<int>{1});
  CHECK(r2.poor == std::vector<int>{0});
  const auto r3 = carp::classify_links(ex.solution.routes[2], ex.inst, ex.ranks, 3.0);
  CHECK(r3.good == std::vector<int>{0});
  CHECK(r3.poor.empty());
}

TEST_CASE("a rank equal to the average is poor") {
  Example ex;
  const auto part = carp::classify_links(ex.solution.routes[1], ex.inst, ex.ranks, 5.0);
  CHECK(part.poor == std::vector<int>{0});
}

TEST_CASE("depot connections are not links") {
  Example ex;
  const auto single = carp::make_solution({{1}, {2}}, ex.inst, ex.dist);
  CHECK(carp::average_task_rank(single, ex.inst, ex.ranks) == 0.0);
  carp::Rng rng(1);
  const auto pool = carp::rco_split(single, ex.inst, ex.ranks, {1.0, 1.0}, rng);
  CHECK(pool.size() == 2);
}

TEST_CASE("cut_route splits at link positions") {
  const std::vector<carp::TaskId> ids{5, 6, 7, 8};
  auto pieces = carp::cut_route(ids, 2, {2, 0, 2});
  REQUIRE(pieces.size() == 3);
  CHECK(pieces[0].ids == std::vector<carp::TaskId>{5});
  CHECK(pieces[1].ids == std::vector<carp::TaskId>{6, 7});
  CHECK(pieces[1].offset == 1);
  CHECK(pieces[2].ids == std::vector<carp::TaskId>{8});
  CHECK(pieces[2].route == 2);
  CHECK(carp::cut_route(ids, 0, {}).size() == 1);
  CHECK_THROWS_AS(carp::cut_route(ids, 0, {3}), std::out_of_range);
  CHECK_THROWS_AS(carp::cut_route(ids, 0, {-1}), std::out_of_range);
}

TEST_CASE("probability extremes") {
  Example ex;
  carp::Rng rng(4);
  const auto none = carp::rco_split(ex.solution, ex.inst, ex.ranks, {0.0, 0.0}, rng);
  CHECK(none.size() == 3);
  // every route loses one good and (if present) one poor link
  const auto all = carp::rco_split(ex.solution, ex.inst, ex.ranks, {1.0, 1.0}, rng);
  CHECK(all.size() == 3 + 3 + 2);
  CHECK_THROWS_AS(carp::rco_split(ex.solution, ex.inst, ex.ranks, {1.5, 0.0}, rng),
                  std::invalid_argument);
}

TEST_CASE("rco_split conserves tasks, slices routes and respects the cut budget") {
  std::mt19937_64 gen(31);
  carp::Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = oracle::random_instance(gen, 10, 9, 30);
    const auto problem = carp::Problem::build(inst);
    const auto s = carp::path_scanning(problem->instance, problem->dist, rng);
    const double lambda = (gen() % 11) / 10.0;
    const double theta = (gen() % 11) / 10.0;
    const auto pool = carp::rco_split(s, problem->instance, problem->ranks, {lambda, theta}, rng);
    std::vector<int> expected(inst.task_count());
    std::iota(expected.begin(), expected.end(), 0);
    CHECK(sorted_tasks(pool, problem->instance) == expected);
    check_slices(pool, s);
    for (std::size_t k = 0; k < s.routes.size(); ++k) {
      const auto n = std::ranges::count_if(pool, [&](const auto& p) { return p.route == int(k); });
      CHECK(n >= 1);
      CHECK(n <= 3);
    }
  }
}

TEST_CASE("baseline splits") {
  Example ex;
  carp::Rng rng(2);
  const auto whole = carp::whole_routes(ex.solution);
  REQUIRE(whole.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(std::ranges::equal(whole[k].ids, ex.solution.routes[k].interior()));
  }
  for (int trial = 0; trial < 50; ++trial) {
    const auto pool = carp::random_split(ex.solution, rng);
    CHECK(pool.size() == 6);
    check_slices(pool, ex.solution);
  }
  const auto one = carp::make_solution({{1}}, carp::Instance("x", 2, {carp::Edge{0, 1, 1, 1, 1}}, 0, 5),
                                       carp::shortest_paths(carp::Instance("x", 2, {carp::Edge{0, 1, 1, 1, 1}}, 0, 5)));
  CHECK(carp::random_split(one, rng).size() == 1);
}
