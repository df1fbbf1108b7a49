#include <doctest.h>

#include <random>
#include <sstream>

#include "../support/oracles.hpp"
#include "carp/solution.hpp"

namespace {

// Path 1-2-3-4 plus chord 4-1; depot 1; tasks (1,2) (2,3) (3,4).
carp::Instance path_instance() {
  using carp::Edge;
  return carp::Instance("path", 4,
                        {Edge{0, 1, 4, 2, 2}, Edge{1, 2, 5, 3, 3}, Edge{2, 3, 6, 4, 4},
                         Edge{3, 0, 0, 7, 7}},
                        0, 10);
}

}  // namespace

TEST_CASE("route cost follows the service plus deadheading formula") {
  const auto inst = path_instance();
  const auto dist = carp::shortest_paths(inst);
  // 1->2 serve (2), 2->3 serve (3): then back from 3 to 1 costs min(3+2, 4+7) = 5
  const auto r = carp::make_route(std::vector<carp::TaskId>{1, 2}, inst, dist);
  CHECK(r.cost == 2 + 3 + 5);
  CHECK(r.load == 9);
  CHECK(r.ids.front() == carp::kDepotId);
  CHECK(r.ids.back() == carp::kDepotId);
  // serving (2,3) backwards: depot->3 costs 5, serve 3->2 (3), back 2->1 (2)
  const auto back = carp::make_route(std::vector<carp::TaskId>{inst.reverse_id(1)}, inst, dist);
  CHECK(back.cost == 5 + 3 + 2);
  CHECK(carp::route_cost(std::vector<carp::TaskId>{0, 0}, inst, dist) == 0);
}

TEST_CASE("reversed routes cost the same") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = oracle::random_instance(gen, 7, 5, 100);
    const auto dist = carp::shortest_paths(inst);
    std::vector<carp::TaskId> ids{1, 2 + 5, 3, 4, 5 + 5};
    const auto r = carp::make_route(ids, inst, dist);
    const auto rev = carp::reversed(r, inst);
    CHECK(rev.cost == r.cost);
    CHECK(rev.load == r.load);
  }
}

TEST_CASE("solution costs agree with the oracle") {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = oracle::random_instance(gen, 6, 4, 100, true);
    const auto dist = carp::shortest_paths(inst);
    const auto s = carp::make_solution({{1, 2 + 4}, {3 + 4, 4}}, inst, dist);
    CHECK(s.total_cost == oracle::solution_cost(inst, s));
    CHECK(carp::caches_consistent(s, inst, dist));
  }
}

TEST_CASE("validate reports every violation kind") {
  const auto inst = path_instance();
  const auto dist = carp::shortest_paths(inst);
  auto ok = carp::make_solution({{1, 2}, {3}}, inst, dist);
  CHECK(carp::validate(ok, inst).feasible());
  CHECK(oracle::feasible(inst, ok));

  auto missing = carp::make_solution({{1, 2}}, inst, dist);
  auto rep = carp::validate(missing, inst);
  CHECK(rep.count(carp::ViolationKind::missing_task) == 1);
  CHECK_FALSE(oracle::feasible(inst, missing));

  auto dup = carp::make_solution({{1, 2}, {3, 1 + 3}}, inst, dist);
  rep = carp::validate(dup, inst);
  CHECK(rep.count(carp::ViolationKind::duplicate_task) == 1);

  auto heavy = carp::make_solution({{1, 2, 3}}, inst, dist);
  rep = carp::validate(heavy, inst);
  CHECK(rep.count(carp::ViolationKind::capacity_exceeded) == 1);
  CHECK_FALSE(oracle::feasible(inst, heavy));

  carp::Solution bad = ok;
  bad.routes[0].ids.front() = 3;
  CHECK(carp::validate(bad, inst).count(carp::ViolationKind::malformed_route) == 1);
  bad = ok;
  bad.routes[0].ids.insert(bad.routes[0].ids.begin() + 1, 0);
  CHECK(carp::validate(bad, inst).count(carp::ViolationKind::malformed_route) == 1);
  bad = ok;
  bad.routes[1].ids[1] = 99;
  rep = carp::validate(bad, inst);
  CHECK(rep.count(carp::ViolationKind::unknown_task) == 1);
  CHECK(rep.count(carp::ViolationKind::missing_task) == 1);
}

TEST_CASE("validate agrees with the brute-force checker on random solutions") {
  std::mt19937_64 gen(8);
  const auto inst = oracle::random_instance(gen, 7, 5, 12);
  const auto dist = carp::shortest_paths(inst);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::vector<carp::TaskId>> routes(1 + gen() % 3);
    const int picks = 3 + static_cast<int>(gen() % 5);
    for (int k = 0; k < picks; ++k) {
      routes[gen() % routes.size()].push_back(1 + static_cast<int>(gen() % 10));
    }
    const auto s = carp::make_solution(routes, inst, dist);
    CHECK(carp::validate(s, inst).feasible() == oracle::feasible(inst, s));
  }
}

TEST_CASE("validate_subset checks only the given tasks") {
  const auto inst = path_instance();
  const auto dist = carp::shortest_paths(inst);
  const auto s = carp::make_solution({{2}}, inst, dist);
  const std::vector<int> subset{1};
  CHECK(carp::validate_subset(s, inst, subset).feasible());
  const std::vector<int> other{0};
  const auto rep = carp::validate_subset(s, inst, other);
  CHECK(rep.count(carp::ViolationKind::unknown_task) == 1);
  CHECK(rep.count(carp::ViolationKind::missing_task) == 1);
}

TEST_CASE("min_vehicles is the capacity bound") {
  CHECK(carp::min_vehicles(path_instance()) == 2);  // 15 / 10
  const carp::Instance exact("e", 2, {carp::Edge{0, 1, 10, 1, 1}}, 0, 10);
  CHECK(carp::min_vehicles(exact) == 1);
}

TEST_CASE("solution files round-trip") {
  std::mt19937_64 gen(10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = oracle::random_instance(gen, 8, 6, 100);
    const auto dist = carp::shortest_paths(inst);
    const auto s = carp::make_solution({{1, 2 + 6, 3}, {4 + 6, 5, 6}}, inst, dist);
    std::stringstream io;
    carp::write_solution(io, s, inst);
    const auto back = carp::read_solution(io, inst, dist);
    CHECK(back.total_cost == s.total_cost);
    REQUIRE(back.routes.size() == s.routes.size());
    for (std::size_t k = 0; k < s.routes.size(); ++k) CHECK(back.routes[k].ids == s.routes[k].ids);
  }
}

TEST_CASE("read_solution rejects bad files") {
  const auto inst = path_instance();
  const auto dist = carp::shortest_paths(inst);
  auto parse = [&](const std::string& text) {
    std::istringstream in(text);
    return carp::read_solution(in, inst, dist);
  };
  CHECK_THROWS_AS(parse("cost 1\nroute 1: (1,3)\n"), carp::ParseError);
  CHECK_THROWS_AS(parse("cost 1\nroute 1: (1,2) (2,1)\n"), carp::ParseError);
  CHECK_THROWS_AS(parse("cost 1\nroute 1: (1,x)\n"), carp::ParseError);
  CHECK_NOTHROW(parse("cost 5\nroute 1: (1,2) (2,3)\nroute 2: (4,3)\n"));
}

TEST_CASE("strip_empty_routes and served_task_count") {
  const auto inst = path_instance();
  const auto dist = carp::shortest_paths(inst);
  auto s = carp::make_solution({{1}, {}, {2, 3}}, inst, dist);
  CHECK(s.routes.size() == 3);
  CHECK(carp::served_task_count(s) == 3);
  carp::strip_empty_routes(s);
  CHECK(s.routes.size() == 2);
}
