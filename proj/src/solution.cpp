#include "carp/solution.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace carp {

Cost route_cost(std::span<const TaskId> ids, const Instance& instance, const DistanceTable& dist) {
  Cost cost = 0;
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
    cost += instance.service_cost(ids[i]) + dist(instance.tail(ids[i]), instance.head(ids[i + 1]));
  }
  return cost;
}

Demand route_load(std::span<const TaskId> ids, const Instance& instance) {
  Demand load = 0;
  for (TaskId id : ids) load += instance.demand(id);
  return load;
}

Route make_route(std::span<const TaskId> interior, const Instance& instance,
                 const DistanceTable& dist) {
  Route route;
  route.ids.clear();
  route.ids.reserve(interior.size() + 2);
  route.ids.push_back(kDepotId);
  route.ids.insert(route.ids.end(), interior.begin(), interior.end());
  route.ids.push_back(kDepotId);
  refresh(route, instance, dist);
  return route;
}

Solution make_solution(const std::vector<std::vector<TaskId>>& interiors, const Instance& instance,
                       const DistanceTable& dist) {
  Solution solution;
  for (const auto& interior : interiors) {
    solution.routes.push_back(make_route(interior, instance, dist));
  }
  refresh(solution, instance, dist);
  return solution;
}

void refresh(Route& route, const Instance& instance, const DistanceTable& dist) {
  route.load = route_load(route.ids, instance);
  route.cost = route_cost(route.ids, instance, dist);
}

void refresh(Solution& solution, const Instance& instance, const DistanceTable& dist) {
  solution.total_cost = 0;
  for (Route& route : solution.routes) {
    refresh(route, instance, dist);
    solution.total_cost += route.cost;
  }
}

bool caches_consistent(const Solution& solution, const Instance& instance,
                       const DistanceTable& dist) {
  Cost total = 0;
  for (const Route& route : solution.routes) {
    if (route.load != route_load(route.ids, instance)) return false;
    if (route.cost != route_cost(route.ids, instance, dist)) return false;
    total += route.cost;
  }
  return total == solution.total_cost;
}

void strip_empty_routes(Solution& solution) {
  std::erase_if(solution.routes, [](const Route& r) { return r.empty(); });
}

Route reversed(const Route& route, const Instance& instance) {
  Route out = route;
  std::reverse(out.ids.begin(), out.ids.end());
  for (TaskId& id : out.ids) id = instance.inverse(id);
  return out;
}

std::size_t served_task_count(const Solution& solution) {
  std::size_t n = 0;
  for (const Route& r : solution.routes) n += r.task_count();
  return n;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::missing_task: return "missing-task";
    case ViolationKind::duplicate_task: return "duplicate-task";
    case ViolationKind::capacity_exceeded: return "capacity-exceeded";
    case ViolationKind::malformed_route: return "malformed-route";
    case ViolationKind::unknown_task: return "unknown-task";
  }
  return "unknown";
}

std::size_t ValidationReport::count(ViolationKind kind) const {
  return static_cast<std::size_t>(std::ranges::count_if(
      violations, [kind](const Violation& v) { return v.kind == kind; }));
}

namespace {

std::string pair_text(const Instance& instance, TaskId id) {
  return "(" + std::to_string(instance.head(id) + 1) + "," + std::to_string(instance.tail(id) + 1) +
         ")";
}

ValidationReport validate_impl(const Solution& solution, const Instance& instance,
                               const std::vector<char>& required) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, int route, int task, std::string message) {
    report.violations.push_back(Violation{kind, route, task, std::move(message)});
  };

  std::vector<int> served(static_cast<std::size_t>(instance.task_count()), 0);
  for (std::size_t k = 0; k < solution.routes.size(); ++k) {
    const auto& ids = solution.routes[k].ids;
    const int route = static_cast<int>(k);
    const std::string where = "route " + std::to_string(k + 1);
    if (ids.size() < 2 || ids.front() != kDepotId || ids.back() != kDepotId) {
      add(ViolationKind::malformed_route, route, -1, where + " does not start and end at the depot");
      if (ids.size() < 2) continue;
    }
    Demand load = 0;
    for (std::size_t i = 1; i + 1 < ids.size(); ++i) {
      TaskId id = ids[i];
      if (id == kDepotId) {
        add(ViolationKind::malformed_route, route, -1,
            where + " visits the depot sentinel at position " + std::to_string(i));
        continue;
      }
      if (!instance.is_task_id(id)) {
        add(ViolationKind::unknown_task, route, -1,
            where + " contains unknown task ID " + std::to_string(id));
        continue;
      }
      int task = instance.task_of(id);
      if (!required[task]) {
        add(ViolationKind::unknown_task, route, task,
            where + " serves task " + pair_text(instance, id) + " outside the task set");
        continue;
      }
      if (++served[task] > 1) {
        add(ViolationKind::duplicate_task, route, task,
            where + " serves task " + pair_text(instance, id) + " again");
      }
      load += instance.demand(id);
    }
    if (load > instance.capacity()) {
      add(ViolationKind::capacity_exceeded, route, -1,
          where + " load " + std::to_string(load) + " exceeds capacity " +
              std::to_string(instance.capacity()));
    }
  }
  for (int t = 0; t < instance.task_count(); ++t) {
    if (required[t] && served[t] == 0) {
      add(ViolationKind::missing_task, -1, t,
          "task " + pair_text(instance, instance.forward_id(t)) + " is not served");
    }
  }
  return report;
}

}  // namespace

ValidationReport validate(const Solution& solution, const Instance& instance) {
  return validate_impl(solution, instance,
                       std::vector<char>(static_cast<std::size_t>(instance.task_count()), 1));
}

ValidationReport validate_subset(const Solution& solution, const Instance& instance,
                                 std::span<const int> tasks) {
  std::vector<char> required(static_cast<std::size_t>(instance.task_count()), 0);
  for (int t : tasks) required.at(static_cast<std::size_t>(t)) = 1;
  return validate_impl(solution, instance, required);
}

int min_vehicles(const Instance& instance) {
  const Demand q = instance.capacity();
  return static_cast<int>((instance.total_demand() + q - 1) / q);
}

void write_solution(std::ostream& out, const Solution& solution, const Instance& instance) {
  out << "cost " << solution.total_cost << '\n';
  for (std::size_t k = 0; k < solution.routes.size(); ++k) {
    out << "route " << k + 1 << ':';
    for (TaskId id : solution.routes[k].interior()) {
      out << " (" << instance.head(id) + 1 << ',' << instance.tail(id) + 1 << ')';
    }
    out << '\n';
  }
}

Solution read_solution(std::istream& in, const Instance& instance, const DistanceTable& dist) {
  std::map<std::pair<Vertex, Vertex>, std::vector<TaskId>> by_endpoints;
  for (TaskId id = 1; id < instance.id_count(); ++id) {
    by_endpoints[{instance.head(id), instance.tail(id)}].push_back(id);
  }
  std::vector<char> used(static_cast<std::size_t>(instance.task_count()), 0);

  std::vector<std::vector<TaskId>> interiors;
  std::string line;
  int line_no = 0;
  bool saw_cost = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word == "cost") {
      saw_cost = true;
      continue;
    }
    if (word != "route") throw ParseError(line_no, "expected 'cost' or 'route'");
    auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError(line_no, "route line lacks ':'");
    std::vector<TaskId> interior;
    std::string rest = line.substr(colon + 1);
    std::size_t pos = 0;
    while ((pos = rest.find('(', pos)) != std::string::npos) {
      auto close = rest.find(')', pos);
      if (close == std::string::npos) throw ParseError(line_no, "unterminated pair");
      std::string inner = rest.substr(pos + 1, close - pos - 1);
      auto comma = inner.find(',');
      if (comma == std::string::npos) throw ParseError(line_no, "pair must be (u,v)");
      Vertex u = 0;
      Vertex v = 0;
      try {
        u = std::stoi(inner.substr(0, comma)) - 1;
        v = std::stoi(inner.substr(comma + 1)) - 1;
      } catch (const std::exception&) {
        throw ParseError(line_no, "non-numeric vertex in '(" + inner + ")'");
      }
      auto it = by_endpoints.find({u, v});
      TaskId chosen = -1;
      if (it != by_endpoints.end()) {
        for (TaskId id : it->second) {
          if (!used[instance.task_of(id)]) {
            chosen = id;
            break;
          }
        }
      }
      if (chosen < 0) {
        throw ParseError(line_no, "no unused task matches (" + std::to_string(u + 1) + "," +
                                      std::to_string(v + 1) + ")");
      }
      used[instance.task_of(chosen)] = 1;
      interior.push_back(chosen);
      pos = close + 1;
    }
    interiors.push_back(std::move(interior));
  }
  if (!saw_cost) throw ParseError(line_no, "missing 'cost' line");
  return make_solution(interiors, instance, dist);
}

}  // namespace carp
