#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace carp {

using Cost = std::int64_t;
using Demand = std::int64_t;
using Vertex = int;   // 0-based inside the library
using TaskId = int;   // directed task ID; 0 is the depot dummy

inline constexpr TaskId kDepotId = 0;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  Demand demand = 0;
  Cost service_cost = 0;
  Cost deadheading_cost = 0;

  bool operator==(const Edge&) const = default;
};

// A required edge. Its two directed IDs are forward (u -> v) and reverse.
struct Task {
  int edge_index = 0;
  Vertex u = 0;
  Vertex v = 0;
  Demand demand = 0;
  Cost service_cost = 0;
  Cost deadheading_cost = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& detail, const std::string& source = {})
      : std::runtime_error((source.empty() ? "" : source + ": ") + "line " +
                           std::to_string(line) + ": " + detail),
        line_(line),
        detail_(detail) {}
  int line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  int line_;
  std::string detail_;
};

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Undirected CARP instance. Immutable after construction.
//
// Task IDs follow the usual arc-routing layout: for task index i (0-based),
// forward_id(i) = i + 1 serves u -> v and reverse_id(i) = i + 1 + |T| serves
// v -> u. ID 0 is the depot loop with head = tail = depot.
class Instance {
 public:
  Instance() = default;

  // Validates every invariant and throws InstanceError on violation.
  Instance(std::string name, int vertex_count, std::vector<Edge> edges, Vertex depot,
           Demand capacity);

  const std::string& name() const { return name_; }
  int vertex_count() const { return vertex_count_; }
  std::span<const Edge> edges() const { return edges_; }
  Vertex depot() const { return depot_; }
  Demand capacity() const { return capacity_; }

  std::span<const Task> tasks() const { return tasks_; }
  int task_count() const { return static_cast<int>(tasks_.size()); }
  Demand total_demand() const { return total_demand_; }

  int id_count() const { return 2 * task_count() + 1; }
  TaskId forward_id(int task) const { return task + 1; }
  TaskId reverse_id(int task) const { return task + 1 + task_count(); }
  bool is_task_id(TaskId id) const { return id > 0 && id < id_count(); }

  // Task index of a non-depot ID.
  int task_of(TaskId id) const { return (id - 1) % task_count(); }
  Vertex head(TaskId id) const { return head_[id]; }
  Vertex tail(TaskId id) const { return tail_[id]; }
  TaskId inverse(TaskId id) const { return inverse_[id]; }
  Demand demand(TaskId id) const { return demand_[id]; }
  Cost service_cost(TaskId id) const { return service_cost_[id]; }
  Cost deadheading_cost(TaskId id) const { return deadheading_cost_[id]; }

 private:
  std::string name_;
  int vertex_count_ = 0;
  std::vector<Edge> edges_;
  Vertex depot_ = 0;
  Demand capacity_ = 0;
  std::vector<Task> tasks_;
  Demand total_demand_ = 0;

  std::vector<Vertex> head_;
  std::vector<Vertex> tail_;
  std::vector<TaskId> inverse_;
  std::vector<Demand> demand_;
  std::vector<Cost> service_cost_;
  std::vector<Cost> deadheading_cost_;
};

// Structural equality: same name, vertices, depot, capacity and edge list.
bool same_structure(const Instance& a, const Instance& b);

// Parses the classic DAT benchmark format (NOMBRE / VERTICES / ARISTAS_REQ /
// ... / LISTA_ARISTAS_REQ / LISTA_ARISTAS_NOREQ / DEPOSITO).
Instance load_instance(std::istream& in);
Instance load_instance_file(const std::filesystem::path& path);
Instance load_instance_string(std::string_view text);

// Writes the canonical DAT form; load_instance(write_instance(x)) reproduces x
// whenever service and deadheading costs coincide.
void write_instance(std::ostream& out, const Instance& instance);

// All-pairs shortest-path costs over deadheading costs.
class DistanceTable {
 public:
  static constexpr Cost kUnreachable = std::numeric_limits<Cost>::max() / 4;

  DistanceTable() = default;
  explicit DistanceTable(int vertex_count)
      : n_(vertex_count),
        d_(static_cast<std::size_t>(vertex_count) * static_cast<std::size_t>(vertex_count),
           kUnreachable) {}

  int vertex_count() const { return n_; }

  Cost operator()(Vertex from, Vertex to) const {
    return d_[static_cast<std::size_t>(from) * static_cast<std::size_t>(n_) +
              static_cast<std::size_t>(to)];
  }
  Cost& at(Vertex from, Vertex to) {
    return d_[static_cast<std::size_t>(from) * static_cast<std::size_t>(n_) +
              static_cast<std::size_t>(to)];
  }

 private:
  int n_ = 0;
  std::vector<Cost> d_;
};

// Dijkstra from every vertex.
DistanceTable shortest_paths(const Instance& instance);

}  // namespace carp
