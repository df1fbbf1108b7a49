#include "carp/instance.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <utility>

namespace carp {

Instance::Instance(std::string name, int vertex_count, std::vector<Edge> edges, Vertex depot,
                   Demand capacity)
    : name_(std::move(name)),
      vertex_count_(vertex_count),
      edges_(std::move(edges)),
      depot_(depot),
      capacity_(capacity) {
  if (vertex_count_ <= 0) throw InstanceError("vertex count must be positive");
  if (depot_ < 0 || depot_ >= vertex_count_) {
    throw InstanceError("depot " + std::to_string(depot_ + 1) + " is not a valid vertex");
  }
  if (capacity_ <= 0) throw InstanceError("capacity must be positive");

  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.u < 0 || e.u >= vertex_count_ || e.v < 0 || e.v >= vertex_count_) {
      throw InstanceError("edge " + std::to_string(i + 1) + " (" + std::to_string(e.u + 1) + "," +
                          std::to_string(e.v + 1) + ") references a vertex outside 1.." +
                          std::to_string(vertex_count_));
    }
    if (e.demand < 0 || e.service_cost < 0 || e.deadheading_cost < 0) {
      throw InstanceError("edge " + std::to_string(i + 1) + " has a negative attribute");
    }
    if (e.demand > capacity_) {
      throw InstanceError("edge (" + std::to_string(e.u + 1) + "," + std::to_string(e.v + 1) +
                          ") has demand " + std::to_string(e.demand) + " exceeding capacity " +
                          std::to_string(capacity_));
    }
    if (e.demand > 0) {
      tasks_.push_back(Task{static_cast<int>(i), e.u, e.v, e.demand, e.service_cost,
                            e.deadheading_cost});
      total_demand_ += e.demand;
    }
  }

  // Every task endpoint must be reachable from the depot.
  std::vector<std::vector<Vertex>> adjacency(static_cast<std::size_t>(vertex_count_));
  for (const Edge& e : edges_) {
    adjacency[e.u].push_back(e.v);
    adjacency[e.v].push_back(e.u);
  }
  std::vector<char> seen(static_cast<std::size_t>(vertex_count_), 0);
  std::vector<Vertex> stack{depot_};
  seen[depot_] = 1;
  while (!stack.empty()) {
    Vertex x = stack.back();
    stack.pop_back();
    for (Vertex y : adjacency[x]) {
      if (!seen[y]) {
        seen[y] = 1;
        stack.push_back(y);
      }
    }
  }
  for (const Task& t : tasks_) {
    if (!seen[t.u] || !seen[t.v]) {
      throw InstanceError("task (" + std::to_string(t.u + 1) + "," + std::to_string(t.v + 1) +
                          ") is unreachable from the depot");
    }
  }

  const auto m = tasks_.size();
  const auto ids = 2 * m + 1;
  head_.assign(ids, depot_);
  tail_.assign(ids, depot_);
  inverse_.assign(ids, kDepotId);
  demand_.assign(ids, 0);
  service_cost_.assign(ids, 0);
  deadheading_cost_.assign(ids, 0);
  for (std::size_t i = 0; i < m; ++i) {
    const Task& t = tasks_[i];
    const auto fwd = i + 1;
    const auto rev = i + 1 + m;
    head_[fwd] = t.u;
    tail_[fwd] = t.v;
    head_[rev] = t.v;
    tail_[rev] = t.u;
    inverse_[fwd] = static_cast<TaskId>(rev);
    inverse_[rev] = static_cast<TaskId>(fwd);
    demand_[fwd] = demand_[rev] = t.demand;
    service_cost_[fwd] = service_cost_[rev] = t.service_cost;
    deadheading_cost_[fwd] = deadheading_cost_[rev] = t.deadheading_cost;
  }
}

bool same_structure(const Instance& a, const Instance& b) {
  return a.name() == b.name() && a.vertex_count() == b.vertex_count() &&
         a.depot() == b.depot() && a.capacity() == b.capacity() &&
         std::ranges::equal(a.edges(), b.edges());
}

namespace {

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::int64_t parse_integer(std::string_view token, int line, std::string_view what) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    // Some releases write costs as "12.0".
    double real = 0;
    std::istringstream ss{std::string(token)};
    if (ss >> real && ss.eof() && real == static_cast<double>(static_cast<std::int64_t>(real))) {
      return static_cast<std::int64_t>(real);
    }
    throw ParseError(line, "expected integer " + std::string(what) + ", got '" +
                               std::string(token) + "'");
  }
  return value;
}

enum class Block { header, required, non_required };

struct RawEdge {
  std::int64_t u = 0;
  std::int64_t v = 0;
  std::int64_t cost = 0;
  std::int64_t demand = 0;
  int line = 0;
};

// "( u , v ) coste c demanda d"
RawEdge parse_edge_line(const std::string& text, int line, bool required) {
  auto open = text.find('(');
  auto close = text.find(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw ParseError(line, "malformed edge line");
  }
  std::string inner = text.substr(open + 1, close - open - 1);
  auto comma = inner.find(',');
  if (comma == std::string::npos) throw ParseError(line, "edge endpoints must be 'u , v'");
  RawEdge edge;
  edge.line = line;
  edge.u = parse_integer(trim(inner.substr(0, comma)), line, "vertex");
  edge.v = parse_integer(trim(inner.substr(comma + 1)), line, "vertex");

  std::istringstream rest(text.substr(close + 1));
  std::string key;
  std::string value;
  bool has_cost = false;
  bool has_demand = false;
  while (rest >> key) {
    if (!(rest >> value)) throw ParseError(line, "missing value after '" + key + "'");
    auto k = upper(key);
    if (k == "COSTE" || k == "COST") {
      edge.cost = parse_integer(value, line, "cost");
      has_cost = true;
    } else if (k == "DEMANDA" || k == "DEMAND") {
      edge.demand = parse_integer(value, line, "demand");
      has_demand = true;
    } else {
      throw ParseError(line, "unexpected token '" + key + "' in edge line");
    }
  }
  if (!has_cost) throw ParseError(line, "edge line lacks 'coste'");
  if (required && !has_demand) throw ParseError(line, "required edge lacks 'demanda'");
  return edge;
}

}  // namespace

Instance load_instance(std::istream& in) {
  std::string name;
  std::optional<std::int64_t> vertices;
  std::optional<std::int64_t> required_count;
  std::optional<std::int64_t> non_required_count;
  std::optional<std::int64_t> capacity;
  std::optional<std::int64_t> depot;
  std::vector<RawEdge> required;
  std::vector<RawEdge> non_required;

  Block block = Block::header;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string text = trim(raw);
    if (text.empty()) continue;

    if (text.front() == '(') {
      if (block == Block::header) throw ParseError(line, "edge line outside an edge list");
      RawEdge e = parse_edge_line(text, line, block == Block::required);
      (block == Block::required ? required : non_required).push_back(e);
      continue;
    }

    auto colon = text.find(':');
    if (colon == std::string::npos) {
      auto word = upper(text);
      if (word == "END" || word == "FIN") continue;
      throw ParseError(line, "expected 'KEY : VALUE', got '" + text + "'");
    }
    std::string key = upper(trim(text.substr(0, colon)));
    std::string value = trim(text.substr(colon + 1));

    if (key == "NOMBRE" || key == "NAME") {
      name = value;
    } else if (key == "VERTICES" || key == "VERTEX" || key == "VERTEXES") {
      vertices = parse_integer(value, line, "vertex count");
    } else if (key == "ARISTAS_REQ" || key == "REQUIRED_EDGES") {
      required_count = parse_integer(value, line, "required edge count");
    } else if (key == "ARISTAS_NOREQ" || key == "NON_REQUIRED_EDGES") {
      non_required_count = parse_integer(value, line, "non-required edge count");
    } else if (key == "VEHICULOS" || key == "VEHICLES") {
      // fleet size is unconstrained
    } else if (key == "CAPACIDAD" || key == "CAPACITY") {
      capacity = parse_integer(value, line, "capacity");
    } else if (key == "LISTA_ARISTAS_REQ" || key == "LIST_REQUIRED_EDGES") {
      block = Block::required;
    } else if (key == "LISTA_ARISTAS_NOREQ" || key == "LIST_NON_REQUIRED_EDGES") {
      block = Block::non_required;
    } else if (key == "DEPOSITO" || key == "DEPOT") {
      depot = parse_integer(value, line, "depot");
      block = Block::header;
    } else {
      // COMENTARIO, TIPO_COSTES_ARISTAS, COSTE_TOTAL_REQ and friends carry no model data.
      block = Block::header;
    }
  }

  if (!vertices) throw ParseError(line, "missing VERTICES");
  if (!capacity) throw ParseError(line, "missing CAPACIDAD");
  if (!depot) throw ParseError(line, "missing DEPOSITO");
  if (required_count && *required_count != static_cast<std::int64_t>(required.size())) {
    throw ParseError(line, "ARISTAS_REQ declares " + std::to_string(*required_count) +
                               " edges but the list has " + std::to_string(required.size()));
  }
  if (non_required_count &&
      *non_required_count != static_cast<std::int64_t>(non_required.size())) {
    throw ParseError(line, "ARISTAS_NOREQ declares " + std::to_string(*non_required_count) +
                               " edges but the list has " + std::to_string(non_required.size()));
  }

  const std::int64_t n = *vertices;
  std::vector<Edge> edges;
  edges.reserve(required.size() + non_required.size());
  auto convert = [&](const RawEdge& r) {
    if (r.u < 1 || r.u > n || r.v < 1 || r.v > n) {
      throw InstanceError("line " + std::to_string(r.line) + ": vertex outside 1.." +
                          std::to_string(n));
    }
    edges.push_back(Edge{static_cast<Vertex>(r.u - 1), static_cast<Vertex>(r.v - 1), r.demand,
                         r.cost, r.cost});
  };
  for (const auto& r : required) convert(r);
  for (const auto& r : non_required) convert(r);

  if (*depot < 1 || *depot > n) {
    throw InstanceError("depot " + std::to_string(*depot) + " outside 1.." + std::to_string(n));
  }
  return Instance(name, static_cast<int>(n), std::move(edges), static_cast<Vertex>(*depot - 1),
                  *capacity);
}

Instance load_instance_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file " + path.string());
  try {
    return load_instance(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path.string());
  }
}

Instance load_instance_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_instance(in);
}

void write_instance(std::ostream& out, const Instance& instance) {
  std::vector<const Edge*> required;
  std::vector<const Edge*> non_required;
  Cost required_cost = 0;
  for (const Edge& e : instance.edges()) {
    if (e.demand > 0) {
      required.push_back(&e);
      required_cost += e.service_cost;
    } else {
      non_required.push_back(&e);
    }
  }
  out << "NOMBRE : " << instance.name() << '\n'
      << "COMENTARIO : generated\n"
      << "VERTICES : " << instance.vertex_count() << '\n'
      << "ARISTAS_REQ : " << required.size() << '\n'
      << "ARISTAS_NOREQ : " << non_required.size() << '\n'
      << "VEHICULOS : -1\n"
      << "CAPACIDAD : " << instance.capacity() << '\n'
      << "TIPO_COSTES_ARISTAS : EXPLICITOS\n"
      << "COSTE_TOTAL_REQ : " << required_cost << '\n'
      << "LISTA_ARISTAS_REQ :\n";
  for (const Edge* e : required) {
    out << " ( " << e->u + 1 << ", " << e->v + 1 << ")  coste " << e->deadheading_cost
        << "  demanda " << e->demand << '\n';
  }
  out << "LISTA_ARISTAS_NOREQ :\n";
  for (const Edge* e : non_required) {
    out << " ( " << e->u + 1 << ", " << e->v + 1 << ")  coste " << e->deadheading_cost << '\n';
  }
  out << "DEPOSITO :   " << instance.depot() + 1 << '\n';
}

DistanceTable shortest_paths(const Instance& instance) {
  const int n = instance.vertex_count();
  std::vector<std::vector<std::pair<Vertex, Cost>>> adjacency(static_cast<std::size_t>(n));
  for (const Edge& e : instance.edges()) {
    if (e.u == e.v) continue;
    adjacency[e.u].emplace_back(e.v, e.deadheading_cost);
    adjacency[e.v].emplace_back(e.u, e.deadheading_cost);
  }

  DistanceTable table(n);
  using Item = std::pair<Cost, Vertex>;
  std::vector<Cost> dist(static_cast<std::size_t>(n));
  for (Vertex source = 0; source < n; ++source) {
    std::fill(dist.begin(), dist.end(), DistanceTable::kUnreachable);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[source] = 0;
    queue.emplace(0, source);
    while (!queue.empty()) {
      auto [d, x] = queue.top();
      queue.pop();
      if (d > dist[x]) continue;
      for (auto [y, w] : adjacency[x]) {
        if (d + w < dist[y]) {
          dist[y] = d + w;
          queue.emplace(dist[y], y);
        }
      }
    }
    for (Vertex target = 0; target < n; ++target) table.at(source, target) = dist[target];
  }
  return table;
}

}  // namespace carp
