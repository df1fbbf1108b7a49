#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "carp/generator.hpp"
#include "carp/rco.hpp"
#include "carp/search.hpp"
#include "carp/stats.hpp"

namespace py = pybind11;
using namespace carp;

namespace {

std::vector<std::vector<TaskId>> route_lists(const Solution& s) {
  std::vector<std::vector<TaskId>> out;
  for (const auto& r : s.routes) {
    const auto in = r.interior();
    out.emplace_back(in.begin(), in.end());
  }
  return out;
}

SearchConfig make_config(const py::kwargs& kw) {
  SearchConfig cfg;
  for (const auto& [k, v] : kw) {
    const auto key = k.cast<std::string>();
    if (key == "algorithm") cfg.algorithm = parse_algorithm(v.cast<std::string>());
    else if (key == "seed") cfg.seed = v.cast<std::uint64_t>();
    else if (key == "time_limit") cfg.time_limit = v.cast<double>();
    else if (key == "lambda_") cfg.rco.lambda = v.cast<double>();
    else if (key == "theta") cfg.rco.theta = v.cast<double>();
    else if (key == "groups") cfg.cluster.groups = v.cast<int>();
    else if (key == "scale") cfg.scale = v.cast<double>();
    else if (key == "accept_threshold") cfg.accept_threshold = v.cast<double>();
    else if (key == "idle_limit") cfg.idle_limit = v.cast<std::uint64_t>();
    else if (key == "max_cycles") cfg.max_cycles = v.cast<int>();
    else if (key == "pool_size") cfg.pool_size = v.cast<int>();
    else if (key == "parallel_groups") cfg.parallel_groups = v.cast<bool>();
    else if (key == "clock") {
      const auto c = v.cast<std::string>();
      if (c == "wall") cfg.clock = ClockMode::wall;
      else if (c == "work") cfg.clock = ClockMode::work;
      else throw py::value_error("clock must be 'wall' or 'work'");
    } else {
      throw py::type_error("unknown solver option: " + key);
    }
  }
  cfg.check();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Capacitated arc routing with route cutting off decomposition";

  py::register_exception<InstanceError>(m, "InstanceError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<Instance>(m, "Instance")
      .def_property_readonly("name", &Instance::name)
      .def_property_readonly("vertex_count", &Instance::vertex_count)
      .def_property_readonly("depot", &Instance::depot)
      .def_property_readonly("capacity", &Instance::capacity)
      .def_property_readonly("task_count", &Instance::task_count)
      .def_property_readonly("total_demand", &Instance::total_demand)
      .def("forward_id", &Instance::forward_id)
      .def("reverse_id", &Instance::reverse_id)
      .def("task_of", &Instance::task_of)
      .def("to_dat", [](const Instance& i) {
        std::ostringstream out;
        write_instance(out, i);
        return out.str();
      })
      .def("__repr__", [](const Instance& i) {
        return "<Instance " + i.name() + " tasks=" + std::to_string(i.task_count()) + ">";
      });

  m.def("load_instance", [](const std::filesystem::path& p) { return load_instance_file(p); },
        py::arg("path"));
  m.def("parse_instance", [](const std::string& text) { return load_instance_string(text); },
        py::arg("text"));
  m.def("generate_instance", &generate_instance, py::arg("vertices"), py::arg("tasks"),
        py::arg("capacity"), py::arg("seed"));
  m.def("min_vehicles", &min_vehicles, py::arg("instance"));

  py::class_<Solution>(m, "Solution")
      .def_readonly("total_cost", &Solution::total_cost)
      .def_property_readonly("routes", &route_lists)
      .def("to_text", [](const Solution& s, const Instance& i) {
        std::ostringstream out;
        write_solution(out, s, i);
        return out.str();
      });

  py::class_<SearchTrace>(m, "Trace")
      .def_property_readonly("points",
                             [](const SearchTrace& t) {
                               std::vector<std::pair<double, Cost>> out;
                               for (const auto& p : t.points()) out.emplace_back(p.elapsed_ms, p.best_cost);
                               return out;
                             })
      .def_readonly("iterations", &SearchTrace::iterations)
      .def("monotone", &SearchTrace::monotone);

  py::class_<SearchResult>(m, "SearchResult")
      .def_readonly("best", &SearchResult::best)
      .def_readonly("trace", &SearchResult::trace);

  py::class_<Problem, std::shared_ptr<Problem>>(m, "Problem")
      .def(py::init([](const Instance& i) {
             return std::const_pointer_cast<Problem>(Problem::build(i));
           }),
           py::arg("instance"))
      .def_property_readonly("instance", [](const Problem& p) { return p.instance; })
      .def("distance", [](const Problem& p, Vertex a, Vertex b) { return p.dist(a, b); })
      .def("rank", [](const Problem& p, int a, int b) { return p.ranks(a, b); })
      .def("make_solution",
           [](const Problem& p, const std::vector<std::vector<TaskId>>& routes) {
             return make_solution(routes, p.instance, p.dist);
           })
      .def("validate",
           [](const Problem& p, const Solution& s) {
             std::vector<std::string> out;
             for (const auto& v : validate(s, p.instance).violations) out.push_back(v.message);
             return out;
           })
      .def("average_task_rank",
           [](const Problem& p, const Solution& s) { return average_task_rank(s, p.instance, p.ranks); })
      .def("rco_split",
           [](const Problem& p, const Solution& s, double lambda, double theta, std::uint64_t seed) {
             Rng rng(seed);
             std::vector<std::vector<TaskId>> out;
             for (auto& sub : rco_split(s, p.instance, p.ranks, RcoParams{lambda, theta}, rng)) {
               out.push_back(std::move(sub.ids));
             }
             return out;
           },
           py::arg("solution"), py::arg("lambda_"), py::arg("theta"), py::arg("seed") = 1)
      .def("solve",
           [](const Problem& p, const py::kwargs& kw) {
             const auto cfg = make_config(kw);
             py::gil_scoped_release release;
             return solve(p, cfg);
           });

  m.def("rank_sum_test",
        [](const std::vector<double>& a, const std::vector<double>& b, const std::string& method) {
          PValueMethod pm = PValueMethod::automatic;
          if (method == "exact") pm = PValueMethod::exact;
          else if (method == "normal") pm = PValueMethod::normal;
          else if (method != "auto") throw py::value_error("method must be auto, exact or normal");
          const auto r = wilcoxon_rank_sum(a, b, pm);
          py::dict d;
          d["statistic"] = r.statistic;
          d["p_value"] = r.p_value;
          d["exact"] = r.exact;
          d["degenerate"] = r.degenerate;
          return d;
        },
        py::arg("a"), py::arg("b"), py::arg("method") = "auto");
}
