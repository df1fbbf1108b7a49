#include "carp/local_search.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <stdexcept>

namespace carp {

namespace {

class Descent {
 public:
  Descent(Solution&& solution, const Instance& instance, const DistanceTable& dist,
          const LocalSearchBudget& budget, Rng& rng)
      : inst_(instance), dist_(dist), budget_(budget), rng_(rng) {
    for (Route& r : solution.routes) {
      if (!r.empty()) routes_.push_back(std::move(r.ids));
    }
    routes_.push_back({kDepotId, kDepotId});
    const auto m = static_cast<std::size_t>(instance.task_count());
    where_route_.assign(m, -1);
    where_pos_.assign(m, -1);
    loads_.resize(routes_.size());
    costs_.resize(routes_.size());
    prefix_.resize(routes_.size());
    for (std::size_t r = 0; r < routes_.size(); ++r) reindex(r);
    total_ = std::accumulate(costs_.begin(), costs_.end(), Cost{0});
  }

  void run(LocalSearchStats& stats) {
    std::vector<int> order;
    for (int t = 0; t < inst_.task_count(); ++t) {
      if (where_route_[t] >= 0) order.push_back(t);
    }
    bool improved = true;
    while (improved && !stopped_) {
      improved = false;
      rng_.shuffle(order);
      route_order_.resize(routes_.size());
      std::iota(route_order_.begin(), route_order_.end(), 0);
      rng_.shuffle(route_order_);
      for (int task : order) {
        if (stopped_) break;
        if (try_task(task)) {
          improved = true;
          ++stats.moves;
          if (budget_.max_moves > 0 && stats.moves >= budget_.max_moves) stopped_ = true;
        }
      }
    }
    flush_clock();
    stats.evaluations = evaluations_;
    stats.local_optimum = !improved && !stopped_;
  }

  Solution result() && {
    Solution out;
    for (auto& ids : routes_) {
      if (ids.size() <= 2) continue;
      out.routes.push_back(make_route(std::span<const TaskId>(ids).subspan(1, ids.size() - 2), inst_, dist_));
    }
    refresh(out, inst_, dist_);
    return out;
  }

 private:
  using Ids = std::vector<TaskId>;

  Cost link(TaskId a, TaskId b) const { return dist_(inst_.tail(a), inst_.head(b)); }
  Cost sc(TaskId a) const { return inst_.service_cost(a); }
  Demand demand(TaskId a) const { return inst_.demand(a); }
  Demand capacity() const { return inst_.capacity(); }

  void reindex(std::size_t r) {
    const Ids& ids = routes_[r];
    prefix_[r].resize(ids.size());
    Demand load = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      load += demand(ids[i]);
      prefix_[r][i] = load;
      if (ids[i] != kDepotId) {
        const int t = inst_.task_of(ids[i]);
        where_route_[t] = static_cast<int>(r);
        where_pos_[t] = static_cast<int>(i);
      }
    }
    loads_[r] = load;
    costs_[r] = route_cost(ids, inst_, dist_);
  }

  // Loads of ids[0..i] inclusive.
  Demand head_load(std::size_t r, std::size_t i) const { return prefix_[r][i]; }

  void ensure_spare_route() {
    for (const Ids& ids : routes_) {
      if (ids.size() <= 2) return;
    }
    routes_.push_back({kDepotId, kDepotId});
    loads_.push_back(0);
    costs_.push_back(0);
    prefix_.push_back({0, 0});
    route_order_.push_back(static_cast<int>(routes_.size()) - 1);
  }

  // Returns false once the budget is exhausted.
  bool tick() {
    ++evaluations_;
    if (++pending_ >= 256) {
      flush_clock();
      if (budget_.clock && budget_.clock->elapsed_ms() >= budget_.deadline_ms) stopped_ = true;
    }
    return !stopped_;
  }

  void flush_clock() {
    if (budget_.clock) budget_.clock->charge(pending_);
    pending_ = 0;
  }

  void commit(std::initializer_list<std::size_t> touched, Cost delta) {
    total_ += delta;
    for (std::size_t r : touched) reindex(r);
    ensure_spare_route();
    if (budget_.verify_costs) {
      Cost sum = std::accumulate(costs_.begin(), costs_.end(), Cost{0});
      if (sum != total_) {
        throw std::logic_error("local search delta mismatch: tracked " + std::to_string(total_) +
                               ", recomputed " + std::to_string(sum));
      }
      for (std::size_t r = 0; r < routes_.size(); ++r) {
        if (loads_[r] > capacity()) throw std::logic_error("local search broke capacity");
      }
    }
  }

  bool try_task(int task) {
    std::array<int, 4> kinds{0, 1, 2, 3};
    rng_.shuffle(kinds);
    for (int kind : kinds) {
      bool applied = false;
      switch (kind) {
        case 0: applied = try_relocate(task); break;
        case 1: applied = try_swap(task); break;
        case 2: applied = try_reverse(task); break;
        case 3: applied = try_tail_exchange(task); break;
      }
      if (applied || stopped_) return applied;
    }
    return false;
  }

  bool try_relocate(int task) {
    const auto r1 = static_cast<std::size_t>(where_route_[task]);
    const auto i = static_cast<std::size_t>(where_pos_[task]);
    const Ids& a = routes_[r1];
    const TaskId u = a[i];
    const TaskId p = a[i - 1];
    const TaskId n = a[i + 1];
    const Cost removal = link(p, u) + sc(u) + link(u, n) - link(p, n);
    const bool alone = a.size() == 3;

    for (int r2i : route_order_) {
      const auto r2 = static_cast<std::size_t>(r2i);
      const Ids& b = routes_[r2];
      if (r2 != r1) {
        if (loads_[r2] + demand(u) > capacity()) continue;
        if (alone && b.size() == 2) continue;
      }
      for (std::size_t j = 1; j < b.size(); ++j) {
        if (r2 == r1 && (j == i || j == i + 1)) continue;
        const TaskId x = b[j - 1];
        const TaskId y = b[j];
        for (TaskId v : {u, inst_.inverse(u)}) {
          if (!tick()) return false;
          const Cost delta = link(x, v) + sc(v) + link(v, y) - link(x, y) - removal;
          if (delta < 0) {
            Ids& from = routes_[r1];
            Ids& to = routes_[r2];
            if (r1 == r2) {
              from.erase(from.begin() + static_cast<std::ptrdiff_t>(i));
              const std::size_t at = j > i ? j - 1 : j;
              from.insert(from.begin() + static_cast<std::ptrdiff_t>(at), v);
              commit({r1}, delta);
            } else {
              from.erase(from.begin() + static_cast<std::ptrdiff_t>(i));
              to.insert(to.begin() + static_cast<std::ptrdiff_t>(j), v);
              commit({r1, r2}, delta);
            }
            return true;
          }
        }
      }
    }
    return false;
  }

  // Cheapest way to put one of {v, inv(v)} between p and n.
  std::pair<Cost, TaskId> best_fit(TaskId p, TaskId v, TaskId n) const {
    const TaskId w = inst_.inverse(v);
    const Cost cv = link(p, v) + sc(v) + link(v, n);
    const Cost cw = link(p, w) + sc(w) + link(w, n);
    return cw < cv ? std::pair{cw, w} : std::pair{cv, v};
  }

  bool try_swap(int task) {
    const auto r1 = static_cast<std::size_t>(where_route_[task]);
    const auto i = static_cast<std::size_t>(where_pos_[task]);
    const Ids& a = routes_[r1];
    const TaskId u = a[i];
    const TaskId p1 = a[i - 1];
    const TaskId n1 = a[i + 1];
    const Cost old1 = link(p1, u) + sc(u) + link(u, n1);

    for (int r2i : route_order_) {
      const auto r2 = static_cast<std::size_t>(r2i);
      const Ids& b = routes_[r2];
      for (std::size_t j = 1; j + 1 < b.size(); ++j) {
        if (r2 == r1 && (j + 1 >= i && j <= i + 1)) continue;  // self or adjacent
        const TaskId v = b[j];
        if (r2 != r1) {
          if (loads_[r1] - demand(u) + demand(v) > capacity()) continue;
          if (loads_[r2] - demand(v) + demand(u) > capacity()) continue;
        }
        if (!tick()) return false;
        const TaskId p2 = b[j - 1];
        const TaskId n2 = b[j + 1];
        const Cost old2 = link(p2, v) + sc(v) + link(v, n2);
        auto [new1, v_in] = best_fit(p1, v, n1);
        auto [new2, u_in] = best_fit(p2, u, n2);
        const Cost delta = new1 + new2 - old1 - old2;
        if (delta < 0) {
          routes_[r1][i] = v_in;
          routes_[r2][j] = u_in;
          if (r1 == r2) {
            commit({r1}, delta);
          } else {
            commit({r1, r2}, delta);
          }
          return true;
        }
      }
    }
    return false;
  }

  // Reverses a segment that starts or ends at the task.
  bool try_reverse(int task) {
    const auto r = static_cast<std::size_t>(where_route_[task]);
    const auto i = static_cast<std::size_t>(where_pos_[task]);
    const Ids& a = routes_[r];
    const std::size_t last = a.size() - 2;
    for (std::size_t other = 1; other <= last; ++other) {
      if (other == i) continue;
      const std::size_t s = std::min(i, other);
      const std::size_t e = std::max(i, other);
      if (!tick()) return false;
      const Cost delta = link(a[s - 1], inst_.inverse(a[e])) + link(inst_.inverse(a[s]), a[e + 1]) -
                         link(a[s - 1], a[s]) - link(a[e], a[e + 1]);
      if (delta < 0) {
        Ids& ids = routes_[r];
        std::reverse(ids.begin() + static_cast<std::ptrdiff_t>(s),
                     ids.begin() + static_cast<std::ptrdiff_t>(e + 1));
        for (std::size_t k = s; k <= e; ++k) ids[k] = inst_.inverse(ids[k]);
        commit({r}, delta);
        return true;
      }
    }
    return false;
  }

  // Cuts route r1 next to the task and another route anywhere, then
  // reconnects the four pieces either crosswise or head-to-head.
  bool try_tail_exchange(int task) {
    const auto r1 = static_cast<std::size_t>(where_route_[task]);
    const auto i = static_cast<std::size_t>(where_pos_[task]);
    for (std::size_t c1 : {i - 1, i}) {
      for (int r2i : route_order_) {
        const auto r2 = static_cast<std::size_t>(r2i);
        if (r2 == r1) continue;
        const Ids& a = routes_[r1];
        const Ids& b = routes_[r2];
        const Demand la = head_load(r1, c1);
        const Demand ta = loads_[r1] - la;
        for (std::size_t c2 = 0; c2 + 1 < b.size(); ++c2) {
          const Demand lb = head_load(r2, c2);
          const Demand tb = loads_[r2] - lb;
          const Cost broken = link(a[c1], a[c1 + 1]) + link(b[c2], b[c2 + 1]);
          // a-head + b-tail, b-head + a-tail
          if (la + tb <= capacity() && lb + ta <= capacity()) {
            if (!tick()) return false;
            const Cost delta = link(a[c1], b[c2 + 1]) + link(b[c2], a[c1 + 1]) - broken;
            if (delta < 0) {
              Ids na(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(c1 + 1));
              na.insert(na.end(), b.begin() + static_cast<std::ptrdiff_t>(c2 + 1), b.end());
              Ids nb(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(c2 + 1));
              nb.insert(nb.end(), a.begin() + static_cast<std::ptrdiff_t>(c1 + 1), a.end());
              routes_[r1] = std::move(na);
              routes_[r2] = std::move(nb);
              commit({r1, r2}, delta);
              return true;
            }
          }
          // a-head + reversed b-head, reversed a-tail + b-tail
          if (la + lb <= capacity() && ta + tb <= capacity()) {
            if (!tick()) return false;
            const Cost delta = link(a[c1], inst_.inverse(b[c2])) +
                               link(inst_.inverse(a[c1 + 1]), b[c2 + 1]) - broken;
            if (delta < 0) {
              Ids na(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(c1 + 1));
              for (std::size_t k = c2 + 1; k-- > 0;) na.push_back(inst_.inverse(b[k]));
              Ids nb;
              for (std::size_t k = a.size(); k-- > c1 + 1;) nb.push_back(inst_.inverse(a[k]));
              nb.insert(nb.end(), b.begin() + static_cast<std::ptrdiff_t>(c2 + 1), b.end());
              routes_[r1] = std::move(na);
              routes_[r2] = std::move(nb);
              commit({r1, r2}, delta);
              return true;
            }
          }
        }
      }
    }
    return false;
  }

  const Instance& inst_;
  const DistanceTable& dist_;
  const LocalSearchBudget& budget_;
  Rng& rng_;

  std::vector<Ids> routes_;
  std::vector<Demand> loads_;
  std::vector<Cost> costs_;
  std::vector<std::vector<Demand>> prefix_;
  std::vector<int> where_route_;
  std::vector<int> where_pos_;
  std::vector<int> route_order_;
  Cost total_ = 0;

  std::uint64_t evaluations_ = 0;
  std::uint64_t pending_ = 0;
  bool stopped_ = false;
};

}  // namespace

Solution local_search(Solution solution, const Instance& instance, const DistanceTable& dist,
                      const LocalSearchBudget& budget, Rng& rng, LocalSearchStats* stats) {
  LocalSearchStats local;
  Descent descent(std::move(solution), instance, dist, budget, rng);
  descent.run(local);
  if (stats) *stats = local;
  return std::move(descent).result();
}

}  // namespace carp
