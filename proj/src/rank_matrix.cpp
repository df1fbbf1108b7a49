#include "carp/rank_matrix.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace carp {

Cost link_cost_numerator(const Instance& instance, const DistanceTable& dist, int task_a,
                         int task_b) {
  if (task_a == task_b) throw std::invalid_argument("link cost of a task to itself is undefined");
  const Task& a = instance.tasks()[static_cast<std::size_t>(task_a)];
  const Task& b = instance.tasks()[static_cast<std::size_t>(task_b)];
  return dist(a.u, b.u) + dist(a.u, b.v) + dist(a.v, b.u) + dist(a.v, b.v);
}

std::vector<std::uint32_t> competition_ranks(std::span<const Cost> values, std::size_t self) {
  std::vector<std::size_t> order;
  order.reserve(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (j != self) order.push_back(j);
  }
  std::ranges::sort(order, [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });

  std::vector<std::uint32_t> ranks(values.size(), 0);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    if (pos > 0 && values[order[pos]] == values[order[pos - 1]]) {
      ranks[order[pos]] = ranks[order[pos - 1]];
    } else {
      ranks[order[pos]] = static_cast<std::uint32_t>(pos + 1);
    }
  }
  return ranks;
}

RankMatrix::RankMatrix(int task_count) : n_(task_count) {
  const auto cells = static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  if (n_ <= 256) {
    ranks_ = std::vector<std::uint8_t>(cells, 0);
  } else if (n_ <= 65536) {
    ranks_ = std::vector<std::uint16_t>(cells, 0);
  } else {
    ranks_ = std::vector<std::uint32_t>(cells, 0);
  }
}

void RankMatrix::set_row(int row, std::span<const std::uint32_t> ranks) {
  const auto base = static_cast<std::size_t>(row) * static_cast<std::size_t>(n_);
  std::visit(
      [&](auto& v) {
        using T = typename std::decay_t<decltype(v)>::value_type;
        for (std::size_t j = 0; j < ranks.size(); ++j) v[base + j] = static_cast<T>(ranks[j]);
      },
      ranks_);
}

std::size_t RankMatrix::entry_width() const {
  return std::visit([](const auto& v) { return sizeof(typename std::decay_t<decltype(v)>::value_type); },
                    ranks_);
}

RankMatrix RankMatrix::from_link_costs(int task_count, std::span<const Cost> numerators) {
  const auto n = static_cast<std::size_t>(task_count);
  if (numerators.size() != n * n) {
    throw std::invalid_argument("link-cost table must be task_count x task_count");
  }
  RankMatrix matrix(task_count);
  for (std::size_t i = 0; i < n; ++i) {
    matrix.set_row(static_cast<int>(i), competition_ranks(numerators.subspan(i * n, n), i));
  }
  return matrix;
}

RankMatrix build_rank_matrix(const Instance& instance, const DistanceTable& dist) {
  const int n = instance.task_count();
  RankMatrix matrix(n);
  std::vector<Cost> row(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) row[j] = i == j ? 0 : link_cost_numerator(instance, dist, i, j);
    matrix.set_row(i, competition_ranks(row, static_cast<std::size_t>(i)));
  }
  return matrix;
}

void RankMatrix::write_csv(std::ostream& out, const Instance& instance) const {
  auto label = [&](int t) {
    const Task& task = instance.tasks()[static_cast<std::size_t>(t)];
    return "\"(" + std::to_string(task.u + 1) + "," + std::to_string(task.v + 1) + ")\"";
  };
  out << "task";
  for (int j = 0; j < n_; ++j) out << ',' << label(j);
  out << '\n';
  for (int i = 0; i < n_; ++i) {
    out << label(i);
    for (int j = 0; j < n_; ++j) {
      out << ',';
      if (i != j) out << (*this)(i, j);
    }
    out << '\n';
  }
}

}  // namespace carp
