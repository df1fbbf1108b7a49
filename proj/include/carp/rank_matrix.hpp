#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "carp/instance.hpp"

namespace carp {

// Four times the link cost between two tasks: the sum of the shortest-path
// costs over all four endpoint pairings. Kept integral so that ties compare
// exactly; independent of which directed ID represents each task.
Cost link_cost_numerator(const Instance& instance, const DistanceTable& dist, int task_a,
                         int task_b);

inline double link_cost(const Instance& instance, const DistanceTable& dist, int task_a,
                        int task_b) {
  return static_cast<double>(link_cost_numerator(instance, dist, task_a, task_b)) / 4.0;
}

// Competition ranks of `values`, skipping position `self` (rank 0 there):
// rank(i) = 1 + |{j != self : values[j] < values[i]}|.
std::vector<std::uint32_t> competition_ranks(std::span<const Cost> values, std::size_t self);

// Row-wise competition ranking of link costs between tasks. Not symmetric.
class RankMatrix {
 public:
  RankMatrix() = default;

  // Ranks a dense row-major task_count x task_count table of link-cost
  // numerators. Diagonal entries are ignored.
  static RankMatrix from_link_costs(int task_count, std::span<const Cost> numerators);

  int task_count() const { return n_; }

  // Rank of the link from task `from` to task `to`; 0 on the diagonal.
  std::uint32_t operator()(int from, int to) const {
    const auto i = static_cast<std::size_t>(from) * static_cast<std::size_t>(n_) +
                   static_cast<std::size_t>(to);
    return std::visit([i](const auto& v) { return static_cast<std::uint32_t>(v[i]); }, ranks_);
  }

  // Bytes per stored rank (1, 2 or 4).
  std::size_t entry_width() const;

  // Debug dump: header row and column of task endpoint pairs (1-based).
  void write_csv(std::ostream& out, const Instance& instance) const;

 private:
  friend RankMatrix build_rank_matrix(const Instance&, const DistanceTable&);
  explicit RankMatrix(int task_count);
  void set_row(int row, std::span<const std::uint32_t> ranks);

  int n_ = 0;
  std::variant<std::vector<std::uint8_t>, std::vector<std::uint16_t>, std::vector<std::uint32_t>>
      ranks_;
};

RankMatrix build_rank_matrix(const Instance& instance, const DistanceTable& dist);

}  // namespace carp
