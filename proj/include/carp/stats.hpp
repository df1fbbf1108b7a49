#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace carp {

enum class PValueMethod { automatic, exact, normal };

struct RankSumResult {
  double statistic = 0.0;  // rank sum of the first sample, midranks for ties
  double p_value = 1.0;    // two-sided
  bool exact = false;
  bool degenerate = false;  // every observation equal
};

// Two-sided Wilcoxon rank-sum test. Automatic mode enumerates all rank
// assignments when the pooled size is at most 12 and otherwise uses the
// tie-corrected normal approximation with continuity correction.
// Throws std::invalid_argument if either sample has fewer than 3 values.
RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                                PValueMethod method = PValueMethod::automatic);

// Midranks (1-based) of the pooled values.
std::vector<double> midranks(std::span<const double> values);

double mean(std::span<const double> values);
// Sample standard deviation; 0 for fewer than two values.
double stddev(std::span<const double> values);

}  // namespace carp
