#include "carp/stats.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace carp {

std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::ranges::stable_sort(order, {}, [&](std::size_t i) { return values[i]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mu = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

namespace {

constexpr double kTolerance = 1e-9;

double exact_p(const std::vector<double>& ranks, std::size_t n, double observed) {
  const std::size_t total = ranks.size();
  const double expected = static_cast<double>(n) * static_cast<double>(total + 1) / 2.0;
  const double deviation = std::abs(observed - expected);
  std::size_t extreme = 0;
  std::size_t subsets = 0;
  // Walk every n-subset of the pooled ranks via bitmasks.
  for (std::uint32_t mask = 0; mask < (1u << total); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != n) continue;
    double w = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
      if (mask & (1u << i)) w += ranks[i];
    }
    ++subsets;
    if (std::abs(w - expected) >= deviation - kTolerance) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(subsets);
}

double normal_p(const std::vector<double>& ranks, std::size_t n, double observed) {
  const auto total = static_cast<double>(ranks.size());
  const auto n1 = static_cast<double>(n);
  const double n2 = total - n1;
  const double expected = n1 * (total + 1.0) / 2.0;
  std::vector<double> sorted = ranks;
  std::ranges::sort(sorted);
  double ties = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }
  const double variance = n1 * n2 / 12.0 * ((total + 1.0) - ties / (total * (total - 1.0)));
  if (variance <= 0.0) return 1.0;
  const double z = std::max(0.0, std::abs(observed - expected) - 0.5) / std::sqrt(variance);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

}  // namespace

RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                                PValueMethod method) {
  if (a.size() < 3 || b.size() < 3) {
    throw std::invalid_argument("rank-sum test needs at least 3 values per sample");
  }
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::vector<double> ranks = midranks(pooled);

  RankSumResult result;
  result.statistic = std::accumulate(ranks.begin(), ranks.begin() + static_cast<long>(a.size()), 0.0);
  if (std::ranges::all_of(pooled, [&](double v) { return v == pooled.front(); })) {
    result.degenerate = true;
    result.p_value = 1.0;
    return result;
  }
  const bool use_exact = method == PValueMethod::exact ||
                         (method == PValueMethod::automatic && pooled.size() <= 12);
  if (use_exact && pooled.size() > 24) {
    throw std::invalid_argument("exact rank-sum enumeration is limited to 24 pooled values");
  }
  result.exact = use_exact;
  result.p_value = use_exact ? exact_p(ranks, a.size(), result.statistic)
                             : normal_p(ranks, a.size(), result.statistic);
  return result;
}

}  // namespace carp
