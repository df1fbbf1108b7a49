#pragma once

#include <chrono>
#include <cstdint>

namespace carp {

enum class ClockMode {
  wall,  // steady wall-clock time
  work,  // logical time derived from counted move evaluations; reproducible
};

// Elapsed-time source for search budgets and traces.
//
// In work mode one millisecond corresponds to kEvaluationsPerMs charged
// evaluations, so budgets and trace timestamps are a pure function of the
// computation performed.
class Stopwatch {
 public:
  static constexpr std::uint64_t kEvaluationsPerMs = 20000;

  explicit Stopwatch(ClockMode mode = ClockMode::wall)
      : mode_(mode), start_(std::chrono::steady_clock::now()) {}

  ClockMode mode() const { return mode_; }

  double elapsed_ms() const {
    if (mode_ == ClockMode::work) {
      return static_cast<double>(ticks_) / static_cast<double>(kEvaluationsPerMs);
    }
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

  void charge(std::uint64_t evaluations) { ticks_ += evaluations; }

  // Independent clock for a worker: shares the wall start, or continues from
  // the current logical time.
  Stopwatch fork() const {
    Stopwatch child = *this;
    child.fork_base_ = ticks_;
    return child;
  }

  // Adds the logical work a forked worker performed since fork().
  void absorb(const Stopwatch& worker) { ticks_ += worker.ticks_ - worker.fork_base_; }

 private:
  ClockMode mode_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t ticks_ = 0;
  std::uint64_t fork_base_ = 0;
};

}  // namespace carp
