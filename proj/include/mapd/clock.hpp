#pragma once

#include <chrono>
#include <limits>

namespace mapd {

/// Wall-clock budget shared by cooperating solver stages.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  static Deadline never() { return Deadline(Clock::time_point::max()); }

  static Deadline after(double seconds) {
    if (seconds >= 1e9) return never();
    auto d = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds));
    return Deadline(Clock::now() + d);
  }

  bool expired() const { return end_ != Clock::time_point::max() && Clock::now() >= end_; }

  double remaining_s() const {
    if (end_ == Clock::time_point::max()) return std::numeric_limits<double>::infinity();
    return std::chrono::duration<double>(end_ - Clock::now()).count();
  }

 private:
  explicit Deadline(Clock::time_point end) : end_(end) {}
  Clock::time_point end_;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace mapd
