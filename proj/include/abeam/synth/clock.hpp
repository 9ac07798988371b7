#pragma once

#include <chrono>
#include <cstdint>

namespace abeam {

/// Virtual time counts interpreter work (evaluation steps plus fixed
/// per-candidate and per-score overheads) and converts it to seconds at a
/// fixed rate, which makes budgets reproducible across machines and runs.
enum class ClockMode : unsigned char { Virtual, Wall };

/// Roughly matches one core of the development machine.
inline constexpr double kDefaultSecondsPerUnit = 4e-8;

class SearchClock {
 public:
  explicit SearchClock(ClockMode mode = ClockMode::Virtual, double seconds_per_unit = kDefaultSecondsPerUnit)
      : mode_(mode), rate_(seconds_per_unit), start_(std::chrono::steady_clock::now()) {}

  void charge(std::int64_t units) { units_ += units; }
  std::int64_t units() const { return units_; }

  double elapsed() const {
    if (mode_ == ClockMode::Virtual) return static_cast<double>(units_) * rate_;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  ClockMode mode_;
  double rate_;
  std::int64_t units_ = 0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace abeam
