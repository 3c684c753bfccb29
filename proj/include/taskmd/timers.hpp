#pragma once

#include <array>
#include <chrono>
#include <cstddef>

namespace taskmd {

// Wall-time sections of the integrator loop. Every phase of a step is
// attributed to exactly one of these.
enum class Section : std::size_t {
  kForces = 0,
  kComm = 1,
  kIntegrate = 2,
  kNeigh = 3,
  kResort = 4,
};

inline constexpr std::size_t kSectionCount = 5;

inline const char* section_name(Section s) {
  static const char* const names[kSectionCount] = {"Forces", "Comm",
                                                   "Integrate", "Neigh",
                                                   "Resort"};
  return names[static_cast<std::size_t>(s)];
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}

  void restart() { start_ = std::chrono::steady_clock::now(); }

  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Accumulated wall time per section plus the total loop time. The total is
// measured around whole steps, so it also covers the slack between phases;
// the five sections are expected to account for nearly all of it.
struct SectionTimers {
  std::array<double, kSectionCount> seconds{};
  double elapsed = 0.0;

  void add(Section s, double dt) { seconds[static_cast<std::size_t>(s)] += dt; }

  double operator[](Section s) const {
    return seconds[static_cast<std::size_t>(s)];
  }

  double section_sum() const {
    double total = 0.0;
    for (double s : seconds) total += s;
    return total;
  }
};

}  // namespace taskmd
