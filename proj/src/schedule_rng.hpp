#pragma once

#include <cstdint>
#include <random>

namespace splitnet::detail {

// Scheduling randomness. std::mt19937_64 is bit-exact across standard
// libraries; the bounded draw is done here by rejection sampling instead of
// std::uniform_int_distribution, whose algorithm is implementation-defined.
class ScheduleRng {
 public:
  explicit ScheduleRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, bound). bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace splitnet::detail
