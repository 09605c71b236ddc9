#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "sqrt2lab/core_map.hpp"

namespace sqrt2lab {

struct CycleLimits {
  std::uint64_t iteration_cap = 20000;  // map applications during detection
  std::uint64_t value_cap_bits = std::uint64_t{1} << 16;
};

struct CycleReport {
  BigInt start_n;
  std::uint64_t pre_period_m = 0;
  std::uint64_t period_r = 0;
  // Starts at the smallest member; f(back()) == front().
  std::vector<BigInt> cycle_members;
};

/// Heuristic verdict: no repeat was found within the caps. Never a proof.
struct Divergent {
  BigInt start_n;
  std::uint64_t iterations = 0;
  bool hit_value_cap = false;
};

using CycleVerdict = std::variant<CycleReport, Divergent>;

/// Brent's cycle detection on exact iterates of f, followed by the minimal
/// pre-period search.
CycleVerdict detect_cycle(const BigInt& n, const CycleLimits& limits = {});

struct ClassifiedRange {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::vector<CycleReport> cycling;  // ordered by start_n
  std::vector<std::uint64_t> divergent;  // ordered
  std::uint64_t iteration_cap = 0;
  std::uint64_t value_cap_bits = 0;
};

/// Worker count: SQRT2LAB_THREADS if set and positive, else the hardware count.
unsigned default_thread_count();

/// Runs detect_cycle on every n in [lo, hi). Work is spread over `threads`
/// workers (0 = default_thread_count()); the result does not depend on it.
ClassifiedRange classify_range(std::uint64_t lo, std::uint64_t hi,
                               const CycleLimits& limits = {}, unsigned threads = 0);

/// (n, number of cycling k <= n) for n in [0, hi).
std::vector<std::pair<std::uint64_t, std::uint64_t>> counting_function(
    const ClassifiedRange& range);
std::vector<std::pair<std::uint64_t, std::uint64_t>> counting_function(
    std::uint64_t hi, const CycleLimits& limits = {}, unsigned threads = 0);

}  // namespace sqrt2lab
