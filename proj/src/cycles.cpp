#include "sqrt2lab/cycles.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>

#include "sqrt2lab/error.hpp"

namespace sqrt2lab {

CycleVerdict detect_cycle(const BigInt& n, const CycleLimits& limits) {
  if (limits.iteration_cap == 0) {
    throw DomainError(ErrorKind::InvalidArgument, "iteration cap must be at least 1");
  }
  const OrbitCursor start(n);

  // Brent: the tortoise jumps to the hare at powers of two.
  OrbitCursor tortoise = start;
  OrbitCursor hare = start;
  hare.advance();
  std::uint64_t evaluations = 1;
  std::uint64_t power = 1;
  std::uint64_t lambda = 1;
  while (!(tortoise == hare)) {
    if (evaluations >= limits.iteration_cap) {
      return Divergent{n, evaluations, false};
    }
    if (hare.bit_length() > limits.value_cap_bits) {
      return Divergent{n, evaluations, true};
    }
    if (power == lambda) {
      tortoise = hare;
      power *= 2;
      lambda = 0;
    }
    hare.advance();
    ++evaluations;
    ++lambda;
  }

  // Minimal pre-period: walk two cursors lambda apart until they meet.
  tortoise = start;
  hare = start;
  for (std::uint64_t i = 0; i < lambda; ++i) hare.advance();
  std::uint64_t mu = 0;
  while (!(tortoise == hare)) {
    tortoise.advance();
    hare.advance();
    ++mu;
  }

  CycleReport report;
  report.start_n = n;
  report.pre_period_m = mu;
  report.period_r = lambda;
  report.cycle_members.reserve(static_cast<std::size_t>(lambda));
  for (std::uint64_t i = 0; i < lambda; ++i) {
    report.cycle_members.push_back(tortoise.value());
    tortoise.advance();
  }
  const auto min_it = std::min_element(report.cycle_members.begin(), report.cycle_members.end());
  std::rotate(report.cycle_members.begin(), min_it, report.cycle_members.end());
  return report;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("SQRT2LAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

ClassifiedRange classify_range(std::uint64_t lo, std::uint64_t hi,
                               const CycleLimits& limits, unsigned threads) {
  if (hi <= lo) {
    throw DomainError(ErrorKind::InvalidArgument, "classify_range needs lo < hi");
  }
  const std::uint64_t count = hi - lo;
  std::vector<std::optional<CycleReport>> slots(static_cast<std::size_t>(count));

  constexpr std::uint64_t kChunk = 64;
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::uint64_t begin = next.fetch_add(kChunk);
      if (begin >= count) return;
      const std::uint64_t end = std::min(count, begin + kChunk);
      for (std::uint64_t i = begin; i < end; ++i) {
        auto verdict = detect_cycle(BigInt{static_cast<unsigned long>(lo + i)}, limits);
        if (auto* report = std::get_if<CycleReport>(&verdict)) {
          slots[static_cast<std::size_t>(i)] = std::move(*report);
        }
      }
    }
  };

  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, (count + kChunk - 1) / kChunk));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  ClassifiedRange out;
  out.lo = lo;
  out.hi = hi;
  out.iteration_cap = limits.iteration_cap;
  out.value_cap_bits = limits.value_cap_bits;
  for (std::uint64_t i = 0; i < count; ++i) {
    auto& slot = slots[static_cast<std::size_t>(i)];
    if (slot) {
      out.cycling.push_back(std::move(*slot));
    } else {
      out.divergent.push_back(lo + i);
    }
  }
  return out;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> counting_function(
    const ClassifiedRange& range) {
  if (range.lo != 0) {
    throw DomainError(ErrorKind::InvalidArgument, "counting function needs a range starting at 0");
  }
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  out.reserve(static_cast<std::size_t>(range.hi));
  auto it = range.cycling.begin();
  std::uint64_t total = 0;
  for (std::uint64_t n = 0; n < range.hi; ++n) {
    if (it != range.cycling.end() && it->start_n == static_cast<unsigned long>(n)) {
      ++total;
      ++it;
    }
    out.emplace_back(n, total);
  }
  return out;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> counting_function(
    std::uint64_t hi, const CycleLimits& limits, unsigned threads) {
  if (hi == 0) {
    throw DomainError(ErrorKind::InvalidArgument, "counting function needs hi >= 1");
  }
  return counting_function(classify_range(0, hi, limits, threads));
}

}  // namespace sqrt2lab
