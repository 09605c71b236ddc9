#include "sqrt2lab/cycles.hpp"

#include <map>

#include <gtest/gtest.h>

#include "sqrt2lab/error.hpp"

using namespace sqrt2lab;

namespace {

const std::vector<long> kCycle33{15,  21,  29,  41,  57,  80,  56,  39, 55, 77, 108,
                                 76,  53,  74,  52,  36,  25,  35,  49, 69, 97, 137,
                                 193, 272, 192, 135, 190, 134, 94,  66, 46, 32, 22};

std::vector<long> as_longs(const std::vector<BigInt>& v) {
  std::vector<long> out;
  for (const auto& x : v) out.push_back(x.get_si());
  return out;
}

// Brute-force pre-period/period by remembering every iterate.
std::optional<std::pair<std::uint64_t, std::uint64_t>> brute_cycle(std::uint64_t n,
                                                                   std::uint64_t cap) {
  std::map<std::uint64_t, std::uint64_t> seen;
  std::uint64_t x = n;
  for (std::uint64_t i = 0; i <= cap; ++i) {
    if (auto it = seen.find(x); it != seen.end()) return std::pair{it->second, i - it->second};
    seen[x] = i;
    x = step(x);
  }
  return std::nullopt;
}

}  // namespace

TEST(DetectCycle, ThirtyThreeCycle) {
  const auto v = detect_cycle(BigInt{15});
  const auto* r = std::get_if<CycleReport>(&v);
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->pre_period_m, 0u);
  EXPECT_EQ(r->period_r, 33u);
  EXPECT_EQ(as_longs(r->cycle_members), kCycle33);
  for (std::size_t i = 0; i < kCycle33.size(); ++i) {
    EXPECT_EQ(step(static_cast<std::uint64_t>(kCycle33[i])),
              static_cast<std::uint64_t>(kCycle33[(i + 1) % kCycle33.size()]));
  }
}

TEST(DetectCycle, FiveCycleAndFixedPoints) {
  const auto v7 = detect_cycle(BigInt{7});
  const auto* r7 = std::get_if<CycleReport>(&v7);
  ASSERT_NE(r7, nullptr);
  EXPECT_EQ(r7->period_r, 5u);
  EXPECT_EQ(as_longs(r7->cycle_members), (std::vector<long>{5, 7, 9, 12, 8}));

  const auto v2 = detect_cycle(BigInt{2});
  const auto* r2 = std::get_if<CycleReport>(&v2);
  ASSERT_NE(r2, nullptr);
  EXPECT_EQ(r2->pre_period_m, 1u);
  EXPECT_EQ(r2->period_r, 1u);
  EXPECT_EQ(as_longs(r2->cycle_members), (std::vector<long>{1}));

  const auto v0 = detect_cycle(BigInt{0});
  const auto* r0 = std::get_if<CycleReport>(&v0);
  ASSERT_NE(r0, nullptr);
  EXPECT_EQ(r0->pre_period_m, 0u);
  EXPECT_EQ(as_longs(r0->cycle_members), (std::vector<long>{0}));
}

TEST(DetectCycle, SeventyThreeIsHeuristicallyDivergent) {
  const auto v = detect_cycle(BigInt{73}, {20000, 1 << 16});
  const auto* d = std::get_if<Divergent>(&v);
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->iterations, 20000u);
  EXPECT_FALSE(d->hit_value_cap);

  const auto capped = detect_cycle(BigInt{73}, {20000, 64});
  ASSERT_TRUE(std::holds_alternative<Divergent>(capped));
  EXPECT_TRUE(std::get<Divergent>(capped).hit_value_cap);
  EXPECT_THROW(detect_cycle(BigInt{5}, {0, 64}), DomainError);
}

TEST(DetectCycle, ReportsResimulateAndAreMinimal) {
  for (std::uint64_t n = 0; n < 1000; ++n) {
    const auto v = detect_cycle(BigInt{static_cast<unsigned long>(n)});
    const auto* r = std::get_if<CycleReport>(&v);
    if (!r) continue;
    // Re-simulate m + 2r steps.
    std::vector<std::uint64_t> path{n};
    for (std::uint64_t i = 0; i < r->pre_period_m + 2 * r->period_r; ++i) {
      path.push_back(step(path.back()));
    }
    ASSERT_EQ(path[r->pre_period_m], path[r->pre_period_m + r->period_r]);
    ASSERT_EQ(path[r->pre_period_m], path[r->pre_period_m + 2 * r->period_r]);
    ASSERT_EQ(step(static_cast<std::uint64_t>(r->cycle_members.back().get_ui())),
              r->cycle_members.front().get_ui());
    if (r->pre_period_m + r->period_r <= 200) {
      const auto brute = brute_cycle(n, 400);
      ASSERT_TRUE(brute.has_value());
      ASSERT_EQ(brute->first, r->pre_period_m) << n;
      ASSERT_EQ(brute->second, r->period_r) << n;
    }
  }
}

TEST(ClassifyRange, SmallCensuses) {
  const auto below100 = classify_range(0, 100);
  EXPECT_EQ(below100.divergent, (std::vector<std::uint64_t>{73}));
  const auto below200 = classify_range(0, 200);
  EXPECT_EQ(below200.divergent,
            (std::vector<std::uint64_t>{73, 103, 104, 105, 107, 141, 145, 146, 147, 148, 149,
                                        151, 152, 153, 155, 161, 175, 199}));
  EXPECT_EQ(below200.cycling.size() + below200.divergent.size(), 200u);
  EXPECT_THROW(classify_range(5, 5), DomainError);
}

TEST(ClassifyRange, DeterministicAcrossThreadCounts) {
  const auto one = classify_range(100, 700, {}, 1);
  const auto four = classify_range(100, 700, {}, 4);
  EXPECT_EQ(one.divergent, four.divergent);
  ASSERT_EQ(one.cycling.size(), four.cycling.size());
  for (std::size_t i = 0; i < one.cycling.size(); ++i) {
    EXPECT_EQ(one.cycling[i].start_n, four.cycling[i].start_n);
    EXPECT_EQ(one.cycling[i].pre_period_m, four.cycling[i].pre_period_m);
  }
}

TEST(ClassifyRange, CyclingVerdictsStableWhenCapGrows) {
  const auto low = classify_range(0, 1500, {2000, 1 << 16});
  const auto high = classify_range(0, 1500, {20000, 1 << 16});
  ASSERT_EQ(low.cycling.size(), high.cycling.size());
  for (std::size_t i = 0; i < low.cycling.size(); ++i) {
    EXPECT_EQ(low.cycling[i].start_n, high.cycling[i].start_n);
    EXPECT_EQ(low.cycling[i].period_r, high.cycling[i].period_r);
  }
}

TEST(CountingFunction, SmallValues) {
  const auto one = counting_function(1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], (std::pair<std::uint64_t, std::uint64_t>{0, 1}));

  // 0..6 all cycle: 0 is fixed, 1,2,3,4,6 reach (1), 5 sits on the 5-cycle.
  const auto seven = counting_function(7);
  ASSERT_EQ(seven.size(), 7u);
  EXPECT_EQ(seven[6].second, 7u);

  const auto c = counting_function(200);
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_GE(c[i].second, c[i - 1].second);
  EXPECT_EQ(c.back().second, 182u);
}
