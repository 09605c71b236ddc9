#include "sqrt2lab/predecessors.hpp"

#include <map>

#include <gtest/gtest.h>

#include "sqrt2lab/core_map.hpp"
#include "sqrt2lab/error.hpp"

using namespace sqrt2lab;

using Edges = std::map<std::uint64_t, std::vector<std::uint64_t>>;

namespace {

// Tree of 73 read off the back-step listing: node -> predecessors.
const Edges kTree73{
    {73, {104}},       {104, {148}},      {148, {105, 210}}, {105, {}},
    {210, {149, 298}}, {149, {212}},      {212, {300}},      {300, {}},
    {298, {211, 422}}, {211, {}},         {422, {299, 598}}, {299, {424}},
    {424, {600}},      {600, {}},         {598, {423, 846}}, {423, {}},
    {846, {}},
};

// Brute-force predecessor lists for all m < limit from a forward sweep.
std::vector<std::vector<std::uint64_t>> forward_preimages(std::uint64_t limit) {
  std::vector<std::vector<std::uint64_t>> pre(static_cast<std::size_t>(limit));
  for (std::uint64_t n = 0; n < 2 * limit; ++n) {
    const std::uint64_t m = step(n);
    if (m < limit) pre[static_cast<std::size_t>(m)].push_back(n);
  }
  return pre;
}

}  // namespace

TEST(Predecessors, Examples) {
  EXPECT_EQ(predecessors_of(73), (std::vector<std::uint64_t>{104}));
  EXPECT_TRUE(predecessors_of(3).empty());
  EXPECT_EQ(predecessors_of(1), (std::vector<std::uint64_t>{1, 2}));
  EXPECT_EQ(predecessors_of(0), (std::vector<std::uint64_t>{0}));
}

TEST(Predecessors, MatchForwardSweep) {
  constexpr std::uint64_t kLimit = 100'000;
  const auto pre = forward_preimages(kLimit);
  for (std::uint64_t m = 0; m < kLimit; ++m) {
    const auto got = predecessors_of(m);
    ASSERT_LE(got.size(), 2u);
    ASSERT_EQ(got, pre[static_cast<std::size_t>(m)]) << m;
    for (std::uint64_t w : got) ASSERT_EQ(step(w), m);
  }
}

TEST(Classify, Examples) {
  const auto c73 = classify_predecessor(73);
  EXPECT_EQ(c73.kind, PredecessorKind::One);
  EXPECT_EQ(c73.witnesses, (std::vector<std::uint64_t>{104}));
  EXPECT_EQ(c73.beatty_k, 26u);

  const auto c6 = classify_predecessor(6);
  EXPECT_EQ(c6.kind, PredecessorKind::Zero);
  EXPECT_TRUE(c6.witnesses.empty());
  EXPECT_EQ(c6.beatty_k, 2u);

  const auto c1 = classify_predecessor(1);
  EXPECT_EQ(c1.kind, PredecessorKind::Two);
  EXPECT_EQ(c1.witnesses, (std::vector<std::uint64_t>{1, 2}));
  EXPECT_EQ(c1.beatty_k, 1u);

  EXPECT_THROW(classify_predecessor(0), DomainError);
}

TEST(Classify, TrichotomyAgreesWithEnumeration) {
  std::size_t counts[3] = {0, 0, 0};
  for (std::uint64_t m = 1; m <= 100'000; ++m) {
    const auto c = classify_predecessor(m);  // throws on mismatch
    ++counts[static_cast<int>(c.kind)];
    ASSERT_EQ(c.witnesses.size(), static_cast<std::size_t>(c.kind));
  }
  EXPECT_EQ(counts[0], no_predecessor_census(100'001));
}

TEST(Census, ClosedFormValues) {
  EXPECT_EQ(no_predecessor_census(1), 0u);
  EXPECT_EQ(no_predecessor_census(10), 2u);
  EXPECT_EQ(no_predecessor_census(1'000'000), 292893u);
  EXPECT_THROW(no_predecessor_census(0), DomainError);
}

TEST(Census, ClosedFormMatchesEnumeration) {
  for (std::uint64_t hi : {1, 2, 3, 4, 7, 10, 100, 1000, 12345, 100'000}) {
    EXPECT_EQ(no_predecessor_census(hi), no_predecessor_census_by_enumeration(hi)) << hi;
  }
}

TEST(Census, TenfoldRelationUpToSix) {
  std::uint64_t prev = 0;
  std::uint64_t hi = 1;
  for (int l = 1; l <= 6; ++l) {
    hi *= 10;
    const std::uint64_t r = no_predecessor_census(hi);
    if (l > 1) EXPECT_EQ(prev, r / 10) << l;
    prev = r;
  }
}

TEST(Partition, SmallAndLarge) {
  const auto two = beatty_partition_check(2);
  EXPECT_TRUE(two.ok);
  EXPECT_EQ(two.sqrt2_part, (std::vector<std::uint64_t>{1}));

  const auto ten = beatty_partition_check(10);
  EXPECT_TRUE(ten.ok);
  EXPECT_EQ(ten.sqrt2_part, (std::vector<std::uint64_t>{1, 2, 4, 5, 7, 8, 9}));
  EXPECT_EQ(ten.two_plus_part, (std::vector<std::uint64_t>{3, 6}));

  EXPECT_TRUE(beatty_partition_check(1'000'000).ok);
}

TEST(Tree, SeventyThreeMatchesListing) {
  const auto tree = predecessor_tree(73);
  EXPECT_TRUE(tree.complete);
  EXPECT_FALSE(tree.degenerate);
  EXPECT_EQ(tree.edges, kTree73);
  EXPECT_EQ(tree.leaves_without_predecessor,
            (std::vector<std::uint64_t>{105, 211, 300, 423, 600, 846}));
  for (std::uint64_t leaf : tree.leaves_without_predecessor) {
    EXPECT_EQ(classify_predecessor(leaf).kind, PredecessorKind::Zero);
  }
  for (const auto& [node, kids] : tree.edges) {
    EXPECT_EQ(kids, predecessors_of(node));
  }
  const std::string text = render_tree(tree);
  EXPECT_NE(text.find("73   <--- start"), std::string::npos);
  EXPECT_NE(text.find("846 ---"), std::string::npos);
  EXPECT_NE(text.find("tree complete, 17 nodes"), std::string::npos);
}

TEST(Tree, TrivialAndDegenerateRoots) {
  const auto t3 = predecessor_tree(3);
  EXPECT_TRUE(t3.complete);
  EXPECT_EQ(t3.node_count(), 1u);
  EXPECT_EQ(t3.leaves_without_predecessor, (std::vector<std::uint64_t>{3}));

  const auto t0 = predecessor_tree(0);
  EXPECT_TRUE(t0.degenerate);
  EXPECT_EQ(t0.edges, (Edges{{0, {0}}}));

  // Nodes on the 33-cycle have infinite back-step trees.
  try {
    predecessor_tree(15, 500);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CapExceeded);
  }
}

TEST(GapWords, LevelsMatchListing) {
  const auto levels = gap_words(1'000'000, 3);
  ASSERT_EQ(levels.size(), 4u);
  EXPECT_EQ(levels[0].short_gap, 3u);
  EXPECT_EQ(levels[0].long_gap, 4u);
  EXPECT_EQ(levels[0].word_sequence.substr(0, 13), "SSLSLSSLSLSSL");
  EXPECT_EQ(levels[1].short_gap, 7u);
  EXPECT_EQ(levels[1].long_gap, 10u);
  // "Aa Aa Aaa Aa Aaa"
  EXPECT_EQ(levels[1].word_sequence.substr(0, 12), "AaAaAaaAaAaa");
  EXPECT_EQ(levels[2].short_gap, 17u);
  EXPECT_EQ(levels[2].long_gap, 24u);
  // "bbB bB bbB bB"
  EXPECT_EQ(levels[2].word_sequence.substr(0, 10), "bbBbBbbBbB");
  EXPECT_EQ(levels[3].short_gap, 41u);
  EXPECT_EQ(levels[3].long_gap, 58u);
  // "Cc Cc Ccc"
  EXPECT_EQ(levels[3].word_sequence.substr(0, 7), "CcCcCcc");
}

TEST(GapWords, GapsFollowConvergents) {
  const auto conv = sqrt2_convergents(12);
  const auto levels = gap_words(10'000'000, 5);
  ASSERT_EQ(levels.size(), 6u);
  // short gaps 7, 17, 41, 99, 239 are convergent numerators; long gaps are
  // twice the denominators 5, 12, 29, 70, 169.
  for (std::size_t l = 1; l < levels.size(); ++l) {
    EXPECT_EQ(BigInt{static_cast<unsigned long>(levels[l].short_gap)}, conv[l + 2].first);
    EXPECT_EQ(BigInt{static_cast<unsigned long>(levels[l].long_gap)}, 2 * conv[l + 2].second);
  }
  EXPECT_THROW(gap_words(10, 2), DomainError);
}

TEST(Convergents, TableRows) {
  const auto c = sqrt2_convergents(9);
  const long p[] = {1, 1, 3, 7, 17, 41, 99, 239, 577};
  const long q[] = {0, 1, 2, 5, 12, 29, 70, 169, 408};
  ASSERT_EQ(c.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_EQ(c[i].first, p[i]);
    EXPECT_EQ(c[i].second, q[i]);
  }
}

TEST(Convergents, ApproximateSqrt2WithinInverseSquare) {
  const auto c = sqrt2_convergents(60);
  for (std::size_t i = 1; i < c.size(); ++i) {
    const Rational ratio(c[i].first, c[i].second);
    // p^2 - 2 q^2 = +-1 for every convergent of sqrt 2.
    const BigInt pell = c[i].first * c[i].first - 2 * c[i].second * c[i].second;
    EXPECT_TRUE(pell == 1 || pell == -1) << i;
    const Real err = abs(to_real(ratio) - sqrt(Real{2}));
    EXPECT_LT(err, Real{1} / to_real(Rational(c[i].second * c[i].second)));
  }
}
