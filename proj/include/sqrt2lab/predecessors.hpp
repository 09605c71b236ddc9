#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sqrt2lab/numeric.hpp"

namespace sqrt2lab {

// Every m >= 1 falls in exactly one of three Beatty forms:
//   Zero: m = floor(k (2 + sqrt 2))   no predecessor
//   One:  m = floor(2k sqrt 2)        predecessor 4k
//   Two:  m = floor((2k - 1) sqrt 2)  predecessors 2k - 1 and 4k - 2

enum class PredecessorKind { Zero, One, Two };

std::string_view to_string(PredecessorKind kind) noexcept;

struct PredecessorClass {
  std::uint64_t m = 0;
  PredecessorKind kind = PredecessorKind::Zero;
  std::vector<std::uint64_t> witnesses;  // sorted, size == kind
  std::optional<std::uint64_t> beatty_k;
};

/// All n with f(n) = m, ascending. Scans the even candidates in
/// [m sqrt 2, (m + 1) sqrt 2) and the odd ones in [m / sqrt 2, (m + 1) / sqrt 2)
/// with exact integer bounds.
std::vector<std::uint64_t> predecessors_of(std::uint64_t m);

/// Classifies m >= 1 by enumeration and, independently, by Beatty form.
/// Throws ClassificationMismatch if the two disagree.
PredecessorClass classify_predecessor(std::uint64_t m);

/// Number of k >= 1 with floor(k (2 + sqrt 2)) < hi, by binary search on k.
std::uint64_t no_predecessor_census(std::uint64_t hi);

/// Same count by enumerating predecessors of every 1 <= m < hi.
std::uint64_t no_predecessor_census_by_enumeration(std::uint64_t hi);

/// The no-predecessor numbers below hi, ascending.
std::vector<std::uint64_t> no_predecessor_numbers(std::uint64_t hi);

struct PartitionCheck {
  bool ok = true;
  std::optional<std::uint64_t> counterexample;
  std::vector<std::uint64_t> sqrt2_part;      // floor(n sqrt 2) < hi, filled for small hi
  std::vector<std::uint64_t> two_plus_part;   // floor(n (2 + sqrt 2)) < hi, filled for small hi
};

/// Checks that {floor(n sqrt 2)} and {floor(n (2 + sqrt 2))} tile [1, hi)
/// without overlap, together with floor(n (2 + sqrt 2)) = 2n + floor(n sqrt 2).
/// The member lists are returned when hi <= 1000.
PartitionCheck beatty_partition_check(std::uint64_t hi);

struct PredecessorTree {
  std::uint64_t root = 0;
  // node -> its predecessors (children in the tree); every node has an entry
  std::map<std::uint64_t, std::vector<std::uint64_t>> edges;
  std::vector<std::uint64_t> leaves_without_predecessor;
  bool complete = false;
  bool degenerate = false;  // root 0: f(0) = 0 is its own predecessor
  std::size_t node_count() const { return edges.size(); }
};

/// Breadth-first back-step expansion from root. Throws CapExceeded when more
/// than node_cap nodes would be needed.
PredecessorTree predecessor_tree(std::uint64_t root, std::size_t node_cap = 10000);

/// Indented text layout: deeper predecessors step left, leaves end in "---".
std::string render_tree(const PredecessorTree& tree);

struct GapWordLevel {
  int level = 0;
  std::uint64_t short_gap = 0;
  std::uint64_t long_gap = 0;
  // One letter per gap: 'S'/'L' at level 0, 'a'/'A', 'b'/'B', ... above.
  std::string word_sequence;
};

/// Recursive word structure of the gaps between consecutive no-predecessor
/// numbers below hi (with 0 prepended). At each level one letter never
/// repeats; words are a run of the other letter joined to it, aligned with
/// the start of the sequence. Throws PatternBreak if a level has more than two
/// distinct words.
std::vector<GapWordLevel> gap_words(std::uint64_t hi, int max_level);

/// Convergents p/q of the continued fraction of sqrt 2, seeded with 1/0:
/// (1,0), (1,1), (3,2), (7,5), ...
std::vector<std::pair<BigInt, BigInt>> sqrt2_convergents(std::size_t count);

}  // namespace sqrt2lab
