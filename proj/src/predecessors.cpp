#include "sqrt2lab/predecessors.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

#include "sqrt2lab/core_map.hpp"
#include "sqrt2lab/error.hpp"

namespace sqrt2lab {

namespace {

// floor(x sqrt 2)
std::uint64_t floor_sqrt2(std::uint64_t x) { return floor_mul_sqrt2(x); }

// floor(x / sqrt 2) = floor(floor(x sqrt 2) / 2)
std::uint64_t floor_inv_sqrt2(std::uint64_t x) { return floor_mul_sqrt2(x) >> 1; }

// floor(k (2 + sqrt 2))
std::uint64_t two_plus_sqrt2(std::uint64_t k) { return 2 * k + floor_sqrt2(k); }

constexpr std::uint64_t kMaxM = std::uint64_t{1} << 60;

void require_in_range(std::uint64_t m) {
  if (m >= kMaxM) {
    throw DomainError(ErrorKind::OutOfRange, "argument exceeds 2^60");
  }
}

}  // namespace

std::string_view to_string(PredecessorKind kind) noexcept {
  switch (kind) {
    case PredecessorKind::Zero: return "Zero";
    case PredecessorKind::One: return "One";
    case PredecessorKind::Two: return "Two";
  }
  return "?";
}

std::vector<std::uint64_t> predecessors_of(std::uint64_t m) {
  require_in_range(m);
  std::vector<std::uint64_t> out;
  const std::uint64_t even_lo = m == 0 ? 0 : floor_sqrt2(m) + 1;
  const std::uint64_t even_hi = floor_sqrt2(m + 1);
  for (std::uint64_t n = even_lo + (even_lo & 1); n <= even_hi; n += 2) {
    if (step(n) == m) out.push_back(n);
  }
  const std::uint64_t odd_lo = m == 0 ? 0 : floor_inv_sqrt2(m) + 1;
  const std::uint64_t odd_hi = floor_inv_sqrt2(m + 1);
  for (std::uint64_t n = odd_lo | 1; n <= odd_hi; n += 2) {
    if (step(n) == m) out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  return out;
}

PredecessorClass classify_predecessor(std::uint64_t m) {
  if (m == 0) {
    throw DomainError(ErrorKind::InvalidArgument, "classification needs m >= 1");
  }
  require_in_range(m);
  const std::vector<std::uint64_t> found = predecessors_of(m);

  // Beatty side, without looking at the enumeration.
  PredecessorClass beatty;
  beatty.m = m;
  const std::uint64_t k_est = m - floor_inv_sqrt2(m) - 1;
  for (std::uint64_t k = k_est > 2 ? k_est - 2 : 1; k <= k_est + 2; ++k) {
    if (k >= 1 && two_plus_sqrt2(k) == m) {
      beatty.kind = PredecessorKind::Zero;
      beatty.beatty_k = k;
    }
  }
  std::optional<std::uint64_t> index;  // j with floor(j sqrt 2) = m
  const std::uint64_t j_est = floor_inv_sqrt2(m);
  for (std::uint64_t j = j_est; j <= j_est + 2; ++j) {
    if (j >= 1 && floor_sqrt2(j) == m) index = j;
  }
  if (beatty.beatty_k.has_value() == index.has_value()) {
    throw DomainError(ErrorKind::ClassificationMismatch,
                      "m = " + std::to_string(m) + " is in neither or both Beatty sequences");
  }
  if (index) {
    const std::uint64_t j = *index;
    if (j % 2 == 0) {
      beatty.kind = PredecessorKind::One;
      beatty.beatty_k = j / 2;
      beatty.witnesses = {2 * j};  // 4k
    } else {
      beatty.kind = PredecessorKind::Two;
      beatty.beatty_k = (j + 1) / 2;
      beatty.witnesses = {j, 2 * j};  // 2k - 1, 4k - 2
    }
  }

  if (found != beatty.witnesses) {
    std::ostringstream msg;
    msg << "m = " << m << ": enumeration found " << found.size()
        << " predecessors, Beatty form says " << to_string(beatty.kind);
    throw DomainError(ErrorKind::ClassificationMismatch, msg.str());
  }
  return beatty;
}

std::uint64_t no_predecessor_census(std::uint64_t hi) {
  if (hi == 0) {
    throw DomainError(ErrorKind::InvalidArgument, "census needs hi >= 1");
  }
  require_in_range(hi);
  // Largest k with floor(k (2 + sqrt 2)) < hi; the sequence is increasing.
  std::uint64_t lo = 0;
  std::uint64_t up = hi / 3 + 1;
  while (lo < up) {
    const std::uint64_t mid = lo + (up - lo + 1) / 2;
    if (two_plus_sqrt2(mid) < hi) {
      lo = mid;
    } else {
      up = mid - 1;
    }
  }
  return lo;
}

std::uint64_t no_predecessor_census_by_enumeration(std::uint64_t hi) {
  std::uint64_t count = 0;
  for (std::uint64_t m = 1; m < hi; ++m) {
    if (predecessors_of(m).empty()) ++count;
  }
  return count;
}

std::vector<std::uint64_t> no_predecessor_numbers(std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t k = 1;; ++k) {
    const std::uint64_t v = two_plus_sqrt2(k);
    if (v >= hi) break;
    out.push_back(v);
  }
  return out;
}

PartitionCheck beatty_partition_check(std::uint64_t hi) {
  if (hi == 0) {
    throw DomainError(ErrorKind::InvalidArgument, "partition check needs hi >= 1");
  }
  if (hi > (std::uint64_t{1} << 32)) {
    throw DomainError(ErrorKind::OutOfRange, "partition check limited to hi <= 2^32");
  }
  PartitionCheck result;
  const bool keep = hi <= 1000;
  std::vector<std::uint8_t> hits(static_cast<std::size_t>(hi), 0);
  for (std::uint64_t n = 1;; ++n) {
    const std::uint64_t v = floor_sqrt2(n);
    if (v >= hi) break;
    ++hits[static_cast<std::size_t>(v)];
    if (keep) result.sqrt2_part.push_back(v);
  }
  for (std::uint64_t n = 1;; ++n) {
    const std::uint64_t v = two_plus_sqrt2(n);
    // Second route for the same floor: the largest t with (t - 2n)^2 <= 2 n^2.
    if (v != 2 * n + isqrt(2 * n * n)) {
      result.ok = false;
      result.counterexample = v;
      return result;
    }
    if (v >= hi) break;
    ++hits[static_cast<std::size_t>(v)];
    if (keep) result.two_plus_part.push_back(v);
  }
  for (std::uint64_t m = 1; m < hi; ++m) {
    if (hits[static_cast<std::size_t>(m)] != 1) {
      result.ok = false;
      result.counterexample = m;
      return result;
    }
  }
  return result;
}

PredecessorTree predecessor_tree(std::uint64_t root, std::size_t node_cap) {
  if (node_cap == 0) {
    throw DomainError(ErrorKind::InvalidArgument, "node cap must be at least 1");
  }
  PredecessorTree tree;
  tree.root = root;
  std::deque<std::uint64_t> queue{root};
  while (!queue.empty()) {
    const std::uint64_t node = queue.front();
    queue.pop_front();
    if (tree.edges.count(node) != 0) continue;
    std::vector<std::uint64_t> preds = predecessors_of(node);
    if (node == 0) {
      tree.degenerate = true;
      tree.edges[node] = preds;
      continue;
    }
    if (preds.empty()) tree.leaves_without_predecessor.push_back(node);
    for (std::uint64_t p : preds) queue.push_back(p);
    tree.edges[node] = std::move(preds);
    if (tree.edges.size() + queue.size() > node_cap) {
      throw DomainError(ErrorKind::CapExceeded,
                        "predecessor tree of " + std::to_string(root) + " exceeds " +
                            std::to_string(node_cap) + " nodes; possibly incomplete");
    }
  }
  std::sort(tree.leaves_without_predecessor.begin(), tree.leaves_without_predecessor.end());
  tree.complete = true;
  return tree;
}

std::string render_tree(const PredecessorTree& tree) {
  std::function<std::size_t(std::uint64_t, std::size_t)> depth_of =
      [&](std::uint64_t node, std::size_t depth) -> std::size_t {
    std::size_t best = depth;
    const auto it = tree.edges.find(node);
    if (it == tree.edges.end()) return best;
    for (std::uint64_t c : it->second) {
      if (c != node) best = std::max(best, depth_of(c, depth + 1));
    }
    return best;
  };
  const std::size_t max_depth = depth_of(tree.root, 0);

  std::ostringstream out;
  std::function<void(std::uint64_t, std::size_t)> emit = [&](std::uint64_t node,
                                                             std::size_t depth) {
    const auto it = tree.edges.find(node);
    const bool leaf = it == tree.edges.end() || it->second.empty();
    out << std::string(4 * (max_depth - depth), ' ') << node;
    if (depth == 0) out << "   <--- start";
    if (leaf) out << " ---";
    out << '\n';
    if (it == tree.edges.end()) return;
    bool first = true;
    for (std::uint64_t c : it->second) {
      if (c == node) continue;
      if (!first) out << '\n';
      first = false;
      emit(c, depth + 1);
    }
  };
  emit(tree.root, 0);
  out << (tree.complete ? "tree complete" : "tree incomplete") << ", " << tree.node_count()
      << " nodes";
  if (tree.degenerate) out << ", degenerate (0 is its own predecessor)";
  out << '\n';
  return out.str();
}

std::vector<GapWordLevel> gap_words(std::uint64_t hi, int max_level) {
  const std::vector<std::uint64_t> marks = no_predecessor_numbers(hi);
  if (marks.size() < 4) {
    throw DomainError(ErrorKind::InvalidArgument,
                      "need at least 4 no-predecessor numbers below hi");
  }
  std::vector<std::uint64_t> seq;
  std::uint64_t prev = 0;
  for (std::uint64_t v : marks) {
    seq.push_back(v - prev);
    prev = v;
  }

  std::vector<GapWordLevel> levels;
  for (int level = 0; level <= max_level; ++level) {
    const std::set<std::uint64_t> distinct(seq.begin(), seq.end());
    if (distinct.size() > 2) {
      throw DomainError(ErrorKind::PatternBreak,
                        "level " + std::to_string(level) + " has " +
                            std::to_string(distinct.size()) + " distinct words");
    }
    if (distinct.size() < 2) break;
    GapWordLevel lv;
    lv.level = level;
    lv.short_gap = *distinct.begin();
    lv.long_gap = *distinct.rbegin();
    const char long_letter = level == 0 ? 'L' : static_cast<char>('A' + (level - 1) % 26);
    const char short_letter = level == 0 ? 'S' : static_cast<char>('a' + (level - 1) % 26);
    for (std::uint64_t g : seq) lv.word_sequence.push_back(g == lv.long_gap ? long_letter : short_letter);
    levels.push_back(lv);
    if (level == max_level) break;

    // The isolated letter never occurs twice in a row.
    bool long_doubled = false;
    bool short_doubled = false;
    for (std::size_t i = 1; i < seq.size(); ++i) {
      if (seq[i] == seq[i - 1]) (seq[i] == lv.long_gap ? long_doubled : short_doubled) = true;
    }
    if (long_doubled && short_doubled) {
      throw DomainError(ErrorKind::PatternBreak,
                        "level " + std::to_string(level) + ": both letters repeat");
    }
    if (!long_doubled && !short_doubled) break;  // strictly alternating: no further structure
    const std::uint64_t isolated = long_doubled ? lv.short_gap : lv.long_gap;

    // Group into words aligned with the start of the sequence.
    std::vector<std::uint64_t> next;
    std::set<std::size_t> run_lengths;
    if (seq.front() == isolated) {
      // isolated letter followed by a run; the last group may be truncated
      std::size_t i = 0;
      while (i < seq.size()) {
        std::size_t j = i + 1;
        while (j < seq.size() && seq[j] != isolated) ++j;
        if (j == seq.size()) break;
        std::uint64_t sum = 0;
        for (std::size_t t = i; t < j; ++t) sum += seq[t];
        next.push_back(sum);
        run_lengths.insert(j - i - 1);
        i = j;
      }
    } else {
      // run followed by the isolated letter; trailing run dropped
      std::size_t i = 0;
      while (i < seq.size()) {
        std::size_t j = i;
        while (j < seq.size() && seq[j] != isolated) ++j;
        if (j == seq.size()) break;
        std::uint64_t sum = 0;
        for (std::size_t t = i; t <= j; ++t) sum += seq[t];
        next.push_back(sum);
        run_lengths.insert(j - i);
        i = j + 1;
      }
    }
    if (run_lengths.size() > 2) {
      throw DomainError(ErrorKind::PatternBreak,
                        "level " + std::to_string(level + 1) + " has " +
                            std::to_string(run_lengths.size()) + " distinct words");
    }
    if (next.size() < 2) break;
    seq = std::move(next);
  }
  return levels;
}

std::vector<std::pair<BigInt, BigInt>> sqrt2_convergents(std::size_t count) {
  if (count == 0) {
    throw DomainError(ErrorKind::InvalidArgument, "count must be at least 1");
  }
  std::vector<std::pair<BigInt, BigInt>> out;
  out.reserve(count);
  out.emplace_back(BigInt{1}, BigInt{0});
  if (count > 1) out.emplace_back(BigInt{1}, BigInt{1});
  while (out.size() < count) {
    const auto& a = out[out.size() - 2];
    const auto& b = out[out.size() - 1];
    BigInt p = 2 * b.first + a.first;
    BigInt q = 2 * b.second + a.second;
    out.emplace_back(std::move(p), std::move(q));
  }
  return out;
}

}  // namespace sqrt2lab
