#include "sqrt2lab/qsqrt2.hpp"

#include <atomic>
#include <thread>
#include <vector>

#include "sqrt2lab/cycles.hpp"
#include "sqrt2lab/error.hpp"

namespace sqrt2lab {

QSqrt2::QSqrt2(Rational a, Rational b) : a_(std::move(a)), b_(std::move(b)) {
  a_.canonicalize();
  b_.canonicalize();
}

QSqrt2& QSqrt2::operator+=(const QSqrt2& o) {
  a_ += o.a_;
  b_ += o.b_;
  return *this;
}

QSqrt2& QSqrt2::operator-=(const QSqrt2& o) {
  a_ -= o.a_;
  b_ -= o.b_;
  return *this;
}

QSqrt2& QSqrt2::operator*=(const QSqrt2& o) {
  Rational a = a_ * o.a_ + 2 * b_ * o.b_;
  Rational b = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(a);
  b_ = std::move(b);
  return *this;
}

QSqrt2 QSqrt2::inverse() const {
  if (is_zero()) throw DomainError(ErrorKind::InvalidArgument, "inverse of zero in Q(sqrt 2)");
  const Rational n = norm();
  return {a_ / n, -b_ / n};
}

QSqrt2& QSqrt2::operator/=(const QSqrt2& o) { return *this *= o.inverse(); }

int QSqrt2::sign() const {
  const int sa = sgn(a_);
  const int sb = sgn(b_);
  if (sa == 0) return sb;
  if (sb == 0 || sa == sb) return sa;
  // Opposite signs: the larger of a^2 and 2 b^2 wins.
  const int c = cmp(a_ * a_, 2 * b_ * b_);
  return c > 0 ? sa : (c < 0 ? sb : 0);
}

Real QSqrt2::eval() const {
  static const Real root2 = sqrt(Real{2});
  return to_real(a_) + to_real(b_) * root2;
}

namespace {

std::string radical_term(const Rational& b) {
  if (b == 1) return "sqrt(2)";
  if (b == -1) return "-sqrt(2)";
  return b.get_str() + "*sqrt(2)";
}

// Appends " + t" or " - |t|".
void append_signed(std::string& out, const std::string& positive, bool negative) {
  out += negative ? " - " : " + ";
  out += positive;
}

}  // namespace

std::string QSqrt2::to_string() const {
  if (sgn(b_) == 0) return a_.get_str();
  if (sgn(a_) == 0) return radical_term(b_);
  std::string out = a_.get_str();
  append_signed(out, radical_term(Rational{abs(b_)}), sgn(b_) < 0);
  return out;
}

std::string QSqrt2::to_string_radical_first() const {
  if (sgn(b_) == 0) return a_.get_str();
  std::string out = radical_term(b_);
  if (sgn(a_) != 0) append_signed(out, Rational{abs(a_)}.get_str(), sgn(a_) < 0);
  return out;
}

ParityKernel ParityKernel::model() {
  const QSqrt2 half{Rational{1, 2}};
  const QSqrt2 root_half{Rational{0}, Rational{1, 2}};
  return {{half, root_half, QSqrt2{0}, root_half}};
}

QSqrt2 ParityKernel::transition(int from, int to) const {
  // (p, c) can only move to (c, n).
  if ((from & 1) != (to >> 1)) return QSqrt2{0};
  const QSqrt2& odd = odd_next[static_cast<std::size_t>(from)];
  return (to & 1) ? odd : QSqrt2{1} - odd;
}

ParityDistribution ParityDistribution::uniform() {
  const QSqrt2 q{Rational{1, 4}};
  return {{q, q, q, q}};
}

QSqrt2 ParityDistribution::total() const {
  return weights[0] + weights[1] + weights[2] + weights[3];
}

QSqrt2 ParityDistribution::odd() const { return weights[EO] + weights[OO]; }

ParityDistribution ParityDistribution::advance(const ParityKernel& k) const {
  ParityDistribution next;
  for (int from = 0; from < 4; ++from) {
    const QSqrt2& w = weights[static_cast<std::size_t>(from)];
    if (w.is_zero()) continue;
    const int c = from & 1;
    const QSqrt2& odd = k.odd_next[static_cast<std::size_t>(from)];
    next.weights[static_cast<std::size_t>(c << 1 | 1)] += w * odd;
    next.weights[static_cast<std::size_t>(c << 1)] += w * (QSqrt2{1} - odd);
  }
  return next;
}

namespace {

// Element (a + b sqrt 2) of Z[sqrt 2] with exact 64-bit coefficients.
struct Z2 {
  std::int64_t a;
  std::int64_t b;
};

inline Z2 mul(Z2 x, Z2 y) { return {x.a * y.a + 2 * x.b * y.b, x.a * y.b + x.b * y.a}; }

// Twice each window factor for the bits [l[j], l[j+1], l[j+2]]. The zero
// window [1,0,1] kills the string.
//   000 -> 1/2   001 -> 1/2   010 -> 1 - sqrt2/2   011 -> sqrt2/2
//   100 -> 1     101 -> 0     110 -> 1 - sqrt2/2   111 -> sqrt2/2
constexpr Z2 window_factor(int l0, int l1, int l2) {
  const int key = l0 << 2 | l1 << 1 | l2;
  switch (key) {
    case 0b000: return {1, 0};
    case 0b001: return {1, 0};
    case 0b010: return {2, -1};
    case 0b011: return {0, 1};
    case 0b100: return {2, 0};
    case 0b101: return {0, 0};
    case 0b110: return {2, -1};
    default: return {0, 1};
  }
}

struct Sum128 {
  __int128 a = 0;
  __int128 b = 0;
};

BigInt to_bigint(__int128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1
                            : static_cast<unsigned __int128>(v);
  BigInt hi{static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64))};
  BigInt lo{static_cast<unsigned long>(static_cast<std::uint64_t>(u))};
  BigInt out = (hi << 64) + lo;
  return neg ? BigInt{-out} : out;
}

// Sums the weights of the strings i in [lo, hi) of length n.
Sum128 enumerate_block(int n, std::uint64_t lo, std::uint64_t hi) {
  Sum128 s;
  for (std::uint64_t i = lo; i < hi; ++i) {
    if (((i >> (n - 1)) & 1) == 0) continue;
    Z2 c{1, 0};
    bool dead = false;
    for (int j = 0; j < n - 2; ++j) {
      const Z2 f = window_factor(static_cast<int>((i >> j) & 1), static_cast<int>((i >> (j + 1)) & 1),
                                 static_cast<int>((i >> (j + 2)) & 1));
      if (f.a == 0 && f.b == 0) {
        dead = true;
        break;
      }
      c = mul(c, f);
    }
    if (dead) continue;
    s.a += c.a;
    s.b += c.b;
  }
  return s;
}

}  // namespace

QSqrt2 appendix_enumeration(int r, unsigned threads) {
  if (r < 2 || r > kMaxEnumerationR) {
    throw DomainError(ErrorKind::OutOfRange,
                      "enumeration needs 2 <= r <= " + std::to_string(kMaxEnumerationR));
  }
  const int n = r + 1;
  const std::uint64_t total = std::uint64_t{1} << n;
  constexpr std::uint64_t kBlock = std::uint64_t{1} << 16;
  const std::uint64_t blocks = (total + kBlock - 1) / kBlock;

  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));

  std::vector<Sum128> partial(threads);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&](unsigned t) {
    for (;;) {
      const std::uint64_t blk = next.fetch_add(1);
      if (blk >= blocks) return;
      const Sum128 s = enumerate_block(n, blk * kBlock, std::min(total, (blk + 1) * kBlock));
      partial[t].a += s.a;
      partial[t].b += s.b;
    }
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  }

  Sum128 sum;
  for (const auto& s : partial) {
    sum.a += s.a;
    sum.b += s.b;
  }
  // Each factor was doubled (n - 2 times) and the initial weight is 1/4.
  const BigInt den = BigInt{1} << static_cast<unsigned>(n);
  return {Rational{to_bigint(sum.a), den}, Rational{to_bigint(sum.b), den}};
}

ParityDistribution markov_distribution(std::uint64_t r) {
  if (r == 0) throw DomainError(ErrorKind::OutOfRange, "p_r needs r >= 1");
  const ParityKernel k = ParityKernel::model();
  ParityDistribution d = ParityDistribution::uniform();
  for (std::uint64_t i = 1; i < r; ++i) d = d.advance(k);
  return d;
}

QSqrt2 markov_pr(std::uint64_t r) { return markov_distribution(r).odd(); }

ParityDistribution stationary_distribution(const ParityKernel& k) {
  // Rows 0..2: (P^T - I) pi = 0; row 3: sum pi = 1.
  std::array<std::array<QSqrt2, 5>, 4> m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      m[i][j] = k.transition(j, i) - (i == j ? QSqrt2{1} : QSqrt2{0});
    }
    m[i][4] = QSqrt2{0};
  }
  for (int j = 0; j < 4; ++j) m[3][j] = QSqrt2{1};
  m[3][4] = QSqrt2{1};

  for (int col = 0; col < 4; ++col) {
    int pivot = -1;
    for (int row = col; row < 4; ++row) {
      if (!m[row][col].is_zero()) {
        pivot = row;
        break;
      }
    }
    if (pivot < 0) throw DomainError(ErrorKind::SingularSystem, "stationary system is singular");
    std::swap(m[col], m[pivot]);
    const QSqrt2 inv = m[col][col].inverse();
    for (int j = col; j < 5; ++j) m[col][j] *= inv;
    for (int row = 0; row < 4; ++row) {
      if (row == col || m[row][col].is_zero()) continue;
      const QSqrt2 f = m[row][col];
      for (int j = col; j < 5; ++j) m[row][j] -= f * m[col][j];
    }
  }
  ParityDistribution out;
  for (int i = 0; i < 4; ++i) out.weights[static_cast<std::size_t>(i)] = m[i][4];
  return out;
}

QSqrt2 stationary_odd() { return stationary_distribution().odd(); }

QSqrt2 alpha_const() { return QSqrt2{1} - stationary_odd(); }

QSqrt2 delta_exponent() { return QSqrt2{Rational{1, 2}} - alpha_const(); }

Real delta_const() { return pow(Real{2}, delta_exponent().eval()); }

ConstantsReport constants_report() {
  ConstantsReport rep;
  rep.alpha = alpha_const().eval();
  rep.delta = delta_const();
  rep.delta_exponent = delta_exponent();
  const Real lhs = rep.delta * rep.delta * pow(Real{4}, rep.alpha);
  rep.identity_check = abs(lhs - 2) < Real{"1e-40"};
  rep.empirical_alpha = Real{"0.465"};
  rep.empirical_delta = pow(sqrt(Real{2}), 1 - 2 * rep.empirical_alpha);
  return rep;
}

std::string appendix_row(const QSqrt2& p) {
  return "[" + p.to_string_radical_first() + ", " + to_fixed(p.eval(), 15) + "]";
}

std::string markov_line(const QSqrt2& p) {
  return p.to_string() + " = " + to_fixed(p.eval(), 15);
}

}  // namespace sqrt2lab
