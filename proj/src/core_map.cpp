#include "sqrt2lab/core_map.hpp"

#include <bit>
#include <cctype>
#include <utility>

#include <mpfr.h>

#include "sqrt2lab/error.hpp"

static_assert(GMP_NUMB_BITS == 64, "fixed-point kernel assumes 64-bit limbs");

namespace sqrt2lab {

namespace {

using u128 = unsigned __int128;

// floor(sqrt(2) * 2^63)
constexpr std::uint64_t kSqrt2Q63 = 13043817825332782212ull;

// floor(sqrt(2) * 2^(64 * kRootLimbs)); the top k limbs of this number are
// floor(sqrt(2) * 2^(64 (k - 1))).
constexpr std::size_t kRootLimbs = 2048;

const BigInt& sqrt2_fixed() {
  static const BigInt value = isqrt(BigInt{2} << (2 * 64 * kRootLimbs));
  return value;
}

// out = floor(m * sqrt 2); out must not alias m or tmp.
void floor_mul_sqrt2_into(mpz_ptr out, mpz_srcptr m, mpz_ptr tmp) {
  if (mpz_sgn(m) == 0) {
    mpz_set_ui(out, 0);
    return;
  }
  const std::size_t bits = mpz_sizeinbase(m, 2);
  const std::size_t k = (bits + 63) / 64 + 2;
  const BigInt& root = sqrt2_fixed();
  const std::size_t root_size = mpz_size(root.get_mpz_t());
  if (k > root_size) {
    mpz_mul(tmp, m, m);
    mpz_mul_2exp(tmp, tmp, 1);
    BigInt s = isqrt(BigInt{tmp});
    mpz_set(out, s.get_mpz_t());
    return;
  }
  mpz_t view;
  mpz_roinit_n(view, mpz_limbs_read(root.get_mpz_t()) + (root_size - k),
               static_cast<mp_size_t>(k));
  const std::size_t shift = 64 * (k - 1);
  mpz_mul(tmp, m, view);
  // The truncated constant underestimates m sqrt 2 by less than m / 2^shift,
  // which is below 2^-64. Only an all-ones top fraction limb can hide a carry.
  const bool near_integer = mpz_getlimbn(tmp, static_cast<mp_size_t>(k - 2)) == ~mp_limb_t{0};
  mpz_tdiv_q_2exp(out, tmp, shift);
  if (near_integer) {
    mpz_add_ui(tmp, out, 1);
    mpz_mul(tmp, tmp, tmp);
    mpz_t twice_sq;
    mpz_init(twice_sq);
    mpz_mul(twice_sq, m, m);
    mpz_mul_2exp(twice_sq, twice_sq, 1);
    if (mpz_cmp(tmp, twice_sq) <= 0) mpz_add_ui(out, out, 1);
    mpz_clear(twice_sq);
  }
}

}  // namespace

std::uint64_t isqrt(std::uint64_t x) noexcept {
  if (x < 2) return x;
  const int bits = 64 - std::countl_zero(x);
  // 2^ceil(bits/2) >= sqrt(x); clamp so the shift stays in range.
  std::uint64_t g = std::uint64_t{1} << ((bits + 1) / 2);
  if (g > 0xFFFFFFFFull) g = 0xFFFFFFFFull;
  for (;;) {
    const std::uint64_t y = (g + x / g) >> 1;
    if (y >= g) break;
    g = y;
  }
  while (u128{g} * g > x) --g;
  while (u128{g + 1} * (g + 1) <= x) ++g;
  return g;
}

BigInt isqrt(const BigInt& x) {
  if (sgn(x) < 0) {
    throw DomainError(ErrorKind::InvalidArgument, "isqrt of a negative integer");
  }
  if (mpz_fits_ulong_p(x.get_mpz_t())) {
    return BigInt{isqrt(static_cast<std::uint64_t>(x.get_ui()))};
  }
  const std::size_t bits = mpz_sizeinbase(x.get_mpz_t(), 2);
  // Square root of the top half of the bits gives half the answer's bits.
  const std::size_t half_shift = bits / 4;
  BigInt g = (isqrt(BigInt{x >> (2 * half_shift)}) + 1) << half_shift;
  BigInt y;
  for (;;) {
    mpz_tdiv_q(y.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
    y += g;
    y >>= 1;
    if (y >= g) break;
    std::swap(g, y);
  }
  while (g * g > x) --g;
  while ((g + 1) * (g + 1) <= x) ++g;
  return g;
}

std::uint64_t floor_mul_sqrt2(std::uint64_t m) noexcept {
  const u128 t = u128{m} * kSqrt2Q63;
  std::uint64_t q = static_cast<std::uint64_t>(t >> 63);
  const u128 twice_sq = u128{m} * m * 2;
  if (u128{q + 1} * (q + 1) <= twice_sq) ++q;
  return q;
}

BigInt floor_mul_sqrt2(const BigInt& m) {
  if (sgn(m) < 0) {
    throw DomainError(ErrorKind::InvalidArgument, "negative argument");
  }
  BigInt out;
  BigInt tmp;
  floor_mul_sqrt2_into(out.get_mpz_t(), m.get_mpz_t(), tmp.get_mpz_t());
  return out;
}

std::uint64_t step(std::uint64_t n) noexcept {
  return floor_mul_sqrt2((n & 1) ? n : n >> 1);
}

BigInt step(const BigInt& n) {
  if (sgn(n) < 0) {
    throw DomainError(ErrorKind::InvalidArgument, "step of a negative integer");
  }
  if (mpz_odd_p(n.get_mpz_t())) return floor_mul_sqrt2(n);
  return floor_mul_sqrt2(BigInt{n >> 1});
}

BigInt step_via_isqrt(const BigInt& n) {
  const BigInt m = mpz_odd_p(n.get_mpz_t()) ? n : BigInt{n >> 1};
  return isqrt(BigInt{2 * m * m});
}

// ---------------------------------------------------------------------------

OrbitCursor::OrbitCursor(std::uint64_t n) : small_(true), word_(n) {}

OrbitCursor::OrbitCursor(const BigInt& n) {
  if (sgn(n) < 0) {
    throw DomainError(ErrorKind::InvalidArgument, "orbit start must be nonnegative");
  }
  if (mpz_fits_ulong_p(n.get_mpz_t())) {
    small_ = true;
    word_ = n.get_ui();
  } else {
    small_ = false;
    big_ = n;
  }
}

void OrbitCursor::advance() {
  if (small_) {
    if (word_ < kSmallStepLimit) {
      word_ = step(word_);
      return;
    }
    small_ = false;
    big_ = static_cast<unsigned long>(word_);
  }
  mpz_ptr v = big_.get_mpz_t();
  if (mpz_even_p(v)) mpz_tdiv_q_2exp(v, v, 1);
  floor_mul_sqrt2_into(next_.get_mpz_t(), v, scratch_.get_mpz_t());
  std::swap(big_, next_);
}

bool OrbitCursor::is_odd() const noexcept {
  return small_ ? (word_ & 1) != 0 : mpz_odd_p(big_.get_mpz_t()) != 0;
}

std::size_t OrbitCursor::bit_length() const noexcept {
  if (small_) return static_cast<std::size_t>(64 - std::countl_zero(word_));
  if (sgn(big_) == 0) return 0;
  return mpz_sizeinbase(big_.get_mpz_t(), 2);
}

BigInt OrbitCursor::value() const {
  return small_ ? BigInt{static_cast<unsigned long>(word_)} : big_;
}

bool operator==(const OrbitCursor& a, const OrbitCursor& b) noexcept {
  if (a.small_ && b.small_) return a.word_ == b.word_;
  if (a.small_) return mpz_cmp_ui(b.big_.get_mpz_t(), a.word_) == 0;
  if (b.small_) return mpz_cmp_ui(a.big_.get_mpz_t(), b.word_) == 0;
  return mpz_cmp(a.big_.get_mpz_t(), b.big_.get_mpz_t()) == 0;
}

// ---------------------------------------------------------------------------
// Alpha and the generic family

namespace {

bool is_perfect_square(const BigInt& v) {
  return sgn(v) >= 0 && mpz_perfect_square_p(v.get_mpz_t()) != 0;
}

Rational parse_rational(std::string text) {
  auto trim = [](std::string& s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  };
  trim(text);
  if (text.empty()) {
    throw DomainError(ErrorKind::InvalidArgument, "empty number");
  }
  if (const auto dot = text.find('.'); dot != std::string::npos) {
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    const std::size_t frac_len = text.size() - dot - 1;
    BigInt num;
    if (num.set_str(digits, 10) != 0) {
      throw DomainError(ErrorKind::InvalidArgument, "malformed decimal '" + text + "'");
    }
    BigInt den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
    Rational q{num, den};
    q.canonicalize();
    return q;
  }
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    BigInt num;
    BigInt den;
    if (num.set_str(text.substr(0, slash), 10) != 0 ||
        den.set_str(text.substr(slash + 1), 10) != 0) {
      throw DomainError(ErrorKind::InvalidArgument, "malformed rational '" + text + "'");
    }
    if (sgn(den) == 0) {
      throw DomainError(ErrorKind::NonRepresentable, "zero denominator in '" + text + "'");
    }
    Rational q{num, den};
    q.canonicalize();
    return q;
  }
  BigInt num;
  if (num.set_str(text, 10) != 0) {
    throw DomainError(ErrorKind::InvalidArgument, "malformed number '" + text + "'");
  }
  return Rational{num};
}

void require_positive(const Rational& q) {
  if (sgn(q) <= 0) {
    throw DomainError(ErrorKind::InvalidArgument, "alpha must be positive");
  }
}

// Owning MPFR value at a fixed precision.
class Mpfr {
public:
  explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }

private:
  mpfr_t v_;
};

void enclose(const Alpha& a, mpfr_ptr out, mpfr_rnd_t rnd) {
  switch (a.kind) {
    case Alpha::Kind::Rational:
      mpfr_set_q(out, a.q.get_mpq_t(), rnd);
      return;
    case Alpha::Kind::SquareRoot:
      mpfr_set_q(out, a.q.get_mpq_t(), rnd);
      mpfr_sqrt(out, out, rnd);
      return;
    case Alpha::Kind::Pi:
      mpfr_const_pi(out, rnd);
      return;
    case Alpha::Kind::E:
      mpfr_set_ui(out, 1, rnd);
      mpfr_exp(out, out, rnd);
      return;
  }
}

constexpr unsigned kMaxPrecisionBits = 1u << 24;

}  // namespace

Alpha Alpha::rational(const BigInt& num, const BigInt& den) {
  if (sgn(den) == 0) {
    throw DomainError(ErrorKind::NonRepresentable, "alpha has a zero denominator");
  }
  Rational q{num, den};
  q.canonicalize();
  return rational(q);
}

Alpha Alpha::rational(const Rational& q) {
  require_positive(q);
  return {Kind::Rational, q};
}

Alpha Alpha::sqrt_of(const Rational& radicand) {
  require_positive(radicand);
  Rational r = radicand;
  r.canonicalize();
  return {Kind::SquareRoot, r};
}

Alpha Alpha::parse(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (s == "pi") return pi();
  if (s == "e") return e();
  if (s.rfind("sqrt(", 0) == 0 && s.back() == ')') {
    return sqrt_of(parse_rational(s.substr(5, s.size() - 6)));
  }
  return rational(parse_rational(s));
}

std::optional<Rational> Alpha::exact() const {
  if (kind == Kind::Rational) return q;
  if (kind == Kind::SquareRoot && is_perfect_square(q.get_num()) &&
      is_perfect_square(q.get_den())) {
    Rational root{isqrt(BigInt{q.get_num()}), isqrt(BigInt{q.get_den()})};
    root.canonicalize();
    return root;
  }
  return std::nullopt;
}

std::string Alpha::to_string() const {
  switch (kind) {
    case Kind::Rational: return q.get_str();
    case Kind::SquareRoot: return "sqrt(" + q.get_str() + ")";
    case Kind::Pi: return "pi";
    case Kind::E: return "e";
  }
  return {};
}

MapConfig MapConfig::exact_sqrt2() {
  MapConfig cfg;
  cfg.exact = true;
  cfg.rule = BranchRule::InverseOnEven;
  return cfg;
}

BigInt step_alpha(const BigInt& n, const MapConfig& cfg) {
  if (sgn(n) < 0) {
    throw DomainError(ErrorKind::InvalidArgument, "step_alpha of a negative integer");
  }
  if (cfg.exact) return step(n);
  if (sgn(n) == 0) return BigInt{0};
  const bool even = mpz_even_p(n.get_mpz_t()) != 0;
  const bool multiply = (cfg.rule == BranchRule::AlphaOnEven) == even;

  if (const auto q = cfg.alpha.exact()) {
    BigInt out;
    if (multiply) {
      const BigInt num = n * q->get_num();
      mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), q->get_den_mpz_t());
    } else {
      const BigInt num = n * q->get_den();
      mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), q->get_num_mpz_t());
    }
    return out;
  }

  unsigned prec = cfg.precision_bits < 16 ? 16 : cfg.precision_bits;
  BigInt floor_lo;
  BigInt floor_hi;
  for (; prec <= kMaxPrecisionBits; prec *= 2) {
    Mpfr a_lo(prec), a_hi(prec), lo(prec), hi(prec);
    enclose(cfg.alpha, a_lo.get(), MPFR_RNDD);
    enclose(cfg.alpha, a_hi.get(), MPFR_RNDU);
    if (multiply) {
      mpfr_mul_z(lo.get(), a_lo.get(), n.get_mpz_t(), MPFR_RNDD);
      mpfr_mul_z(hi.get(), a_hi.get(), n.get_mpz_t(), MPFR_RNDU);
    } else {
      mpfr_set_z(lo.get(), n.get_mpz_t(), MPFR_RNDD);
      mpfr_div(lo.get(), lo.get(), a_hi.get(), MPFR_RNDD);
      mpfr_set_z(hi.get(), n.get_mpz_t(), MPFR_RNDU);
      mpfr_div(hi.get(), hi.get(), a_lo.get(), MPFR_RNDU);
    }
    mpfr_get_z(floor_lo.get_mpz_t(), lo.get(), MPFR_RNDD);
    mpfr_get_z(floor_hi.get_mpz_t(), hi.get(), MPFR_RNDD);
    if (floor_lo == floor_hi) return floor_lo;
  }
  throw DomainError(ErrorKind::NonConvergent,
                    "floor of n*alpha still ambiguous at maximum precision");
}

// ---------------------------------------------------------------------------

OrbitStats orbit_stream(
    const BigInt& n, std::uint64_t m,
    const std::function<void(std::uint64_t, const OrbitCursor&)>& visit) {
  if (m == 0) {
    throw DomainError(ErrorKind::InvalidArgument, "orbit window must be at least 1");
  }
  OrbitCursor cursor(n);
  OrbitStats stats;
  stats.m = m;
  for (std::uint64_t r = 0; r < m; ++r) {
    if (visit) visit(r, cursor);
    if (cursor.is_odd()) {
      ++stats.odd_count;
    } else {
      ++stats.even_count;
    }
    cursor.advance();
  }
  if (cursor.bit_length() > 0) stats.log_value = log_big(cursor.value());
  return stats;
}

OrbitResult orbit(const BigInt& n, std::uint64_t m, bool keep_states) {
  OrbitResult result;
  if (keep_states) result.states.reserve(static_cast<std::size_t>(m));
  OrbitCursor last;
  result.stats = orbit_stream(n, m, [&](std::uint64_t r, const OrbitCursor& c) {
    if (keep_states) result.states.push_back({c.value(), r});
    if (r + 1 == m) last = c;
  });
  last.advance();
  result.final_value = last.value();
  return result;
}

Real growth_estimate(const BigInt& n, std::uint64_t r) {
  if (r == 0) {
    throw DomainError(ErrorKind::InvalidArgument, "growth estimate needs r >= 1");
  }
  OrbitCursor cursor(n);
  for (std::uint64_t i = 0; i < r; ++i) cursor.advance();
  if (cursor.bit_length() == 0) {
    throw DomainError(ErrorKind::ZeroValue, "iterate is 0");
  }
  return exp(log_big(cursor.value()) / Real{static_cast<unsigned long long>(r)});
}

Real borderline_check(const MapConfig& cfg, std::uint64_t n_max) {
  if (n_max < 2) {
    throw DomainError(ErrorKind::InvalidArgument, "borderline check needs n_max >= 2");
  }
  Real sum{0};
  for (std::uint64_t r = 1; r <= n_max; ++r) {
    const BigInt rb{static_cast<unsigned long>(r)};
    const BigInt fr = cfg.exact && r < kSmallStepLimit
                          ? BigInt{static_cast<unsigned long>(step(r))}
                          : step_alpha(rb, cfg);
    if (sgn(fr) == 0) {
      throw DomainError(ErrorKind::ZeroTerm, "f(" + std::to_string(r) + ") = 0");
    }
    sum += log_big(fr) - log_big(rb);
  }
  return exp(sum / Real{static_cast<unsigned long long>(n_max)});
}

bool is_collatz_like(const Real& borderline_value) {
  return borderline_value <= Real{1};
}

}  // namespace sqrt2lab
