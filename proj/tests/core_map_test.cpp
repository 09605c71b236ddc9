#include "sqrt2lab/core_map.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>
#include <mpfr.h>

#include "sqrt2lab/error.hpp"

using namespace sqrt2lab;

namespace {

// Independent floor oracle: encloses n*sqrt(2) (or n/sqrt(2)) at 256 bits with
// outward rounding and returns the floor only when both ends agree.
class Sqrt2FloorOracle {
public:
  Sqrt2FloorOracle() {
    mpfr_inits2(256, lo_, hi_, root_lo_, root_hi_, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_ui(root_lo_, 2, MPFR_RNDN);
    mpfr_sqrt(root_lo_, root_lo_, MPFR_RNDD);
    mpfr_set_ui(root_hi_, 2, MPFR_RNDN);
    mpfr_sqrt(root_hi_, root_hi_, MPFR_RNDU);
  }
  ~Sqrt2FloorOracle() {
    mpfr_clears(lo_, hi_, root_lo_, root_hi_, static_cast<mpfr_ptr>(nullptr));
  }

  std::optional<std::uint64_t> times(std::uint64_t n) {
    mpfr_mul_ui(lo_, root_lo_, n, MPFR_RNDD);
    mpfr_mul_ui(hi_, root_hi_, n, MPFR_RNDU);
    return agree();
  }
  std::optional<std::uint64_t> over(std::uint64_t n) {
    mpfr_ui_div(lo_, n, root_hi_, MPFR_RNDD);
    mpfr_ui_div(hi_, n, root_lo_, MPFR_RNDU);
    return agree();
  }

private:
  std::optional<std::uint64_t> agree() {
    mpfr_floor(lo_, lo_);
    mpfr_floor(hi_, hi_);
    if (!mpfr_equal_p(lo_, hi_)) return std::nullopt;
    return mpfr_get_uj(lo_, MPFR_RNDN);
  }
  mpfr_t lo_, hi_, root_lo_, root_hi_;
};

BigInt big(std::uint64_t v) { return BigInt{static_cast<unsigned long>(v)}; }

BigInt random_big(gmp_randclass& rng, unsigned bits) { return rng.get_z_bits(bits); }

}  // namespace

TEST(Isqrt, Examples) {
  EXPECT_EQ(isqrt(std::uint64_t{0}), 0u);
  EXPECT_EQ(isqrt(std::uint64_t{10658}), 103u);
  EXPECT_EQ(isqrt(BigInt{0}), 0);
  EXPECT_EQ(isqrt(BigInt{10658}), 103);
  EXPECT_EQ(isqrt(~std::uint64_t{0}), 0xFFFFFFFFull);
  EXPECT_THROW(isqrt(BigInt{-1}), DomainError);
}

TEST(Isqrt, ExhaustiveContractToOneMillion) {
  for (std::uint64_t x = 0; x <= 1'000'000; ++x) {
    const std::uint64_t s = isqrt(x);
    ASSERT_LE(s * s, x) << x;
    ASSERT_GT((s + 1) * (s + 1), x) << x;
  }
}

TEST(Isqrt, TwiceSquaresMatchHighPrecisionOracle) {
  Sqrt2FloorOracle oracle;
  for (std::uint64_t k = 1; k <= 10'000; ++k) {
    const auto expected = oracle.times(k);
    ASSERT_TRUE(expected.has_value());
    ASSERT_EQ(isqrt(2 * k * k), *expected) << k;
    ASSERT_EQ(isqrt(big(2 * k * k)), big(*expected)) << k;
  }
}

TEST(Isqrt, BigContractAndLibraryAgreement) {
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(12345);
  for (int i = 0; i < 2000; ++i) {
    const unsigned bits = 1 + static_cast<unsigned>(i * 37 % 9000);
    const BigInt x = random_big(rng, bits);
    const BigInt s = isqrt(x);
    ASSERT_LE(s * s, x);
    ASSERT_GT((s + 1) * (s + 1), x);
    BigInt lib;
    mpz_sqrt(lib.get_mpz_t(), x.get_mpz_t());
    ASSERT_EQ(s, lib);
  }
  // Perfect squares and their neighbours.
  for (int i = 0; i < 200; ++i) {
    const BigInt r = random_big(rng, 64 + static_cast<unsigned>(i) * 50);
    EXPECT_EQ(isqrt(BigInt{r * r}), r);
    if (r > 0) EXPECT_EQ(isqrt(BigInt{r * r - 1}), r - 1);
    EXPECT_EQ(isqrt(BigInt{r * r + 2 * r}), r);
  }
}

TEST(Step, PaperExamples) {
  EXPECT_EQ(step(std::uint64_t{73}), 103u);
  EXPECT_EQ(step(std::uint64_t{408}), 288u);
  EXPECT_EQ(step(std::uint64_t{0}), 0u);
  EXPECT_EQ(step(std::uint64_t{1}), 1u);
  EXPECT_EQ(step(BigInt{73}), 103);
  EXPECT_EQ(step(BigInt{408}), 288);
  EXPECT_THROW(step(BigInt{-4}), DomainError);
}

TEST(Step, MatchesOracleForAllSmallN) {
  Sqrt2FloorOracle oracle;
  for (std::uint64_t n = 1; n <= 100'000; ++n) {
    const auto expected = (n % 2 == 1) ? oracle.times(n) : oracle.over(n);
    ASSERT_TRUE(expected.has_value());
    ASSERT_EQ(step(n), *expected) << n;
  }
}

TEST(Step, LooseBracket) {
  const double r2 = std::sqrt(2.0);
  for (std::uint64_t n = 1; n <= 100'000; ++n) {
    const double f = static_cast<double>(step(n));
    ASSERT_LT(f, static_cast<double>(n) * r2 + 1.0);
    ASSERT_GT(f, static_cast<double>(n) / r2 - 1.0);
  }
}

TEST(Step, BigKernelMatchesIsqrtRoute) {
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(777);
  for (int i = 0; i < 1500; ++i) {
    const unsigned bits = 1 + static_cast<unsigned>((i * 131) % 40000);
    const BigInt n = random_big(rng, bits);
    ASSERT_EQ(step(n), step_via_isqrt(n)) << "bits=" << bits;
  }
  // Beyond the cached constant the kernel falls back to isqrt.
  const BigInt huge = random_big(rng, 140000) | BigInt{1};
  EXPECT_EQ(step(huge), step_via_isqrt(huge));
}

TEST(Step, NearIntegerProductsTakeExactFallback) {
  // Pell denominators q satisfy |q sqrt 2 - p| < 1/q, so for large q the fixed
  // point product lands within 2^-64 of an integer.
  BigInt p_prev = 1, q_prev = 0, p = 1, q = 1;
  for (int k = 0; k < 400; ++k) {
    const BigInt pn = 2 * p + p_prev;
    const BigInt qn = 2 * q + q_prev;
    p_prev = p; q_prev = q; p = pn; q = qn;
    EXPECT_EQ(floor_mul_sqrt2(q), isqrt(BigInt{2 * q * q}));
    EXPECT_EQ(floor_mul_sqrt2(p), isqrt(BigInt{2 * p * p}));
  }
}

TEST(Step, SmallKernelMatchesBigKernel) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 100'000; ++i) {
    const std::uint64_t n = rng() % kSmallStepLimit;
    ASSERT_EQ(big(step(n)), step(big(n))) << n;
  }
}

TEST(OrbitCursor, PromotesAcrossWordBoundary) {
  // Start just below the small limit so the cursor must switch representation.
  const BigInt start = BigInt{static_cast<unsigned long>(kSmallStepLimit - 3)};
  OrbitCursor c(start);
  BigInt ref = start;
  for (int i = 0; i < 50; ++i) {
    ASSERT_EQ(c.value(), ref);
    ASSERT_EQ(c.is_odd(), mpz_odd_p(ref.get_mpz_t()) != 0);
    c.advance();
    ref = step_via_isqrt(ref);
  }
}

TEST(StepAlpha, RationalCases) {
  MapConfig cfg;
  cfg.alpha = Alpha::rational(BigInt{2}, BigInt{1});
  EXPECT_EQ(step_alpha(BigInt{4}, cfg), 8);
  EXPECT_EQ(step_alpha(BigInt{5}, cfg), 2);
  EXPECT_EQ(step_alpha(BigInt{0}, cfg), 0);
  EXPECT_THROW(Alpha::rational(BigInt{1}, BigInt{0}), DomainError);
  try {
    Alpha::parse("3/0");
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonRepresentable);
  }
  EXPECT_THROW(Alpha::parse("-2"), DomainError);
  EXPECT_EQ(*Alpha::parse("2.5").exact(), Rational(5, 2));
  EXPECT_EQ(*Alpha::parse("sqrt(9/4)").exact(), Rational(3, 2));
  EXPECT_FALSE(Alpha::parse("sqrt(2)").exact().has_value());
}

TEST(StepAlpha, LiteralFamilyRule) {
  MapConfig cfg;
  cfg.alpha = Alpha::sqrt_of(Rational{2});
  cfg.rule = BranchRule::AlphaOnEven;
  // Odd n goes to floor(n / alpha) under the family's own branch rule.
  EXPECT_EQ(step_alpha(BigInt{73}, cfg), 51);
  EXPECT_EQ(step_alpha(BigInt{4}, cfg), 5);
}

TEST(StepAlpha, AgreesWithExactModeForSqrt2Map) {
  MapConfig swapped;
  swapped.alpha = Alpha::sqrt_of(Rational{2});
  swapped.rule = BranchRule::InverseOnEven;
  swapped.precision_bits = 24;  // forces precision doubling on some n
  MapConfig inverse;
  inverse.alpha = Alpha::sqrt_of(Rational{1, 2});
  inverse.rule = BranchRule::AlphaOnEven;
  EXPECT_EQ(step_alpha(BigInt{73}, swapped), 103);
  for (std::uint64_t n = 0; n <= 10'000; ++n) {
    ASSERT_EQ(step_alpha(big(n), swapped), big(step(n))) << n;
    ASSERT_EQ(step_alpha(big(n), inverse), big(step(n))) << n;
  }
}

TEST(StepAlpha, TranscendentalAlpha) {
  MapConfig cfg;
  cfg.alpha = Alpha::pi();
  // floor(10 pi) = 31, floor(7 / pi) = 2
  EXPECT_EQ(step_alpha(BigInt{10}, cfg), 31);
  EXPECT_EQ(step_alpha(BigInt{7}, cfg), 2);
  cfg.alpha = Alpha::e();
  EXPECT_EQ(step_alpha(BigInt{1000}, cfg), 2718);
}

TEST(Orbit, PrefixOf73) {
  const std::vector<long> expected{73, 103, 145, 205, 289, 408, 288, 203, 287,
                                   405, 572, 404, 285, 403, 569, 804, 568};
  const auto res = orbit(BigInt{73}, 17);
  ASSERT_EQ(res.states.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(res.states[i].value, expected[i]);
    EXPECT_EQ(res.states[i].step, i);
  }
  EXPECT_EQ(res.final_value, 401);
}

TEST(Orbit, ParityCounts) {
  const auto s10 = orbit(BigInt{73}, 10, false).stats;
  EXPECT_EQ(s10.even_count, 2u);
  EXPECT_EQ(s10.odd_count, 8u);
  EXPECT_DOUBLE_EQ(s10.p0(), 0.2);
  const auto s100 = orbit(BigInt{73}, 100, false).stats;
  EXPECT_EQ(s100.even_count, 45u);
  for (std::uint64_t m : {1, 7, 333, 5000}) {
    const auto s = orbit(BigInt{12345}, m, false).stats;
    EXPECT_EQ(s.even_count + s.odd_count, m);
  }
  EXPECT_THROW(orbit(BigInt{73}, 0), DomainError);
}

TEST(Growth, Examples) {
  EXPECT_EQ(growth_estimate(BigInt{1}, 50), Real{1});
  const Real g = growth_estimate(BigInt{73}, 20000);
  EXPECT_GE(g, Real{"1.020"});
  EXPECT_LE(g, Real{"1.025"});
  EXPECT_THROW(growth_estimate(BigInt{0}, 5), DomainError);
}

TEST(Growth, LogOfBigIntegerIsAccurate) {
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(5);
  for (int i = 0; i < 50; ++i) {
    const BigInt v = random_big(rng, 100 + 97 * static_cast<unsigned>(i)) + 1;
    Real exact;
    mpfr_set_z(exact.backend().data(), v.get_mpz_t(), MPFR_RNDN);
    const Real ref = log(exact);
    EXPECT_LT(abs(log_big(v) - ref) / ref, Real{"1e-15"});
  }
}

TEST(Borderline, SmallProductByHand) {
  // f(1..10) = 1, 1, 4, 2, 7, 4, 9, 5, 12, 7
  const long f[] = {1, 1, 4, 2, 7, 4, 9, 5, 12, 7};
  Rational prod{1};
  for (long r = 1; r <= 10; ++r) prod *= Rational(f[r - 1], r);
  Real expected = to_real(prod);
  expected = pow(expected, Real{1} / Real{10});
  const Real got = borderline_check(MapConfig::exact_sqrt2(), 10);
  EXPECT_LT(abs(got - expected), Real{"1e-40"});
}

TEST(Borderline, Sqrt2MapApproachesOne) {
  const Real v = borderline_check(MapConfig::exact_sqrt2(), 10'000);
  EXPECT_GT(v, Real{"0.97"});
  EXPECT_LE(v, Real{1});
  EXPECT_TRUE(is_collatz_like(v));
}

TEST(Borderline, RationalFourIsRejected) {
  MapConfig cfg;
  cfg.alpha = Alpha::rational(BigInt{4}, BigInt{1});
  try {
    borderline_check(cfg, 100);
    FAIL() << "expected ZeroTerm";
  } catch (const DomainError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroTerm);
  }
  EXPECT_FALSE(is_collatz_like(Real{"1.01"}));
}
