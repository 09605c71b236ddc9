#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "sqrt2lab/numeric.hpp"

namespace sqrt2lab {

/// Exact element a + b sqrt(2) of Q(sqrt 2). The pair (a, b) is unique
/// because sqrt 2 is irrational, so equality is coefficient equality.
class QSqrt2 {
public:
  QSqrt2() = default;
  QSqrt2(Rational a, Rational b = Rational{0});
  QSqrt2(long a) : QSqrt2(Rational{a}) {}

  static QSqrt2 sqrt2() { return {Rational{0}, Rational{1}}; }

  const Rational& a() const noexcept { return a_; }
  const Rational& b() const noexcept { return b_; }

  bool is_zero() const noexcept { return sgn(a_) == 0 && sgn(b_) == 0; }
  QSqrt2 conjugate() const { return {a_, -b_}; }
  /// a^2 - 2 b^2; nonzero for every nonzero element.
  Rational norm() const { return a_ * a_ - 2 * b_ * b_; }
  QSqrt2 inverse() const;

  /// Exact sign of a + b sqrt 2.
  int sign() const;

  Real eval() const;

  /// "1/8 + 1/4*sqrt(2)"
  std::string to_string() const;
  /// Computer-algebra ordering with the radical first: "1/4*sqrt(2) + 1/8"
  std::string to_string_radical_first() const;

  QSqrt2& operator+=(const QSqrt2& o);
  QSqrt2& operator-=(const QSqrt2& o);
  QSqrt2& operator*=(const QSqrt2& o);
  QSqrt2& operator/=(const QSqrt2& o);

  friend QSqrt2 operator+(QSqrt2 x, const QSqrt2& y) { return x += y; }
  friend QSqrt2 operator-(QSqrt2 x, const QSqrt2& y) { return x -= y; }
  friend QSqrt2 operator*(QSqrt2 x, const QSqrt2& y) { return x *= y; }
  friend QSqrt2 operator/(QSqrt2 x, const QSqrt2& y) { return x /= y; }
  friend QSqrt2 operator-(const QSqrt2& x) { return {-x.a_, -x.b_}; }
  friend bool operator==(const QSqrt2& x, const QSqrt2& y) {
    return x.a_ == y.a_ && x.b_ == y.b_;
  }

private:
  Rational a_{0};
  Rational b_{0};
};

inline QSqrt2 qadd(const QSqrt2& x, const QSqrt2& y) { return x + y; }
inline QSqrt2 qmul(const QSqrt2& x, const QSqrt2& y) { return x * y; }
inline Real qeval(const QSqrt2& x) { return x.eval(); }

// ---------------------------------------------------------------------------
// Second-order parity chain
//
// States are (previous parity, current parity) indexed EE, EO, OE, OO.
// ---------------------------------------------------------------------------

enum ParityState : int { EE = 0, EO = 1, OE = 2, OO = 3 };

struct ParityKernel {
  // Probability that the next parity is odd, per state.
  std::array<QSqrt2, 4> odd_next;

  /// EE -> 1/2, EO -> sqrt2/2, OE -> 0, OO -> sqrt2/2
  static ParityKernel model();

  /// Transition probability from state `from` to state `to`.
  QSqrt2 transition(int from, int to) const;
};

struct ParityDistribution {
  std::array<QSqrt2, 4> weights;

  static ParityDistribution uniform();

  QSqrt2 total() const;
  /// Probability that the current parity is odd (EO + OO).
  QSqrt2 odd() const;
  ParityDistribution advance(const ParityKernel& k) const;
};

/// Largest r accepted by appendix_enumeration.
inline constexpr int kMaxEnumerationR = 25;

/// Sums the windowed parity-string weights over all 2^(r+1) parity strings
/// whose last symbol is odd: the exhaustive computation of p_r. Cost 2^(r+1);
/// throws OutOfRange outside [2, 25]. threads = 0 picks the default count.
QSqrt2 appendix_enumeration(int r, unsigned threads = 0);

/// p_r by iterating the kernel r - 1 times from the uniform distribution over
/// the four states. Linear in r.
QSqrt2 markov_pr(std::uint64_t r);

/// Distribution after r - 1 kernel steps (the one markov_pr reads).
ParityDistribution markov_distribution(std::uint64_t r);

/// Exact stationary distribution of the kernel (Gaussian elimination over
/// Q(sqrt 2)). Throws SingularSystem if a pivot vanishes.
ParityDistribution stationary_distribution(const ParityKernel& k = ParityKernel::model());

/// Stationary probability of odd; 8/23 + (3/23) sqrt 2.
QSqrt2 stationary_odd();

/// 1 - stationary_odd() = 15/23 - (3/23) sqrt 2.
QSqrt2 alpha_const();

/// 1/2 - alpha = (6 sqrt 2 - 7) / 46, the base-2 exponent of delta.
QSqrt2 delta_exponent();

/// 2^(1/2 - alpha).
Real delta_const();

struct ConstantsReport {
  Real alpha;
  Real delta;
  bool identity_check = false;  // delta^2 4^alpha = 2 to 40 digits
  QSqrt2 delta_exponent;
  Real empirical_alpha;  // 0.465, read off the parity table
  Real empirical_delta;  // sqrt2^(1 - 2 * 0.465)
};

ConstantsReport constants_report();

/// "[1/4*sqrt(2) + 1/8, 0.478553390593274]"
std::string appendix_row(const QSqrt2& p);

/// "7/16 + 1/16*sqrt(2) = 0.525888347648318"
std::string markov_line(const QSqrt2& p);

}  // namespace sqrt2lab
