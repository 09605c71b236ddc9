#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sqrt2lab/numeric.hpp"

namespace sqrt2lab {

// ---------------------------------------------------------------------------
// Integer square root and the exact map
//
//   f(n) = floor(n / sqrt 2)  for even n
//   f(n) = floor(n * sqrt 2)  for odd n
//
// For even n = 2k, floor(n / sqrt 2) = floor(k sqrt 2), so both branches reduce
// to floor(m sqrt 2) = isqrt(2 m^2) with m = n (odd) or m = n / 2 (even).
// ---------------------------------------------------------------------------

/// floor(sqrt(x)), Newton iteration seeded from the bit length.
std::uint64_t isqrt(std::uint64_t x) noexcept;

/// floor(sqrt(x)) for x >= 0. Newton iteration from a recursively computed
/// upper bound, followed by a correction loop. Throws InvalidArgument for x < 0.
BigInt isqrt(const BigInt& x);

/// floor(m * sqrt 2) for m < 2^62.
std::uint64_t floor_mul_sqrt2(std::uint64_t m) noexcept;

/// floor(m * sqrt 2). Multiplies by a cached fixed-point sqrt 2 and verifies the
/// rounding exactly, falling back to isqrt(2 m^2) when the product sits too
/// close to an integer.
BigInt floor_mul_sqrt2(const BigInt& m);

/// Largest argument accepted by the 64-bit step.
inline constexpr std::uint64_t kSmallStepLimit = std::uint64_t{1} << 62;

/// One application of f. Requires n < kSmallStepLimit.
std::uint64_t step(std::uint64_t n) noexcept;

/// One application of f. Throws InvalidArgument for n < 0.
BigInt step(const BigInt& n);

/// Same as step(n), computed as isqrt(2 m^2). Reference route for tests.
BigInt step_via_isqrt(const BigInt& n);

/// Mutable orbit position that keeps small values in a machine word and
/// promotes to a big integer once they outgrow it.
class OrbitCursor {
public:
  OrbitCursor() = default;
  explicit OrbitCursor(std::uint64_t n);
  explicit OrbitCursor(const BigInt& n);

  void advance();

  bool is_odd() const noexcept;
  bool is_small() const noexcept { return small_; }
  std::size_t bit_length() const noexcept;
  BigInt value() const;
  std::uint64_t small_value() const noexcept { return word_; }

  friend bool operator==(const OrbitCursor& a, const OrbitCursor& b) noexcept;

private:
  bool small_ = true;
  std::uint64_t word_ = 0;
  BigInt big_;
  BigInt next_;
  BigInt scratch_;
};

// ---------------------------------------------------------------------------
// Generic family f_alpha
// ---------------------------------------------------------------------------

/// A positive real parameter that can be enclosed to any precision.
struct Alpha {
  enum class Kind { Rational, SquareRoot, Pi, E };

  Kind kind = Kind::Rational;
  // Rational: the value itself. SquareRoot: the radicand.
  Rational q{1};

  static Alpha rational(const BigInt& num, const BigInt& den);
  static Alpha rational(const Rational& q);
  static Alpha sqrt_of(const Rational& radicand);
  static Alpha pi() { return {Kind::Pi, Rational{0}}; }
  static Alpha e() { return {Kind::E, Rational{0}}; }

  /// Accepts "p/q", decimals like "2.5", "sqrt(x)" with rational x, "pi", "e".
  static Alpha parse(const std::string& text);

  /// Exact rational value if alpha is rational (including square roots of
  /// rational squares).
  std::optional<Rational> exact() const;

  std::string to_string() const;
};

/// Which branch receives alpha.
enum class BranchRule {
  AlphaOnEven,    // floor(n alpha) for even n, floor(n / alpha) for odd n
  InverseOnEven,  // floor(n / alpha) for even n, floor(n alpha) for odd n
};

struct MapConfig {
  Alpha alpha = Alpha::sqrt_of(Rational{2});
  unsigned precision_bits = 64;
  BranchRule rule = BranchRule::AlphaOnEven;
  // Exact mode: the sqrt 2 map evaluated by step(); alpha and rule are ignored.
  bool exact = false;

  static MapConfig exact_sqrt2();
};

/// One application of f_alpha. Irrational alpha is evaluated with outward
/// rounded interval arithmetic, doubling the precision until the floor is
/// unambiguous; rational alpha uses exact arithmetic.
BigInt step_alpha(const BigInt& n, const MapConfig& cfg);

// ---------------------------------------------------------------------------
// Orbits and statistics
// ---------------------------------------------------------------------------

struct BigOrbitState {
  BigInt value;
  std::uint64_t step = 0;
};

struct OrbitStats {
  std::uint64_t even_count = 0;
  std::uint64_t odd_count = 0;
  std::uint64_t m = 0;
  // ln f^m(n), the value reached after the window; unset when it is 0.
  std::optional<Real> log_value;

  double p0() const { return m == 0 ? 0.0 : double(even_count) / double(m); }
  double p1() const { return m == 0 ? 0.0 : double(odd_count) / double(m); }
};

struct OrbitResult {
  std::vector<BigOrbitState> states;  // empty unless requested
  OrbitStats stats;
  BigInt final_value;  // f^m(n)
};

/// Iterates f^0(n) .. f^{m-1}(n), counting parities. With keep_states the
/// iterates themselves are returned, otherwise memory stays constant.
OrbitResult orbit(const BigInt& n, std::uint64_t m, bool keep_states = true);

/// Streaming variant: `visit(r, cursor)` sees every iterate f^r(n), r < m.
OrbitStats orbit_stream(
    const BigInt& n, std::uint64_t m,
    const std::function<void(std::uint64_t, const OrbitCursor&)>& visit);

/// (f^r(n))^(1/r). Throws ZeroValue if the iterate is 0.
Real growth_estimate(const BigInt& n, std::uint64_t r);

/// (prod_{r=1}^{n_max} f(r)/r)^(1/n_max), accumulated in log space.
/// Throws ZeroTerm if some f(r) = 0.
Real borderline_check(const MapConfig& cfg, std::uint64_t n_max);

/// A map is Collatz-like when its geometric-mean ratio does not exceed 1.
bool is_collatz_like(const Real& borderline_value);

}  // namespace sqrt2lab
