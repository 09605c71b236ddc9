#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sqrt2lab/numeric.hpp"

namespace sqrt2lab {

// x'' - a x + b x^3 + c x^5 = f
struct DuffingParams {
  double a = 1;
  double b = 1;
  double c = 1;
  double gamma = 0.3;       // forcing amplitude in the Melnikov integrand
  double delta_damp = 0.1;  // damping in the Melnikov integrand
  double omega = 1;
  // Homoclinic profile x0(t) = A sech(sqrt(k) t) / sqrt(1 + lambda sech^2(sqrt(k) t))
  double A_amp = 1;
  double lambda = 0.5;
  double k = 1;
};

enum class Stability { Center, Saddle, Degenerate };

struct Equilibrium {
  double x = 0;
  Stability stability = Stability::Degenerate;
};

/// Roots of a x - b x^3 - c x^5 = 0 on the v = 0 axis, ascending, classified
/// by the sign of the potential's curvature. Throws DegenerateParams when
/// c = 0 or b^2 + 4ac <= 0.
std::vector<Equilibrium> equilibria(const DuffingParams& p);

/// v^2/2 - a x^2/2 + b x^4/4 + c x^6/6
double energy(const DuffingParams& p, double x, double v);

/// Nonnegative v with energy(p, x0, v) = 0. Throws OutsideSeparatrix when the
/// radicand is negative.
double separatrix_velocity(const DuffingParams& p, double x0);

struct PhasePoint {
  double x = 0;
  double v = 0;
};

/// x0(t) and its analytic derivative. Throws InvalidProfile if k <= 0 or
/// 1 + lambda sech^2 is not positive.
PhasePoint homoclinic_profile(const DuffingParams& p, double t);

/// M(t0) = integral of v0(t) [gamma cos(omega (t + t0)) - delta v0(t)] over
/// the real line. The window [-T, T] doubles from 10/sqrt(k) until an analytic
/// tail bound falls below 1e-10 of the absolute integral; NonConvergent past
/// T = 200/sqrt(k).
double melnikov(const DuffingParams& p, double t0);

enum class ForcingTransform { ParitySign, LogScaled };

/// Piecewise-constant forcing read off an integer orbit: value r holds on
/// [r h, (r+1) h). An empty source means no forcing. Past the end of the
/// source the last value is held.
class ForcingSignal {
public:
  ForcingSignal() = default;
  ForcingSignal(std::vector<BigInt> source, ForcingTransform transform, double hold_time);

  /// Orbit of n long enough to cover [0, t_end].
  static ForcingSignal from_orbit(const BigInt& n, ForcingTransform transform, double hold_time,
                                  double t_end);

  bool empty() const noexcept { return values_.empty(); }
  double hold_time() const noexcept { return hold_; }
  ForcingTransform transform() const noexcept { return transform_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double at_index(std::size_t r) const;
  /// Value on the hold interval containing t.
  double at(double t) const;

private:
  ForcingTransform transform_ = ForcingTransform::ParitySign;
  double hold_ = 1;
  std::vector<double> values_;
};

struct TrajectoryPoint {
  double t = 0;
  double x = 0;
  double v = 0;
};

/// Fixed-step RK4 on x'' = a x - b x^3 - c x^5 + f(t). Each hold interval is
/// cut into equal steps no longer than dt, so steps land on every boundary.
/// Throws Blowup once |x| > 1e6.
std::vector<TrajectoryPoint> simulate(const DuffingParams& p, const ForcingSignal& forcing,
                                      double t_end, double dt, double x0, double v0);

/// (x, v) pairs for plotting; consecutive repeats are collapsed.
std::vector<std::pair<double, double>> phase_portrait(const std::vector<TrajectoryPoint>& points);

enum class Winding { Rest, OneCenter, BothCenters };

/// BothCenters if x changes sign along the trajectory, Rest if the phase
/// portrait is a single point, OneCenter otherwise.
Winding classify_winding(const std::vector<TrajectoryPoint>& points);

/// Largest distance between successive downward crossings of v = 0 (x
/// linearly interpolated). Empty with fewer than two crossings.
std::optional<double> revisit_gap(const std::vector<TrajectoryPoint>& points);

struct SensitivityReport {
  double initial_separation = 0;
  double max_separation = 0;
  double final_separation = 0;
  std::optional<double> time_to_unit;  // first t with separation >= 1
  std::vector<std::pair<double, double>> samples;  // (t, separation), about 1000 evenly spaced
};

/// Twin runs from (x0, v0) and (x0 + eps, v0), integrated concurrently.
SensitivityReport twin_run(const DuffingParams& p, const ForcingSignal& forcing, double t_end,
                           double dt, double x0, double v0, double eps);

}  // namespace sqrt2lab
