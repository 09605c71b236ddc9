#include "sqrt2lab/duffing.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sqrt2lab/core_map.hpp"
#include "sqrt2lab/error.hpp"

namespace sqrt2lab {

namespace {

double force(const DuffingParams& p, double x) {
  const double x2 = x * x;
  return x * (p.a - x2 * (p.b + p.c * x2));
}

// Second derivative of the potential -a x^2/2 + b x^4/4 + c x^6/6.
double curvature(const DuffingParams& p, double x) {
  const double x2 = x * x;
  return -p.a + 3 * p.b * x2 + 5 * p.c * x2 * x2;
}

Stability classify(const DuffingParams& p, double x) {
  const double k = curvature(p, x);
  if (k > 0) return Stability::Center;
  if (k < 0) return Stability::Saddle;
  return Stability::Degenerate;
}

}  // namespace

std::vector<Equilibrium> equilibria(const DuffingParams& p) {
  const double disc = p.b * p.b + 4 * p.a * p.c;
  if (p.c == 0 || !(disc > 0)) {
    throw DomainError(ErrorKind::DegenerateParams, "equilibria need c != 0 and b^2 + 4ac > 0");
  }
  const double root = std::sqrt(disc);
  // (-b + sqrt D) / 2c, rewritten to avoid cancellation when b > 0.
  const double xe2 = p.b >= 0 ? 2 * p.a / (p.b + root) : (-p.b + root) / (2 * p.c);
  std::vector<Equilibrium> out;
  if (xe2 > 0) {
    double xe = std::sqrt(xe2);
    // One Newton step on the quintic force polishes the last ulp.
    const double d = -curvature(p, xe);
    if (d != 0) xe -= force(p, xe) / d;
    out.push_back({-xe, classify(p, -xe)});
    out.push_back({0.0, classify(p, 0.0)});
    out.push_back({xe, classify(p, xe)});
  } else {
    out.push_back({0.0, classify(p, 0.0)});
  }
  return out;
}

double energy(const DuffingParams& p, double x, double v) {
  const double x2 = x * x;
  return 0.5 * v * v + x2 * (-0.5 * p.a + x2 * (0.25 * p.b + p.c * x2 / 6.0));
}

double separatrix_velocity(const DuffingParams& p, double x0) {
  const double x2 = x0 * x0;
  const double radicand = (6 * p.a - 3 * p.b * x2 - 2 * p.c * x2 * x2) / 6.0;
  if (radicand < 0) {
    throw DomainError(ErrorKind::OutsideSeparatrix, "x0 lies outside the separatrix");
  }
  return std::abs(x0) * std::sqrt(radicand);
}

PhasePoint homoclinic_profile(const DuffingParams& p, double t) {
  if (!(p.k > 0)) throw DomainError(ErrorKind::InvalidProfile, "profile needs k > 0");
  const double rk = std::sqrt(p.k);
  const double u = rk * t;
  // sech underflows gracefully for large |u|.
  const double s = std::abs(u) > 700 ? 0.0 : 1.0 / std::cosh(u);
  const double th = std::tanh(u);
  const double q = 1 + p.lambda * s * s;
  if (!(q > 0)) throw DomainError(ErrorKind::InvalidProfile, "1 + lambda sech^2 must be positive");
  const double x = p.A_amp * s / std::sqrt(q);
  const double v = -p.A_amp * rk * s * th / (q * std::sqrt(q));
  return {x, v};
}

double melnikov(const DuffingParams& p, double t0) {
  if (!(p.k > 0) || !(1 + p.lambda > 0)) {
    throw DomainError(ErrorKind::InvalidProfile, "profile needs k > 0 and lambda > -1");
  }
  if ((p.gamma == 0 && p.delta_damp == 0) || p.A_amp == 0) return 0.0;

  const double rk = std::sqrt(p.k);
  // |v0(t)| <= 2 A sqrt(k) C e^(-sqrt(k) |t|)
  const double C = p.lambda >= 0 ? 1.0 : std::pow(1 + p.lambda, -1.5);
  const double amp = 2 * std::abs(p.A_amp) * rk * C;
  auto tail = [&](double T) {
    const double e = std::exp(-rk * T);
    return 2 * (std::abs(p.gamma) * amp * e / rk +
                std::abs(p.delta_damp) * amp * amp * e * e / (2 * rk));
  };
  auto integrand = [&](double t) {
    const double v = homoclinic_profile(p, t).v;
    return v * (p.gamma * std::cos(p.omega * (t + t0)) - p.delta_damp * v);
  };
  auto magnitude = [&](double t) { return std::abs(integrand(t)); };

  using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double t_max = 200 / rk;
  for (double T = 10 / rk; T <= t_max * (1 + 1e-12); T *= 2) {
    const double value = Quad::integrate(integrand, -T, T, 20, 1e-14);
    const double scale = Quad::integrate(magnitude, -T, T, 20, 1e-12);
    if (tail(T) < 1e-10 * scale) return value;
  }
  throw DomainError(ErrorKind::NonConvergent, "Melnikov tail above tolerance at T = 200/sqrt(k)");
}

ForcingSignal::ForcingSignal(std::vector<BigInt> source, ForcingTransform transform,
                             double hold_time)
    : transform_(transform), hold_(hold_time) {
  if (!(hold_time > 0)) throw DomainError(ErrorKind::InvalidArgument, "hold time must be positive");
  values_.reserve(source.size());
  if (transform == ForcingTransform::ParitySign) {
    for (const auto& v : source) values_.push_back(mpz_odd_p(v.get_mpz_t()) ? 1.0 : -1.0);
    return;
  }
  // ln(1 + v) / ln(1 + max v)
  std::vector<Real> logs;
  logs.reserve(source.size());
  Real top = 0;
  for (const auto& v : source) {
    if (sgn(v) < 0) throw DomainError(ErrorKind::InvalidArgument, "log scaling needs v >= 0");
    logs.push_back(log_big(v + 1));
    if (logs.back() > top) top = logs.back();
  }
  for (const auto& l : logs) values_.push_back(top == 0 ? 0.0 : (l / top).convert_to<double>());
}

ForcingSignal ForcingSignal::from_orbit(const BigInt& n, ForcingTransform transform,
                                        double hold_time, double t_end) {
  if (!(hold_time > 0)) throw DomainError(ErrorKind::InvalidArgument, "hold time must be positive");
  const auto count = static_cast<std::uint64_t>(std::ceil(std::max(t_end, 0.0) / hold_time)) + 1;
  std::vector<BigInt> source;
  source.reserve(count);
  orbit_stream(n, count, [&](std::uint64_t, const OrbitCursor& c) { source.push_back(c.value()); });
  return ForcingSignal(std::move(source), transform, hold_time);
}

double ForcingSignal::at_index(std::size_t r) const {
  if (values_.empty()) return 0.0;
  return values_[std::min(r, values_.size() - 1)];
}

double ForcingSignal::at(double t) const {
  if (values_.empty() || t < 0) return 0.0;
  return at_index(static_cast<std::size_t>(std::floor(t / hold_)));
}

std::vector<TrajectoryPoint> simulate(const DuffingParams& p, const ForcingSignal& forcing,
                                      double t_end, double dt, double x0, double v0) {
  if (!(dt > 0)) throw DomainError(ErrorKind::InvalidArgument, "dt must be positive");
  if (!(t_end >= 0)) throw DomainError(ErrorKind::InvalidArgument, "t_end must be nonnegative");

  std::vector<TrajectoryPoint> out;
  out.reserve(static_cast<std::size_t>(t_end / dt) + 2);
  out.push_back({0.0, x0, v0});
  double x = x0;
  double v = v0;

  // Each hold interval (or the whole run when unforced) is cut into equal
  // steps no longer than dt, so every step sees a constant forcing value.
  const double span = forcing.empty() ? std::max(t_end, dt) : forcing.hold_time();
  for (std::uint64_t r = 0;; ++r) {
    const double start = static_cast<double>(r) * span;
    if (start >= t_end) break;
    const double end = std::min(static_cast<double>(r + 1) * span, t_end);
    const auto steps = static_cast<std::uint64_t>(std::max(1.0, std::ceil((end - start) / dt - 1e-9)));
    const double h = (end - start) / static_cast<double>(steps);
    const double f = forcing.at_index(static_cast<std::size_t>(r));
    auto acc = [&](double xx) { return force(p, xx) + f; };
    for (std::uint64_t i = 1; i <= steps; ++i) {
      const double k1x = v;
      const double k1v = acc(x);
      const double k2x = v + 0.5 * h * k1v;
      const double k2v = acc(x + 0.5 * h * k1x);
      const double k3x = v + 0.5 * h * k2v;
      const double k3v = acc(x + 0.5 * h * k2x);
      const double k4x = v + h * k3v;
      const double k4v = acc(x + h * k3x);
      x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
      v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
      if (!(std::abs(x) <= 1e6) || !std::isfinite(v)) {
        throw DomainError(ErrorKind::Blowup, "|x| exceeded 1e6");
      }
      const double t = i == steps ? end : start + static_cast<double>(i) * h;
      out.push_back({t, x, v});
    }
  }
  return out;
}

std::vector<std::pair<double, double>> phase_portrait(const std::vector<TrajectoryPoint>& points) {
  std::vector<std::pair<double, double>> out;
  out.reserve(points.size());
  for (const auto& pt : points) {
    if (!out.empty() && out.back().first == pt.x && out.back().second == pt.v) continue;
    out.emplace_back(pt.x, pt.v);
  }
  return out;
}

Winding classify_winding(const std::vector<TrajectoryPoint>& points) {
  if (phase_portrait(points).size() <= 1) return Winding::Rest;
  bool pos = false;
  bool neg = false;
  for (const auto& pt : points) {
    pos = pos || pt.x > 0;
    neg = neg || pt.x < 0;
  }
  return pos && neg ? Winding::BothCenters : Winding::OneCenter;
}

std::optional<double> revisit_gap(const std::vector<TrajectoryPoint>& points) {
  std::vector<double> hits;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& a = points[i - 1];
    const auto& b = points[i];
    if (a.v > 0 && b.v <= 0) {
      const double w = a.v / (a.v - b.v);
      hits.push_back(a.x + w * (b.x - a.x));
    }
  }
  if (hits.size() < 2) return std::nullopt;
  double gap = 0;
  for (std::size_t i = 1; i < hits.size(); ++i) gap = std::max(gap, std::abs(hits[i] - hits[i - 1]));
  return gap;
}

SensitivityReport twin_run(const DuffingParams& p, const ForcingSignal& forcing, double t_end,
                           double dt, double x0, double v0, double eps) {
  std::vector<TrajectoryPoint> first;
  std::vector<TrajectoryPoint> second;
  std::exception_ptr errors[2];
  auto run = [&](std::vector<TrajectoryPoint>& into, double start, std::exception_ptr& err) {
    try {
      into = simulate(p, forcing, t_end, dt, start, v0);
    } catch (...) {
      err = std::current_exception();
    }
  };
  {
    std::jthread a(run, std::ref(first), x0, std::ref(errors[0]));
    std::jthread b(run, std::ref(second), x0 + eps, std::ref(errors[1]));
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SensitivityReport rep;
  rep.initial_separation = std::abs(eps);
  const std::size_t n = std::min(first.size(), second.size());
  const std::size_t stride = std::max<std::size_t>(1, n / 1000);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::hypot(first[i].x - second[i].x, first[i].v - second[i].v);
    rep.max_separation = std::max(rep.max_separation, d);
    if (!rep.time_to_unit && d >= 1) rep.time_to_unit = first[i].t;
    if (i % stride == 0 || i + 1 == n) rep.samples.emplace_back(first[i].t, d);
    rep.final_separation = d;
  }
  return rep;
}

}  // namespace sqrt2lab
