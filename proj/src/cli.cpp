#include "sqrt2lab/cli.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sqrt2lab/core_map.hpp"
#include "sqrt2lab/cycles.hpp"
#include "sqrt2lab/duffing.hpp"
#include "sqrt2lab/error.hpp"
#include "sqrt2lab/predecessors.hpp"
#include "sqrt2lab/qsqrt2.hpp"

namespace sqrt2lab::cli {

namespace {

// Bad flag values found after parsing; reported like parse errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string json_cell(const std::string& s, CellKind kind) {
  if (kind == CellKind::Decimal && !s.empty()) return s;
  if (kind == CellKind::Integer && !s.empty() && s.size() <= 15) return s;
  return nlohmann::json(s).dump();
}

std::string fmt_double(double x, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string join(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join(const std::vector<BigInt>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += v[i].get_str();
  }
  return out;
}

BigInt parse_nonnegative(const std::string& flag, const std::string& text) {
  BigInt v;
  if (text.empty() || v.set_str(text, 10) != 0 || sgn(v) < 0) {
    throw UsageError(flag + ": expected a nonnegative integer, got '" + text + "'");
  }
  return v;
}

std::string divergent_label(std::uint64_t cap) {
  return "divergent (heuristic, cap=" + std::to_string(cap) + ")";
}

// Reports i/total to the diagnostics stream in 10% increments.
class Progress {
public:
  Progress(std::ostream& err, std::string what, std::uint64_t total, std::uint64_t threshold)
      : err_(err), what_(std::move(what)), total_(total), active_(total >= threshold) {}

  void tick(std::uint64_t done) {
    if (!active_) return;
    const std::uint64_t tenth = done * 10 / total_;
    if (tenth > last_) {
      last_ = tenth;
      err_ << what_ << ": " << done << "/" << total_ << "\n" << std::flush;
    }
  }

private:
  std::ostream& err_;
  std::string what_;
  std::uint64_t total_;
  bool active_;
  std::uint64_t last_ = 0;
};

constexpr std::uint64_t kProgressThreshold = 100'000;

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct OrbitArgs {
  std::string n;
  std::uint64_t steps = 17;
  bool summary = false;
};

CommandOutput cmd_orbit(const OrbitArgs& a, std::ostream& err) {
  const BigInt n = parse_nonnegative("--n", a.n);
  CommandOutput o;
  Progress progress(err, "orbit", a.steps, kProgressThreshold);
  if (a.summary) {
    const OrbitStats s = orbit_stream(n, a.steps, [&](std::uint64_t r, const OrbitCursor&) {
      progress.tick(r + 1);
    });
    o.table.columns = {{"n", CellKind::Integer},     {"steps", CellKind::Integer},
                       {"even", CellKind::Integer},  {"odd", CellKind::Integer},
                       {"p0", CellKind::Decimal},    {"p1", CellKind::Decimal},
                       {"ln_final", CellKind::Decimal}};
    const Rational p0 = a.steps ? Rational(BigInt{std::to_string(s.even_count)},
                                           BigInt{std::to_string(a.steps)})
                                : Rational{0};
    o.table.rows.push_back({n.get_str(), std::to_string(a.steps), std::to_string(s.even_count),
                            std::to_string(s.odd_count), to_fixed(to_real(p0), 6),
                            to_fixed(to_real(a.steps ? 1 - p0 : Rational{0}), 6),
                            s.log_value ? to_fixed(*s.log_value, 6) : ""});
    return o;
  }
  o.table.columns = {{"r", CellKind::Integer}, {"value", CellKind::Integer}, {"parity", CellKind::Text}};
  orbit_stream(n, a.steps, [&](std::uint64_t r, const OrbitCursor& c) {
    o.table.rows.push_back({std::to_string(r), c.value().get_str(), c.is_odd() ? "odd" : "even"});
    progress.tick(r + 1);
  });
  return o;
}

struct GrowthArgs {
  std::string n;
  std::uint64_t r = 0;
  std::uint64_t every = 0;
  std::uint64_t from = 1;
};

CommandOutput cmd_growth(const GrowthArgs& a, std::ostream& err) {
  const BigInt n = parse_nonnegative("--n", a.n);
  if (a.r == 0) throw UsageError("--r: must be positive");
  CommandOutput o;
  o.table.columns = {{"r", CellKind::Integer}, {"growth", CellKind::Decimal}};
  Progress progress(err, "growth", a.r, kProgressThreshold);
  auto wanted = [&](std::uint64_t r) {
    if (r == 0 || r < a.from) return false;
    return r == a.r || (a.every > 0 && r % a.every == 0);
  };
  orbit_stream(n, a.r + 1, [&](std::uint64_t r, const OrbitCursor& c) {
    progress.tick(r);
    if (!wanted(r)) return;
    const BigInt v = c.value();
    if (sgn(v) == 0) throw DomainError(ErrorKind::ZeroValue, "orbit reached 0");
    const Real g = exp(log_big(v) / Real{static_cast<unsigned long long>(r)});
    o.table.rows.push_back({std::to_string(r), to_fixed(g, 10)});
  });
  return o;
}

struct CensusArgs {
  std::string kind;
  std::uint64_t hi = 0;
  int levels = 0;
  std::string n = "73";
};

CommandOutput cmd_census(const CensusArgs& a, std::ostream& err) {
  CommandOutput o;
  if (a.kind == "no-pred") {
    if ((a.hi == 0) == (a.levels == 0)) throw UsageError("census no-pred: give exactly one of --hi, --levels");
    if (a.hi) {
      const std::uint64_t c = no_predecessor_census(a.hi);
      o.table.columns = {{"hi", CellKind::Integer}, {"count", CellKind::Integer}};
      o.table.rows.push_back({std::to_string(a.hi), std::to_string(c)});
      o.text = std::to_string(c) + "\n";
      return o;
    }
    if (a.levels < 1 || a.levels > 19) throw UsageError("--levels: expected 1..19");
    o.table.columns = {{"level", CellKind::Integer},
                       {"hi", CellKind::Integer},
                       {"count", CellKind::Integer},
                       {"tenth_matches_previous", CellKind::Text}};
    std::uint64_t hi = 1;
    std::uint64_t prev = 0;
    for (int l = 1; l <= a.levels; ++l) {
      hi *= 10;
      const std::uint64_t c = no_predecessor_census(hi);
      o.table.rows.push_back({std::to_string(l), std::to_string(hi), std::to_string(c),
                              l == 1 ? "-" : (c / 10 == prev ? "yes" : "no")});
      prev = c;
    }
    return o;
  }
  if (a.kind == "parity") {
    if (a.levels < 1 || a.levels > 9) throw UsageError("--levels: expected 1..9 for parity");
    const BigInt n = parse_nonnegative("--n", a.n);
    std::uint64_t top = 1;
    for (int l = 0; l < a.levels; ++l) top *= 10;
    o.table.columns = {{"level", CellKind::Integer}, {"m", CellKind::Integer},
                       {"even", CellKind::Integer},  {"odd", CellKind::Integer},
                       {"p0", CellKind::Decimal},    {"p1", CellKind::Decimal},
                       {"log73_value", CellKind::Decimal}};
    static const Real ln73 = log(Real{73});
    Progress progress(err, "parity", top, kProgressThreshold);
    std::uint64_t even = 0;
    std::uint64_t next_mark = 10;
    int level = 1;
    orbit_stream(n, top + 1, [&](std::uint64_t r, const OrbitCursor& c) {
      progress.tick(r);
      if (r == next_mark) {
        // Counts cover f^0 .. f^(m-1); the logged value is f^m(n).
        const Rational p0(BigInt{std::to_string(even)}, BigInt{std::to_string(r)});
        const BigInt v = c.value();
        o.table.rows.push_back({std::to_string(level), std::to_string(r), std::to_string(even),
                                std::to_string(r - even), to_fixed(to_real(p0), level),
                                to_fixed(to_real(1 - p0), level),
                                sgn(v) > 0 ? to_fixed(log_big(v) / ln73, 2) : ""});
        ++level;
        next_mark *= 10;
      }
      if (!c.is_odd()) ++even;
    });
    return o;
  }
  throw UsageError("--kind: expected no-pred or parity, got '" + a.kind + "'");
}

struct CyclesArgs {
  std::string n;
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::uint64_t cap = 20000;
  std::uint64_t value_cap_bits = std::uint64_t{1} << 16;
  std::string show = "summary";
};

CommandOutput cmd_cycles(const CyclesArgs& a, unsigned threads, std::ostream& err) {
  const CycleLimits limits{a.cap, a.value_cap_bits};
  CommandOutput o;
  if (!a.n.empty()) {
    const BigInt n = parse_nonnegative("--n", a.n);
    const CycleVerdict v = detect_cycle(n, limits);
    o.table.columns = {{"n", CellKind::Integer},          {"verdict", CellKind::Text},
                       {"pre_period", CellKind::Integer}, {"period", CellKind::Integer},
                       {"members", CellKind::Text}};
    if (const auto* r = std::get_if<CycleReport>(&v)) {
      o.table.rows.push_back({n.get_str(), "cycle", std::to_string(r->pre_period_m),
                              std::to_string(r->period_r), join(r->cycle_members)});
    } else {
      const auto& d = std::get<Divergent>(v);
      o.table.rows.push_back({n.get_str(), divergent_label(a.cap) + (d.hit_value_cap ? " value cap" : ""),
                              "", "", ""});
    }
    return o;
  }
  if (a.hi <= a.lo) throw UsageError("cycles: give --n, or --hi greater than --lo");
  if (a.show == "counting" && a.lo != 0) throw UsageError("--show counting needs --lo 0");
  const bool noisy = a.hi - a.lo >= 10'000;
  if (noisy) err << "cycles: classifying [" << a.lo << ", " << a.hi << ")\n" << std::flush;
  const ClassifiedRange range = classify_range(a.lo, a.hi, limits, threads);
  if (noisy) err << "cycles: done\n" << std::flush;

  if (a.show == "summary") {
    o.table.columns = {{"lo", CellKind::Integer},        {"hi", CellKind::Integer},
                       {"cycling", CellKind::Integer},   {"divergent", CellKind::Integer},
                       {"iteration_cap", CellKind::Integer}};
    o.table.rows.push_back({std::to_string(a.lo), std::to_string(a.hi),
                            std::to_string(range.cycling.size()), std::to_string(range.divergent.size()),
                            std::to_string(a.cap)});
  } else if (a.show == "divergent") {
    o.table.columns = {{"n", CellKind::Integer}, {"verdict", CellKind::Text}};
    for (std::uint64_t n : range.divergent) o.table.rows.push_back({std::to_string(n), divergent_label(a.cap)});
  } else if (a.show == "all") {
    o.table.columns = {{"n", CellKind::Integer},          {"verdict", CellKind::Text},
                       {"pre_period", CellKind::Integer}, {"period", CellKind::Integer},
                       {"cycle_min", CellKind::Integer}};
    std::size_t ci = 0;
    for (std::uint64_t n = a.lo; n < a.hi; ++n) {
      if (ci < range.cycling.size() && range.cycling[ci].start_n == n) {
        const auto& r = range.cycling[ci++];
        o.table.rows.push_back({std::to_string(n), "cycle", std::to_string(r.pre_period_m),
                                std::to_string(r.period_r), r.cycle_members.front().get_str()});
      } else {
        o.table.rows.push_back({std::to_string(n), divergent_label(a.cap), "", "", ""});
      }
    }
  } else if (a.show == "counting") {
    o.table.columns = {{"n", CellKind::Integer}, {"cycling_up_to_n", CellKind::Integer}};
    for (const auto& [n, c] : counting_function(range)) {
      o.table.rows.push_back({std::to_string(n), std::to_string(c)});
    }
  } else {
    throw UsageError("--show: expected summary, divergent, all or counting");
  }
  return o;
}

struct PredsArgs {
  std::uint64_t m = 0;
  std::uint64_t upto = 0;
};

CommandOutput cmd_preds(const PredsArgs& a) {
  if ((a.m == 0) == (a.upto == 0)) throw UsageError("preds: give exactly one of --m, --upto");
  CommandOutput o;
  o.table.columns = {{"m", CellKind::Integer},
                     {"kind", CellKind::Text},
                     {"predecessors", CellKind::Text},
                     {"beatty_k", CellKind::Integer}};
  const std::uint64_t lo = a.m ? a.m : 1;
  const std::uint64_t hi = a.m ? a.m : a.upto;
  for (std::uint64_t m = lo; m <= hi; ++m) {
    const auto c = classify_predecessor(m);
    o.table.rows.push_back({std::to_string(m), std::string(to_string(c.kind)), join(c.witnesses),
                            c.beatty_k ? std::to_string(*c.beatty_k) : ""});
  }
  return o;
}

struct TreeArgs {
  std::uint64_t root = 0;
  std::uint64_t cap = 10000;
};

CommandOutput cmd_tree(const TreeArgs& a) {
  const auto tree = predecessor_tree(a.root, static_cast<std::size_t>(a.cap));
  CommandOutput o;
  o.table.columns = {{"node", CellKind::Integer}, {"predecessors", CellKind::Text}, {"leaf", CellKind::Text}};
  for (const auto& [node, kids] : tree.edges) {
    o.table.rows.push_back({std::to_string(node), join(kids), kids.empty() ? "yes" : "no"});
  }
  o.text = render_tree(tree);
  return o;
}

struct GapsArgs {
  std::uint64_t hi = 1'000'000;
  int levels = 3;
  std::size_t convergents = 0;
  std::size_t width = 60;
};

CommandOutput cmd_gaps(const GapsArgs& a) {
  CommandOutput o;
  if (a.convergents) {
    o.table.columns = {{"i", CellKind::Integer}, {"p", CellKind::Integer}, {"q", CellKind::Integer}};
    const auto c = sqrt2_convergents(a.convergents);
    for (std::size_t i = 0; i < c.size(); ++i) {
      o.table.rows.push_back({std::to_string(i), c[i].first.get_str(), c[i].second.get_str()});
    }
    return o;
  }
  o.table.columns = {{"level", CellKind::Integer},
                     {"short_gap", CellKind::Integer},
                     {"long_gap", CellKind::Integer},
                     {"words", CellKind::Text}};
  for (const auto& l : gap_words(a.hi, a.levels)) {
    o.table.rows.push_back({std::to_string(l.level), std::to_string(l.short_gap),
                            std::to_string(l.long_gap), l.word_sequence.substr(0, a.width)});
  }
  return o;
}

Table qsqrt2_table() {
  return {{{"r", CellKind::Integer},
           {"a", CellKind::Text},
           {"b", CellKind::Text},
           {"value", CellKind::Decimal}},
          {}};
}

void add_qsqrt2_row(Table& t, std::uint64_t r, const QSqrt2& p) {
  t.rows.push_back({std::to_string(r), p.a().get_str(), p.b().get_str(), to_fixed(p.eval(), 15)});
}

struct MarkovArgs {
  std::uint64_t r = 0;
  std::uint64_t from = 0;
};

CommandOutput cmd_markov(const MarkovArgs& a) {
  if (a.r == 0) throw UsageError("--r: must be positive");
  const std::uint64_t lo = a.from ? a.from : a.r;
  if (lo > a.r) throw UsageError("--from: must not exceed --r");
  CommandOutput o;
  o.table = qsqrt2_table();
  std::string text;
  for (std::uint64_t r = lo; r <= a.r; ++r) {
    const QSqrt2 p = markov_pr(r);
    add_qsqrt2_row(o.table, r, p);
    text += markov_line(p) + "\n";
  }
  o.text = text;
  return o;
}

struct AppendixArgs {
  int from = 2;
  int to = 24;
};

CommandOutput cmd_appendix(const AppendixArgs& a, unsigned threads, std::ostream& err) {
  if (a.from > a.to) throw UsageError("--from: must not exceed --to");
  // Out-of-range requests fail before the first (possibly long) enumeration.
  if (a.from < 2 || a.to > kMaxEnumerationR) appendix_enumeration(a.from < 2 ? a.from : a.to);
  CommandOutput o;
  o.table = qsqrt2_table();
  std::string text;
  for (int r = a.from; r <= a.to; ++r) {
    if (r >= 22) err << "appendix: r = " << r << "\n" << std::flush;
    const QSqrt2 p = appendix_enumeration(r, threads);
    add_qsqrt2_row(o.table, static_cast<std::uint64_t>(r), p);
    text += appendix_row(p) + "\n";
  }
  o.text = text;
  return o;
}

struct ConstantsArgs {
  int digits = 40;
};

CommandOutput cmd_constants(const ConstantsArgs& a) {
  if (a.digits < 1 || a.digits > 90) throw UsageError("--digits: expected 1..90");
  const auto rep = constants_report();
  CommandOutput o;
  o.table.columns = {{"name", CellKind::Text}, {"exact", CellKind::Text}, {"value", CellKind::Decimal}};
  o.table.rows = {
      {"stationary_odd", stationary_odd().to_string(), to_fixed(stationary_odd().eval(), a.digits)},
      {"alpha", alpha_const().to_string(), to_fixed(rep.alpha, a.digits)},
      {"delta_exponent", rep.delta_exponent.to_string(), to_fixed(rep.delta_exponent.eval(), a.digits)},
      {"delta", "2^(" + rep.delta_exponent.to_string() + ")", to_fixed(rep.delta, a.digits)},
      {"identity_delta2_4alpha_eq_2", rep.identity_check ? "holds" : "fails", ""},
      {"empirical_alpha", "", to_fixed(rep.empirical_alpha, 3)},
      {"empirical_delta", "sqrt(2)^(1-2*0.465)", to_fixed(rep.empirical_delta, a.digits)},
  };
  return o;
}

struct DuffingArgs {
  std::string mode = "simulate";
  DuffingParams p;
  std::string forcing = "parity";
  std::string n = "73";
  double hold = 0.5;
  double dt = 1e-3;
  double t_end = 100;
  double x0 = 0;
  double v0 = 0;
  double eps = 1e-8;
  std::uint64_t stride = 100;
  double t0_from = 0;
  double t0_to = 6.283185307179586;
  std::uint64_t t0_points = 64;
};

ForcingSignal make_forcing(const DuffingArgs& a) {
  if (a.forcing == "none") return {};
  const BigInt n = parse_nonnegative("--n", a.n);
  if (a.forcing == "parity") return ForcingSignal::from_orbit(n, ForcingTransform::ParitySign, a.hold, a.t_end);
  if (a.forcing == "log") return ForcingSignal::from_orbit(n, ForcingTransform::LogScaled, a.hold, a.t_end);
  throw UsageError("--forcing: expected none, parity or log");
}

CommandOutput cmd_duffing(const DuffingArgs& a) {
  CommandOutput o;
  if (a.mode == "equilibria") {
    o.table.columns = {{"x", CellKind::Decimal}, {"v", CellKind::Decimal}, {"stability", CellKind::Text}};
    for (const auto& e : equilibria(a.p)) {
      const char* s = e.stability == Stability::Center   ? "center"
                      : e.stability == Stability::Saddle ? "saddle"
                                                         : "degenerate";
      o.table.rows.push_back({fmt_double(e.x, 17), "0", s});
    }
    return o;
  }
  if (a.mode == "melnikov") {
    if (a.t0_points < 2) throw UsageError("--t0-points: need at least 2");
    o.table.columns = {{"t0", CellKind::Decimal}, {"M", CellKind::Decimal}};
    for (std::uint64_t i = 0; i < a.t0_points; ++i) {
      const double t0 = a.t0_from + (a.t0_to - a.t0_from) * static_cast<double>(i) /
                                        static_cast<double>(a.t0_points - 1);
      o.table.rows.push_back({fmt_double(t0), fmt_double(melnikov(a.p, t0))});
    }
    return o;
  }
  if (a.stride == 0) throw UsageError("--stride: must be positive");
  if (a.mode == "simulate") {
    const auto traj = simulate(a.p, make_forcing(a), a.t_end, a.dt, a.x0, a.v0);
    o.table.columns = {{"t", CellKind::Decimal}, {"x", CellKind::Decimal}, {"v", CellKind::Decimal}};
    for (std::size_t i = 0; i < traj.size(); ++i) {
      if (i % a.stride != 0 && i + 1 != traj.size()) continue;
      o.table.rows.push_back({fmt_double(traj[i].t), fmt_double(traj[i].x), fmt_double(traj[i].v)});
    }
    return o;
  }
  if (a.mode == "twin") {
    const auto rep = twin_run(a.p, make_forcing(a), a.t_end, a.dt, a.x0, a.v0, a.eps);
    o.table.columns = {{"t", CellKind::Decimal}, {"separation", CellKind::Decimal}};
    for (const auto& [t, d] : rep.samples) o.table.rows.push_back({fmt_double(t), fmt_double(d)});
    return o;
  }
  throw UsageError("--mode: expected equilibria, melnikov, simulate or twin");
}

struct BorderlineArgs {
  std::string alpha = "sqrt(2)";
  std::uint64_t n_max = 10000;
  std::string rule = "alpha-on-even";
  unsigned precision = 64;
};

CommandOutput cmd_borderline(const BorderlineArgs& a) {
  MapConfig cfg;
  try {
    cfg.alpha = Alpha::parse(a.alpha);
  } catch (const DomainError& e) {
    if (e.kind() == ErrorKind::InvalidArgument) throw UsageError("--alpha: " + std::string(e.what()));
    throw;
  }
  if (a.rule == "alpha-on-even") {
    cfg.rule = BranchRule::AlphaOnEven;
  } else if (a.rule == "inverse-on-even") {
    cfg.rule = BranchRule::InverseOnEven;
  } else {
    throw UsageError("--rule: expected alpha-on-even or inverse-on-even");
  }
  cfg.precision_bits = a.precision;
  if (a.n_max == 0) throw UsageError("--n-max: must be positive");
  const Real v = borderline_check(cfg, a.n_max);
  CommandOutput o;
  o.table.columns = {{"alpha", CellKind::Text},
                     {"rule", CellKind::Text},
                     {"n_max", CellKind::Integer},
                     {"value", CellKind::Decimal},
                     {"collatz_like", CellKind::Text}};
  o.table.rows.push_back({cfg.alpha.to_string(), a.rule, std::to_string(a.n_max), to_fixed(v, 20),
                          is_collatz_like(v) ? "yes" : "no"});
  return o;
}

}  // namespace

std::string export_table(const Table& table, OutputFormat format) {
  std::string out;
  const auto& cols = table.columns;
  switch (format) {
    case OutputFormat::Csv: {
      for (std::size_t j = 0; j < cols.size(); ++j) out += (j ? "," : "") + csv_field(cols[j].name);
      out += '\n';
      for (const auto& row : table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) out += (j ? "," : "") + csv_field(row[j]);
        out += '\n';
      }
      return out;
    }
    case OutputFormat::Json: {
      if (table.rows.empty()) return "[]\n";
      out += "[\n";
      for (std::size_t i = 0; i < table.rows.size(); ++i) {
        out += "  {";
        for (std::size_t j = 0; j < cols.size(); ++j) {
          if (j) out += ", ";
          out += nlohmann::json(cols[j].name).dump() + ": " + json_cell(table.rows[i][j], cols[j].kind);
        }
        out += i + 1 < table.rows.size() ? "},\n" : "}\n";
      }
      return out + "]\n";
    }
    case OutputFormat::Text: {
      std::vector<std::size_t> width(cols.size());
      for (std::size_t j = 0; j < cols.size(); ++j) width[j] = cols[j].name.size();
      for (const auto& row : table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());
      }
      auto line = [&](auto cell, auto right) {
        std::string s;
        for (std::size_t j = 0; j < cols.size(); ++j) {
          const std::string& c = cell(j);
          const std::string pad(width[j] - c.size(), ' ');
          if (j) s += "  ";
          s += right(j) ? pad + c : c + pad;
        }
        s.erase(s.find_last_not_of(' ') + 1);
        return s + "\n";
      };
      auto numeric = [&](std::size_t j) { return cols[j].kind != CellKind::Text; };
      out += line([&](std::size_t j) -> const std::string& { return cols[j].name; }, numeric);
      for (const auto& row : table.rows) {
        out += line([&](std::size_t j) -> const std::string& { return row[j]; }, numeric);
      }
      return out;
    }
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact experiments with the sqrt(2) Collatz-like map", "sqrt2lab"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file; subcommand keys as [command] sections or command.key");

  std::string format = "text";
  std::string output_path;
  unsigned threads = 0;
  app.add_option("--format", format, "text, csv or json")
      ->check(CLI::IsMember({"text", "csv", "json"}))
      ->capture_default_str();
  app.add_option("-o,--output", output_path, "write data here instead of stdout");
  app.add_option("--threads", threads, "worker threads (0: SQRT2LAB_THREADS or hardware)");

  std::function<CommandOutput()> action;

  OrbitArgs orbit_a;
  auto* orbit = app.add_subcommand("orbit", "iterates f^r(n)");
  orbit->add_option("--n", orbit_a.n, "start value")->required();
  orbit->add_option("--steps", orbit_a.steps, "number of iterates")->capture_default_str();
  orbit->add_flag("--summary", orbit_a.summary, "parity counts only, constant memory");
  orbit->callback([&] { action = [&] { return cmd_orbit(orbit_a, err); }; });

  GrowthArgs growth_a;
  auto* growth = app.add_subcommand("growth", "(f^r(n))^(1/r)");
  growth->add_option("--n", growth_a.n, "start value")->required();
  growth->add_option("--r", growth_a.r, "last step")->required();
  growth->add_option("--every", growth_a.every, "also report every k-th step");
  growth->add_option("--from", growth_a.from, "first step reported")->capture_default_str();
  growth->callback([&] { action = [&] { return cmd_growth(growth_a, err); }; });

  CensusArgs census_a;
  auto* census = app.add_subcommand("census", "no-predecessor counts or parity table");
  census->add_option("--kind", census_a.kind, "no-pred or parity")
      ->required()
      ->check(CLI::IsMember({"no-pred", "parity"}));
  census->add_option("--hi", census_a.hi, "count below hi (no-pred)");
  census->add_option("--levels", census_a.levels, "hi = 10^1 .. 10^levels");
  census->add_option("--n", census_a.n, "orbit start (parity)")->capture_default_str();
  census->callback([&] { action = [&] { return cmd_census(census_a, err); }; });

  CyclesArgs cycles_a;
  auto* cycles = app.add_subcommand("cycles", "cycle detection for one n or a range");
  cycles->add_option("--n", cycles_a.n, "single start value");
  cycles->add_option("--lo", cycles_a.lo, "range start")->capture_default_str();
  cycles->add_option("--hi", cycles_a.hi, "range end (exclusive)");
  cycles->add_option("--cap", cycles_a.cap, "iteration cap")->capture_default_str();
  cycles->add_option("--value-cap-bits", cycles_a.value_cap_bits, "abandon values above 2^bits")
      ->capture_default_str();
  cycles->add_option("--show", cycles_a.show, "summary, divergent, all or counting")
      ->check(CLI::IsMember({"summary", "divergent", "all", "counting"}))
      ->capture_default_str();
  cycles->callback([&] { action = [&] { return cmd_cycles(cycles_a, threads, err); }; });

  PredsArgs preds_a;
  auto* preds = app.add_subcommand("preds", "predecessor classification");
  preds->add_option("--m", preds_a.m, "value to classify");
  preds->add_option("--upto", preds_a.upto, "classify 1..upto");
  preds->callback([&] { action = [&] { return cmd_preds(preds_a); }; });

  TreeArgs tree_a;
  auto* tree = app.add_subcommand("tree", "back-step predecessor tree");
  tree->add_option("--root", tree_a.root, "tree root")->required();
  tree->add_option("--cap", tree_a.cap, "node cap")->capture_default_str();
  tree->callback([&] { action = [&] { return cmd_tree(tree_a); }; });

  GapsArgs gaps_a;
  auto* gaps = app.add_subcommand("gaps", "gap words of no-predecessor numbers");
  gaps->add_option("--hi", gaps_a.hi, "scan below hi")->capture_default_str();
  gaps->add_option("--levels", gaps_a.levels, "deepest level")->capture_default_str();
  gaps->add_option("--convergents", gaps_a.convergents, "print this many sqrt 2 convergents instead");
  gaps->add_option("--width", gaps_a.width, "letters shown per level")->capture_default_str();
  gaps->callback([&] { action = [&] { return cmd_gaps(gaps_a); }; });

  MarkovArgs markov_a;
  auto* markov = app.add_subcommand("markov", "exact p_r from the parity chain");
  markov->add_option("--r", markov_a.r, "step")->required();
  markov->add_option("--from", markov_a.from, "report from this r up to --r");
  markov->callback([&] { action = [&] { return cmd_markov(markov_a); }; });

  AppendixArgs appendix_a;
  auto* appendix = app.add_subcommand("appendix", "exhaustive p_r enumeration");
  appendix->add_option("--from", appendix_a.from, "first r")->capture_default_str();
  appendix->add_option("--to", appendix_a.to, "last r")->capture_default_str();
  appendix->callback([&] { action = [&] { return cmd_appendix(appendix_a, threads, err); }; });

  ConstantsArgs constants_a;
  auto* constants = app.add_subcommand("constants", "stationary odd probability, alpha, delta");
  constants->add_option("--digits", constants_a.digits, "decimals")->capture_default_str();
  constants->callback([&] { action = [&] { return cmd_constants(constants_a); }; });

  DuffingArgs duffing_a;
  auto* duffing = app.add_subcommand("duffing", "cubic-quintic oscillator experiments");
  duffing->add_option("--mode", duffing_a.mode, "equilibria, melnikov, simulate or twin")
      ->check(CLI::IsMember({"equilibria", "melnikov", "simulate", "twin"}))
      ->capture_default_str();
  duffing->add_option("--a", duffing_a.p.a)->capture_default_str();
  duffing->add_option("--b", duffing_a.p.b)->capture_default_str();
  duffing->add_option("--c", duffing_a.p.c)->capture_default_str();
  duffing->add_option("--gamma", duffing_a.p.gamma)->capture_default_str();
  duffing->add_option("--delta", duffing_a.p.delta_damp)->capture_default_str();
  duffing->add_option("--omega", duffing_a.p.omega)->capture_default_str();
  duffing->add_option("--A", duffing_a.p.A_amp, "profile amplitude")->capture_default_str();
  duffing->add_option("--lambda", duffing_a.p.lambda)->capture_default_str();
  duffing->add_option("--k", duffing_a.p.k)->capture_default_str();
  duffing->add_option("--forcing", duffing_a.forcing, "none, parity or log")
      ->check(CLI::IsMember({"none", "parity", "log"}))
      ->capture_default_str();
  duffing->add_option("--n", duffing_a.n, "orbit seed for forcing")->capture_default_str();
  duffing->add_option("--hold", duffing_a.hold, "hold time per iterate")->capture_default_str();
  duffing->add_option("--dt", duffing_a.dt)->capture_default_str();
  duffing->add_option("--t-end", duffing_a.t_end)->capture_default_str();
  duffing->add_option("--x0", duffing_a.x0)->capture_default_str();
  duffing->add_option("--v0", duffing_a.v0)->capture_default_str();
  duffing->add_option("--eps", duffing_a.eps, "twin offset in x0")->capture_default_str();
  duffing->add_option("--stride", duffing_a.stride, "keep every k-th sample")->capture_default_str();
  duffing->add_option("--t0-from", duffing_a.t0_from)->capture_default_str();
  duffing->add_option("--t0-to", duffing_a.t0_to)->capture_default_str();
  duffing->add_option("--t0-points", duffing_a.t0_points)->capture_default_str();
  duffing->callback([&] { action = [&] { return cmd_duffing(duffing_a); }; });

  BorderlineArgs borderline_a;
  auto* borderline = app.add_subcommand("borderline", "geometric-mean growth test of f_alpha");
  borderline->add_option("--alpha", borderline_a.alpha, "p/q, decimal, sqrt(x), pi or e")
      ->capture_default_str();
  borderline->add_option("--n-max", borderline_a.n_max)->capture_default_str();
  borderline->add_option("--rule", borderline_a.rule, "alpha-on-even or inverse-on-even")
      ->check(CLI::IsMember({"alpha-on-even", "inverse-on-even"}))
      ->capture_default_str();
  borderline->add_option("--precision", borderline_a.precision, "starting MPFR bits")
      ->capture_default_str();
  borderline->callback([&] { action = [&] { return cmd_borderline(borderline_a); }; });

  if (!args.empty() && !args[0].empty() && args[0][0] != '-') {
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == args[0];
    if (!known) {
      err << "usage error: unknown command '" << args[0] << "'\n";
      return 2;
    }
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  const OutputFormat fmt = format == "csv" ? OutputFormat::Csv
                           : format == "json" ? OutputFormat::Json
                                              : OutputFormat::Text;
  std::string data;
  try {
    const CommandOutput result = action();
    data = fmt == OutputFormat::Text && result.text ? *result.text : export_table(result.table, fmt);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << error_name(e.kind()) << ": " << e.what() << "\n";
    return 1;
  }

  if (output_path.empty()) {
    out << data << std::flush;
    return 0;
  }
  std::ofstream file(output_path, std::ios::binary | std::ios::trunc);
  if (!file || !(file << data) || !file.flush()) {
    err << "usage error: --output: cannot write '" << output_path << "'\n";
    return 2;
  }
  return 0;
}

}  // namespace sqrt2lab::cli
