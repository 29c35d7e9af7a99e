// Copyright 2026 The usketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "usketch/gfunction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace usketch {

namespace {

constexpr double kLinearLimit = 1e300;
// Below this the (1 +- eps) band is too thin for direct double comparison.
constexpr double kLinearEps = 1e-9;

std::string format_param(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string joined_names() {
  std::string out;
  for (const auto& n : GFunction::builtin_names()) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

bool jump_triggers(const GFunction& g, double eps, std::uint64_t x, std::uint64_t z) {
  const double gx = g(x);
  if (gx < kLinearLimit && eps > kLinearEps) {
    const double up = g(x + z);
    if (up > (1.0 + eps) * gx) return true;
    return g(x - z) < (1.0 - eps) * gx;
  }
  if (g.log_ratio(x + z, x) > std::log1p(eps)) return true;
  return g.log_ratio(x - z, x) < std::log1p(-eps);
}

void check_jump_args(double eps, std::uint64_t x) {
  if (x == 0) throw std::invalid_argument("local jump needs x >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("local jump needs 0 < eps < 1");
}

std::vector<std::uint64_t> log_grid(std::uint64_t max, int per_octave) {
  std::vector<std::uint64_t> pts;
  for (int i = 0;; ++i) {
    const double v = std::round(std::exp2(static_cast<double>(i) / per_octave));
    if (v > static_cast<double>(max)) break;
    pts.push_back(static_cast<std::uint64_t>(v));
  }
  pts.push_back(max);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

int needed_exponent(double deficit, double log_log) {
  // Smallest integer e >= 0 with deficit <= e * log_log.
  if (deficit <= 0.0) return 0;
  return static_cast<int>(std::ceil(deficit / log_log - 1e-12));
}

// Shortfall of the ratio predicate at this cell, in units of ln.
double ratio_deficit(std::uint64_t jump, std::uint64_t y, double log_ratio) {
  return log_ratio - 2.0 * (std::log(static_cast<double>(jump)) - std::log(static_cast<double>(y)));
}

struct Cell {
  double threshold;  // R or x
  int needed;
};

// Given per-cell needed exponents, find the smallest exponent <= cap whose
// remaining violations all sit at or below the admissible threshold. Cells
// with R <= 1 never constrain anything, so an empty list is a pass.
void settle(const std::vector<Cell>& cells, int cap, double threshold_max, PredicateOutcome& out,
            bool& failed) {
  for (int e = 0; e <= cap; ++e) {
    double worst = 0.0;
    for (const auto& c : cells)
      if (c.needed > e) worst = std::max(worst, c.threshold);
    if (worst <= threshold_max) {
      out.exponents.push_back(e);
      out.thresholds.push_back(worst);
      failed = false;
      return;
    }
  }
  out.exponents.push_back(-1);
  out.thresholds.push_back(std::numeric_limits<double>::infinity());
  failed = true;
}

// A grid with fewer than two points decides nothing.
Verdict combine(bool any_fail, bool degenerate) {
  if (degenerate) return Verdict::kInconclusive;
  return any_fail ? Verdict::kFail : Verdict::kPass;
}

}  // namespace

GFunction GFunction::power(double exponent) {
  if (!(exponent > 0.0)) throw std::invalid_argument("power exponent must be positive");
  return {Kind::kPower, exponent, "power:" + format_param(exponent)};
}

GFunction GFunction::identity() { return {Kind::kPower, 1.0, "identity"}; }
GFunction GFunction::indicator() { return {Kind::kIndicator, 0.0, "indicator"}; }

GFunction GFunction::capped(double cap) {
  if (!(cap > 0.0)) throw std::invalid_argument("cap must be positive");
  return {Kind::kCapped, cap, "capped:" + format_param(cap)};
}

GFunction GFunction::log1p(double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("log1p scale must be positive");
  return {Kind::kLog1p, scale, scale == 1.0 ? "log1p" : "log1p:" + format_param(scale)};
}

GFunction GFunction::exp2m1() { return {Kind::kExp2m1, 0.0, "exp2m1"}; }

std::vector<std::string> GFunction::builtin_names() {
  return {"power:P", "identity", "indicator", "capped:C", "log1p[:S]", "exp2m1"};
}

GFunction GFunction::builtin(std::string_view name, std::span<const double> params) {
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (params.size() < lo || params.size() > hi)
      throw std::invalid_argument("wrong parameter count for G '" + std::string(name) + "'");
  };
  if (name == "power") {
    need(1, 1);
    return power(params[0]);
  }
  if (name == "identity") {
    need(0, 0);
    return identity();
  }
  if (name == "indicator") {
    need(0, 0);
    return indicator();
  }
  if (name == "capped") {
    need(1, 1);
    return capped(params[0]);
  }
  if (name == "log1p") {
    need(0, 1);
    return log1p(params.empty() ? 1.0 : params[0]);
  }
  if (name == "exp2m1") {
    need(0, 0);
    return exp2m1();
  }
  throw std::invalid_argument("unknown G '" + std::string(name) + "'; known: " + joined_names());
}

GFunction GFunction::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view tok = rest.substr(0, comma);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw std::invalid_argument("bad parameter '" + std::string(tok) + "' in G spec '" +
                                    std::string(spec) + "'");
      params.push_back(v);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  return builtin(name, params);
}

double GFunction::operator()(std::uint64_t x) const {
  if (x == 0) return 0.0;
  const double v = static_cast<double>(x);
  double out = 0.0;
  switch (kind_) {
    case Kind::kPower: out = param_ == 1.0 ? v : std::pow(v, param_); break;
    case Kind::kIndicator: out = 1.0; break;
    case Kind::kCapped: out = std::min(v, param_); break;
    case Kind::kLog1p: out = param_ * std::log1p(v); break;
    case Kind::kExp2m1: out = std::expm1(v * std::log(2.0)); break;
  }
  return out * scale_;
}

double GFunction::log_value(std::uint64_t x) const {
  if (x == 0) return -std::numeric_limits<double>::infinity();
  const double v = static_cast<double>(x);
  double out = 0.0;
  switch (kind_) {
    case Kind::kPower: out = param_ * std::log(v); break;
    case Kind::kIndicator: out = 0.0; break;
    case Kind::kCapped: out = std::log(std::min(v, param_)); break;
    case Kind::kLog1p: out = std::log(param_) + std::log(std::log1p(v)); break;
    case Kind::kExp2m1: out = v * std::log(2.0) + std::log1p(-std::exp2(-v)); break;
  }
  return out + std::log(scale_);
}

double GFunction::log_ratio(std::uint64_t x, std::uint64_t y) const {
  if (x == y) return 0.0;
  if (x == 0) return -std::numeric_limits<double>::infinity();
  if (y == 0) return std::numeric_limits<double>::infinity();
  const double vx = static_cast<double>(x), vy = static_cast<double>(y);
  // (x - y) / y, exact in the difference before the division.
  const double rel = x > y ? static_cast<double>(x - y) / vy : -static_cast<double>(y - x) / vy;
  switch (kind_) {
    case Kind::kPower: return param_ * std::log1p(rel);
    case Kind::kIndicator: return 0.0;
    case Kind::kCapped: return std::log(std::min(vx, param_) / std::min(vy, param_));
    case Kind::kLog1p: return std::log(std::log1p(vx) / std::log1p(vy));
    case Kind::kExp2m1:
      return (x > y ? static_cast<double>(x - y) : -static_cast<double>(y - x)) * std::log(2.0) +
             std::log1p(-std::exp2(-vx)) - std::log1p(-std::exp2(-vy));
  }
  return 0.0;
}

double GFunction::at_real(double x) const {
  if (!(x > 0.5)) return 0.0;
  const double r = std::round(x);
  if (r >= 1.8e19) return (*this)(std::numeric_limits<std::uint64_t>::max());
  return (*this)(static_cast<std::uint64_t>(r));
}

GFunction GFunction::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
  GFunction g = *this;
  g.scale_ *= factor;
  g.name_ = format_param(factor) + "*" + name_;
  return g;
}

std::uint64_t local_jump(const GFunction& g, double eps, std::uint64_t x) {
  check_jump_args(eps, x);
  std::uint64_t lo = 0;  // z = 0 never triggers
  std::uint64_t hi = 1;
  while (hi < x && !jump_triggers(g, eps, x, hi)) {
    lo = hi;
    hi = std::min(x, hi * 2);
  }
  if (hi == x && !jump_triggers(g, eps, x, hi)) return x;
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (jump_triggers(g, eps, x, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::uint64_t local_jump_linear(const GFunction& g, double eps, std::uint64_t x) {
  check_jump_args(eps, x);
  for (std::uint64_t z = 1; z < x; ++z)
    if (jump_triggers(g, eps, x, z)) return z;
  return x;
}

bool jump_guard_passes(const GFunction& g, double tol, double a, double b, double eps_prime) {
  const double slack = b + 2.0 * eps_prime * a;
  const double ga = g.at_real(a);
  return (1.0 - tol) * g.at_real(a + slack) <= ga && ga <= (1.0 + tol) * g.at_real(a - slack);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "?";
}

bool violates(const GFunction& g, const RatioCounterexample& c) {
  const double log_ratio = g.log_ratio(c.x, c.y);
  const double log2_rx = (log_ratio + std::log(static_cast<double>(c.x))) / std::log(2.0);
  if (!(log2_rx > 1.0) || !(c.eps > std::pow(log2_rx, -c.k)) || !(c.eps < 1.0)) return false;
  const std::uint64_t jump = local_jump(g, c.eps, c.x);
  return ratio_deficit(jump, c.y, log_ratio) > c.t * std::log(log2_rx);
}

bool violates(const GFunction& g, const JumpCounterexample& c) {
  const double log2_x = std::log2(static_cast<double>(c.x));
  if (!(log2_x > 1.0) || !(c.eps > std::pow(log2_x, -c.k)) || !(c.eps < 1.0)) return false;
  const std::uint64_t jump = local_jump(g, c.eps, c.x);
  return std::log(static_cast<double>(c.x)) - std::log(static_cast<double>(jump)) >
         c.r * std::log(log2_x);
}

ProbeReport probe_tractability(const GFunction& g, bool universal, const ProbeGrid& grid) {
  ProbeReport report;
  report.g = g.name();
  report.universal = universal;
  report.cap = grid.cap;

  auto eps_candidates = [](double boundary) {
    std::vector<double> out;
    const double just_above = boundary * (1.0 + 1e-9);
    if (just_above < 1.0) {
      out.push_back(just_above);
      out.push_back(0.5 * (boundary + 1.0));
    }
    return out;
  };

  // Ratio predicate: (pi_eps(x)/y)^2 >= R / log^t(Rx) whenever R = G(x)/G(y) > N0.
  const auto xs = log_grid(grid.x_max, grid.points_per_octave);
  bool any_fail = false;
  for (std::size_t ki = 0; ki < grid.ks.size(); ++ki) {
    const int k = grid.ks[ki];
    std::vector<Cell> cells;
    std::optional<RatioCounterexample> worst;
    for (const auto x : xs) {
      const double lx = g.log_value(x);
      for (const auto y : xs) {
        if (y >= x) break;
        const double log_ratio = lx - g.log_value(y);
        if (!(log_ratio > 0.0)) continue;
        const double log2_rx = (log_ratio + std::log(static_cast<double>(x))) / std::log(2.0);
        if (log2_rx < std::log2(grid.min_rx)) {
          if (ki == 0) ++report.excluded_pairs;
          continue;
        }
        for (const double eps : eps_candidates(std::pow(log2_rx, -k))) {
          const std::uint64_t jump = local_jump(g, eps, x);
          const int needed = needed_exponent(ratio_deficit(jump, y, log_ratio), std::log(log2_rx));
          const double ratio = std::exp(log_ratio);
          cells.push_back({ratio, needed});
          if (needed > grid.cap && ratio > grid.n0_max &&
              (!worst || log_ratio > worst->log_ratio))
            worst = RatioCounterexample{k, grid.cap, x, y, log_ratio, eps};
        }
      }
    }
    report.ratio.cells += cells.size();
    bool failed = false;
    settle(cells, grid.cap, grid.n0_max, report.ratio, failed);
    any_fail |= failed;
    if (failed && !report.ratio_counterexample) report.ratio_counterexample = worst;
  }
  report.ratio.verdict = combine(any_fail, xs.size() < 2);

  // Jump-size predicate: pi_eps(x) >= x / log^r(x) for x >= N1.
  const auto jx = log_grid(grid.jump_x_max, grid.points_per_octave);
  any_fail = false;
  for (const int k : grid.ks) {
    std::vector<Cell> cells;
    std::optional<JumpCounterexample> worst;
    for (const auto x : jx) {
      const double log2_x = std::log2(static_cast<double>(x));
      if (!(log2_x > 1.0)) continue;
      for (const double eps : eps_candidates(std::pow(log2_x, -k))) {
        const std::uint64_t jump = local_jump(g, eps, x);
        const double deficit =
            std::log(static_cast<double>(x)) - std::log(static_cast<double>(jump));
        const int needed = needed_exponent(deficit, std::log(log2_x));
        cells.push_back({static_cast<double>(x), needed});
        if (needed > grid.cap && static_cast<double>(x) > grid.n1_max &&
            (!worst || x > worst->x))
          worst = JumpCounterexample{k, grid.cap, x, eps};
      }
    }
    report.jump.cells += cells.size();
    bool failed = false;
    settle(cells, grid.cap, grid.n1_max, report.jump, failed);
    any_fail |= failed;
    if (failed && !report.jump_counterexample) report.jump_counterexample = worst;
  }
  report.jump.verdict = combine(any_fail, jx.size() < 2);

  for (const auto x : xs)
    if (x >= 256 && g.log_value(x) > 3.0 * std::log(static_cast<double>(x)) + 1e-9)
      report.cube_bound = false;

  if (report.ratio.verdict == Verdict::kFail || report.jump.verdict == Verdict::kFail) {
    report.overall = Verdict::kFail;
  } else if (report.ratio.verdict == Verdict::kPass && report.jump.verdict == Verdict::kPass) {
    report.overall = Verdict::kPass;
  }
  return report;
}

}  // namespace usketch
