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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace usketch {

/// A non-decreasing G with G(0) = 0 and G(1) > 0, evaluated at multiplicities.
class GFunction {
 public:
  enum class Kind { kPower, kIndicator, kCapped, kLog1p, kExp2m1 };

  static GFunction power(double exponent);
  static GFunction identity();
  static GFunction indicator();
  static GFunction capped(double cap);
  static GFunction log1p(double scale = 1.0);
  static GFunction exp2m1();

  /// Builtin constructor by name: power(p), identity, indicator, capped(c),
  /// log1p[(s)], exp2m1. Throws std::invalid_argument listing the names.
  static GFunction builtin(std::string_view name, std::span<const double> params = {});
  /// "NAME" or "NAME:P1,P2" as used on the command line, e.g. "power:2".
  static GFunction parse(std::string_view spec);
  static std::vector<std::string> builtin_names();

  double operator()(std::uint64_t x) const;
  /// ln G(x), finite wherever G(x) > 0 even when G(x) itself overflows.
  double log_value(std::uint64_t x) const;
  /// ln(G(x)/G(y)) without cancellation when x and y are close.
  double log_ratio(std::uint64_t x, std::uint64_t y) const;
  /// G at the nearest integer to x (negative arguments clamp to 0).
  double at_real(double x) const;

  GFunction scaled(double factor) const;

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double param() const { return param_; }
  double scale() const { return scale_; }

 private:
  GFunction(Kind kind, double param, std::string name)
      : kind_(kind), param_(param), name_(std::move(name)) {}

  Kind kind_;
  double param_;
  std::string name_;
  double scale_ = 1.0;
};

/// pi_eps(x) = min{x, min{z : G(x+z) > (1+eps)G(x) or G(x-z) < (1-eps)G(x)}},
/// found by doubling then bisection on the monotone trigger.
std::uint64_t local_jump(const GFunction& g, double eps, std::uint64_t x);
/// Same quantity by scanning z = 1, 2, ...; the reference for tests.
std::uint64_t local_jump_linear(const GFunction& g, double eps, std::uint64_t x);

/// The (1 +- tol) acceptance test applied to a heavy-element triple:
/// (1-tol) G(a + b + 2 eps' a) <= G(a) <= (1+tol) G(a - b - 2 eps' a).
bool jump_guard_passes(const GFunction& g, double tol, double a, double b, double eps_prime);

// ---------------------------------------------------------------------------
// Tractability probe. The quantified predicates are decided over a finite
// grid, so a verdict is a heuristic classification, never a proof.

enum class Verdict { kPass, kFail, kInconclusive };
const char* to_string(Verdict v);

struct ProbeGrid {
  std::uint64_t x_max = std::uint64_t{1} << 62;        // x, y range for the ratio predicate
  std::uint64_t jump_x_max = std::uint64_t{1} << 62;   // x range for the jump-size predicate
  int points_per_octave = 4;
  std::vector<int> ks{1, 2, 3};
  int cap = 8;                  // largest t and r searched (the constant C)
  double n0_max = 4096.0;       // largest admissible N0
  double n1_max = 1048576.0;    // largest admissible N1
  double min_rx = 16.0;         // pairs with R*x below this are excluded
};

/// A cell of the ratio predicate: G(x)/G(y) = R with eps just above 1/log^k(Rx).
struct RatioCounterexample {
  int k = 0;
  int t = 0;
  std::uint64_t x = 0, y = 0;
  double log_ratio = 0.0;  // ln R
  double eps = 0.0;
};

/// A cell of the jump-size predicate.
struct JumpCounterexample {
  int k = 0;
  int r = 0;
  std::uint64_t x = 0;
  double eps = 0.0;
};

struct PredicateOutcome {
  Verdict verdict = Verdict::kInconclusive;
  /// Per k: smallest exponent (t or r) that worked, or -1.
  std::vector<int> exponents;
  /// Per k: threshold (N0 or N1) the witness needs.
  std::vector<double> thresholds;
  std::size_t cells = 0;
};

struct ProbeReport {
  std::string g;
  bool universal = false;
  int cap = 0;
  PredicateOutcome ratio;
  PredicateOutcome jump;
  std::optional<RatioCounterexample> ratio_counterexample;
  std::optional<JumpCounterexample> jump_counterexample;
  bool cube_bound = true;           // G(x) <= x^3 on the grid tail
  std::size_t excluded_pairs = 0;   // R*x < min_rx
  Verdict overall = Verdict::kInconclusive;
};

ProbeReport probe_tractability(const GFunction& g, bool universal, const ProbeGrid& grid = {});

/// True when the cell really violates its inequality.
bool violates(const GFunction& g, const RatioCounterexample& c);
bool violates(const GFunction& g, const JumpCounterexample& c);

}  // namespace usketch
