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

#include "usketch/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace usketch {

namespace {

constexpr std::uint32_t kProfileVersion = 1;
constexpr double kMaxBuckets = 4294967295.0;

std::uint32_t ceil_u32(double v) {
  return static_cast<std::uint32_t>(std::min(kMaxBuckets, std::max(1.0, std::ceil(v))));
}

}  // namespace

double log_nN(std::uint64_t universe, Timestamp window) {
  return std::max(2.0, std::log2(static_cast<double>(universe) * static_cast<double>(window)));
}

double universal_eps_prime(Timestamp window, std::uint32_t c) {
  const double l = std::max(2.0, std::log2(static_cast<double>(window)));
  return std::pow(l, -static_cast<double>(c + 1));
}

Profile Profile::relaxed(std::uint64_t universe, Timestamp window) {
  (void)universe;
  Profile p;
  p.kind = ProfileKind::kRelaxed;
  p.hm.eps_prime = universal_eps_prime(window, p.universal_c);
  return p;
}

Profile Profile::paper(std::uint64_t universe, Timestamp window) {
  Profile p;
  p.kind = ProfileKind::kPaper;
  const double l = log_nN(universe, window);
  const std::uint32_t groups = ceil_u32(l);
  const SketchShape sketch{ceil_u32(6.0 / (0.1 * 0.1)), groups};
  auto& hm = p.hm;
  hm.eps_prime = universal_eps_prime(window, p.universal_c);
  hm.l2_beta = hm.sep_beta = hm.residual_beta = hm.index_beta = 0.05;
  hm.l2_sketch = hm.sep_sketch = hm.index_sketch = sketch;
  hm.sep_reps = groups;
  hm.sep_factor = std::pow(20.0, 4);
  hm.residual = ResidualShape{groups, 100000, sketch};
  p.max_parts = std::numeric_limits<std::uint32_t>::max();
  p.base_cap = 10000000000ULL;
  return p;
}

Profile Profile::named(std::string_view name, std::uint64_t universe, Timestamp window) {
  if (name == "relaxed") return relaxed(universe, window);
  if (name == "paper") return paper(universe, window);
  throw std::invalid_argument("unknown profile '" + std::string(name) + "' (relaxed, paper)");
}

const char* Profile::name() const { return kind == ProfileKind::kPaper ? "paper" : "relaxed"; }

std::uint64_t Profile::buckets(double p, std::uint64_t universe, Timestamp window) const {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("failure probability must be in (0,1)");
  if (kind == ProfileKind::kRelaxed) return ceil_u32(4.0 / p);
  return ceil_u32(std::pow(log_nN(universe, window), universal_c + 2.0) / p);
}

std::uint64_t Profile::parts(double alpha, std::uint64_t universe, Timestamp window) const {
  if (!(alpha >= 1.0)) throw std::invalid_argument("alpha must be >= 1");
  if (alpha == 1.0) return 1;
  const double want = std::ceil(part_constant * alpha * log_nN(universe, window));
  return std::min<std::uint64_t>(max_parts, ceil_u32(want));
}

void Profile::write(ByteWriter& w) const {
  w.tag("PROF");
  w.u32(kProfileVersion);
  w.u8(kind == ProfileKind::kPaper ? 1 : 0);
  hm.write(w);
  w.u32(universal_c);
  w.f64(part_constant);
  w.u32(max_parts);
  w.u64(base_cap);
}

Profile Profile::read(ByteReader& r) {
  r.expect("PROF");
  if (const auto v = r.u32(); v != kProfileVersion)
    throw FormatError("unsupported profile version " + std::to_string(v));
  Profile p;
  p.kind = r.u8() ? ProfileKind::kPaper : ProfileKind::kRelaxed;
  p.hm = HybridMajorParams::read(r);
  p.universal_c = r.u32();
  p.part_constant = r.f64();
  p.max_parts = r.u32();
  p.base_cap = r.u64();
  return p;
}

}  // namespace usketch
