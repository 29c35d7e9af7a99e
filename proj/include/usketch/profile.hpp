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
#include <string>
#include <string_view>

#include "usketch/hybrid_major.hpp"

namespace usketch {

enum class ProfileKind { kRelaxed, kPaper };

/// Constants for a whole build. The paper profile follows the asymptotic
/// prescriptions literally and is only usable on toy inputs; the relaxed
/// profile is what the tools default to.
struct Profile {
  ProfileKind kind = ProfileKind::kRelaxed;
  HybridMajorParams hm;
  std::uint32_t universal_c = 8;
  double part_constant = 1.0;
  std::uint32_t max_parts = 4;
  std::uint64_t base_cap = 4096;

  static Profile relaxed(std::uint64_t universe, Timestamp window);
  static Profile paper(std::uint64_t universe, Timestamp window);
  /// "relaxed" or "paper".
  static Profile named(std::string_view name, std::uint64_t universe, Timestamp window);

  const char* name() const;

  /// Hash buckets per core part for failure probability p.
  std::uint64_t buckets(double p, std::uint64_t universe, Timestamp window) const;
  /// Substream parts for heaviness alpha: 1 when alpha <= 1.
  std::uint64_t parts(double alpha, std::uint64_t universe, Timestamp window) const;

  void write(ByteWriter& w) const;
  static Profile read(ByteReader& r);
};

/// log2(n N), at least 2.
double log_nN(std::uint64_t universe, Timestamp window);
/// 1 / log2(N)^(C+1) with log2(N) floored at 2.
double universal_eps_prime(Timestamp window, std::uint32_t c);

}  // namespace usketch
