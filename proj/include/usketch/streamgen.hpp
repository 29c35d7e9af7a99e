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
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "usketch/gfunction.hpp"
#include "usketch/types.hpp"

namespace usketch {

using Stream = std::vector<TimedItem>;

enum class Distribution { kUniform, kZipf };

struct RandomStreamSpec {
  std::uint64_t universe = 256;
  std::uint64_t length = 0;
  Distribution distribution = Distribution::kUniform;
  double zipf_s = 1.1;
  /// Items sharing each timestamp; timestamps start at 1.
  std::uint64_t per_tick = 1;
  std::uint64_t seed = 1;
};

Stream random_stream(const RandomStreamSpec& spec);

/// heavy_freq copies of heavy_id plus noise_count distinct other ids, once
/// each, shuffled, one item per timestamp. Requires heavy_freq^2 > 2 noise_count.
Stream planted_heavy(std::uint64_t universe, ElementId heavy_id, std::uint64_t heavy_freq,
                     std::uint64_t noise_count, std::uint64_t seed);

/// Single-element stream over window x: each chosen step of [1, x] gets
/// pi = pi_eps(x) copies, step x also gets x - pi floor(x/pi), step x+1 is
/// empty and steps x+2 .. 2x-1 repeat steps 1 .. x-2. When pi = 1 every
/// insertion is doubled. `choice` must hold floor(x/pi) steps.
Stream lower_bound_family(std::uint64_t x, double eps, const GFunction& g,
                          const std::set<std::uint64_t>& choice);

/// Reads "timestamp,element_id" lines; blank lines and '#' comments are
/// skipped. Errors carry the line number.
Stream read_stream(std::istream& in, std::uint64_t universe = 0);
Stream read_stream_file(const std::string& path, std::uint64_t universe = 0);
void write_stream(std::ostream& out, const Stream& items);

}  // namespace usketch
