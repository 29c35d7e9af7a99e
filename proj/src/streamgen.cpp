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

#include "usketch/streamgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string_view>

namespace usketch {

Stream random_stream(const RandomStreamSpec& spec) {
  if (spec.universe == 0) throw std::invalid_argument("universe must be positive");
  if (spec.per_tick == 0) throw std::invalid_argument("per_tick must be positive");
  std::mt19937_64 rng(spec.seed);
  Stream out;
  out.reserve(spec.length);
  auto emit = [&](ElementId id) {
    out.push_back({static_cast<Timestamp>(1 + out.size() / spec.per_tick), id});
  };
  if (spec.distribution == Distribution::kUniform) {
    std::uniform_int_distribution<std::uint64_t> pick(0, spec.universe - 1);
    for (std::uint64_t i = 0; i < spec.length; ++i) emit(static_cast<ElementId>(pick(rng)));
  } else {
    std::vector<double> w(spec.universe);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(static_cast<double>(i + 1), -spec.zipf_s);
    std::discrete_distribution<std::uint64_t> pick(w.begin(), w.end());
    for (std::uint64_t i = 0; i < spec.length; ++i) emit(static_cast<ElementId>(pick(rng)));
  }
  return out;
}

Stream planted_heavy(std::uint64_t universe, ElementId heavy_id, std::uint64_t heavy_freq,
                     std::uint64_t noise_count, std::uint64_t seed) {
  if (heavy_id >= universe) throw std::invalid_argument("heavy id outside universe");
  if (!(heavy_freq * heavy_freq > 2 * noise_count))
    throw std::invalid_argument("heavy_freq^2 must exceed 2 * noise_count");
  if (noise_count + 1 > universe) throw std::invalid_argument("not enough ids for distinct noise");
  std::mt19937_64 rng(seed);
  std::vector<ElementId> others;
  others.reserve(universe - 1);
  for (std::uint64_t i = 0; i < universe; ++i)
    if (i != heavy_id) others.push_back(static_cast<ElementId>(i));
  std::shuffle(others.begin(), others.end(), rng);
  std::vector<ElementId> ids(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(noise_count));
  ids.insert(ids.end(), heavy_freq, heavy_id);
  std::shuffle(ids.begin(), ids.end(), rng);
  Stream out;
  out.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) out.push_back({static_cast<Timestamp>(i + 1), ids[i]});
  return out;
}

Stream lower_bound_family(std::uint64_t x, double eps, const GFunction& g,
                          const std::set<std::uint64_t>& choice) {
  if (x < 2) throw std::invalid_argument("window must be at least 2");
  const std::uint64_t pi = local_jump(g, eps, x);
  const std::uint64_t picks = x / pi;
  if (choice.size() != picks)
    throw std::invalid_argument("choice must hold " + std::to_string(picks) + " steps");
  if (*choice.begin() < 1 || *choice.rbegin() > x)
    throw std::invalid_argument("chosen steps must lie in [1, x]");
  const std::uint64_t mult = pi == 1 ? 2 : 1;
  std::vector<std::uint64_t> counts(x + 1, 0);  // counts[s] for step s in [1, x]
  for (const auto s : choice) counts[s] += pi * mult;
  counts[x] += (x - pi * picks) * mult;

  Stream out;
  auto put = [&](Timestamp t, std::uint64_t c) {
    for (std::uint64_t i = 0; i < c; ++i) out.push_back({t, 0});
  };
  for (std::uint64_t s = 1; s <= x; ++s) put(static_cast<Timestamp>(s), counts[s]);
  for (std::uint64_t s = 1; s + 2 <= x; ++s) put(static_cast<Timestamp>(x + 1 + s), counts[s]);
  return out;
}

Stream read_stream(std::istream& in, std::uint64_t universe) {
  Stream out;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v(line);
    while (!v.empty() && (v.back() == '\r' || v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    if (v.empty() || v.front() == '#') continue;
    const auto comma = v.find(',');
    if (comma == std::string_view::npos) fail("expected 'timestamp,element_id'");
    std::string_view ts = v.substr(0, comma), id = v.substr(comma + 1);
    while (!id.empty() && id.front() == ' ') id.remove_prefix(1);
    TimedItem item;
    std::uint64_t raw = 0;
    if (auto [p, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), item.timestamp);
        ec != std::errc() || p != ts.data() + ts.size())
      fail("bad timestamp '" + std::string(ts) + "'");
    if (auto [p, ec] = std::from_chars(id.data(), id.data() + id.size(), raw);
        ec != std::errc() || p != id.data() + id.size() || raw > 0xffffffffULL)
      fail("bad element id '" + std::string(id) + "'");
    if (universe && raw >= universe)
      fail("element id " + std::to_string(raw) + " outside universe " + std::to_string(universe));
    item.id = static_cast<ElementId>(raw);
    if (!out.empty() && item.timestamp < out.back().timestamp)
      fail("timestamp " + std::to_string(item.timestamp) + " decreases");
    out.push_back(item);
  }
  return out;
}

Stream read_stream_file(const std::string& path, std::uint64_t universe) {
  if (path == "-") throw std::invalid_argument("use read_stream for standard input");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return read_stream(in, universe);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_stream(std::ostream& out, const Stream& items) {
  for (const auto& item : items) out << item.timestamp << ',' << item.id << '\n';
}

}  // namespace usketch
