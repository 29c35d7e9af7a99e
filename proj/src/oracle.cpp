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

#include "usketch/oracle.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace usketch {

ExactWindow::ExactWindow(std::uint64_t universe, Timestamp window)
    : universe_(universe), window_(window), times_(universe) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
}

void ExactWindow::ingest(const TimedItem& item) {
  if (item.id >= universe_) throw std::out_of_range("element id outside universe");
  if (any_ && item.timestamp < last_)
    throw std::invalid_argument("out-of-order timestamp " + std::to_string(item.timestamp));
  times_[item.id].push_back(item.timestamp);
  last_ = item.timestamp;
  any_ = true;
}

void ExactWindow::ingest(std::span<const TimedItem> items) {
  for (const auto& item : items) ingest(item);
}

std::vector<std::uint64_t> ExactWindow::frequencies(Timestamp at) const {
  std::vector<std::uint64_t> m(universe_, 0);
  for (std::size_t i = 0; i < universe_; ++i) {
    const auto& t = times_[i];
    const auto lo = std::upper_bound(t.begin(), t.end(), at - window_);
    const auto hi = std::upper_bound(t.begin(), t.end(), at);
    m[i] = hi > lo ? static_cast<std::uint64_t>(hi - lo) : 0;
  }
  return m;
}

std::uint64_t ExactWindow::total(Timestamp at) const {
  std::uint64_t s = 0;
  for (const auto v : frequencies(at)) s += v;
  return s;
}

std::uint64_t ExactWindow::distinct(Timestamp at) const {
  const auto m = frequencies(at);
  return static_cast<std::uint64_t>(std::count_if(m.begin(), m.end(), [](auto v) { return v > 0; }));
}

double ExactWindow::exact_gsum(Timestamp at, const GFunction& g) const {
  return gsum_of(frequencies(at), g);
}

double ExactWindow::exact_f2(Timestamp at) const {
  double s = 0.0;
  for (const auto v : frequencies(at)) s += static_cast<double>(v) * static_cast<double>(v);
  return s;
}

double ExactWindow::exact_f2res(Timestamp at) const {
  const auto m = frequencies(at);
  if (m.empty()) throw std::domain_error("no (F2,1)-heavy element in an empty universe");
  const double top = static_cast<double>(*std::max_element(m.begin(), m.end()));
  double f2 = 0.0;
  for (const auto v : m) f2 += static_cast<double>(v) * static_cast<double>(v);
  const double rest = f2 - top * top;
  if (!(top * top > rest)) throw std::domain_error("no (F2,1)-heavy element in the window");
  return rest;
}

std::vector<ElementId> ExactWindow::heavy_set(Timestamp at, const GFunction& f, double d) const {
  return heavy_set_of(frequencies(at), f, d);
}

double gsum_of(std::span<const std::uint64_t> freqs, const GFunction& g) {
  double s = 0.0;
  for (const auto v : freqs) s += g(v);
  return s;
}

std::vector<ElementId> heavy_set_of(std::span<const std::uint64_t> freqs, const GFunction& f, double d) {
  const double total = gsum_of(freqs, f);
  std::vector<ElementId> out;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const double fi = f(freqs[i]);
    if (fi > d * (total - fi)) out.push_back(static_cast<ElementId>(i));
  }
  return out;
}

}  // namespace usketch
