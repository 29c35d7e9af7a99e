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
#include <span>
#include <vector>

#include "usketch/gfunction.hpp"
#include "usketch/types.hpp"

namespace usketch {

/// Brute-force reference: keeps every timestamp of every element.
class ExactWindow {
 public:
  ExactWindow(std::uint64_t universe, Timestamp window);

  void ingest(const TimedItem& item);
  void ingest(std::span<const TimedItem> items);

  /// m_i for every i in [0, universe).
  std::vector<std::uint64_t> frequencies(Timestamp at) const;
  std::uint64_t total(Timestamp at) const;
  std::uint64_t distinct(Timestamp at) const;

  double exact_gsum(Timestamp at, const GFunction& g) const;
  double exact_f2(Timestamp at) const;
  /// F2 minus the square of the (F2,1)-heavy frequency; throws
  /// std::domain_error when no element is (F2,1)-heavy.
  double exact_f2res(Timestamp at) const;
  /// Every i with f(m_i) > d * sum_{j != i} f(m_j).
  std::vector<ElementId> heavy_set(Timestamp at, const GFunction& f, double d) const;

  std::uint64_t universe() const { return universe_; }
  Timestamp window() const { return window_; }

 private:
  std::uint64_t universe_;
  Timestamp window_;
  std::vector<std::vector<Timestamp>> times_;
  Timestamp last_ = 0;
  bool any_ = false;
};

/// Helpers on plain frequency vectors, shared with tests.
double gsum_of(std::span<const std::uint64_t> freqs, const GFunction& g);
std::vector<ElementId> heavy_set_of(std::span<const std::uint64_t> freqs, const GFunction& f, double d);

}  // namespace usketch
