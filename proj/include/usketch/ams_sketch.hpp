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
#include <memory>
#include <span>
#include <vector>

#include "usketch/binary_io.hpp"
#include "usketch/hashing.hpp"
#include "usketch/types.hpp"

namespace usketch {

/// Counters are laid out group-major: groups x width.
struct SketchShape {
  std::uint32_t width = 64;
  std::uint32_t groups = 9;

  std::size_t size() const { return std::size_t{width} * groups; }
  friend bool operator==(const SketchShape&, const SketchShape&) = default;
};

/// The groups x width 4-wise sign functions of an AMS sketch. Immutable once
/// built and shared by every sketch that must be linear-compatible (all
/// suffix buckets of a smooth histogram, the two halves of a split).
class SignBank {
 public:
  SignBank(std::uint64_t universe, SketchShape shape, std::uint64_t seed,
           std::uint64_t prime = kMersenne61);
  SignBank(std::uint64_t universe, SketchShape shape, std::vector<HashFamily> families);

  int sign(ElementId id, std::size_t k) const {
    if (!table_.empty()) return table_[std::size_t{id} * shape_.size() + k];
    return balanced_sign(families_[k](id), prime_);
  }

  /// Signs of `id` for all counters. Points into the precomputed table when
  /// there is one, otherwise fills `scratch`.
  std::span<const std::int8_t> signs(ElementId id, std::vector<std::int8_t>& scratch) const;

  SketchShape shape() const { return shape_; }
  std::uint64_t universe() const { return universe_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t prime() const { return prime_; }
  /// p / (p - 1): undoes E[s^2] = (p-1)/p.
  double scale() const { return scale_; }
  std::size_t memory_bytes() const;

 private:
  void build_table();

  std::uint64_t universe_;
  SketchShape shape_;
  std::uint64_t seed_ = 0;
  std::uint64_t prime_;
  double scale_;
  std::vector<HashFamily> families_;
  std::vector<std::int8_t> table_;
};

/// Median over groups of the mean over width of counter^2.
double ams_estimate(std::span<const std::int64_t> counters, SketchShape shape, double scale);

/// Insert-only AMS second-moment sketch.
class AmsSketch {
 public:
  explicit AmsSketch(std::shared_ptr<const SignBank> bank);
  AmsSketch(std::uint64_t universe, SketchShape shape, std::uint64_t seed);

  /// Throws std::overflow_error if a counter would leave int64 range.
  void insert(ElementId id, std::uint64_t count = 1);
  double estimate() const;
  /// Counter-wise sum; both sketches must share the sign bank parameters.
  void merge(const AmsSketch& other);

  std::span<const std::int64_t> counters() const { return counters_; }
  const SignBank& bank() const { return *bank_; }

  void write(ByteWriter& w) const;
  static AmsSketch read(ByteReader& r);

 private:
  std::shared_ptr<const SignBank> bank_;
  std::vector<std::int64_t> counters_;
};

/// Adds sign * count to each counter, throwing on overflow.
void add_signed(std::span<std::int64_t> counters, std::span<const std::int8_t> signs,
                std::int64_t count);

}  // namespace usketch
