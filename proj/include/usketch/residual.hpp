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
#include <vector>

#include "usketch/hashing.hpp"
#include "usketch/smooth_histogram.hpp"

namespace usketch {

struct ResidualShape {
  std::uint32_t groups = 9;
  std::uint32_t reps = 40;  // repetitions averaged inside a group
  SketchShape sketch{8, 1};
};

/// Hash functions of a residual sketch. Immutable, so one instance can serve
/// every bucket that runs the same algorithm.
class ResidualRandomness {
 public:
  ResidualRandomness(std::uint64_t universe, ResidualShape shape, std::uint64_t seed);

  std::uint64_t universe() const { return universe_; }
  const ResidualShape& shape() const { return shape_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t repetitions() const { return vectors_.size(); }
  const ZeroOneVector& vector(std::size_t rep) const { return vectors_[rep]; }
  const std::shared_ptr<const SignBank>& bank(std::size_t rep) const { return banks_[rep]; }
  std::size_t memory_bytes() const;

 private:
  std::uint64_t universe_;
  ResidualShape shape_;
  std::uint64_t seed_;
  std::vector<ZeroOneVector> vectors_;
  std::vector<std::shared_ptr<const SignBank>> banks_;
};

/// Estimates sqrt(F2res) when one element dominates: each repetition splits
/// the universe with a zero-one vector, and the lighter half's F2 (scaled by
/// 10) stands in for the residual.
class ResidualSketch {
 public:
  ResidualSketch(std::shared_ptr<const ResidualRandomness> rnd, HistogramConfig config);
  ResidualSketch(std::uint64_t universe, ResidualShape shape, HistogramConfig config,
                 std::uint64_t seed);

  void ingest(const TimedItem& item);
  /// sqrt of the median over groups of the mean of 10 min(f_H, f_H').
  double output(Timestamp at) const;

  /// Histogram of repetition `rep`; side 1 holds items with H(id) = 1.
  const SmoothHistogram& histogram(std::size_t rep, int side) const { return hists_[2 * rep + side]; }
  std::size_t repetitions() const { return hists_.size() / 2; }
  std::size_t memory_bytes() const;

 private:
  std::shared_ptr<const ResidualRandomness> rnd_;
  std::vector<SmoothHistogram> hists_;
};

}  // namespace usketch
