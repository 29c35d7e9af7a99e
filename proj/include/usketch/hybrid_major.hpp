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
#include <optional>
#include <vector>

#include "usketch/binary_io.hpp"
#include "usketch/gfunction.hpp"
#include "usketch/residual.hpp"
#include "usketch/smooth_histogram.hpp"

namespace usketch {

struct HybridMajorParams {
  double eps_prime = 1e-3;

  double l2_beta = 0.1;
  SketchShape l2_sketch{64, 5};

  std::uint32_t sep_reps = 4;
  double sep_factor = 25.0;
  double sep_beta = 0.5;
  SketchShape sep_sketch{16, 3};

  double residual_beta = 0.2;
  ResidualShape residual{3, 10, {16, 1}};

  double index_beta = 0.3;
  SketchShape index_sketch{16, 3};
  double index_gap = 1.5;

  std::uint32_t prune_floor = 16;
  double prune_growth = 2.0;

  void write(ByteWriter& w) const;
  static HybridMajorParams read(ByteReader& r);
};

/// Everything random about a hybrid-major instance. Buckets and parts of one
/// core level share a single instance; their inputs are disjoint, so sharing
/// the functions does not couple their outputs.
class HybridMajorRandomness {
 public:
  HybridMajorRandomness(std::uint64_t universe, const HybridMajorParams& params, std::uint64_t seed);

  std::uint64_t universe() const { return universe_; }
  const HybridMajorParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t memory_bytes() const;

  std::shared_ptr<const SignBank> l2_bank;
  std::vector<ZeroOneVector> sep_vectors;
  std::vector<std::shared_ptr<const SignBank>> sep_banks;
  std::shared_ptr<const ResidualRandomness> residual;
  std::vector<std::shared_ptr<const SignBank>> index_banks;

 private:
  std::uint64_t universe_;
  HybridMajorParams params_;
  std::uint64_t seed_;
};

/// (a, b, j): L2 estimate, residual estimate, recovered index.
struct CoreTriple {
  double a = 0.0;
  double b = 0.0;
  ElementId j = 0;
  friend bool operator==(const CoreTriple&, const CoreTriple&) = default;
};

/// Either nothing (empty optional) or a triple.
using CoreCell = std::optional<CoreTriple>;

void write_cell(ByteWriter& w, const CoreCell& cell);
CoreCell read_cell(ByteReader& r);

/// Query-time rule for a stored cell: G(a) when the jump guard with tolerance
/// `tol` passes, otherwise 0.
double evaluate_cell(const CoreCell& cell, const GFunction& g, double tol, double eps_prime);

class HybridMajor {
 public:
  HybridMajor(std::shared_ptr<const HybridMajorRandomness> rnd, Timestamp window);

  void ingest(const TimedItem& item);

  /// True unless some repetition sees both halves within sep_factor of each
  /// other (both zero counts as within).
  bool separation_test(Timestamp at) const;
  /// Nothing when separation fails, the index is not recovered or a <= 0.
  CoreCell output_universal(Timestamp at) const;
  /// G(a) when the guard with tolerance 4 eps passes, else 0.
  double output_g_aware(Timestamp at, const GFunction& g, double eps) const;

  const SmoothHistogram& l2_histogram() const { return l2_; }
  const SmoothHistogram& separation_histogram(std::size_t rep, int side) const {
    return sep_[2 * rep + side];
  }
  const ResidualSketch& residual() const { return residual_; }
  const IndexRecovery& index() const { return index_; }
  std::uint64_t absorbed() const { return l2_.absorbed(); }
  std::size_t memory_bytes() const;

 private:
  std::shared_ptr<const HybridMajorRandomness> rnd_;
  SmoothHistogram l2_;
  std::vector<SmoothHistogram> sep_;
  ResidualSketch residual_;
  IndexRecovery index_;
};

}  // namespace usketch
