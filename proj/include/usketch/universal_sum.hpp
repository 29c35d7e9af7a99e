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
#include <deque>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "usketch/core.hpp"

namespace usketch {

struct SumConfig {
  std::uint64_t universe = 256;
  Timestamp window = 1024;
  /// Accuracy the level cores are built for; it sets alpha = levels^3 / eps^2.
  double eps = 0.3;
  /// 0 picks ceil(log2 n) + 2.
  std::uint32_t levels = 0;
  std::uint64_t seed = 1;
  Profile profile;
};

std::uint32_t default_levels(std::uint64_t universe);

struct SumEstimate {
  double value = 0.0;
  /// Y_0 .. Y_phi; empty when the base level overflowed.
  std::vector<double> trace;
  bool base_overflow = false;
};

/// Y_k = 2 Y_{k+1} + sum over (x, j) in Q_k of (1 - 2 H_{k+1}(j)) x, from
/// Y_phi down to Y_0. `vectors[k]` is H_{k+1}.
SumEstimate sum_recursion(double y_phi, std::span<const CoreQueryResult> cores,
                          std::span<const ZeroOneVector> vectors);

/// A frozen universal sum structure: everything a query needs.
struct SumSnapshot {
  std::uint64_t universe = 0;
  Timestamp window = 0;
  Timestamp at = 0;
  std::vector<ZeroOneVector> vectors;   // H_1 .. H_phi
  std::vector<CoreSnapshot> cores;      // Q_0 .. Q_{phi-1}
  std::vector<std::pair<ElementId, std::uint64_t>> base;  // active counts of D_phi
  bool base_overflow = false;

  std::uint32_t levels() const { return static_cast<std::uint32_t>(vectors.size()); }
  SumEstimate query(const GFunction& g, double eps) const;

  void write(ByteWriter& w) const;
  static SumSnapshot read(ByteReader& r);
  friend bool operator==(const SumSnapshot&, const SumSnapshot&) = default;
};

/// Exact per-element active counts with a cap on distinct elements.
class ExactBase {
 public:
  ExactBase(Timestamp window, std::uint64_t cap) : window_(window), cap_(cap) {}

  void ingest(const TimedItem& item);
  /// Active counts at `at`; overflow is set when more than cap elements are active.
  std::vector<std::pair<ElementId, std::uint64_t>> counts(Timestamp at, bool& overflow) const;
  std::size_t memory_bytes() const;

 private:
  void sweep(Timestamp now);

  Timestamp window_;
  std::uint64_t cap_;
  std::map<ElementId, std::deque<Timestamp>> queues_;
  std::uint64_t since_sweep_ = 0;
};

/// phi nested subsampling levels, each a universal core, plus the exact base.
class UniversalSum {
 public:
  explicit UniversalSum(const SumConfig& config);

  std::uint32_t levels() const { return static_cast<std::uint32_t>(vectors_.size()); }
  const ZeroOneVector& vector(std::uint32_t k) const { return vectors_.at(k - 1); }
  /// Largest k with H_1(id) = ... = H_k(id) = 1.
  std::uint32_t depth(ElementId id) const;

  void ingest(const TimedItem& item);
  void ingest_batch(std::span<const TimedItem> items, Execution exec = Execution::kParallel);

  SumSnapshot snapshot(Timestamp at) const;
  SumEstimate query_sum(const GFunction& g, double eps, Timestamp at) const;
  /// G-aware form: level outputs come from each core's guarded output.
  SumEstimate g_sum(const GFunction& g, double eps, Timestamp at) const;

  const UniversalCore& core(std::uint32_t k) const { return cores_.at(k); }
  std::uint64_t absorbed() const { return absorbed_; }
  std::size_t memory_bytes() const;
  const SumConfig& config() const { return config_; }

 private:
  SumConfig config_;
  std::vector<ZeroOneVector> vectors_;
  std::vector<UniversalCore> cores_;
  ExactBase base_;
  Timestamp last_ = 0;
  std::uint64_t absorbed_ = 0;
};

/// One-shot G-aware estimate at the stream's last timestamp.
SumEstimate g_sum(std::span<const TimedItem> stream, const GFunction& g, double eps,
                  const SumConfig& config);

/// The persisted artifact: R independent replicas, each snapshotted at the
/// same list of times.
struct StructureFile {
  std::uint64_t universe = 0;
  Timestamp window = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::string profile;
  std::vector<Timestamp> times;
  std::vector<std::vector<SumSnapshot>> replicas;  // [replica][time]

  std::vector<std::uint8_t> serialize() const;
  static StructureFile deserialize(std::span<const std::uint8_t> bytes);
  void save(const std::filesystem::path& path) const;
  static StructureFile load(const std::filesystem::path& path);
};

/// Seed of replica r; replica structures are otherwise identical.
std::uint64_t replica_seed(std::uint64_t root, std::uint32_t r);

/// Builds `replicas` structures over `stream`, snapshotting each at `times`
/// (the last timestamp when empty).
StructureFile build_structure(std::span<const TimedItem> stream, const SumConfig& config,
                              std::uint32_t replicas, std::vector<Timestamp> times = {},
                              Execution exec = Execution::kParallel);

struct ReplicatedEstimate {
  std::vector<double> estimates;
  double median = 0.0;
};

/// Per-replica estimates at snapshot time `at` and their median.
ReplicatedEstimate query_structure(const StructureFile& file, const GFunction& g, double eps,
                                   Timestamp at);

}  // namespace usketch
