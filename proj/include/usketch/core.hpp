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
#include <unordered_map>
#include <vector>

#include "usketch/hashing.hpp"
#include "usketch/hybrid_major.hpp"
#include "usketch/profile.hpp"
#include "usketch/types.hpp"

namespace usketch {

struct CoreConfig {
  std::uint64_t universe = 256;
  Timestamp window = 1024;
  double fail_p = 0.1;
  /// Heaviness the structure must catch; above 1 the stream is split into
  /// hash parts so a heavy element is 1-heavy inside its own part.
  double alpha = 1.0;
  std::uint64_t seed = 1;
  Profile profile;
};

struct CorePair {
  double value = 0.0;
  ElementId index = 0;
  friend bool operator==(const CorePair&, const CorePair&) = default;
};

/// The set T: at most one pair per lane, indices distinct.
struct CoreQueryResult {
  std::vector<CorePair> pairs;
  bool contains(ElementId j) const;
  const CorePair* find(ElementId j) const;
};

/// Cells of every lane that saw items, frozen at one time. This is what a
/// universal core persists; any G can be applied later.
struct CoreSnapshot {
  Timestamp at = 0;
  double eps_prime = 0.0;
  std::uint64_t parts = 1;
  std::uint64_t buckets = 1;
  std::vector<std::pair<std::uint64_t, CoreCell>> cells;  // (lane, cell), lane-sorted

  /// Pairs (G(a), j) of the cells whose guard passes with tolerance eps.
  CoreQueryResult query(const GFunction& g, double eps) const;
  std::size_t occupied() const;

  void write(ByteWriter& w) const;
  static CoreSnapshot read(ByteReader& r);
  friend bool operator==(const CoreSnapshot&, const CoreSnapshot&) = default;
};

/// Hash-partitioned hybrid-major lanes (parts x buckets). A lane is created
/// when its first item arrives.
class UniversalCore {
 public:
  explicit UniversalCore(const CoreConfig& config);
  /// Shares hybrid-major randomness owned elsewhere (e.g. one per level).
  UniversalCore(const CoreConfig& config, std::shared_ptr<const HybridMajorRandomness> rnd);

  std::uint64_t lane_of(ElementId id) const;
  std::uint64_t parts() const { return parts_; }
  std::uint64_t buckets() const { return buckets_; }

  void ingest(const TimedItem& item);
  /// Items must continue the stream in order. kParallel updates lanes
  /// concurrently; the resulting state equals serial ingestion.
  void ingest_batch(std::span<const TimedItem> items, Execution exec = Execution::kParallel);

  /// Cells at `at`; a cell whose recovered index does not hash to its own
  /// lane is dropped, which keeps indices distinct.
  CoreSnapshot snapshot(Timestamp at) const;
  CoreQueryResult query(const GFunction& g, double eps, Timestamp at) const;
  /// G-aware form: each lane runs its guard at tolerance 4 (eps/4).
  CoreQueryResult g_core(const GFunction& g, double eps, Timestamp at) const;

  /// Items absorbed per lane, keyed by lane.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> occupancy() const;
  const HybridMajor* lane(std::uint64_t key) const;
  std::uint64_t absorbed() const { return absorbed_; }
  std::size_t memory_bytes() const;
  const CoreConfig& config() const { return config_; }

 private:
  HybridMajor& lane_for(std::uint64_t key);
  std::vector<std::uint64_t> sorted_lanes() const;

  CoreConfig config_;
  std::shared_ptr<const HybridMajorRandomness> rnd_;
  std::uint64_t parts_;
  std::uint64_t buckets_;
  HashFamily part_hash_;
  HashFamily bucket_hash_;
  std::unordered_map<std::uint64_t, HybridMajor> lanes_;
  Timestamp last_ = 0;
  std::uint64_t absorbed_ = 0;
};

/// G-Core as a one-shot function over a whole stream: the set S of
/// positive guarded outputs at the stream's last timestamp.
CoreQueryResult g_core(std::span<const TimedItem> stream, const GFunction& g, double eps,
                       const CoreConfig& config);

}  // namespace usketch
