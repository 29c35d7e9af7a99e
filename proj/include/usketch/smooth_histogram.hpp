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
#include <span>
#include <vector>

#include "usketch/ams_sketch.hpp"
#include "usketch/binary_io.hpp"
#include "usketch/types.hpp"

namespace usketch {

struct HistogramConfig {
  double beta = 0.1;
  Timestamp window = 1;
  // Compaction runs once the bucket list reaches prune_at, which after every
  // compaction is reset to max(prune_floor, prune_growth * buckets).
  std::uint32_t prune_floor = 16;
  double prune_growth = 2.0;
};

/// Smooth histogram for F2 over a timestamp-based sliding window.
///
/// Bucket i covers the suffix of the stream starting at starts()[i]. Each
/// bucket stores only the AMS counters of the items between its own start and
/// the next bucket's start; a suffix sketch is the sum of the trailing
/// segments, so an arrival touches one segment. Expiry and the spacing rule
/// are applied together during compaction: a middle bucket is dropped when the
/// bucket after it still estimates at least (1 - beta/2) of the bucket before
/// it. At most one bucket that starts outside the window is retained.
class SmoothHistogram {
 public:
  SmoothHistogram(std::shared_ptr<const SignBank> bank, HistogramConfig config);

  /// Throws std::invalid_argument on a timestamp older than the last one.
  void ingest(Timestamp t, ElementId id, std::uint64_t count = 1);
  void ingest(const TimedItem& item) { ingest(item.timestamp, item.id); }

  /// Expire and prune now rather than waiting for the lazy trigger.
  void compact();

  /// Estimate of the oldest bucket whose start lies in the window ending at
  /// `at`; 0 when no bucket does. `at` may not precede the last ingest.
  double query_f2(Timestamp at) const;
  double query_l2(Timestamp at) const;

  std::size_t bucket_count() const { return starts_.size(); }
  std::span<const Timestamp> starts() const { return starts_; }
  std::vector<double> suffix_estimates() const;
  std::uint64_t absorbed() const { return absorbed_; }
  bool has_items() const { return absorbed_ > 0; }
  Timestamp last_timestamp() const { return last_; }
  const HistogramConfig& config() const { return config_; }
  const SignBank& bank() const { return *bank_; }
  std::size_t memory_bytes() const;

  /// ceil((2/beta) ln(window * f2)) + 2.
  static std::size_t bucket_bound(double beta, Timestamp window, double f2);

  void write(ByteWriter& w) const;
  static SmoothHistogram read(ByteReader& r);

 private:
  std::size_t first_active(Timestamp at) const;

  std::shared_ptr<const SignBank> bank_;
  HistogramConfig config_;
  std::vector<Timestamp> starts_;
  std::vector<std::int64_t> segments_;
  Timestamp last_ = 0;
  std::uint64_t absorbed_ = 0;
  std::uint32_t prune_at_;
};

/// Recovers the id of an (F2,2)-heavy element: one pair of histograms per id
/// bit, fed by the items whose id has that bit set or clear.
class IndexRecovery {
 public:
  IndexRecovery(std::uint64_t universe, std::span<const std::shared_ptr<const SignBank>> banks,
                HistogramConfig config, double gap = 1.5);

  static unsigned bits_for(std::uint64_t universe);
  static std::vector<std::shared_ptr<const SignBank>> make_banks(std::uint64_t universe,
                                                                 SketchShape shape,
                                                                 std::uint64_t seed);

  void ingest(const TimedItem& item);

  /// Bit b is 1 when the bit-set side estimates at least gap times the
  /// bit-clear side, 0 in the mirror case; any undecided bit gives none.
  std::optional<ElementId> recover(Timestamp at) const;

  unsigned bits() const { return static_cast<unsigned>(hists_.size() / 2); }
  const SmoothHistogram& histogram(unsigned bit, int value) const { return hists_[2 * bit + value]; }
  std::size_t memory_bytes() const;

 private:
  std::uint64_t universe_;
  double gap_;
  std::vector<SmoothHistogram> hists_;
};

}  // namespace usketch
