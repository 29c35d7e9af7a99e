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

#include "usketch/smooth_histogram.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace usketch {

namespace {

constexpr std::uint32_t kHistogramVersion = 1;

}  // namespace

SmoothHistogram::SmoothHistogram(std::shared_ptr<const SignBank> bank, HistogramConfig config)
    : bank_(std::move(bank)), config_(config), prune_at_(config.prune_floor) {
  if (!(config.beta > 0.0 && config.beta < 1.0)) throw std::invalid_argument("beta must be in (0,1)");
  if (config.window < 1) throw std::invalid_argument("window must be >= 1");
  if (config.prune_floor < 3) throw std::invalid_argument("prune floor must be >= 3");
}

void SmoothHistogram::ingest(Timestamp t, ElementId id, std::uint64_t count) {
  if (absorbed_ > 0 && t < last_)
    throw std::invalid_argument("out-of-order timestamp " + std::to_string(t) + " after " +
                                std::to_string(last_));
  if (id >= bank_->universe()) throw std::out_of_range("element id outside universe");
  if (count == 0) throw std::invalid_argument("insert count must be positive");
  const std::size_t m = bank_->shape().size();
  if (starts_.empty() || t > starts_.back()) {
    // Compacting only at timestamp boundaries keeps the state independent of
    // the order of items that share a timestamp.
    if (starts_.size() >= prune_at_) compact();
    starts_.push_back(t);
    segments_.resize(segments_.size() + m, 0);
  }
  std::vector<std::int8_t> scratch;
  add_signed(std::span(segments_).last(m), bank_->signs(id, scratch),
             static_cast<std::int64_t>(count));
  last_ = t;
  absorbed_ += count;
}

std::size_t SmoothHistogram::first_active(Timestamp at) const {
  const auto it = std::upper_bound(starts_.begin(), starts_.end(), at - config_.window);
  return static_cast<std::size_t>(it - starts_.begin());
}

void SmoothHistogram::compact() {
  const std::size_t m = bank_->shape().size();
  if (!starts_.empty()) {
    // Keep at most one bucket starting outside the window.
    const std::size_t active = first_active(last_);
    const std::size_t keep_from = active == 0 ? 0 : std::min(active, starts_.size()) - 1;
    if (keep_from > 0) {
      starts_.erase(starts_.begin(), starts_.begin() + static_cast<std::ptrdiff_t>(keep_from));
      segments_.erase(segments_.begin(), segments_.begin() + static_cast<std::ptrdiff_t>(keep_from * m));
    }
  }

  const std::size_t n = starts_.size();
  if (n >= 3) {
    const std::vector<double> est = suffix_estimates();
    const double keep_ratio = 1.0 - config_.beta / 2.0;
    std::vector<std::size_t> kept{0};
    for (std::size_t c = 1; c < n; ++c) {
      const std::size_t anchor = kept.back();
      if (c + 1 < n && est[c + 1] >= keep_ratio * est[anchor]) {
        // Dropping bucket c folds its segment into the anchor's.
        auto dst = std::span(segments_).subspan(anchor * m, m);
        auto src = std::span(segments_).subspan(c * m, m);
        for (std::size_t k = 0; k < m; ++k) {
          if (__builtin_add_overflow(dst[k], src[k], &dst[k]))
            throw std::overflow_error("AMS counter overflow");
        }
      } else {
        kept.push_back(c);
      }
    }
    if (kept.size() != n) {
      for (std::size_t i = 0; i < kept.size(); ++i) {
        const std::size_t from = kept[i];
        if (from == i) continue;
        starts_[i] = starts_[from];
        std::copy_n(segments_.begin() + static_cast<std::ptrdiff_t>(from * m), m,
                    segments_.begin() + static_cast<std::ptrdiff_t>(i * m));
      }
      starts_.resize(kept.size());
      segments_.resize(kept.size() * m);
    }
  }
  prune_at_ = std::max<std::uint32_t>(
      config_.prune_floor,
      static_cast<std::uint32_t>(std::ceil(config_.prune_growth * static_cast<double>(starts_.size()))));
}

std::vector<double> SmoothHistogram::suffix_estimates() const {
  const std::size_t m = bank_->shape().size();
  const std::size_t n = starts_.size();
  std::vector<double> est(n);
  std::vector<std::int64_t> acc(m, 0);
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = 0; k < m; ++k) acc[k] += segments_[i * m + k];
    est[i] = ams_estimate(acc, bank_->shape(), bank_->scale());
  }
  return est;
}

double SmoothHistogram::query_f2(Timestamp at) const {
  if (absorbed_ > 0 && at < last_)
    throw std::invalid_argument("query time precedes the last ingested timestamp");
  const std::size_t first = first_active(at);
  if (first >= starts_.size()) return 0.0;
  const std::size_t m = bank_->shape().size();
  std::vector<std::int64_t> acc(m, 0);
  for (std::size_t i = first; i < starts_.size(); ++i)
    for (std::size_t k = 0; k < m; ++k) acc[k] += segments_[i * m + k];
  return ams_estimate(acc, bank_->shape(), bank_->scale());
}

double SmoothHistogram::query_l2(Timestamp at) const { return std::sqrt(query_f2(at)); }

std::size_t SmoothHistogram::memory_bytes() const {
  return sizeof(*this) + starts_.capacity() * sizeof(Timestamp) +
         segments_.capacity() * sizeof(std::int64_t);
}

std::size_t SmoothHistogram::bucket_bound(double beta, Timestamp window, double f2) {
  const double arg = std::max(1.0, static_cast<double>(window) * std::max(1.0, f2));
  return static_cast<std::size_t>(std::ceil((2.0 / beta) * std::log(arg))) + 2;
}

void SmoothHistogram::write(ByteWriter& w) const {
  w.tag("SHST");
  w.u32(kHistogramVersion);
  w.f64(config_.beta);
  w.i64(config_.window);
  w.u32(config_.prune_floor);
  w.f64(config_.prune_growth);
  w.u32(bank_->shape().width);
  w.u32(bank_->shape().groups);
  w.u64(bank_->universe());
  w.u64(bank_->seed());
  w.u64(bank_->prime());
  w.i64(last_);
  w.u64(absorbed_);
  w.u32(prune_at_);
  w.u64(starts_.size());
  for (auto s : starts_) w.i64(s);
  for (auto c : segments_) w.i64(c);
}

SmoothHistogram SmoothHistogram::read(ByteReader& r) {
  r.expect("SHST");
  if (const auto v = r.u32(); v != kHistogramVersion)
    throw FormatError("unsupported smooth histogram version " + std::to_string(v));
  HistogramConfig cfg;
  cfg.beta = r.f64();
  cfg.window = r.i64();
  cfg.prune_floor = r.u32();
  cfg.prune_growth = r.f64();
  SketchShape shape;
  shape.width = r.u32();
  shape.groups = r.u32();
  const auto universe = r.u64();
  const auto seed = r.u64();
  const auto prime = r.u64();
  SmoothHistogram h(std::make_shared<const SignBank>(universe, shape, seed, prime), cfg);
  h.last_ = r.i64();
  h.absorbed_ = r.u64();
  h.prune_at_ = r.u32();
  const auto n = r.u64();
  h.starts_.resize(n);
  for (auto& s : h.starts_) s = r.i64();
  h.segments_.resize(n * shape.size());
  for (auto& c : h.segments_) c = r.i64();
  return h;
}

unsigned IndexRecovery::bits_for(std::uint64_t universe) {
  return static_cast<unsigned>(std::max<int>(1, std::bit_width(universe - 1)));
}

std::vector<std::shared_ptr<const SignBank>> IndexRecovery::make_banks(std::uint64_t universe,
                                                                       SketchShape shape,
                                                                       std::uint64_t seed) {
  std::vector<std::shared_ptr<const SignBank>> banks;
  for (unsigned b = 0; b < bits_for(universe); ++b)
    banks.push_back(std::make_shared<const SignBank>(universe, shape, derive_seed(seed, 0x1d, b)));
  return banks;
}

IndexRecovery::IndexRecovery(std::uint64_t universe,
                             std::span<const std::shared_ptr<const SignBank>> banks,
                             HistogramConfig config, double gap)
    : universe_(universe), gap_(gap) {
  if (banks.size() != bits_for(universe)) throw std::invalid_argument("one sign bank per id bit");
  hists_.reserve(2 * banks.size());
  for (const auto& bank : banks) {
    hists_.emplace_back(bank, config);
    hists_.emplace_back(bank, config);
  }
}

void IndexRecovery::ingest(const TimedItem& item) {
  for (unsigned b = 0; b < bits(); ++b) hists_[2 * b + ((item.id >> b) & 1u)].ingest(item);
}

std::optional<ElementId> IndexRecovery::recover(Timestamp at) const {
  ElementId id = 0;
  for (unsigned b = 0; b < bits(); ++b) {
    const double zero = hists_[2 * b].query_f2(at);
    const double one = hists_[2 * b + 1].query_f2(at);
    if (one > 0.0 && one >= gap_ * zero) {
      id |= ElementId{1} << b;
    } else if (!(zero > 0.0 && zero >= gap_ * one)) {
      return std::nullopt;
    }
  }
  if (id >= universe_) return std::nullopt;
  return id;
}

std::size_t IndexRecovery::memory_bytes() const {
  std::size_t total = sizeof(*this);
  for (const auto& h : hists_) total += h.memory_bytes();
  return total;
}

}  // namespace usketch
