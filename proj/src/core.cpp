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

#include "usketch/core.hpp"

#include <algorithm>
#include <exception>
#include <stdexcept>

namespace usketch {

namespace {

constexpr std::uint32_t kSnapshotVersion = 1;

}  // namespace

bool CoreQueryResult::contains(ElementId j) const { return find(j) != nullptr; }

const CorePair* CoreQueryResult::find(ElementId j) const {
  for (const auto& p : pairs)
    if (p.index == j) return &p;
  return nullptr;
}

CoreQueryResult CoreSnapshot::query(const GFunction& g, double eps) const {
  CoreQueryResult out;
  for (const auto& [lane, cell] : cells) {
    const double v = evaluate_cell(cell, g, eps, eps_prime);
    if (v > 0.0) out.pairs.push_back({v, cell->j});
  }
  return out;
}

std::size_t CoreSnapshot::occupied() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.second.has_value(); }));
}

void CoreSnapshot::write(ByteWriter& w) const {
  w.tag("CSNP");
  w.u32(kSnapshotVersion);
  w.i64(at);
  w.f64(eps_prime);
  w.u64(parts);
  w.u64(buckets);
  w.u64(cells.size());
  for (const auto& [lane, cell] : cells) {
    w.u64(lane);
    write_cell(w, cell);
  }
}

CoreSnapshot CoreSnapshot::read(ByteReader& r) {
  r.expect("CSNP");
  if (const auto v = r.u32(); v != kSnapshotVersion)
    throw FormatError("unsupported core snapshot version " + std::to_string(v));
  CoreSnapshot s;
  s.at = r.i64();
  s.eps_prime = r.f64();
  s.parts = r.u64();
  s.buckets = r.u64();
  const auto n = r.u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto lane = r.u64();
    s.cells.emplace_back(lane, read_cell(r));
  }
  return s;
}

UniversalCore::UniversalCore(const CoreConfig& config)
    : UniversalCore(config, std::make_shared<const HybridMajorRandomness>(
                                config.universe, config.profile.hm, derive_seed(config.seed, 0x4d))) {}

UniversalCore::UniversalCore(const CoreConfig& config,
                             std::shared_ptr<const HybridMajorRandomness> rnd)
    : config_(config), rnd_(std::move(rnd)) {
  if (config.universe == 0) throw std::invalid_argument("universe must be positive");
  if (config.window < 1) throw std::invalid_argument("window must be >= 1");
  if (rnd_->universe() != config.universe)
    throw std::invalid_argument("hybrid-major randomness built for another universe");
  parts_ = config.profile.parts(config.alpha, config.universe, config.window);
  buckets_ = config.profile.buckets(config.fail_p, config.universe, config.window);
  part_hash_ = HashFamily::create(2, std::max(config.universe, parts_), derive_seed(config.seed, 0xa0));
  bucket_hash_ =
      HashFamily::create(2, std::max(config.universe, buckets_), derive_seed(config.seed, 0xb0));
}

std::uint64_t UniversalCore::lane_of(ElementId id) const {
  const std::uint64_t part = parts_ == 1 ? 0 : part_hash_(id) % parts_;
  return part * buckets_ + bucket_hash_(id) % buckets_;
}

HybridMajor& UniversalCore::lane_for(std::uint64_t key) {
  return lanes_.try_emplace(key, rnd_, config_.window).first->second;
}

void UniversalCore::ingest(const TimedItem& item) {
  if (item.id >= config_.universe) throw std::out_of_range("element id outside universe");
  if (absorbed_ > 0 && item.timestamp < last_)
    throw std::invalid_argument("out-of-order timestamp " + std::to_string(item.timestamp));
  lane_for(lane_of(item.id)).ingest(item);
  last_ = item.timestamp;
  ++absorbed_;
}

void UniversalCore::ingest_batch(std::span<const TimedItem> items, Execution exec) {
  if (exec == Execution::kSerial) {
    for (const auto& item : items) ingest(item);
    return;
  }
  Timestamp prev = absorbed_ > 0 ? last_ : items.empty() ? 0 : items.front().timestamp;
  for (const auto& item : items) {
    if (item.id >= config_.universe) throw std::out_of_range("element id outside universe");
    if (item.timestamp < prev)
      throw std::invalid_argument("out-of-order timestamp " + std::to_string(item.timestamp));
    prev = item.timestamp;
  }
  if (items.empty()) return;

  std::unordered_map<std::uint64_t, std::size_t> slot;
  std::vector<std::pair<HybridMajor*, std::vector<TimedItem>>> work;
  for (const auto& item : items) {
    const auto key = lane_of(item.id);
    auto [it, fresh] = slot.try_emplace(key, work.size());
    if (fresh) work.emplace_back(&lane_for(key), std::vector<TimedItem>{});
    work[it->second].second.push_back(item);
  }

  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < work.size(); ++i) {
    try {
      for (const auto& item : work[i].second) work[i].first->ingest(item);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  last_ = items.back().timestamp;
  absorbed_ += items.size();
}

std::vector<std::uint64_t> UniversalCore::sorted_lanes() const {
  std::vector<std::uint64_t> keys;
  keys.reserve(lanes_.size());
  for (const auto& [key, hm] : lanes_) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  return keys;
}

CoreSnapshot UniversalCore::snapshot(Timestamp at) const {
  CoreSnapshot s;
  s.at = at;
  s.eps_prime = config_.profile.hm.eps_prime;
  s.parts = parts_;
  s.buckets = buckets_;
  for (const auto key : sorted_lanes()) {
    CoreCell cell = lanes_.at(key).output_universal(at);
    if (cell && (cell->j >= config_.universe || lane_of(cell->j) != key)) cell.reset();
    s.cells.emplace_back(key, cell);
  }
  return s;
}

CoreQueryResult UniversalCore::query(const GFunction& g, double eps, Timestamp at) const {
  return snapshot(at).query(g, eps);
}

CoreQueryResult UniversalCore::g_core(const GFunction& g, double eps, Timestamp at) const {
  CoreQueryResult out;
  for (const auto key : sorted_lanes()) {
    const HybridMajor& hm = lanes_.at(key);
    const double v = hm.output_g_aware(at, g, eps / 4.0);
    if (!(v > 0.0)) continue;
    const CoreCell cell = hm.output_universal(at);
    if (cell->j >= config_.universe || lane_of(cell->j) != key) continue;
    out.pairs.push_back({v, cell->j});
  }
  return out;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> UniversalCore::occupancy() const {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  for (const auto key : sorted_lanes()) out.emplace_back(key, lanes_.at(key).absorbed());
  return out;
}

const HybridMajor* UniversalCore::lane(std::uint64_t key) const {
  const auto it = lanes_.find(key);
  return it == lanes_.end() ? nullptr : &it->second;
}

std::size_t UniversalCore::memory_bytes() const {
  std::size_t total = sizeof(*this) + rnd_->memory_bytes();
  for (const auto& [key, hm] : lanes_) total += sizeof(key) + hm.memory_bytes();
  return total;
}

CoreQueryResult g_core(std::span<const TimedItem> stream, const GFunction& g, double eps,
                       const CoreConfig& config) {
  UniversalCore core(config);
  core.ingest_batch(stream);
  return stream.empty() ? CoreQueryResult{} : core.g_core(g, eps, stream.back().timestamp);
}

}  // namespace usketch
