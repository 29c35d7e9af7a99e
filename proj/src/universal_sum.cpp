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

#include "usketch/universal_sum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "usketch/stats.hpp"

namespace usketch {

namespace {

constexpr std::uint32_t kSnapshotVersion = 1;
constexpr std::uint32_t kFileVersion = 1;
constexpr std::uint64_t kSweepEvery = 1024;

}  // namespace

std::uint32_t default_levels(std::uint64_t universe) {
  const auto log_n = universe <= 1 ? 0 : std::bit_width(universe - 1);
  return static_cast<std::uint32_t>(log_n) + 2;
}

SumEstimate sum_recursion(double y_phi, std::span<const CoreQueryResult> cores,
                          std::span<const ZeroOneVector> vectors) {
  if (cores.size() != vectors.size()) throw std::invalid_argument("one core per level expected");
  SumEstimate out;
  out.trace.assign(cores.size() + 1, 0.0);
  out.trace.back() = y_phi;
  for (std::size_t k = cores.size(); k-- > 0;) {
    double y = 2.0 * out.trace[k + 1];
    for (const auto& p : cores[k].pairs) y += (1.0 - 2.0 * vectors[k](p.index)) * p.value;
    out.trace[k] = y;
  }
  out.value = out.trace.front();
  return out;
}

SumEstimate SumSnapshot::query(const GFunction& g, double eps) const {
  if (base_overflow) {
    SumEstimate e;
    e.base_overflow = true;
    return e;
  }
  double y_phi = 0.0;
  for (const auto& [id, count] : base) y_phi += g(count);
  std::vector<CoreQueryResult> q;
  q.reserve(cores.size());
  for (const auto& c : cores) q.push_back(c.query(g, eps));
  return sum_recursion(y_phi, q, vectors);
}

void SumSnapshot::write(ByteWriter& w) const {
  w.tag("SSNP");
  w.u32(kSnapshotVersion);
  w.u64(universe);
  w.i64(window);
  w.i64(at);
  w.u32(levels());
  for (const auto& v : vectors) v.write(w);
  for (const auto& c : cores) c.write(w);
  w.u8(base_overflow ? 1 : 0);
  w.u64(base.size());
  for (const auto& [id, count] : base) {
    w.u32(id);
    w.u64(count);
  }
}

SumSnapshot SumSnapshot::read(ByteReader& r) {
  r.expect("SSNP");
  if (const auto v = r.u32(); v != kSnapshotVersion)
    throw FormatError("unsupported sum snapshot version " + std::to_string(v));
  SumSnapshot s;
  s.universe = r.u64();
  s.window = r.i64();
  s.at = r.i64();
  const auto levels = r.u32();
  for (std::uint32_t k = 0; k < levels; ++k) s.vectors.push_back(ZeroOneVector::read(r));
  for (std::uint32_t k = 0; k < levels; ++k) s.cores.push_back(CoreSnapshot::read(r));
  s.base_overflow = r.u8() != 0;
  const auto n = r.u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto id = r.u32();
    s.base.emplace_back(id, r.u64());
  }
  return s;
}

void ExactBase::ingest(const TimedItem& item) {
  queues_[item.id].push_back(item.timestamp);
  if (++since_sweep_ >= kSweepEvery) sweep(item.timestamp);
}

void ExactBase::sweep(Timestamp now) {
  since_sweep_ = 0;
  for (auto it = queues_.begin(); it != queues_.end();) {
    auto& q = it->second;
    while (!q.empty() && !is_active(q.front(), now, window_)) q.pop_front();
    it = q.empty() ? queues_.erase(it) : std::next(it);
  }
}

std::vector<std::pair<ElementId, std::uint64_t>> ExactBase::counts(Timestamp at, bool& overflow) const {
  std::vector<std::pair<ElementId, std::uint64_t>> out;
  for (const auto& [id, q] : queues_) {
    const auto n = static_cast<std::uint64_t>(std::count_if(
        q.begin(), q.end(), [&](Timestamp t) { return is_active(t, at, window_); }));
    if (n > 0) out.emplace_back(id, n);
  }
  overflow = out.size() > cap_;
  if (overflow) out.clear();
  return out;
}

std::size_t ExactBase::memory_bytes() const {
  std::size_t total = sizeof(*this);
  for (const auto& [id, q] : queues_) total += sizeof(id) + sizeof(q) + q.size() * sizeof(Timestamp);
  return total;
}

UniversalSum::UniversalSum(const SumConfig& config)
    : config_(config), base_(config.window, config.profile.base_cap) {
  if (!(config.eps > 0.0 && config.eps < 1.0)) throw std::invalid_argument("eps must be in (0,1)");
  const std::uint32_t phi = config.levels ? config.levels : default_levels(config.universe);
  const double alpha = std::pow(static_cast<double>(phi), 3) / (config.eps * config.eps);
  for (std::uint32_t k = 0; k < phi; ++k) {
    vectors_.emplace_back(config.universe, derive_seed(config.seed, 0x4b, k + 1));
    CoreConfig cc;
    cc.universe = config.universe;
    cc.window = config.window;
    cc.fail_p = 1.0 / phi;
    cc.alpha = std::max(1.0, alpha);
    cc.seed = derive_seed(config.seed, 0xc0, k);
    cc.profile = config.profile;
    cores_.emplace_back(cc);
  }
}

std::uint32_t UniversalSum::depth(ElementId id) const {
  std::uint32_t k = 0;
  while (k < vectors_.size() && vectors_[k](id) == 1) ++k;
  return k;
}

void UniversalSum::ingest(const TimedItem& item) {
  if (item.id >= config_.universe) throw std::out_of_range("element id outside universe");
  if (absorbed_ > 0 && item.timestamp < last_)
    throw std::invalid_argument("out-of-order timestamp " + std::to_string(item.timestamp));
  const std::uint32_t d = depth(item.id);
  for (std::uint32_t k = 0; k <= d && k < levels(); ++k) cores_[k].ingest(item);
  if (d == levels()) base_.ingest(item);
  last_ = item.timestamp;
  ++absorbed_;
}

void UniversalSum::ingest_batch(std::span<const TimedItem> items, Execution exec) {
  if (exec == Execution::kSerial) {
    for (const auto& item : items) ingest(item);
    return;
  }
  Timestamp prev = absorbed_ > 0 ? last_ : items.empty() ? 0 : items.front().timestamp;
  std::vector<std::vector<TimedItem>> per_level(levels());
  for (const auto& item : items) {
    if (item.id >= config_.universe) throw std::out_of_range("element id outside universe");
    if (item.timestamp < prev)
      throw std::invalid_argument("out-of-order timestamp " + std::to_string(item.timestamp));
    prev = item.timestamp;
    const std::uint32_t d = depth(item.id);
    for (std::uint32_t k = 0; k <= d && k < levels(); ++k) per_level[k].push_back(item);
    if (d == levels()) base_.ingest(item);
  }
  if (items.empty()) return;

  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < per_level.size(); ++k) {
    try {
      cores_[k].ingest_batch(per_level[k], Execution::kParallel);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  last_ = items.back().timestamp;
  absorbed_ += items.size();
}

SumSnapshot UniversalSum::snapshot(Timestamp at) const {
  SumSnapshot s;
  s.universe = config_.universe;
  s.window = config_.window;
  s.at = at;
  s.vectors = vectors_;
  for (const auto& c : cores_) s.cores.push_back(c.snapshot(at));
  s.base = base_.counts(at, s.base_overflow);
  return s;
}

SumEstimate UniversalSum::query_sum(const GFunction& g, double eps, Timestamp at) const {
  return snapshot(at).query(g, eps);
}

SumEstimate UniversalSum::g_sum(const GFunction& g, double eps, Timestamp at) const {
  bool overflow = false;
  const auto base = base_.counts(at, overflow);
  if (overflow) {
    SumEstimate e;
    e.base_overflow = true;
    return e;
  }
  double y_phi = 0.0;
  for (const auto& [id, count] : base) y_phi += g(count);
  std::vector<CoreQueryResult> q;
  q.reserve(cores_.size());
  for (const auto& c : cores_) q.push_back(c.g_core(g, eps, at));
  return sum_recursion(y_phi, q, vectors_);
}

std::size_t UniversalSum::memory_bytes() const {
  std::size_t total = sizeof(*this) + base_.memory_bytes() + vectors_.capacity() * sizeof(ZeroOneVector);
  for (const auto& c : cores_) total += c.memory_bytes();
  return total;
}

SumEstimate g_sum(std::span<const TimedItem> stream, const GFunction& g, double eps,
                  const SumConfig& config) {
  UniversalSum s(config);
  s.ingest_batch(stream);
  return stream.empty() ? SumEstimate{0.0, {}, false} : s.g_sum(g, eps, stream.back().timestamp);
}

std::vector<std::uint8_t> StructureFile::serialize() const {
  ByteWriter w;
  w.tag("USKS");
  w.u32(kFileVersion);
  w.u64(universe);
  w.i64(window);
  w.f64(eps);
  w.u64(seed);
  w.str(profile);
  w.u64(times.size());
  for (const auto t : times) w.i64(t);
  w.u64(replicas.size());
  for (const auto& rep : replicas) {
    if (rep.size() != times.size()) throw std::logic_error("replica without a snapshot per time");
    for (const auto& s : rep) s.write(w);
  }
  return w.take();
}

StructureFile StructureFile::deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect("USKS");
  if (const auto v = r.u32(); v != kFileVersion)
    throw FormatError("unsupported structure file version " + std::to_string(v));
  StructureFile f;
  f.universe = r.u64();
  f.window = r.i64();
  f.eps = r.f64();
  f.seed = r.u64();
  f.profile = r.str();
  f.times.resize(r.u64());
  for (auto& t : f.times) t = r.i64();
  f.replicas.resize(r.u64());
  for (auto& rep : f.replicas)
    for (std::size_t i = 0; i < f.times.size(); ++i) rep.push_back(SumSnapshot::read(r));
  if (!r.done()) throw FormatError("trailing bytes after structure");
  return f;
}

void StructureFile::save(const std::filesystem::path& path) const {
  const auto bytes = serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

StructureFile StructureFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

std::uint64_t replica_seed(std::uint64_t root, std::uint32_t r) { return derive_seed(root, 0x5e9, r); }

StructureFile build_structure(std::span<const TimedItem> stream, const SumConfig& config,
                              std::uint32_t replicas, std::vector<Timestamp> times,
                              Execution exec) {
  if (replicas == 0) throw std::invalid_argument("need at least one replica");
  if (times.empty()) times.push_back(stream.empty() ? 0 : stream.back().timestamp);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  StructureFile f;
  f.universe = config.universe;
  f.window = config.window;
  f.eps = config.eps;
  f.seed = config.seed;
  f.profile = config.profile.name();
  f.times = times;
  f.replicas.resize(replicas);

  auto build_one = [&](std::uint32_t r) {
    SumConfig c = config;
    c.seed = replica_seed(config.seed, r);
    UniversalSum sum(c);
    std::size_t pos = 0;
    for (const auto t : times) {
      std::size_t end = pos;
      while (end < stream.size() && stream[end].timestamp <= t) ++end;
      sum.ingest_batch(stream.subspan(pos, end - pos), exec);
      pos = end;
      f.replicas[r].push_back(sum.snapshot(t));
    }
  };

  if (exec == Execution::kSerial) {
    for (std::uint32_t r = 0; r < replicas; ++r) build_one(r);
    return f;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (std::uint32_t r = 0; r < replicas; ++r) {
    try {
      build_one(r);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return f;
}

ReplicatedEstimate query_structure(const StructureFile& file, const GFunction& g, double eps,
                                   Timestamp at) {
  const auto it = std::find(file.times.begin(), file.times.end(), at);
  if (it == file.times.end()) {
    std::string known;
    for (const auto t : file.times) known += (known.empty() ? "" : ", ") + std::to_string(t);
    throw std::invalid_argument("no snapshot at time " + std::to_string(at) + " (available: " +
                                known + ")");
  }
  const auto idx = static_cast<std::size_t>(it - file.times.begin());
  ReplicatedEstimate out;
  for (const auto& rep : file.replicas) out.estimates.push_back(rep[idx].query(g, eps).value);
  out.median = median(out.estimates);
  return out;
}

}  // namespace usketch
