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

#include "usketch/ams_sketch.hpp"

#include <algorithm>
#include <stdexcept>

#include "usketch/stats.hpp"

namespace usketch {

namespace {

constexpr std::size_t kMaxTableEntries = std::size_t{1} << 20;
constexpr std::uint32_t kAmsVersion = 1;

}  // namespace

SignBank::SignBank(std::uint64_t universe, SketchShape shape, std::uint64_t seed,
                   std::uint64_t prime)
    : universe_(universe), shape_(shape), seed_(seed), prime_(prime) {
  if (shape.width == 0 || shape.groups == 0) throw std::invalid_argument("empty sketch shape");
  families_.reserve(shape.size());
  for (std::size_t k = 0; k < shape.size(); ++k)
    families_.push_back(HashFamily::with_modulus(4, prime, derive_seed(seed, 0x5167, k)));
  scale_ = static_cast<double>(prime) / static_cast<double>(prime - 1);
  build_table();
}

SignBank::SignBank(std::uint64_t universe, SketchShape shape, std::vector<HashFamily> families)
    : universe_(universe), shape_(shape), families_(std::move(families)) {
  if (families_.size() != shape.size())
    throw std::invalid_argument("family count does not match sketch shape");
  prime_ = families_.front().modulus();
  scale_ = static_cast<double>(prime_) / static_cast<double>(prime_ - 1);
  build_table();
}

void SignBank::build_table() {
  if (universe_ * shape_.size() > kMaxTableEntries) return;
  table_.resize(universe_ * shape_.size());
  for (std::uint64_t id = 0; id < universe_; ++id)
    for (std::size_t k = 0; k < shape_.size(); ++k)
      table_[id * shape_.size() + k] =
          static_cast<std::int8_t>(balanced_sign(families_[k](id), prime_));
}

std::span<const std::int8_t> SignBank::signs(ElementId id, std::vector<std::int8_t>& scratch) const {
  const std::size_t m = shape_.size();
  if (!table_.empty()) return {table_.data() + std::size_t{id} * m, m};
  scratch.resize(m);
  for (std::size_t k = 0; k < m; ++k)
    scratch[k] = static_cast<std::int8_t>(balanced_sign(families_[k](id), prime_));
  return scratch;
}

std::size_t SignBank::memory_bytes() const {
  return sizeof(*this) + table_.size() + families_.size() * (sizeof(HashFamily) + 4 * 8);
}

double ams_estimate(std::span<const std::int64_t> counters, SketchShape shape, double scale) {
  std::vector<double> means(shape.groups);
  for (std::uint32_t g = 0; g < shape.groups; ++g) {
    double acc = 0.0;
    for (std::uint32_t w = 0; w < shape.width; ++w) {
      const double c = static_cast<double>(counters[std::size_t{g} * shape.width + w]);
      acc += c * c;
    }
    means[g] = acc / shape.width;
  }
  return median(std::move(means)) * scale;
}

void add_signed(std::span<std::int64_t> counters, std::span<const std::int8_t> signs,
                std::int64_t count) {
  for (std::size_t k = 0; k < counters.size(); ++k) {
    if (__builtin_add_overflow(counters[k], signs[k] * count, &counters[k]))
      throw std::overflow_error("AMS counter overflow");
  }
}

AmsSketch::AmsSketch(std::shared_ptr<const SignBank> bank)
    : bank_(std::move(bank)), counters_(bank_->shape().size(), 0) {}

AmsSketch::AmsSketch(std::uint64_t universe, SketchShape shape, std::uint64_t seed)
    : AmsSketch(std::make_shared<const SignBank>(universe, shape, seed)) {}

void AmsSketch::insert(ElementId id, std::uint64_t count) {
  if (id >= bank_->universe()) throw std::out_of_range("element id outside universe");
  if (count == 0 || count > static_cast<std::uint64_t>(INT64_MAX))
    throw std::invalid_argument("insert count must be positive");
  std::vector<std::int8_t> scratch;
  add_signed(counters_, bank_->signs(id, scratch), static_cast<std::int64_t>(count));
}

double AmsSketch::estimate() const {
  return ams_estimate(counters_, bank_->shape(), bank_->scale());
}

void AmsSketch::merge(const AmsSketch& other) {
  const SignBank& a = *bank_;
  const SignBank& b = *other.bank_;
  if (bank_ != other.bank_ &&
      (a.shape() != b.shape() || a.seed() != b.seed() || a.prime() != b.prime() ||
       a.universe() != b.universe()))
    throw std::invalid_argument("cannot merge sketches with different sign functions");
  for (std::size_t k = 0; k < counters_.size(); ++k) {
    if (__builtin_add_overflow(counters_[k], other.counters_[k], &counters_[k]))
      throw std::overflow_error("AMS counter overflow");
  }
}

void AmsSketch::write(ByteWriter& w) const {
  w.tag("AMSK");
  w.u32(kAmsVersion);
  w.u32(bank_->shape().width);
  w.u32(bank_->shape().groups);
  w.u64(bank_->universe());
  w.u64(bank_->seed());
  w.u64(bank_->prime());
  for (auto c : counters_) w.i64(c);
}

AmsSketch AmsSketch::read(ByteReader& r) {
  r.expect("AMSK");
  if (const auto v = r.u32(); v != kAmsVersion)
    throw FormatError("unsupported AMS sketch version " + std::to_string(v));
  SketchShape shape;
  shape.width = r.u32();
  shape.groups = r.u32();
  const auto universe = r.u64();
  const auto seed = r.u64();
  const auto prime = r.u64();
  AmsSketch s(std::make_shared<const SignBank>(universe, shape, seed, prime));
  for (auto& c : s.counters_) c = r.i64();
  return s;
}

}  // namespace usketch
