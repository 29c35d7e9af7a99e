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

#include "usketch/hybrid_major.hpp"

#include <stdexcept>

namespace usketch {

namespace {

constexpr std::uint32_t kParamsVersion = 1;

HistogramConfig histogram_config(const HybridMajorParams& p, double beta, Timestamp window) {
  HistogramConfig c;
  c.beta = beta;
  c.window = window;
  c.prune_floor = p.prune_floor;
  c.prune_growth = p.prune_growth;
  return c;
}

void write_shape(ByteWriter& w, SketchShape s) {
  w.u32(s.width);
  w.u32(s.groups);
}

SketchShape read_shape(ByteReader& r) {
  SketchShape s;
  s.width = r.u32();
  s.groups = r.u32();
  return s;
}

}  // namespace

void HybridMajorParams::write(ByteWriter& w) const {
  w.tag("HMPR");
  w.u32(kParamsVersion);
  w.f64(eps_prime);
  w.f64(l2_beta);
  write_shape(w, l2_sketch);
  w.u32(sep_reps);
  w.f64(sep_factor);
  w.f64(sep_beta);
  write_shape(w, sep_sketch);
  w.f64(residual_beta);
  w.u32(residual.groups);
  w.u32(residual.reps);
  write_shape(w, residual.sketch);
  w.f64(index_beta);
  write_shape(w, index_sketch);
  w.f64(index_gap);
  w.u32(prune_floor);
  w.f64(prune_growth);
}

HybridMajorParams HybridMajorParams::read(ByteReader& r) {
  r.expect("HMPR");
  if (const auto v = r.u32(); v != kParamsVersion)
    throw FormatError("unsupported hybrid-major parameter version " + std::to_string(v));
  HybridMajorParams p;
  p.eps_prime = r.f64();
  p.l2_beta = r.f64();
  p.l2_sketch = read_shape(r);
  p.sep_reps = r.u32();
  p.sep_factor = r.f64();
  p.sep_beta = r.f64();
  p.sep_sketch = read_shape(r);
  p.residual_beta = r.f64();
  p.residual.groups = r.u32();
  p.residual.reps = r.u32();
  p.residual.sketch = read_shape(r);
  p.index_beta = r.f64();
  p.index_sketch = read_shape(r);
  p.index_gap = r.f64();
  p.prune_floor = r.u32();
  p.prune_growth = r.f64();
  return p;
}

HybridMajorRandomness::HybridMajorRandomness(std::uint64_t universe, const HybridMajorParams& params,
                                             std::uint64_t seed)
    : universe_(universe), params_(params), seed_(seed) {
  if (params.sep_reps == 0) throw std::invalid_argument("need at least one separation repetition");
  l2_bank = std::make_shared<const SignBank>(universe, params.l2_sketch, derive_seed(seed, 0x12));
  for (std::uint32_t i = 0; i < params.sep_reps; ++i) {
    sep_vectors.emplace_back(universe, derive_seed(seed, 0x5e0, i));
    sep_banks.push_back(
        std::make_shared<const SignBank>(universe, params.sep_sketch, derive_seed(seed, 0x5e1, i)));
  }
  residual = std::make_shared<const ResidualRandomness>(universe, params.residual,
                                                        derive_seed(seed, 0x7e5));
  index_banks = IndexRecovery::make_banks(universe, params.index_sketch, derive_seed(seed, 0x1d));
}

std::size_t HybridMajorRandomness::memory_bytes() const {
  std::size_t total = sizeof(*this) + l2_bank->memory_bytes() + residual->memory_bytes();
  for (const auto& b : sep_banks) total += b->memory_bytes();
  for (const auto& b : index_banks) total += b->memory_bytes();
  return total + sep_vectors.capacity() * sizeof(ZeroOneVector);
}

void write_cell(ByteWriter& w, const CoreCell& cell) {
  w.u8(cell ? 1 : 0);
  if (!cell) return;
  w.f64(cell->a);
  w.f64(cell->b);
  w.u32(cell->j);
}

CoreCell read_cell(ByteReader& r) {
  const auto tag = r.u8();
  if (tag == 0) return std::nullopt;
  if (tag != 1) throw FormatError("bad core cell tag " + std::to_string(tag));
  CoreTriple t;
  t.a = r.f64();
  t.b = r.f64();
  t.j = r.u32();
  return t;
}

double evaluate_cell(const CoreCell& cell, const GFunction& g, double tol, double eps_prime) {
  if (!cell) return 0.0;
  if (!jump_guard_passes(g, tol, cell->a, cell->b, eps_prime)) return 0.0;
  return g.at_real(cell->a);
}

HybridMajor::HybridMajor(std::shared_ptr<const HybridMajorRandomness> rnd, Timestamp window)
    : rnd_(std::move(rnd)),
      l2_(rnd_->l2_bank, histogram_config(rnd_->params(), rnd_->params().l2_beta, window)),
      residual_(rnd_->residual,
                histogram_config(rnd_->params(), rnd_->params().residual_beta, window)),
      index_(rnd_->universe(), rnd_->index_banks,
             histogram_config(rnd_->params(), rnd_->params().index_beta, window),
             rnd_->params().index_gap) {
  const auto cfg = histogram_config(rnd_->params(), rnd_->params().sep_beta, window);
  sep_.reserve(2 * rnd_->sep_banks.size());
  for (const auto& bank : rnd_->sep_banks) {
    sep_.emplace_back(bank, cfg);
    sep_.emplace_back(bank, cfg);
  }
}

void HybridMajor::ingest(const TimedItem& item) {
  l2_.ingest(item);
  for (std::size_t i = 0; i < rnd_->sep_vectors.size(); ++i)
    sep_[2 * i + rnd_->sep_vectors[i](item.id)].ingest(item);
  residual_.ingest(item);
  index_.ingest(item);
}

bool HybridMajor::separation_test(Timestamp at) const {
  const double k = rnd_->params().sep_factor;
  for (std::size_t i = 0; i < rnd_->sep_vectors.size(); ++i) {
    const double x = sep_[2 * i + 1].query_f2(at);
    const double y = sep_[2 * i].query_f2(at);
    if (x < k * y && y < k * x) return false;
    if (x <= 0.0 && y <= 0.0) return false;
  }
  return true;
}

CoreCell HybridMajor::output_universal(Timestamp at) const {
  if (!separation_test(at)) return std::nullopt;
  const auto j = index_.recover(at);
  if (!j) return std::nullopt;
  const double a = l2_.query_l2(at);
  if (!(a > 0.0)) return std::nullopt;
  return CoreTriple{a, residual_.output(at), *j};
}

double HybridMajor::output_g_aware(Timestamp at, const GFunction& g, double eps) const {
  return evaluate_cell(output_universal(at), g, 4.0 * eps, rnd_->params().eps_prime);
}

std::size_t HybridMajor::memory_bytes() const {
  std::size_t total = sizeof(*this) + l2_.memory_bytes() + residual_.memory_bytes() +
                      index_.memory_bytes();
  for (const auto& h : sep_) total += h.memory_bytes();
  return total;
}

}  // namespace usketch
