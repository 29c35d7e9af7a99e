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

#include "usketch/residual.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "usketch/stats.hpp"

namespace usketch {

ResidualRandomness::ResidualRandomness(std::uint64_t universe, ResidualShape shape,
                                       std::uint64_t seed)
    : universe_(universe), shape_(shape), seed_(seed) {
  if (shape.groups == 0 || shape.reps == 0) throw std::invalid_argument("empty residual shape");
  const std::size_t n = std::size_t{shape.groups} * shape.reps;
  vectors_.reserve(n);
  banks_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    vectors_.emplace_back(universe, derive_seed(seed, 0x2e5, i));
    banks_.push_back(
        std::make_shared<const SignBank>(universe, shape.sketch, derive_seed(seed, 0x2e6, i)));
  }
}

std::size_t ResidualRandomness::memory_bytes() const {
  std::size_t total = sizeof(*this) + vectors_.capacity() * sizeof(ZeroOneVector);
  for (const auto& b : banks_) total += b->memory_bytes();
  return total;
}

ResidualSketch::ResidualSketch(std::shared_ptr<const ResidualRandomness> rnd, HistogramConfig config)
    : rnd_(std::move(rnd)) {
  hists_.reserve(2 * rnd_->repetitions());
  for (std::size_t i = 0; i < rnd_->repetitions(); ++i) {
    hists_.emplace_back(rnd_->bank(i), config);
    hists_.emplace_back(rnd_->bank(i), config);
  }
}

ResidualSketch::ResidualSketch(std::uint64_t universe, ResidualShape shape, HistogramConfig config,
                               std::uint64_t seed)
    : ResidualSketch(std::make_shared<const ResidualRandomness>(universe, shape, seed), config) {}

void ResidualSketch::ingest(const TimedItem& item) {
  for (std::size_t i = 0; i < rnd_->repetitions(); ++i)
    hists_[2 * i + rnd_->vector(i)(item.id)].ingest(item);
}

double ResidualSketch::output(Timestamp at) const {
  const auto& shape = rnd_->shape();
  std::vector<double> group_means(shape.groups);
  for (std::uint32_t g = 0; g < shape.groups; ++g) {
    double acc = 0.0;
    for (std::uint32_t c = 0; c < shape.reps; ++c) {
      const std::size_t rep = std::size_t{g} * shape.reps + c;
      acc += 10.0 * std::min(hists_[2 * rep].query_f2(at), hists_[2 * rep + 1].query_f2(at));
    }
    group_means[g] = acc / shape.reps;
  }
  return std::sqrt(std::max(0.0, median(std::move(group_means))));
}

std::size_t ResidualSketch::memory_bytes() const {
  std::size_t total = sizeof(*this);
  for (const auto& h : hists_) total += h.memory_bytes();
  return total;
}

}  // namespace usketch
