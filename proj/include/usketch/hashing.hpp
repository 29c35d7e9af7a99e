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
#include <span>
#include <vector>

#include "usketch/binary_io.hpp"
#include "usketch/types.hpp"

namespace usketch {

inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

bool is_prime(std::uint64_t v);
std::uint64_t next_prime(std::uint64_t v);

/// splitmix64 finalizer. Child seeds are derived from a root seed by mixing a
/// fixed label, so sibling structures get independent streams of randomness
/// and a whole run is reproducible from one root.
std::uint64_t mix64(std::uint64_t v);
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t label);
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t label, std::uint64_t index);

/// Random polynomial of degree k-1 over Z_p: a k-wise independent family.
class HashFamily {
 public:
  HashFamily() = default;

  /// Modulus is the smallest prime >= 2 * universe_bound.
  static HashFamily create(int degree, std::uint64_t universe_bound, std::uint64_t seed);
  static HashFamily with_modulus(int degree, std::uint64_t prime, std::uint64_t seed);
  /// coefficients[i] multiplies x^i.
  static HashFamily from_coefficients(std::uint64_t prime, std::vector<std::uint64_t> coefficients);

  std::uint64_t operator()(std::uint64_t x) const;

  int degree() const { return static_cast<int>(coef_.size()); }
  std::uint64_t modulus() const { return p_; }
  std::span<const std::uint64_t> coefficients() const { return coef_; }

 private:
  std::uint64_t p_ = 2;
  std::vector<std::uint64_t> coef_;
};

/// Maps a 4-wise family value to {-1, 0, +1}: 0 for the single value 0, +1 for
/// the lower half of the rest, -1 for the upper half. Over an odd prime field
/// this is the only way to get E[s] = 0 exactly; E[s^2] = (p-1)/p, which the
/// AMS estimator scales back out.
inline int balanced_sign(std::uint64_t value, std::uint64_t p) {
  if (value == 0) return 0;
  return value <= (p - 1) / 2 ? 1 : -1;
}

/// Pairwise independent, exactly unbiased bits h_i = <a, i> xor b over GF(2).
class ZeroOneVector {
 public:
  ZeroOneVector() = default;
  ZeroOneVector(std::uint64_t universe_bound, std::uint64_t seed);
  /// Explicit seed point; used to enumerate the whole family in tests.
  static ZeroOneVector from_parts(unsigned bits, std::uint64_t mask, unsigned offset);

  int operator()(std::uint64_t i) const {
    return (__builtin_popcountll(mask_ & i) & 1) ^ static_cast<int>(offset_ ^ flipped_);
  }

  /// H' with entries 1 - h_i.
  ZeroOneVector complement() const {
    ZeroOneVector c = *this;
    c.flipped_ ^= 1u;
    return c;
  }

  unsigned bits() const { return bits_; }
  std::uint64_t mask() const { return mask_; }
  unsigned offset() const { return offset_; }

  void write(ByteWriter& w) const;
  static ZeroOneVector read(ByteReader& r);

  friend bool operator==(const ZeroOneVector&, const ZeroOneVector&) = default;

 private:
  unsigned bits_ = 1;
  std::uint64_t mask_ = 0;
  unsigned offset_ = 0;
  unsigned flipped_ = 0;
};

}  // namespace usketch
