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

#include "usketch/hashing.hpp"

#include <bit>
#include <random>
#include <stdexcept>

namespace usketch {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  if (p == kMersenne61) {
    const unsigned __int128 prod = static_cast<unsigned __int128>(a) * b;
    std::uint64_t r = static_cast<std::uint64_t>(prod & kMersenne61) +
                      static_cast<std::uint64_t>(prod >> 61);
    if (r >= kMersenne61) r -= kMersenne61;
    return r;
  }
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

void check_degree(int degree) {
  if (degree != 2 && degree != 4)
    throw std::invalid_argument("hash family degree must be 2 or 4, got " +
                                std::to_string(degree));
}

}  // namespace

bool is_prime(std::uint64_t v) {
  if (v < 2) return false;
  for (std::uint64_t d : {2ull, 3ull, 5ull, 7ull}) {
    if (v % d == 0) return v == d;
  }
  if (v == kMersenne61) return true;
  for (std::uint64_t d = 11; d * d <= v; d += 2) {
    if (v % d == 0) return false;
  }
  return true;
}

std::uint64_t next_prime(std::uint64_t v) {
  if (v <= 2) return 2;
  while (!is_prime(v)) ++v;
  return v;
}

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t label) {
  return mix64(root ^ mix64(label + 0x632be59bd9b4e019ull));
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t label, std::uint64_t index) {
  return derive_seed(derive_seed(root, label), index);
}

HashFamily HashFamily::create(int degree, std::uint64_t universe_bound, std::uint64_t seed) {
  check_degree(degree);
  if (universe_bound < 1) throw std::invalid_argument("universe bound must be >= 1");
  return with_modulus(degree, next_prime(2 * universe_bound), seed);
}

HashFamily HashFamily::with_modulus(int degree, std::uint64_t prime, std::uint64_t seed) {
  check_degree(degree);
  if (!is_prime(prime)) throw std::invalid_argument("hash modulus must be prime");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> coef(0, prime - 1);
  std::vector<std::uint64_t> c(static_cast<std::size_t>(degree));
  for (auto& v : c) v = coef(rng);
  return from_coefficients(prime, std::move(c));
}

HashFamily HashFamily::from_coefficients(std::uint64_t prime, std::vector<std::uint64_t> coefficients) {
  check_degree(static_cast<int>(coefficients.size()));
  HashFamily f;
  f.p_ = prime;
  f.coef_ = std::move(coefficients);
  for (auto& v : f.coef_) v %= prime;
  return f;
}

std::uint64_t HashFamily::operator()(std::uint64_t x) const {
  const std::uint64_t xm = x % p_;
  std::uint64_t acc = 0;
  for (auto it = coef_.rbegin(); it != coef_.rend(); ++it) {
    acc = mulmod(acc, xm, p_) + *it;
    if (acc >= p_) acc -= p_;
  }
  return acc;
}

ZeroOneVector::ZeroOneVector(std::uint64_t universe_bound, std::uint64_t seed) {
  if (universe_bound < 1) throw std::invalid_argument("universe bound must be >= 1");
  bits_ = static_cast<unsigned>(std::max<int>(1, std::bit_width(universe_bound - 1)));
  std::mt19937_64 rng(seed);
  const std::uint64_t r = rng();
  mask_ = bits_ >= 64 ? r : (r & ((std::uint64_t{1} << bits_) - 1));
  offset_ = static_cast<unsigned>(rng() & 1u);
}

ZeroOneVector ZeroOneVector::from_parts(unsigned bits, std::uint64_t mask, unsigned offset) {
  ZeroOneVector v;
  v.bits_ = bits;
  v.mask_ = mask;
  v.offset_ = offset & 1u;
  return v;
}

void ZeroOneVector::write(ByteWriter& w) const {
  w.u32(bits_);
  w.u64(mask_);
  w.u8(static_cast<std::uint8_t>(offset_ | (flipped_ << 1)));
}

ZeroOneVector ZeroOneVector::read(ByteReader& r) {
  ZeroOneVector v;
  v.bits_ = r.u32();
  v.mask_ = r.u64();
  const auto flags = r.u8();
  v.offset_ = flags & 1u;
  v.flipped_ = (flags >> 1) & 1u;
  return v;
}

}  // namespace usketch
