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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "test_util.hpp"
#include "usketch/oracle.hpp"
#include "usketch/smooth_histogram.hpp"
#include "usketch/streamgen.hpp"

using namespace usketch;
using usketch::testing::exact_f2_between;
using usketch::testing::within;

namespace {

SmoothHistogram make(std::uint64_t universe, Timestamp window, double beta, std::uint64_t seed,
                     SketchShape shape = {64, 9}) {
  HistogramConfig c;
  c.beta = beta;
  c.window = window;
  return SmoothHistogram(std::make_shared<const SignBank>(universe, shape, seed), c);
}

}  // namespace

TEST_SUITE("sliding_f2") {

TEST_CASE("single item") {
  auto h = make(16, 10, 0.1, 1);
  CHECK(h.query_f2(0) == 0.0);
  h.ingest(5, 3);
  CHECK(h.bucket_count() == 1);
  CHECK(h.query_f2(5) == doctest::Approx(1.0));
  CHECK(h.query_l2(5) == doctest::Approx(1.0));
}

TEST_CASE("identical arrivals give T^2") {
  auto h = make(16, 1000, 0.1, 2);
  for (Timestamp t = 1; t <= 300; ++t) h.ingest(t, 7);
  CHECK(within(h.query_f2(300), 300.0 * 300.0, 0.1));
  CHECK(h.query_l2(300) == doctest::Approx(300.0).epsilon(0.05));
}

TEST_CASE("window expiry") {
  auto h = make(16, 5, 0.1, 3);
  h.ingest(1, 3);
  h.ingest(2, 3);
  h.ingest(9, 4);
  CHECK(h.query_f2(10) == doctest::Approx(1.0));
  CHECK(h.query_f2(14) == 0.0);
  CHECK(h.query_f2(100) == 0.0);
}

TEST_CASE("out-of-order timestamps are rejected") {
  auto h = make(16, 5, 0.1, 4);
  h.ingest(5, 1);
  CHECK_THROWS_AS(h.ingest(4, 1), std::invalid_argument);
  CHECK_THROWS_AS(h.query_f2(3), std::invalid_argument);
  CHECK_NOTHROW(h.ingest(5, 2));
}

TEST_CASE("frequencies (3,2,1): within 20% of 14 in at least 95% of trials") {
  int good = 0;
  for (int t = 0; t < 200; ++t) {
    auto h = make(16, 100, 0.1, 50 + t);
    const std::vector<ElementId> ids{1, 1, 1, 2, 2, 3};
    Timestamp ts = 1;
    for (auto id : ids) h.ingest(ts++, id);
    good += within(h.query_f2(ts - 1), 14.0, 0.2);
  }
  CHECK(good >= 190);
}

TEST_CASE("L2 of (4,3) within 15% of 5") {
  int good = 0;
  for (int t = 0; t < 100; ++t) {
    auto h = make(16, 100, 0.1, 300 + t);
    for (int i = 0; i < 4; ++i) h.ingest(1, 2);
    for (int i = 0; i < 3; ++i) h.ingest(2, 9);
    good += within(h.query_l2(2), 5.0, 0.15);
  }
  CHECK(good >= 95);
  auto h = make(16, 100, 0.1, 1);
  for (int i = 0; i < 10; ++i) h.ingest(1, 4);
  CHECK(h.query_l2(1) == doctest::Approx(10.0));
}

TEST_CASE("bucket count stays under the bound; sandwich and monotone suffixes") {
  RandomStreamSpec spec;
  spec.universe = 64;
  spec.length = 10000;
  spec.seed = 17;
  const auto items = random_stream(spec);
  const Timestamp window = 512;
  const double beta = 0.1;
  auto h = make(64, window, beta, 18);
  double f2_all = 0.0;
  std::vector<double> m(64, 0.0);
  std::size_t checked = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    h.ingest(it);
    f2_all += 2.0 * m[it.id] + 1.0;
    m[it.id] += 1.0;
    REQUIRE(h.bucket_count() <= SmoothHistogram::bucket_bound(beta, window, f2_all));
    if (i % 997 == 0 && i > 0) {
      const Timestamp now = it.timestamp;
      const auto starts = h.starts();
      const std::span<const TimedItem> seen(items.data(), i + 1);
      // Sandwich: the chosen bucket's true suffix <= window F2 <= the bucket before it.
      const auto first_in = std::upper_bound(starts.begin(), starts.end(), now - window);
      const double window_f2 = exact_f2_between(seen, now - window + 1, now);
      REQUIRE(first_in != starts.end());
      CHECK(exact_f2_between(seen, *first_in, now) <= window_f2);
      if (first_in != starts.begin()) CHECK(exact_f2_between(seen, *(first_in - 1), now) >= window_f2);
      // True suffix F2 does not increase with the start.
      double prev = INFINITY;
      for (const auto s : starts) {
        const double f = exact_f2_between(seen, s, now);
        CHECK(f <= prev);
        prev = f;
      }
      ++checked;
    }
  }
  CHECK(checked > 5);
}

TEST_CASE("items sharing a timestamp can arrive in any order") {
  RandomStreamSpec spec;
  spec.universe = 32;
  spec.length = 3000;
  spec.per_tick = 5;
  spec.seed = 4;
  auto items = random_stream(spec);
  auto shuffled = items;
  std::mt19937_64 rng(9);
  for (std::size_t i = 0; i < shuffled.size(); i += 5)
    std::shuffle(shuffled.begin() + static_cast<std::ptrdiff_t>(i),
                 shuffled.begin() + static_cast<std::ptrdiff_t>(std::min(i + 5, shuffled.size())), rng);
  auto a = make(32, 100, 0.1, 5), b = make(32, 100, 0.1, 5);
  for (const auto& it : items) a.ingest(it);
  for (const auto& it : shuffled) b.ingest(it);
  CHECK(a.query_f2(items.back().timestamp) == b.query_f2(items.back().timestamp));
  CHECK(std::equal(a.starts().begin(), a.starts().end(), b.starts().begin(), b.starts().end()));
}

TEST_CASE("serialization round trip") {
  auto h = make(32, 50, 0.2, 8, {16, 3});
  for (Timestamp t = 1; t <= 200; ++t) h.ingest(t, static_cast<ElementId>(t % 9));
  ByteWriter w;
  h.write(w);
  ByteReader r(w.bytes());
  const auto back = SmoothHistogram::read(r);
  CHECK(r.done());
  CHECK(back.query_f2(200) == h.query_f2(200));
  CHECK(std::equal(back.starts().begin(), back.starts().end(), h.starts().begin(), h.starts().end()));
}

TEST_CASE("index recovery: sole element") {
  const auto banks = IndexRecovery::make_banks(64, {16, 3}, 1);
  HistogramConfig c;
  c.beta = 0.3;
  c.window = 100;
  IndexRecovery rec(64, banks, c);
  for (int i = 0; i < 50; ++i) rec.ingest({1, 5});
  CHECK(rec.recover(1) == std::optional<ElementId>(5));
  // The two sides of every bit see the whole stream between them.
  for (unsigned b = 0; b < rec.bits(); ++b)
    CHECK(rec.histogram(b, 0).absorbed() + rec.histogram(b, 1).absorbed() == 50);
}

TEST_CASE("index recovery: planted 40 among twenty singletons") {
  int good = 0;
  for (int t = 0; t < 100; ++t) {
    const auto items = planted_heavy(256, 9, 40, 20, 100 + t);
    const auto banks = IndexRecovery::make_banks(256, {16, 3}, 200 + t);
    HistogramConfig c;
    c.beta = 0.3;
    c.window = 1000;
    IndexRecovery rec(256, banks, c);
    for (const auto& it : items) rec.ingest(it);
    good += rec.recover(items.back().timestamp) == std::optional<ElementId>(9);
  }
  CHECK(good >= 95);
}

TEST_CASE("index recovery: uniform window has no heavy index") {
  int none = 0;
  for (int t = 0; t < 50; ++t) {
    const auto banks = IndexRecovery::make_banks(32, {16, 3}, 400 + t);
    HistogramConfig c;
    c.beta = 0.3;
    c.window = 1000;
    IndexRecovery rec(32, banks, c);
    Timestamp ts = 1;
    for (int rep = 0; rep < 4; ++rep)
      for (ElementId i = 0; i < 32; ++i) rec.ingest({ts++, i});
    none += !rec.recover(ts - 1).has_value();
  }
  CHECK(none >= 45);
}

}  // TEST_SUITE
