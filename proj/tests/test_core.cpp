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
#include <map>
#include <random>
#include <stdexcept>

#include "usketch/core.hpp"
#include "usketch/oracle.hpp"
#include "usketch/streamgen.hpp"

using namespace usketch;

namespace {

CoreConfig config(std::uint64_t seed, double alpha = 1.0) {
  CoreConfig c;
  c.universe = 256;
  c.window = 1024;
  c.fail_p = 0.1;
  c.alpha = alpha;
  c.seed = seed;
  c.profile = Profile::relaxed(256, 1024);
  return c;
}

// 40 copies of `heavy`, six elements of frequency 7 and fifty singletons.
// For G = x^2 the heavy element outweighs the rest by a factor above 4.
Stream four_heavy(ElementId heavy, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ElementId> ids(256);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<ElementId>(i);
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.erase(std::remove(ids.begin(), ids.end(), heavy), ids.end());
  std::vector<ElementId> bag(40, heavy);
  for (int k = 0; k < 6; ++k) bag.insert(bag.end(), 7, ids[k]);
  for (int k = 6; k < 56; ++k) bag.push_back(ids[k]);
  std::shuffle(bag.begin(), bag.end(), rng);
  Stream s;
  for (std::size_t i = 0; i < bag.size(); ++i) s.push_back({static_cast<Timestamp>(i + 1), bag[i]});
  return s;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("empty structure reports nothing") {
  UniversalCore core(config(1));
  CHECK(core.query(GFunction::power(2), 0.25, 0).pairs.empty());
  CHECK(core.snapshot(0).occupied() == 0);
  CHECK(core.absorbed() == 0);
}

TEST_CASE("relaxed profile uses ceil(4/p) buckets and one part at alpha 1") {
  UniversalCore core(config(1));
  CHECK(core.buckets() == 40);
  CHECK(core.parts() == 1);
  UniversalCore amp(config(1, 4.0));
  CHECK(amp.parts() > 1);
  CHECK(amp.parts() <= 4);
}

TEST_CASE("items land only in their own lane") {
  UniversalCore core(config(5, 4.0));
  RandomStreamSpec spec;
  spec.universe = 256;
  spec.length = 3000;
  spec.seed = 6;
  const auto items = random_stream(spec);
  std::map<std::uint64_t, std::uint64_t> expect;
  for (const auto& it : items) {
    core.ingest(it);
    ++expect[core.lane_of(it.id)];
  }
  std::uint64_t sum = 0;
  for (const auto& [lane, n] : core.occupancy()) {
    CHECK(expect[lane] == n);
    REQUIRE(core.lane(lane) != nullptr);
    CHECK(core.lane(lane)->absorbed() == n);
    sum += n;
  }
  CHECK(sum == items.size());
  CHECK(core.absorbed() == items.size());
  for (const auto& [lane, n] : expect) CHECK(lane < core.parts() * core.buckets());
}

TEST_CASE("replay and serial versus parallel give identical snapshots") {
  const auto items = planted_heavy(256, 9, 40, 200, 17);
  UniversalCore a(config(8, 4.0)), b(config(8, 4.0)), c(config(8, 4.0));
  for (const auto& it : items) a.ingest(it);
  b.ingest_batch(items, Execution::kSerial);
  c.ingest_batch(items, Execution::kParallel);
  const Timestamp at = items.back().timestamp;
  CHECK(a.snapshot(at) == b.snapshot(at));
  CHECK(a.snapshot(at) == c.snapshot(at));
}

TEST_CASE("a bad item rejects the whole batch") {
  UniversalCore core(config(2));
  Stream items{{1, 3}, {2, 4}, {1, 5}};
  CHECK_THROWS_AS(core.ingest_batch(items), std::invalid_argument);
  CHECK(core.absorbed() == 0);
  Stream outside{{1, 3}, {2, 999}};
  CHECK_THROWS_AS(core.ingest_batch(outside), std::out_of_range);
  CHECK(core.absorbed() == 0);
}

TEST_CASE("planted heavy element is recovered within (1 +- eps)") {
  const auto g = GFunction::power(2);
  int recovered = 0, checks = 0, good = 0;
  for (int s = 0; s < 100; ++s) {
    const auto items = planted_heavy(256, 9, 40, 20, 300 + s);
    UniversalCore core(config(900 + s));
    core.ingest_batch(items);
    ExactWindow o(256, 1024);
    o.ingest(items);
    const Timestamp at = items.back().timestamp;
    const auto m = o.frequencies(at);
    const auto q = core.query(g, 0.25, at);
    if (const auto* p = q.find(9); p && std::abs(p->value - 1600.0) <= 0.25 * 1600.0) ++recovered;
    for (const auto& p : q.pairs) {
      ++checks;
      const double truth = g(m[p.index]);
      good += std::abs(p.value - truth) <= 0.25 * truth;
    }
  }
  CHECK(recovered >= 80);
  CHECK(good >= 0.9 * checks);
}

TEST_CASE("one snapshot answers several G without re-ingestion") {
  const auto items = planted_heavy(256, 11, 60, 30, 4);
  UniversalCore core(config(12));
  core.ingest_batch(items);
  const auto snap = core.snapshot(items.back().timestamp);
  const auto sq = snap.query(GFunction::power(2), 0.25);
  const auto lin = snap.query(GFunction::power(1), 0.25);
  REQUIRE(sq.find(11) != nullptr);
  REQUIRE(lin.find(11) != nullptr);
  CHECK(sq.find(11)->value == doctest::Approx(lin.find(11)->value * lin.find(11)->value));
}

TEST_CASE("emitted indices are distinct and at most tau") {
  for (int s = 0; s < 10; ++s) {
    RandomStreamSpec spec;
    spec.universe = 256;
    spec.length = 2000;
    spec.distribution = Distribution::kZipf;
    spec.seed = 40 + s;
    const auto items = random_stream(spec);
    UniversalCore core(config(60 + s, 4.0));
    core.ingest_batch(items);
    const auto q = core.query(GFunction::power(1), 0.25, items.back().timestamp);
    CHECK(q.pairs.size() <= core.parts() * core.buckets());
    std::vector<ElementId> ids;
    for (const auto& p : q.pairs) ids.push_back(p.index);
    std::sort(ids.begin(), ids.end());
    CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
  }
}

TEST_CASE("G-aware core equals the universal query") {
  for (int s = 0; s < 20; ++s) {
    const auto items = planted_heavy(256, static_cast<ElementId>(s), 30 + s, 40, 70 + s);
    const auto cfg = config(80 + s, 2.0);
    UniversalCore core(cfg);
    core.ingest_batch(items);
    const Timestamp at = items.back().timestamp;
    for (const auto& g : {GFunction::power(1.5), GFunction::parse("capped:8")}) {
      const auto universal = core.query(g, 0.2, at);
      CHECK(core.g_core(g, 0.2, at).pairs == universal.pairs);
      CHECK(g_core(items, g, 0.2, cfg).pairs == universal.pairs);
    }
  }
}

TEST_CASE("amplified core finds a (G,4)-heavy element") {
  const auto g = GFunction::power(2);
  int found = 0;
  for (int s = 0; s < 50; ++s) {
    const ElementId heavy = static_cast<ElementId>((s * 53) % 256);
    const auto items = four_heavy(heavy, 500 + s);
    ExactWindow o(256, 1024);
    o.ingest(items);
    const Timestamp at = items.back().timestamp;
    REQUIRE(o.heavy_set(at, g, 4.0) == std::vector<ElementId>{heavy});
    UniversalCore core(config(700 + s, 4.0));
    core.ingest_batch(items);
    const auto* p = core.query(g, 0.25, at).find(heavy);
    found += p && std::abs(p->value - 1600.0) <= 0.25 * 1600.0;
  }
  CHECK(found >= 40);
}

TEST_CASE("snapshots round-trip") {
  const auto items = planted_heavy(256, 9, 40, 20, 1);
  UniversalCore core(config(3));
  core.ingest_batch(items);
  const auto snap = core.snapshot(items.back().timestamp);
  ByteWriter w;
  snap.write(w);
  ByteReader r(w.bytes());
  CHECK(CoreSnapshot::read(r) == snap);
}

}  // TEST_SUITE
