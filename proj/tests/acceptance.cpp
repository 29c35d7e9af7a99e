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

// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria (capped at 100).

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "usketch/ams_sketch.hpp"
#include "usketch/core.hpp"
#include "usketch/gfunction.hpp"
#include "usketch/hashing.hpp"
#include "usketch/hybrid_major.hpp"
#include "usketch/oracle.hpp"
#include "usketch/residual.hpp"
#include "usketch/smooth_histogram.hpp"
#include "usketch/stats.hpp"
#include "usketch/streamgen.hpp"
#include "usketch/universal_sum.hpp"

using namespace usketch;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double v, double truth, double eps) { return std::abs(v - truth) <= eps * truth; }

const std::array<const char*, 5> kSumFunctions{"power:1", "power:1.5", "power:2", "indicator", "capped:8"};

// 1. Every 4-subset of Z_17 gets every value tuple exactly once over the
// 17^4 degree-3 polynomials.
Outcome hash_exactness() {
  const auto t0 = Clock::now();
  constexpr std::uint64_t p = 17;
  constexpr std::size_t polys = p * p * p * p;
  std::vector<std::uint8_t> table(polys * p);
  std::size_t idx = 0;
  for (std::uint64_t a = 0; a < p; ++a)
    for (std::uint64_t b = 0; b < p; ++b)
      for (std::uint64_t c = 0; c < p; ++c)
        for (std::uint64_t d = 0; d < p; ++d, ++idx) {
          const auto f = HashFamily::from_coefficients(p, {a, b, c, d});
          for (std::uint64_t x = 0; x < p; ++x) table[idx * p + x] = static_cast<std::uint8_t>(f(x));
        }
  std::size_t tuples = 0, bad = 0;
  std::vector<std::uint8_t> hits(polys);
  for (std::uint64_t x0 = 0; x0 < p; ++x0)
    for (std::uint64_t x1 = x0 + 1; x1 < p; ++x1)
      for (std::uint64_t x2 = x1 + 1; x2 < p; ++x2)
        for (std::uint64_t x3 = x2 + 1; x3 < p; ++x3) {
          std::fill(hits.begin(), hits.end(), 0);
          for (std::size_t i = 0; i < polys; ++i) {
            const std::uint8_t* v = &table[i * p];
            ++hits[((v[x0] * p + v[x1]) * p + v[x2]) * p + v[x3]];
          }
          bad += std::any_of(hits.begin(), hits.end(), [](std::uint8_t h) { return h != 1; });
          ++tuples;
        }
  const double secs = seconds_since(t0);
  return {bad == 0 && secs < 10.0,
          fmt("%zu of %zu 4-subsets non-uniform over %zu seeds, %.2f s (limit 10 s)", bad, tuples, polys, secs)};
}

// 2. Frequencies (3,2,1): mean of scaled counter^2 over all 17^4 seeds.
Outcome ams_unbiasedness() {
  constexpr std::uint64_t p = 17;
  std::uint64_t sum_sq = 0, seeds = 0;
  for (std::uint64_t a = 0; a < p; ++a)
    for (std::uint64_t b = 0; b < p; ++b)
      for (std::uint64_t c = 0; c < p; ++c)
        for (std::uint64_t d = 0; d < p; ++d) {
          SignBank bank(8, {1, 1}, {HashFamily::from_coefficients(p, {a, b, c, d})});
          const std::int64_t ctr = 3 * bank.sign(1, 0) + 2 * bank.sign(2, 0) + bank.sign(3, 0);
          sum_sq += static_cast<std::uint64_t>(ctr * ctr);
          ++seeds;
        }
  // mean * p / (p - 1) == 14, compared in integers.
  const bool exact = sum_sq * p == 14 * (p - 1) * seeds;
  return {exact, fmt("mean scaled counter^2 = %.12g, exact F2 = 14",
                     static_cast<double>(sum_sq) * p / ((p - 1) * static_cast<double>(seeds)))};
}

// 3. Sliding F2 on 50 uniform streams.
Outcome sliding_f2() {
  const Timestamp window = 512;
  const double beta = 0.1;
  std::size_t windows = 0, good = 0, over_bound = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    RandomStreamSpec spec;
    spec.universe = 64;
    spec.length = 10000;
    spec.seed = 100 + s;
    const auto items = random_stream(spec);
    HistogramConfig cfg;
    cfg.beta = beta;
    cfg.window = window;
    SmoothHistogram h(std::make_shared<const SignBank>(64, SketchShape{64, 9}, 200 + s), cfg);
    ExactWindow oracle(64, window);
    std::vector<double> m(64, 0.0);
    double f2_all = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      h.ingest(items[i]);
      oracle.ingest(items[i]);
      f2_all += 2.0 * m[items[i].id] + 1.0;
      m[items[i].id] += 1.0;
      over_bound += h.bucket_count() > SmoothHistogram::bucket_bound(beta, window, f2_all);
      if ((i + 1) % 250 == 0) {
        const Timestamp at = items[i].timestamp;
        ++windows;
        good += within(h.query_f2(at), oracle.exact_f2(at), 0.2);
      }
    }
  }
  const double rate = static_cast<double>(good) / static_cast<double>(windows);
  return {rate >= 0.95 && over_bound == 0,
          fmt("%.3f of %zu windows within 20%% (need 0.95); %zu steps over the bucket bound", rate, windows,
              over_bound)};
}

// 4. Residual estimate for a heavy 100 among thirty singletons.
Outcome residual_interval() {
  const double lo = 2.0 * std::sqrt(30.0), hi = 3.0 * std::sqrt(30.0);
  const HybridMajorParams defaults;
  HistogramConfig cfg;
  cfg.beta = defaults.residual_beta;
  cfg.window = 1024;
  int good = 0;
  for (int s = 0; s < 100; ++s) {
    const auto items = planted_heavy(256, 1, 100, 30, 1000 + static_cast<std::uint64_t>(s));
    ResidualSketch r(256, defaults.residual, cfg, 5000 + static_cast<std::uint64_t>(s));
    for (const auto& it : items) r.ingest(it);
    const double v = r.output(items.back().timestamp);
    good += v > lo && v < hi;
  }
  return {good >= 90, fmt("%d of 100 seeds in (%.2f, %.2f) (need 90)", good, lo, hi)};
}

// 5. Separation test: exact on single-element windows, Zero on uniform ones.
Outcome hm_separation() {
  int single = 0, zeros = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto rnd = std::make_shared<const HybridMajorRandomness>(256, HybridMajorParams{}, 100 + s);
    HybridMajor hm(rnd, 1000);
    const Timestamp len = static_cast<Timestamp>(1 + s % 50);
    for (Timestamp t = 1; t <= len; ++t) hm.ingest({t, static_cast<ElementId>((s * 37) % 256)});
    single += hm.separation_test(len);

    RandomStreamSpec spec;
    spec.universe = 256;
    spec.length = 1000;
    spec.seed = 500 + s;
    const auto items = random_stream(spec);
    HybridMajor u(std::make_shared<const HybridMajorRandomness>(256, HybridMajorParams{}, 900 + s), 2000);
    for (const auto& it : items) u.ingest(it);
    zeros += !u.output_universal(items.back().timestamp).has_value();
  }
  return {single == 100 && zeros >= 90,
          fmt("single-element windows separated %d/100 (need all); uniform Zero %d/100 (need 90)", single, zeros)};
}

// 6. Core recovery of a planted (G,1)-heavy element and condition 1.
Outcome core_recovery() {
  const auto g = GFunction::power(2);
  const double p = 0.1, eps = 0.25;
  int recovered = 0;
  std::size_t checks = 0, good = 0;
  for (int s = 0; s < 200; ++s) {
    const auto items = planted_heavy(256, 9, 40, 20, 300 + static_cast<std::uint64_t>(s));
    CoreConfig c;
    c.universe = 256;
    c.window = 1024;
    c.fail_p = p;
    c.seed = 900 + static_cast<std::uint64_t>(s);
    c.profile = Profile::relaxed(256, 1024);
    UniversalCore core(c);
    core.ingest_batch(items);
    ExactWindow oracle(256, 1024);
    oracle.ingest(items);
    const Timestamp at = items.back().timestamp;
    const auto m = oracle.frequencies(at);
    const auto q = core.query(g, eps, at);
    if (const auto* pair = q.find(9); pair && within(pair->value, g(40), eps)) ++recovered;
    for (const auto& pair : q.pairs) {
      ++checks;
      good += within(pair.value, g(m[pair.index]), eps);
    }
  }
  const double rate = recovered / 200.0;
  const double cond = checks ? static_cast<double>(good) / static_cast<double>(checks) : 1.0;
  return {rate >= 1.0 - 2.0 * p && cond >= 0.9,
          fmt("recovered %.3f (need %.2f); condition 1 held in %zu/%zu pairs (need 0.90)", rate, 1.0 - 2.0 * p,
              good, checks)};
}

SumConfig sum_config(std::uint64_t seed) {
  SumConfig c;
  c.universe = 256;
  c.window = 1024;
  c.eps = 0.3;
  c.seed = seed;
  c.profile = Profile::relaxed(256, 1024);
  return c;
}

Stream sum_stream(int run) {
  RandomStreamSpec spec;
  spec.universe = 256;
  spec.length = 20000;
  spec.seed = 100 + static_cast<std::uint64_t>(run);
  return random_stream(spec);
}

// 7. Universal sum accuracy, single structures and 9-replica medians.
Outcome universal_sum() {
  const auto t0 = Clock::now();
  const int runs = 20;
  const std::uint32_t replicas = 9;
  std::map<std::string, std::pair<int, int>> score;  // g -> (single hits, median hits)
  for (int r = 0; r < runs; ++r) {
    const auto items = sum_stream(r);
    const auto file = build_structure(items, sum_config(7 + static_cast<std::uint64_t>(r)), replicas);
    ExactWindow oracle(256, 1024);
    oracle.ingest(items);
    const Timestamp at = items.back().timestamp;
    for (const char* name : kSumFunctions) {
      const auto g = GFunction::parse(name);
      const double truth = oracle.exact_gsum(at, g);
      const auto est = query_structure(file, g, 0.3, at);
      for (const double v : est.estimates) score[name].first += within(v, truth, 0.3);
      score[name].second += within(est.median, truth, 0.3);
    }
  }
  bool pass = true;
  std::string detail;
  for (const char* name : kSumFunctions) {
    const double single = score[name].first / static_cast<double>(runs * replicas);
    const double median = score[name].second / static_cast<double>(runs);
    pass = pass && single >= 0.7 && median >= 0.95;
    detail += fmt("%s single %.2f median %.2f; ", name, single, median);
  }
  const double secs = seconds_since(t0);
  pass = pass && secs <= 600.0;
  return {pass, detail + fmt("need 0.70 / 0.95; %.0f s (limit 600 s)", secs)};
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 8. One persisted structure serves all five G's and is not modified.
Outcome universality_invariance() {
  const auto items = sum_stream(0);
  const auto path = std::filesystem::temp_directory_path() / "usketch_acceptance.usk";
  build_structure(items, sum_config(7), 9).save(path);
  const auto before = read_bytes(path);
  const Timestamp at = items.back().timestamp;
  ExactWindow oracle(256, 1024);
  oracle.ingest(items);
  std::string detail;
  int accurate = 0;
  for (const char* name : kSumFunctions) {
    const auto file = StructureFile::load(path);
    const auto g = GFunction::parse(name);
    const auto est = query_structure(file, g, 0.3, at);
    accurate += within(est.median, oracle.exact_gsum(at, g), 0.3);
  }
  const bool same = read_bytes(path) == before;
  std::filesystem::remove(path);
  return {same && !before.empty(),
          fmt("%zu-byte file %s after 5 queries; %d/5 medians within 30%%", before.size(),
              same ? "byte-identical" : "CHANGED", accurate)};
}

// 9. G-aware and universal sums agree bit for bit.
Outcome equivalence() {
  int mismatches = 0, compared = 0;
  for (int r = 0; r < 20; ++r) {
    RandomStreamSpec spec;
    spec.universe = 256;
    spec.length = 4000;
    spec.distribution = r % 2 ? Distribution::kZipf : Distribution::kUniform;
    spec.seed = 40 + static_cast<std::uint64_t>(r);
    const auto items = random_stream(spec);
    const auto cfg = sum_config(60 + static_cast<std::uint64_t>(r));
    UniversalSum s(cfg);
    s.ingest_batch(items);
    const Timestamp at = items.back().timestamp;
    const auto snap = s.snapshot(at);
    for (const char* name : kSumFunctions) {
      const auto g = GFunction::parse(name);
      const auto universal = snap.query(g, 0.3);
      const auto aware = g_sum(items, g, 0.3, cfg);
      mismatches += universal.value != aware.value || universal.trace != aware.trace;
      ++compared;
    }
  }
  return {mismatches == 0, fmt("%d of %d (stream, G) pairs differ", mismatches, compared)};
}

// 10. Zero-one probe classifications with re-verified counterexamples.
Outcome probe() {
  std::string detail;
  bool pass = true;
  for (const char* name : {"power:1", "power:1.5", "power:2"}) {
    const auto r = probe_tractability(GFunction::parse(name), false);
    pass = pass && r.overall == Verdict::kPass;
    detail += fmt("%s %s; ", name, to_string(r.overall));
  }
  for (const char* name : {"power:3", "exp2m1"}) {
    const auto g = GFunction::parse(name);
    const auto r = probe_tractability(g, false);
    bool verified = false;
    if (r.ratio_counterexample) verified = violates(g, *r.ratio_counterexample);
    if (r.jump_counterexample) verified = verified || violates(g, *r.jump_counterexample);
    pass = pass && r.overall == Verdict::kFail && verified;
    detail += fmt("%s %s (counterexample %s); ", name, to_string(r.overall), verified ? "verified" : "missing");
  }
  return {pass, detail};
}

// 11. Bisection local jump equals the linear scan.
Outcome local_jump_exact() {
  const auto t0 = Clock::now();
  std::size_t cases = 0, bad = 0;
  // Every builtin, power at several exponents.
  std::vector<GFunction> gs{GFunction::identity(), GFunction::indicator(), GFunction::capped(8),
                            GFunction::log1p(),    GFunction::exp2m1()};
  for (const double e : {0.5, 1.0, 1.5, 2.0, 3.0}) gs.push_back(GFunction::power(e));
  for (const auto& g : gs)
    for (const double eps : {0.5, 0.1, 0.01})
      for (std::uint64_t x = 1; x <= 10000; ++x) {
        bad += local_jump(g, eps, x) != local_jump_linear(g, eps, x);
        ++cases;
      }
  return {bad == 0, fmt("%zu of %zu (G, eps, x) cases differ, %.1f s", bad, cases, seconds_since(t0))};
}

// 12. Lower-bound family window totals at the first differing step.
Outcome lower_bound() {
  const std::uint64_t x = 256;
  const double eps = 0.1;
  const auto g = GFunction::power(2);
  const auto pi = local_jump(g, eps, x);
  std::mt19937_64 rng(12);
  auto choice = [&] {
    std::vector<std::uint64_t> steps(x);
    for (std::uint64_t i = 0; i < x; ++i) steps[i] = i + 1;
    std::shuffle(steps.begin(), steps.end(), rng);
    return std::set<std::uint64_t>(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(x / pi));
  };
  auto total_at = [&](const Stream& s, Timestamp at) {
    ExactWindow o(1, static_cast<Timestamp>(x));
    for (const auto& it : s)
      if (it.timestamp <= at) o.ingest(it);
    return o.total(at);
  };
  int pairs = 0, exact = 0;
  while (pairs < 20) {
    const auto a = choice(), b = choice();
    std::uint64_t d = 0;
    for (std::uint64_t s = 1; s + 2 <= x && d == 0; ++s)
      if (a.count(s) != b.count(s)) d = s;
    if (d == 0) continue;
    const auto& with = a.count(d) ? a : b;
    const auto& without = a.count(d) ? b : a;
    const auto sa = lower_bound_family(x, eps, g, with), sb = lower_bound_family(x, eps, g, without);
    const Timestamp at = static_cast<Timestamp>(x + d);
    exact += total_at(sa, static_cast<Timestamp>(x)) == x && total_at(sb, static_cast<Timestamp>(x)) == x &&
             total_at(sa, at) == x - pi && total_at(sb, at) == x;
    ++pairs;
  }
  return {exact == 20, fmt("%d/20 pairs exact (x = %llu, pi = %llu)", exact, static_cast<unsigned long long>(x),
                           static_cast<unsigned long long>(pi))};
}

// 13. Structure memory against the window size.
Outcome space_growth() {
  std::vector<double> lx, ly;
  std::string detail;
  for (const int e : {8, 10, 12}) {
    const Timestamp window = Timestamp{1} << e;
    auto cfg = sum_config(3);
    cfg.window = window;
    cfg.profile = Profile::relaxed(256, window);
    UniversalSum s(cfg);
    s.ingest_batch(sum_stream(0));
    const double bytes = static_cast<double>(s.memory_bytes());
    lx.push_back(std::log(static_cast<double>(window)));
    ly.push_back(std::log(bytes));
    detail += fmt("N=2^%d %.1f MB; ", e, bytes / 1e6);
  }
  const double mx = (lx[0] + lx[1] + lx[2]) / 3.0, my = (ly[0] + ly[1] + ly[2]) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  return {slope < 0.3, detail + fmt("fitted exponent %.3f (need < 0.3)", slope)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "Run just these criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "hash exactness", hash_exactness},
      {2, "AMS unbiasedness", ams_unbiasedness},
      {3, "sliding F2", sliding_f2},
      {4, "residual interval", residual_interval},
      {5, "hybrid-major separation", hm_separation},
      {6, "core recovery", core_recovery},
      {7, "universal sum", universal_sum},
      {8, "universality invariance", universality_invariance},
      {9, "G-aware equivalence", equivalence},
      {10, "zero-one probe", probe},
      {11, "local jump", local_jump_exact},
      {12, "lower-bound family", lower_bound},
      {13, "space growth", space_growth},
  };
  int failed = 0;
  const auto t0 = Clock::now();
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2d %s  %s: %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("total %.1f s, %d failed\n", seconds_since(t0), failed);
  return std::min(failed, 100);
}
