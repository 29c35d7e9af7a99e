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

// usketch: build universal sliding-window structures from stream files and
// query them later with any supported G.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "usketch/core.hpp"
#include "usketch/gfunction.hpp"
#include "usketch/oracle.hpp"
#include "usketch/streamgen.hpp"
#include "usketch/universal_sum.hpp"

using json = nlohmann::json;
using namespace usketch;

namespace {

Stream load_stream(const std::string& path, std::uint64_t universe) {
  if (path == "-") return read_stream(std::cin, universe);
  return read_stream_file(path, universe);
}

std::vector<Timestamp> parse_times(const std::string& csv) {
  std::vector<Timestamp> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    const long long v = std::stoll(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("bad time '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

void emit(const json& j) { std::cout << j.dump() << '\n'; }

json probe_json(const ProbeReport& r, const ProbeGrid& grid) {
  auto outcome = [](const PredicateOutcome& o) {
    return json{{"verdict", to_string(o.verdict)},
                {"exponents", o.exponents},
                {"thresholds", o.thresholds},
                {"cells", o.cells}};
  };
  json j{{"g", r.g},
         {"mode", r.universal ? "universal" : "plain"},
         {"cap", r.cap},
         {"grid",
          {{"x_max", grid.x_max},
           {"jump_x_max", grid.jump_x_max},
           {"points_per_octave", grid.points_per_octave},
           {"ks", grid.ks},
           {"n0_max", grid.n0_max},
           {"n1_max", grid.n1_max},
           {"min_rx", grid.min_rx},
           {"decision", "heuristic grid search"}}},
         {"predicate1", outcome(r.ratio)},
         {"predicate2", outcome(r.jump)},
         {"cube_bound", r.cube_bound},
         {"excluded_pairs", r.excluded_pairs},
         {"verdict", to_string(r.overall)}};
  if (const auto& c = r.ratio_counterexample) {
    j["predicate1"]["counterexample"] = {{"k", c->k}, {"t", c->t}, {"x", c->x},
                                         {"y", c->y}, {"log_ratio", c->log_ratio},
                                         {"eps", c->eps}};
  }
  if (const auto& c = r.jump_counterexample) {
    j["predicate2"]["counterexample"] = {{"k", c->k}, {"r", c->r}, {"x", c->x}, {"eps", c->eps}};
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Universal sliding-window sketches"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Write a synthetic stream file");
  std::string gen_kind, gen_out = "-", gen_g = "identity", gen_choice;
  std::uint64_t gen_universe = 256, gen_length = 10000, gen_tick = 1, gen_seed = 1;
  std::uint64_t gen_heavy_id = 0, gen_heavy_freq = 40, gen_noise = 20, gen_x = 256;
  double gen_s = 1.1, gen_eps = 0.1;
  gen->add_option("kind", gen_kind, "uniform | zipf | planted | lower-bound")
      ->required()
      ->check(CLI::IsMember({"uniform", "zipf", "planted", "lower-bound"}));
  gen->add_option("--universe,-n", gen_universe, "Universe size");
  gen->add_option("--length", gen_length, "Items (uniform, zipf)");
  gen->add_option("--per-tick", gen_tick, "Items per timestamp (uniform, zipf)");
  gen->add_option("--s", gen_s, "Zipf exponent");
  gen->add_option("--heavy-id", gen_heavy_id, "Planted element");
  gen->add_option("--heavy-freq", gen_heavy_freq, "Planted frequency");
  gen->add_option("--noise", gen_noise, "Distinct noise elements");
  gen->add_option("--x", gen_x, "Window of the lower-bound family");
  gen->add_option("--eps", gen_eps, "Local-jump epsilon (lower-bound)");
  gen->add_option("--g", gen_g, "G for the local jump (lower-bound)");
  gen->add_option("--choice", gen_choice, "Chosen steps, comma separated (lower-bound; random if empty)");
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--out,-o", gen_out, "Output file or - for stdout");

  // build
  auto* build = app.add_subcommand("build", "Ingest a stream into a universal sum structure file");
  std::string build_in, build_out, build_profile = "relaxed", build_at;
  SumConfig bc;
  std::uint32_t build_replicas = 1;
  bool build_serial = false;
  build->add_option("stream", build_in, "Stream file or -")->required();
  build->add_option("--out,-o", build_out, "Structure file")->required();
  build->add_option("--universe,-n", bc.universe, "Universe size n")->required();
  build->add_option("--window,-N", bc.window, "Window length N")->required();
  build->add_option("--epsilon", bc.eps, "Accuracy the cores are built for");
  build->add_option("--profile", build_profile, "relaxed | paper")
      ->check(CLI::IsMember({"relaxed", "paper"}));
  build->add_option("--seed", bc.seed, "Root seed");
  build->add_option("--levels", bc.levels, "Subsampling levels (0 = ceil(log2 n) + 2)");
  build->add_option("--replicas,-R", build_replicas, "Independent structures for the median");
  build->add_option("--at", build_at, "Snapshot times, comma separated (default: last timestamp)");
  build->add_flag("--serial", build_serial, "Single-threaded reference ingestion");

  // query
  auto* query = app.add_subcommand("query", "Estimate sum G(m_i) from a structure file");
  std::string q_file, q_g;
  double q_eps = 0.3;
  Timestamp q_at = 0;
  query->add_option("structure", q_file, "Structure file")->required();
  query->add_option("--g", q_g, "G as NAME[:PARAMS], e.g. power:2")->required();
  query->add_option("--epsilon", q_eps, "Query accuracy");
  auto* q_at_opt = query->add_option("--at", q_at, "Snapshot time (default: latest)");

  // core-query
  auto* cq = app.add_subcommand("core-query", "Heavy set T of one level's universal core");
  std::string cq_file, cq_g;
  double cq_eps = 0.25;
  Timestamp cq_at = 0;
  std::uint32_t cq_level = 0, cq_replica = 0;
  cq->add_option("structure", cq_file, "Structure file")->required();
  cq->add_option("--g", cq_g, "G as NAME[:PARAMS]")->required();
  cq->add_option("--epsilon", cq_eps, "Query accuracy");
  auto* cq_at_opt = cq->add_option("--at", cq_at, "Snapshot time (default: latest)");
  cq->add_option("--level", cq_level, "Subsampling level (0 = whole stream)");
  cq->add_option("--replica", cq_replica, "Replica index");

  // oracle
  auto* orc = app.add_subcommand("oracle", "Exact window statistics");
  std::string o_in, o_g = "power:2", o_at;
  std::uint64_t o_universe = 0;
  Timestamp o_window = 0, o_every = 0;
  orc->add_option("stream", o_in, "Stream file or -")->required();
  orc->add_option("--universe,-n", o_universe, "Universe size n")->required();
  orc->add_option("--window,-N", o_window, "Window length N")->required();
  orc->add_option("--g", o_g, "G as NAME[:PARAMS]");
  orc->add_option("--at", o_at, "Times, comma separated (default: last timestamp)");
  orc->add_option("--every", o_every, "Also report every K-th timestamp from the first, plus the last");

  // probe
  auto* probe = app.add_subcommand("probe", "Grid-decide the tractability predicates for G");
  std::string p_g;
  ProbeGrid grid;
  bool p_universal = false;
  probe->add_option("--g", p_g, "G as NAME[:PARAMS]")->required();
  probe->add_flag("--universal", p_universal, "Report in universal mode");
  probe->add_option("--cap", grid.cap, "Largest t and r searched (C)");
  probe->add_option("--x-max", grid.x_max, "x, y range of predicate 1");
  probe->add_option("--jump-x-max", grid.jump_x_max, "x range of predicate 2");
  probe->add_option("--points-per-octave", grid.points_per_octave, "Grid density");
  probe->add_option("--n0-max", grid.n0_max, "Largest admissible N0");
  probe->add_option("--n1-max", grid.n1_max, "Largest admissible N1");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      Stream s;
      if (gen_kind == "uniform" || gen_kind == "zipf") {
        RandomStreamSpec spec;
        spec.universe = gen_universe;
        spec.length = gen_length;
        spec.per_tick = gen_tick;
        spec.seed = gen_seed;
        spec.zipf_s = gen_s;
        spec.distribution = gen_kind == "zipf" ? Distribution::kZipf : Distribution::kUniform;
        s = random_stream(spec);
      } else if (gen_kind == "planted") {
        s = planted_heavy(gen_universe, static_cast<ElementId>(gen_heavy_id), gen_heavy_freq,
                          gen_noise, gen_seed);
      } else {
        const auto g = GFunction::parse(gen_g);
        std::set<std::uint64_t> choice;
        if (!gen_choice.empty()) {
          for (const auto t : parse_times(gen_choice)) choice.insert(static_cast<std::uint64_t>(t));
        } else {
          const std::uint64_t picks = gen_x / local_jump(g, gen_eps, gen_x);
          std::vector<std::uint64_t> steps(gen_x);
          for (std::uint64_t i = 0; i < gen_x; ++i) steps[i] = i + 1;
          std::mt19937_64 rng(gen_seed);
          std::shuffle(steps.begin(), steps.end(), rng);
          choice.insert(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(picks));
        }
        s = lower_bound_family(gen_x, gen_eps, g, choice);
      }
      if (gen_out == "-") {
        write_stream(std::cout, s);
      } else {
        std::ofstream out(gen_out);
        if (!out) throw std::runtime_error("cannot open " + gen_out);
        write_stream(out, s);
      }
    } else if (build->parsed()) {
      const Stream s = load_stream(build_in, bc.universe);
      bc.profile = Profile::named(build_profile, bc.universe, bc.window);
      const auto file = build_structure(s, bc, build_replicas, parse_times(build_at),
                                        build_serial ? Execution::kSerial : Execution::kParallel);
      file.save(build_out);
      emit({{"structure", build_out},
            {"items", s.size()},
            {"replicas", build_replicas},
            {"levels", file.replicas.front().front().levels()},
            {"times", file.times},
            {"profile", build_profile},
            {"bytes", file.serialize().size()}});
    } else if (query->parsed()) {
      const auto file = StructureFile::load(q_file);
      const auto g = GFunction::parse(q_g);
      const Timestamp at = q_at_opt->count() ? q_at : file.times.back();
      const auto est = query_structure(file, g, q_eps, at);
      emit({{"time", at},
            {"g", g.name()},
            {"estimate", est.estimates.front()},
            {"replicas", est.estimates},
            {"median", est.median}});
    } else if (cq->parsed()) {
      const auto file = StructureFile::load(cq_file);
      const auto g = GFunction::parse(cq_g);
      const Timestamp at = cq_at_opt->count() ? cq_at : file.times.back();
      const auto t = std::find(file.times.begin(), file.times.end(), at);
      if (t == file.times.end()) throw std::invalid_argument("no snapshot at time " + std::to_string(at));
      if (cq_replica >= file.replicas.size()) throw std::invalid_argument("no such replica");
      const auto& snap = file.replicas[cq_replica][static_cast<std::size_t>(t - file.times.begin())];
      if (cq_level >= snap.levels()) throw std::invalid_argument("no such level");
      const auto result = snap.cores[cq_level].query(g, cq_eps);
      json pairs = json::array();
      for (const auto& p : result.pairs) pairs.push_back({{"index", p.index}, {"value", p.value}});
      emit({{"time", at}, {"g", g.name()}, {"level", cq_level}, {"replica", cq_replica}, {"pairs", pairs}});
    } else if (orc->parsed()) {
      const Stream s = load_stream(o_in, o_universe);
      const auto g = GFunction::parse(o_g);
      ExactWindow w(o_universe, o_window);
      w.ingest(s);
      std::set<Timestamp> times;
      for (const auto t : parse_times(o_at)) times.insert(t);
      if (o_every > 0 && !s.empty())
        for (Timestamp t = s.front().timestamp; t <= s.back().timestamp; t += o_every) times.insert(t);
      if ((times.empty() || o_every > 0) && !s.empty()) times.insert(s.back().timestamp);
      for (const auto t : times) {
        emit({{"time", t},
              {"g", g.name()},
              {"exact", w.exact_gsum(t, g)},
              {"f2", w.exact_f2(t)},
              {"distinct", w.distinct(t)},
              {"total", w.total(t)}});
      }
    } else if (probe->parsed()) {
      const auto g = GFunction::parse(p_g);
      emit(probe_json(probe_tractability(g, p_universal, grid), grid));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
