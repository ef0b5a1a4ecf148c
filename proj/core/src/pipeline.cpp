// Copyright 2026 The ch2pp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ch2pp/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <set>

#include <json.hpp>

#include "ch2pp/blobs.hpp"
#include "ch2pp/error.hpp"
#include "ch2pp/floodfill.hpp"
#include "ch2pp/partitioner.hpp"
#include "ch2pp/random.hpp"

namespace ch2pp {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Runs fn, prefixing any library error with the phase name while keeping its
// type (and therefore its exit code).
template <typename Fn>
auto in_phase(const char* phase, Fn&& fn) -> decltype(fn()) {
  const std::string prefix = std::string("phase ") + phase + ": ";
  try {
    return fn();
  } catch (const UsageError& e) {
    throw UsageError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  } catch (const InvariantError& e) {
    throw InvariantError(prefix + e.what());
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw InvariantError(prefix + e.what());
  }
}

json params_json(const ResolvedParams& p) {
  return {{"n", p.n},
          {"d", p.d},
          {"r", p.r},
          {"log_base", std::string(to_string(p.log_base))},
          {"k", p.k},
          {"t", p.t},
          {"l", p.l},
          {"search_k", p.search_k},
          {"m", p.m},
          {"imbalance", p.imbalance},
          {"alpha", p.alpha},
          {"beta", p.beta},
          {"m_fact", p.m_fact},
          {"seed", p.seed},
          {"normalize", std::string(to_string(p.normalize))}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

Dataset load_dataset(const RunConfig& config) {
  if (config.dataset.empty()) throw UsageError("no dataset given");
  Dataset data = load_csv(config.dataset, config.label_column);
  data.points = normalize(data.points, config.normalize);
  return data;
}

void write_artifacts(const std::filesystem::path& dir, RunReport& report) {
  std::filesystem::create_directories(dir);
  report.labels_path = dir / "labels.txt";
  write_labels(report.labels_path, report.labels);
  {
    std::ofstream out(dir / "dendrogram.tsv");
    report.dendrogram.write_tsv(out);
  }
  {
    std::ofstream out(dir / "dendrogram.json");
    out << report.dendrogram.summary_json() << '\n';
  }
  std::ofstream out(dir / "report.json");
  out << report.to_json() << '\n';
  if (!out) throw DataError("cannot write report to '" + dir.string() + "'");
}

}  // namespace

RunMode parse_run_mode(std::string_view text) {
  if (text == "cut") return RunMode::kCut;
  if (text == "eval") return RunMode::kEval;
  throw UsageError("unknown mode '" + std::string(text) + "' (cut|eval)");
}

std::string_view to_string(RunMode mode) { return mode == RunMode::kCut ? "cut" : "eval"; }

ResolvedParams resolve(const RunConfig& config, std::size_t n, std::size_t d) {
  if (n < 2) throw UsageError("clustering needs at least 2 points");
  ResolvedParams p;
  p.n = n;
  p.d = d;
  p.r = config.r;
  p.log_base = config.log_base;
  p.k = config.k ? *config.k : compute_k(n, config.r, config.log_base);
  if (p.k < 1 || p.k >= n) {
    throw UsageError("k = " + std::to_string(p.k) + " must lie in [1, n-1] for n = " +
                     std::to_string(n));
  }
  p.t = config.t.value_or(p.k);
  p.l = config.l.value_or(p.k);
  p.search_k = config.search_k.value_or(p.t * p.k);
  p.m = config.m.value_or(compute_m(n));
  if (p.t < 1 || p.l < 1) throw UsageError("t and l must be at least 1");
  if (p.m < 1 || p.m > n) throw UsageError("m must lie in [1, n]");
  if (!(config.imbalance >= 0.0)) throw UsageError("imbalance must be non-negative");
  if (!(config.alpha >= 0.0) || !(config.beta >= 0.0)) {
    throw UsageError("alpha and beta must be non-negative");
  }
  if (!(config.m_fact >= 1.0)) throw UsageError("m_fact must be at least 1");
  p.imbalance = config.imbalance;
  p.alpha = config.alpha;
  p.beta = config.beta;
  p.m_fact = config.m_fact;
  p.seed = config.seed;
  p.normalize = config.normalize;
  return p;
}

std::string RunReport::to_json() const {
  json j;
  j["mode"] = std::string(to_string(mode));
  j["params"] = params_json(params);
  j["times_ms"] = {{"graph", times.graph_ms},
                   {"partition", times.partition_ms},
                   {"floodfill", times.floodfill_ms},
                   {"merge", times.merge_ms},
                   {"total", times.total_ms}};
  j["graph_edges"] = graph_edges;
  j["initial_parts"] = initial_parts;
  j["floodfilled_parts"] = floodfilled_parts;
  j["dendrogram"] = json::parse(dendrogram.summary_json());
  j["clusters"] = clusters;
  j["labels"] = labels_path.empty() ? json(nullptr) : json(labels_path.string());
  j["metrics"] = {{"nmi", optional_json(nmi)}, {"acc", optional_json(acc)}};
  return j.dump(2);
}

RunReport run_cluster(const RunConfig& config, const Dataset& data) {
  const auto start = Clock::now();
  RunReport report;
  report.mode = config.mode;
  report.params = resolve(config, data.points.size(), data.points.dim());
  const ResolvedParams& p = report.params;
  if (config.mode == RunMode::kEval && !data.labels) {
    throw UsageError("eval mode needs ground-truth labels (--label-column)");
  }

  auto phase_start = Clock::now();
  const WeightedGraph graph = in_phase("graph", [&] {
    ForestParams forest{p.t, p.l, p.search_k, derive_seed(p.seed, "ann"), config.threads};
    return build_knn_graph(data.points, p.k, forest);
  });
  report.times.graph_ms = elapsed_ms(phase_start);
  report.graph_edges = graph.num_edges();

  PartitionerOptions part_options;
  part_options.imbalance = p.imbalance;

  phase_start = Clock::now();
  const PartitionVector parts = in_phase(
      "partition", [&] { return partition(graph, p.m, part_options, derive_seed(p.seed, "partition")); });
  report.times.partition_ms = elapsed_ms(phase_start);
  report.initial_parts = part_count(parts);

  phase_start = Clock::now();
  const PartitionVector filled =
      in_phase("floodfill", [&] { return split_disconnected(graph, parts); });
  report.times.floodfill_ms = elapsed_ms(phase_start);
  report.floodfilled_parts = part_count(filled);

  phase_start = Clock::now();
  report.dendrogram = in_phase("merge", [&] {
    MergeParams merge;
    merge.alpha = p.alpha;
    merge.beta = p.beta;
    merge.m_fact = p.m_fact;
    merge.bisect = part_options;
    merge.seed = derive_seed(p.seed, "merge");
    std::optional<MergeEvaluation> evaluation;
    if (config.mode == RunMode::kEval) evaluation = MergeEvaluation{*data.labels, config.metric};
    return merge_all(graph, filled, merge, evaluation, &data.points);
  });
  report.times.merge_ms = elapsed_ms(phase_start);

  const Dendrogram& dendrogram = report.dendrogram;
  if (config.mode == RunMode::kEval) {
    report.labels = dendrogram.labels_after(*dendrogram.best_step);
  } else {
    if (config.clusters < 1 || config.clusters > dendrogram.initial_parts) {
      throw UsageError("cannot cut into " + std::to_string(config.clusters) +
                       " clusters: the dendrogram starts from " +
                       std::to_string(dendrogram.initial_parts) + " parts");
    }
    report.labels = cut(dendrogram, config.clusters);
  }
  report.clusters = part_count(report.labels);
  if (data.labels) {
    report.nmi = nmi(*data.labels, report.labels);
    report.acc = acc(*data.labels, report.labels);
  }
  report.times.total_ms = elapsed_ms(start);
  if (!config.output.empty()) write_artifacts(config.output, report);
  return report;
}

RunReport run_cluster(const RunConfig& config) { return run_cluster(config, load_dataset(config)); }

std::string SweepReport::to_json() const {
  json j;
  j["metric"] = std::string(to_string(metric));
  j["best"] = best;
  json grid = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    grid.push_back({{"r", row.r},
                    {"log_base", std::string(to_string(row.log_base))},
                    {"k", row.k},
                    {"seed", row.seed},
                    {"metric", row.metric},
                    {"best_step", row.report.dendrogram.best_step
                                      ? json(*row.report.dendrogram.best_step)
                                      : json(nullptr)},
                    {"clusters", row.report.clusters},
                    {"duplicate_of", row.duplicate_of ? json(*row.duplicate_of) : json(nullptr)},
                    {"total_ms", row.report.times.total_ms}});
  }
  j["grid"] = std::move(grid);
  if (!rows.empty()) j["best_report"] = json::parse(rows[best].report.to_json());
  return j.dump(2);
}

SweepReport run_sweep(const RunConfig& config, const Dataset& data) {
  if (!data.labels) throw UsageError("sweep needs ground-truth labels (--label-column)");
  static constexpr int kScales[] = {1, 2, 4, 8};
  static constexpr LogBase kBases[] = {LogBase::kE, LogBase::kTen, LogBase::kTwo};

  SweepReport sweep;
  sweep.metric = config.metric;
  std::vector<RunConfig> configs;
  for (int r : kScales) {
    for (LogBase base : kBases) {
      RunConfig c = config;
      c.r = r;
      c.log_base = base;
      c.k.reset();
      c.mode = RunMode::kEval;
      c.output.clear();
      c.threads = 1;
      c.seed = derive_seed(config.seed, "sweep/r=" + std::to_string(r) + "/base=" +
                                            std::string(to_string(base)));
      SweepRow row;
      row.r = r;
      row.log_base = base;
      row.k = compute_k(data.points.size(), r, base);
      row.seed = c.seed;
      for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
        if (sweep.rows[i].k == row.k) {
          row.duplicate_of = i;
          break;
        }
      }
      sweep.rows.push_back(std::move(row));
      configs.push_back(std::move(c));
    }
  }

  // Rows are write-once slots, so completion order never affects the report.
  const unsigned jobs = std::max(1u, config.threads);
  std::size_t next = 0;
  while (next < configs.size()) {
    std::vector<std::future<RunReport>> batch;
    for (unsigned j = 0; j < jobs && next + j < configs.size(); ++j) {
      const RunConfig& c = configs[next + j];
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                 [&c, &data] { return run_cluster(c, data); }));
    }
    for (auto& f : batch) {
      auto& row = sweep.rows[next++];
      row.report = f.get();
      row.metric = row.report.dendrogram.metric_by_step[*row.report.dendrogram.best_step];
    }
  }
  for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
    if (sweep.rows[i].metric > sweep.rows[sweep.best].metric) sweep.best = i;
  }

  if (!config.output.empty()) {
    write_artifacts(config.output, sweep.rows[sweep.best].report);
    std::ofstream out(config.output / "sweep.json");
    out << sweep.to_json() << '\n';
  }
  return sweep;
}

SweepReport run_sweep(const RunConfig& config) { return run_sweep(config, load_dataset(config)); }

std::string RecallReport::to_json() const {
  json j;
  j["params"] = params_json(params);
  j["recall"] = recall;
  j["times_ms"] = {{"forest", forest_ms}, {"approx_query", approx_query_ms}, {"exact", exact_ms}};
  j["warning"] = warning ? json(*warning) : json(nullptr);
  return j.dump(2);
}

RecallReport run_recall(const RunConfig& config, const Dataset& data) {
  constexpr std::size_t kHardLimit = 100000;
  constexpr std::size_t kWarnLimit = 20000;
  RecallReport report;
  report.params = resolve(config, data.points.size(), data.points.dim());
  const auto& p = report.params;
  if (p.n > kHardLimit && !config.force) {
    throw UsageError("exact oracle over n = " + std::to_string(p.n) +
                     " points exceeds the 100000 guard; pass --force to run anyway");
  }
  if (p.n > kWarnLimit) {
    report.warning = "exact oracle is O(n^2 d); n = " + std::to_string(p.n) + " will be slow";
  }
  auto start = Clock::now();
  const RPForest forest =
      RPForest::build(data.points, p.t, p.l, derive_seed(p.seed, "ann"), config.threads);
  report.forest_ms = elapsed_ms(start);
  start = Clock::now();
  const NeighborLists approx = approximate_neighbors(forest, p.k, p.search_k, config.threads);
  report.approx_query_ms = elapsed_ms(start);
  start = Clock::now();
  const NeighborLists exact = exact_neighbors(data.points, p.k);
  report.exact_ms = elapsed_ms(start);
  report.recall = recall(approx, exact, p.k);
  return report;
}

RecallReport run_recall(const RunConfig& config) { return run_recall(config, load_dataset(config)); }

std::string ScalingReport::to_json() const {
  json j;
  j["dim"] = config.dim;
  j["centers"] = config.centers;
  j["k"] = config.k;
  j["repeats"] = config.repeats;
  j["seed"] = config.seed;
  json rows_json = json::array();
  for (const auto& row : rows) {
    rows_json.push_back({{"n", row.n},
                         {"graph_ms", row.graph_ms},
                         {"pipeline_ms", row.pipeline_ms},
                         {"graph_ratio", optional_json(row.graph_ratio)},
                         {"pipeline_ratio", optional_json(row.pipeline_ratio)}});
  }
  j["rows"] = std::move(rows_json);
  return j.dump(2);
}

ScalingReport run_scaling(const ScalingConfig& config) {
  if (config.repeats < 1) throw UsageError("repeats must be at least 1");
  ScalingReport report;
  report.config = config;
  for (std::size_t n : config.sizes) {
    const Dataset data = make_blobs({n, config.dim, config.centers, 10.0, 1.0,
                                     derive_seed(config.seed, static_cast<std::uint64_t>(n))});
    RunConfig run;
    run.k = config.k;
    run.seed = config.seed;
    run.mode = RunMode::kCut;
    run.clusters = config.centers;
    run.threads = config.threads;
    const ResolvedParams p = resolve(run, n, config.dim);

    std::vector<double> graph_ms;
    std::vector<double> pipeline_ms;
    for (int rep = 0; rep < config.repeats; ++rep) {
      auto start = Clock::now();
      const WeightedGraph g = build_knn_graph(
          data.points, p.k, {p.t, p.l, p.search_k, derive_seed(p.seed, "ann"), config.threads});
      graph_ms.push_back(elapsed_ms(start));
      start = Clock::now();
      run_cluster(run, data);
      pipeline_ms.push_back(elapsed_ms(start));
    }
    auto median = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      return v[v.size() / 2];
    };
    ScalingRow row{n, median(graph_ms), median(pipeline_ms), std::nullopt, std::nullopt};
    if (!report.rows.empty()) {
      row.graph_ratio = row.graph_ms / report.rows.back().graph_ms;
      row.pipeline_ratio = row.pipeline_ms / report.rows.back().pipeline_ms;
    }
    report.rows.push_back(row);
  }
  return report;
}

std::string MetricsReport::to_json() const {
  json j;
  j["nmi"] = nmi;
  j["acc"] = acc;
  j["n"] = n;
  j["K_true"] = k_true;
  j["K_pred"] = k_pred;
  return j.dump(2);
}

MetricsReport compare_labels(std::span<const int> truth, std::span<const int> predicted) {
  MetricsReport report;
  report.nmi = nmi(truth, predicted);
  report.acc = acc(truth, predicted);
  report.n = truth.size();
  report.k_true = std::set<int>(truth.begin(), truth.end()).size();
  report.k_pred = std::set<int>(predicted.begin(), predicted.end()).size();
  return report;
}

}  // namespace ch2pp
