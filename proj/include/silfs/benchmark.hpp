#pragma once

// Multi-replication benchmarks over the synthetic scenarios.

#include "silfs/metrics.hpp"
#include "silfs/pipeline.hpp"
#include "silfs/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace silfs {

enum class Method { silfs_l1, silfs_l2, s_car };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::silfs_l1:
      return "SILFS-l1";
    case Method::silfs_l2:
      return "SILFS-l2";
    case Method::s_car:
      return "S-CAR";
  }
  return "?";
}

enum class ScenarioKind { A, B, collinear, toy };

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::A;
  double a = 3.0;    // A and B: intercept magnitude
  Index n = 100;
  Index p = 50;
  Index r = 4;       // A and B: number of true factors
  Index s = 5;       // collinear: number of spikes, 0 for the uncorrelated case
  double rho = 0.9;  // toy: equicorrelation

  SyntheticDataset generate(std::uint64_t seed) const {
    switch (kind) {
      case ScenarioKind::A:
        return generate_scenario_ab(Scenario::A, a, n, p, r, seed);
      case ScenarioKind::B:
        return generate_scenario_ab(Scenario::B, a, n, p, r, seed);
      case ScenarioKind::collinear:
        return generate_collinearity_case(s, n, p, seed);
      case ScenarioKind::toy:
        return generate_toy(rho, n, p, seed);
    }
    throw InvalidArgument("unknown scenario");
  }
};

struct BenchmarkConfig {
  ScenarioSpec scenario;
  int reps = 20;
  std::uint64_t seed0 = 1;
  std::vector<Method> methods{Method::silfs_l2};
  PipelineConfig pipeline;  // factor mode applies to the SILFS methods
  unsigned threads = 0;     // 0: hardware concurrency capped by SILFS_THREADS
};

struct ReplicationRecord {
  int rep = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  Index k_hat = 0;
  Index num_factors = 0;
  double rand_index = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double lambda1_hat = 0.0;
  double lambda2_hat = 0.0;
  Vector alpha_error;  // alpha_hat - alpha
  Vector beta_error;   // beta_hat - beta
  double wall_time_ms = 0.0;
};

struct MetricsReport {
  std::string method;
  int reps = 0;
  int failures = 0;
  double rmse_alpha = 0.0;
  double rmse_beta = 0.0;
  double rand_index = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double k_hat_mean = 0.0;
  int over_freq = 0;   // K_hat > K
  int under_freq = 0;  // K_hat < K
  double wall_time_ms = 0.0;  // mean per successful replication
  std::vector<ReplicationRecord> records;  // indexed by replication
};

/// Pipeline settings implied by a method on top of the shared base config.
inline PipelineConfig method_config(Method m, const PipelineConfig& base) {
  PipelineConfig cfg = base;
  switch (m) {
    case Method::silfs_l1:
      cfg.solver.distance = Distance::absolute;
      break;
    case Method::silfs_l2:
      cfg.solver.distance = Distance::squared;
      break;
    case Method::s_car:
      cfg.solver.distance = Distance::squared;
      cfg.factor_mode = FactorMode::none;
      break;
  }
  return cfg;
}

/// Worker count: `requested` if positive, otherwise hardware concurrency,
/// then capped by the SILFS_THREADS environment variable.
inline unsigned worker_count(unsigned requested) {
  unsigned n = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SILFS_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return std::max(1u, n);
}

inline ReplicationRecord run_replication(const SyntheticDataset& truth, const PipelineConfig& cfg) {
  ReplicationRecord rec;
  rec.seed = truth.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    const PipelineResult res = run_pipeline(truth.dataset, cfg);
    rec.k_hat = res.selection.k_hat;
    rec.num_factors = res.num_factors;
    rec.lambda1_hat = res.selection.lambda1_hat;
    rec.lambda2_hat = res.selection.lambda2_hat;
    rec.rand_index = rand_index(res.fit.labels, truth.true_labels);
    const SelectionRates rates = selection_metrics(res.fit.beta_hat, truth.true_beta);
    rec.sensitivity = rates.sensitivity;
    rec.specificity = rates.specificity;
    rec.alpha_error = res.fit.alpha_hat - truth.true_alpha;
    rec.beta_error = res.fit.beta_hat - truth.true_beta;
  } catch (const Error& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  rec.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

/// Aggregates successful replications. Failures count toward `failures` only.
inline MetricsReport aggregate(const std::string& method, Index true_k,
                               std::vector<ReplicationRecord> records) {
  MetricsReport rep;
  rep.method = method;
  rep.reps = static_cast<int>(records.size());
  std::vector<Vector> a_err, b_err, a_zero, b_zero;
  double ok = 0.0;
  for (const auto& r : records) {
    if (r.failed) {
      ++rep.failures;
      continue;
    }
    ok += 1.0;
    rep.rand_index += r.rand_index;
    rep.sensitivity += r.sensitivity;
    rep.specificity += r.specificity;
    rep.k_hat_mean += static_cast<double>(r.k_hat);
    rep.wall_time_ms += r.wall_time_ms;
    if (r.k_hat > true_k) ++rep.over_freq;
    if (r.k_hat < true_k) ++rep.under_freq;
    a_err.push_back(r.alpha_error);
    a_zero.push_back(Vector::Zero(r.alpha_error.size()));
    b_err.push_back(r.beta_error);
    b_zero.push_back(Vector::Zero(r.beta_error.size()));
  }
  if (ok > 0.0) {
    rep.rand_index /= ok;
    rep.sensitivity /= ok;
    rep.specificity /= ok;
    rep.k_hat_mean /= ok;
    rep.wall_time_ms /= ok;
    rep.rmse_alpha = pooled_rmse(a_err, a_zero);
    rep.rmse_beta = pooled_rmse(b_err, b_zero);
  }
  rep.records = std::move(records);
  return rep;
}

/// Runs every method on replications seeded seed0, ..., seed0 + reps - 1.
/// Replications are spread over worker threads and merged by index, so the
/// numbers do not depend on the worker count.
inline std::vector<MetricsReport> run_benchmark(const BenchmarkConfig& cfg) {
  if (cfg.reps < 1) throw InvalidArgument("run_benchmark: reps must be at least 1");
  if (cfg.methods.empty()) throw InvalidArgument("run_benchmark: no methods requested");
  const auto reps = static_cast<std::size_t>(cfg.reps);
  const std::size_t m = cfg.methods.size();
  std::vector<SyntheticDataset> data(reps);
  for (std::size_t i = 0; i < reps; ++i) data[i] = cfg.scenario.generate(cfg.seed0 + i);

  std::vector<PipelineConfig> method_cfgs;
  for (Method meth : cfg.methods) method_cfgs.push_back(method_config(meth, cfg.pipeline));

  std::vector<ReplicationRecord> records(reps * m);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t job = next++; job < records.size(); job = next++) {
      const std::size_t rep = job % reps;
      ReplicationRecord rec = run_replication(data[rep], method_cfgs[job / reps]);
      rec.rep = static_cast<int>(rep);
      records[job] = std::move(rec);
    }
  };
  const unsigned workers = std::min<unsigned>(worker_count(cfg.threads),
                                              static_cast<unsigned>(records.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::vector<MetricsReport> out;
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<ReplicationRecord> mine(records.begin() + static_cast<std::ptrdiff_t>(k * reps),
                                        records.begin() + static_cast<std::ptrdiff_t>((k + 1) * reps));
    out.push_back(aggregate(to_string(cfg.methods[k]), data.front().true_k, std::move(mine)));
  }
  return out;
}

}  // namespace silfs
