#pragma once

// Command-line front end. Kept in a header so the test suite can drive it
// in-process.

#include "silfs/benchmark.hpp"
#include "silfs/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <boost/version.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace silfs::cli {

using nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kDataError = 3,
  kNumericalFailure = 4,
  kNotConverged = 5,
};

/// A flag combination or value the command cannot use.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string command;
  std::string input;
  std::string output;
  std::string format = "json";
  std::string solver = "l2-ccd";

  std::optional<int> k;
  std::vector<int> k_grid;
  std::vector<double> lambda1;
  std::vector<double> lambda2;
  std::optional<int> max_iter;
  std::optional<int> r;
  bool r_auto = false;
  int r_star = 0;
  double c_np = 0.0;

  std::uint64_t seed = 1;
  int reps = 1;
  std::string scenario = "A";
  double a = 3.0;
  int n = 100;
  int p = 50;
  int true_r = 4;
  int s = 5;
  double rho = 0.9;
  std::vector<std::string> methods{"l2"};
  bool timing = false;
};

inline ordered_json to_json(const Vector& v) { return to_std(v); }

inline ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["command"] = c.command;
  if (!c.input.empty()) j["input"] = c.input;
  j["format"] = c.format;
  if (c.command == "fit" || c.command == "select" || c.command == "bench") {
    j["solver"] = c.solver;
    if (c.k) j["k"] = *c.k;
    if (!c.k_grid.empty()) j["k_grid"] = c.k_grid;
    if (!c.lambda1.empty()) j["lambda1"] = c.lambda1;
    if (!c.lambda2.empty()) j["lambda2"] = c.lambda2;
    if (c.max_iter) j["max_iter"] = *c.max_iter;
  }
  if (c.command != "simulate") {
    if (c.r) j["r"] = *c.r;
    j["r_auto"] = c.r_auto;
    j["r_star"] = c.r_star;
    j["c_np"] = c.c_np;
  }
  if (c.command == "simulate" || c.command == "bench") {
    j["scenario"] = c.scenario;
    j["seed"] = c.seed;
    j["reps"] = c.reps;
    j["n"] = c.n;
    j["p"] = c.p;
    if (c.scenario == "A" || c.scenario == "B") {
      j["a"] = c.a;
      j["true_r"] = c.true_r;
    } else if (c.scenario == "collinear") {
      j["s"] = c.s;
    } else if (c.scenario == "toy") {
      j["rho"] = c.rho;
    }
  }
  if (c.command == "bench") {
    j["methods"] = c.methods;
    j["timing"] = c.timing;
  }
  return j;
}

inline ordered_json provenance(const RunConfig& c) {
  ordered_json j;
  j["tool"] = "silfs";
  j["version"] = kVersion;
  j["config"] = to_json(c);
  j["seed"] = c.seed;
  ordered_json v;
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
               "." + std::to_string(EIGEN_MINOR_VERSION);
  v["boost"] = std::to_string(BOOST_VERSION / 100000) + "." +
               std::to_string(BOOST_VERSION / 100 % 1000);
  v["cli11"] = CLI11_VERSION;
  v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  v["prng"] = "mt19937_64";
  j["versions"] = v;
  return j;
}

/// Output sink: one JSON document (file or stdout), or a directory of CSV
/// tables plus summary.json.
class Emitter {
 public:
  Emitter(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {
    if (cfg.format == "csv") {
      if (cfg.output.empty()) throw ConfigError("--format csv needs --output DIR");
      std::filesystem::create_directories(cfg.output);
    } else if (cfg.format != "json") {
      throw ConfigError("--format must be csv or json, got \"" + cfg.format + "\"");
    }
  }

  bool csv() const { return cfg_.format == "csv"; }

  void table(const std::string& name, const std::vector<std::string>& header,
             const std::vector<std::vector<std::string>>& rows) {
    std::ofstream f(path(name + ".csv"));
    if (!f) throw DataError("cannot write " + path(name + ".csv"));
    for (std::size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
    f << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << row[i];
      f << '\n';
    }
  }

  void dataset(const std::string& name, const Dataset& data) {
    std::ofstream f(path(name + ".csv"));
    if (!f) throw DataError("cannot write " + path(name + ".csv"));
    write_dataset_csv(f, data);
  }

  /// Writes the JSON document (format json) or summary.json (format csv).
  void document(ordered_json body) {
    ordered_json doc;
    doc["provenance"] = provenance(cfg_);
    for (auto& [key, value] : body.items()) doc[key] = value;
    const std::string text = doc.dump(2) + "\n";
    if (csv()) {
      write_file(path("summary.json"), text);
    } else if (cfg_.output.empty()) {
      out_ << text;
    } else {
      const auto parent = std::filesystem::path(cfg_.output).parent_path();
      if (!parent.empty()) std::filesystem::create_directories(parent);
      write_file(cfg_.output, text);
    }
  }

 private:
  std::string path(const std::string& file) const {
    return (std::filesystem::path(cfg_.output) / file).string();
  }

  static void write_file(const std::string& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw DataError("cannot write " + p);
    f << text;
  }

  const RunConfig& cfg_;
  std::ostream& out_;
};

inline std::vector<std::string> column(const Vector& v) {
  std::vector<std::string> out;
  for (Index i = 0; i < v.size(); ++i) out.push_back(format_double(v[i]));
  return out;
}

inline std::vector<std::vector<std::string>> indexed_rows(const Vector& v) {
  std::vector<std::vector<std::string>> rows;
  for (Index i = 0; i < v.size(); ++i) rows.push_back({std::to_string(i + 1), format_double(v[i])});
  return rows;
}

inline Distance parse_solver(const std::string& s) {
  if (s == "l2-ccd") return Distance::squared;
  if (s == "l1-admm") return Distance::absolute;
  throw ConfigError("--solver must be l2-ccd or l1-admm, got \"" + s + "\"");
}

/// Pipeline settings shared by fit, select and bench.
inline PipelineConfig pipeline_config(const RunConfig& c) {
  PipelineConfig p;
  p.solver.distance = parse_solver(c.solver);
  if (c.r && c.r_auto) throw ConfigError("--r and --r-auto are mutually exclusive");
  if (c.r) {
    if (*c.r < 0) throw ConfigError("--r must be nonnegative");
    if (*c.r == 0) {
      p.factor_mode = FactorMode::none;
    } else {
      p.factor_mode = FactorMode::fixed;
      p.num_factors = *c.r;
    }
  } else {
    p.factor_mode = FactorMode::automatic;
  }
  if (c.r_star < 0) throw ConfigError("--r-star must be nonnegative");
  if (c.c_np < 0.0) throw ConfigError("--c-np must be nonnegative");
  p.r_star = c.r_star;
  p.c_np = c.c_np;

  if (c.k && !c.k_grid.empty()) throw ConfigError("--k and --k-grid are mutually exclusive");
  if (c.k) {
    if (*c.k < 1) throw ConfigError("--k must be at least 1");
    p.fixed_k = *c.k;
  }
  if (!c.k_grid.empty()) {
    p.k_grid.clear();
    for (int k : c.k_grid) {
      if (k < 1) throw ConfigError("--k-grid entries must be at least 1");
      p.k_grid.push_back(k);
    }
  }
  for (double l : c.lambda1) {
    if (!(l >= 0.0)) throw ConfigError("--lambda1 values must be nonnegative");
  }
  for (double l : c.lambda2) {
    if (!(l >= 0.0)) throw ConfigError("--lambda2 values must be nonnegative");
  }
  if (c.max_iter) {
    if (*c.max_iter < 1) throw ConfigError("--max-iter must be at least 1");
    p.solver.ccd_max_sweeps = *c.max_iter;
    p.solver.max_outer = *c.max_iter;
  }
  if (c.lambda1.size() == 1 && c.lambda2.size() == 1) {
    p.fixed_lambdas = std::make_pair(c.lambda1.front(), c.lambda2.front());
  } else {
    if (!c.lambda1.empty()) p.lambda1_grid = c.lambda1;
    if (!c.lambda2.empty()) p.lambda2_absolute = c.lambda2;
  }
  return p;
}

inline ScenarioSpec scenario_spec(const RunConfig& c) {
  ScenarioSpec s;
  if (c.scenario == "A") {
    s.kind = ScenarioKind::A;
  } else if (c.scenario == "B") {
    s.kind = ScenarioKind::B;
  } else if (c.scenario == "collinear") {
    s.kind = ScenarioKind::collinear;
  } else if (c.scenario == "toy") {
    s.kind = ScenarioKind::toy;
  } else {
    throw ConfigError("--scenario must be A, B, collinear or toy, got \"" + c.scenario + "\"");
  }
  if (c.n < 2 || c.p < 1) throw ConfigError("--n must be at least 2 and --p at least 1");
  s.a = c.a;
  s.n = c.n;
  s.p = c.p;
  s.r = c.true_r;
  s.s = c.s;
  s.rho = c.rho;
  return s;
}

inline Dataset load_input(const RunConfig& c) {
  if (c.input.empty()) throw ConfigError("--input is required for " + c.command);
  return ingest_csv(c.input);
}

inline ordered_json fit_json(const SilfsFit& fit) {
  ordered_json j;
  j["k"] = fit.k();
  j["lambda1"] = fit.lambda1;
  j["lambda2"] = fit.lambda2;
  j["distance"] = to_string(fit.distance);
  j["converged"] = fit.converged;
  j["outer_iters"] = fit.outer_iters;
  j["total_inner_iters"] = fit.total_inner_iters;
  j["alpha"] = to_json(fit.alpha_hat);
  j["gamma"] = to_json(fit.gamma_hat);
  j["theta"] = to_json(fit.theta_hat);
  j["beta"] = to_json(fit.beta_hat);
  j["labels"] = fit.labels;
  j["objective_trace"] = fit.objective_trace;
  return j;
}

inline ordered_json selection_json(const PipelineResult& res) {
  const SelectionReport& s = res.selection;
  ordered_json j;
  j["num_factors"] = res.num_factors;
  j["ridge_lambda"] = res.lambda_star;
  j["lambda_max"] = res.lambda_max;
  j["solver_distance"] = to_string(s.solver_distance);
  j["k_grid"] = s.k_grid;
  j["bic_values"] = s.bic_values;
  j["bic_lambda2"] = s.k_lambda2;
  j["probe_lambda1"] = s.probe_lambda1;
  j["probe_lambda2_grid"] = s.probe_lambda2;
  j["k_hat"] = s.k_hat;
  ordered_json grid = ordered_json::array();
  for (std::size_t i = 0; i < s.lambda_grid.size(); ++i) {
    grid.push_back({{"lambda1", s.lambda_grid[i].first},
                    {"lambda2", s.lambda_grid[i].second},
                    {"gcv", s.gcv_values[i]}});
  }
  j["gcv_grid"] = grid;
  j["lambda1_hat"] = s.lambda1_hat;
  j["lambda2_hat"] = s.lambda2_hat;
  return j;
}

inline int cmd_fit(const RunConfig& c, std::ostream& out) {
  const Dataset data = load_input(c);
  const PipelineResult res = run_pipeline(data, pipeline_config(c));
  Emitter emit(c, out);
  ordered_json body;
  body["n"] = data.n();
  body["p"] = data.p();
  body["num_factors"] = res.num_factors;
  body["fit"] = fit_json(res.fit);
  if (emit.csv()) {
    const SilfsFit& f = res.fit;
    emit.table("alpha", {"i", "alpha"}, indexed_rows(f.alpha_hat));
    emit.table("gamma", {"k", "gamma"}, indexed_rows(f.gamma_hat));
    emit.table("theta", {"j", "theta"}, indexed_rows(f.theta_hat));
    emit.table("beta", {"j", "beta"}, indexed_rows(f.beta_hat));
    std::vector<std::vector<std::string>> labels;
    for (std::size_t i = 0; i < f.labels.size(); ++i) {
      labels.push_back({std::to_string(i + 1), std::to_string(f.labels[i])});
    }
    emit.table("labels", {"i", "label"}, labels);
    emit.table("trace", {"iteration", "objective"}, indexed_rows(to_vector(f.objective_trace)));
    body["fit"] = {{"k", f.k()}, {"lambda1", f.lambda1}, {"lambda2", f.lambda2},
                   {"converged", f.converged}, {"outer_iters", f.outer_iters}};
  }
  emit.document(body);
  return res.fit.converged ? kOk : kNotConverged;
}

inline int cmd_select(const RunConfig& c, std::ostream& out) {
  const Dataset data = load_input(c);
  const PipelineResult res = run_pipeline(data, pipeline_config(c));
  Emitter emit(c, out);
  ordered_json body;
  body["selection"] = selection_json(res);
  if (emit.csv()) {
    std::vector<std::vector<std::string>> bic_rows;
    const SelectionReport& s = res.selection;
    for (std::size_t i = 0; i < s.bic_values.size(); ++i) {
      bic_rows.push_back({std::to_string(s.k_grid[i]), format_double(s.bic_values[i]),
                          format_double(s.k_lambda2[i])});
    }
    emit.table("bic", {"k", "bic", "lambda2"}, bic_rows);
    std::vector<std::vector<std::string>> gcv_rows;
    for (std::size_t i = 0; i < s.gcv_values.size(); ++i) {
      gcv_rows.push_back({format_double(s.lambda_grid[i].first),
                          format_double(s.lambda_grid[i].second), format_double(s.gcv_values[i])});
    }
    emit.table("gcv", {"lambda1", "lambda2", "gcv"}, gcv_rows);
    body["selection"].erase("gcv_grid");
  }
  emit.document(body);
  return res.fit.converged ? kOk : kNotConverged;
}

inline ordered_json truth_json(const SyntheticDataset& d) {
  ordered_json j;
  j["seed"] = d.seed;
  j["generator"] = d.generator_tag;
  j["true_k"] = d.true_k;
  j["alpha"] = to_json(d.true_alpha);
  j["beta"] = to_json(d.true_beta);
  j["labels"] = d.true_labels;
  return j;
}

inline int cmd_simulate(const RunConfig& c, std::ostream& out) {
  if (c.reps < 1) throw ConfigError("--reps must be at least 1");
  const ScenarioSpec spec = scenario_spec(c);
  Emitter emit(c, out);
  ordered_json sets = ordered_json::array();
  for (int i = 0; i < c.reps; ++i) {
    const SyntheticDataset d = spec.generate(c.seed + static_cast<std::uint64_t>(i));
    ordered_json t = truth_json(d);
    const std::string name = "data_seed" + std::to_string(d.seed);
    if (emit.csv()) {
      emit.dataset(name, d.dataset);
      t["file"] = name + ".csv";
    } else {
      t["y"] = to_json(d.dataset.response);
      ordered_json x = ordered_json::array();
      for (Index r = 0; r < d.dataset.n(); ++r) x.push_back(to_json(d.dataset.design.row(r).transpose()));
      t["x"] = x;
    }
    sets.push_back(t);
  }
  ordered_json body;
  body["datasets"] = sets;
  emit.document(body);
  return kOk;
}

inline std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& m : names) {
    if (m == "l1") {
      out.push_back(Method::silfs_l1);
    } else if (m == "l2") {
      out.push_back(Method::silfs_l2);
    } else if (m == "scar") {
      out.push_back(Method::s_car);
    } else {
      throw ConfigError("--methods entries must be l1, l2 or scar, got \"" + m + "\"");
    }
  }
  if (out.empty()) throw ConfigError("--methods must name at least one method");
  return out;
}

inline int cmd_bench(const RunConfig& c, std::ostream& out) {
  if (c.reps < 1) throw ConfigError("--reps must be at least 1");
  BenchmarkConfig b;
  b.scenario = scenario_spec(c);
  b.reps = c.reps;
  b.seed0 = c.seed;
  b.methods = parse_methods(c.methods);
  b.pipeline = pipeline_config(c);
  const std::vector<MetricsReport> reports = run_benchmark(b);
  const Index true_k = b.scenario.generate(b.seed0).true_k;

  Emitter emit(c, out);
  ordered_json rows = ordered_json::array();
  std::vector<std::vector<std::string>> table;
  std::vector<std::vector<std::string>> reps_table;
  for (const MetricsReport& m : reports) {
    const std::string freq = std::to_string(m.over_freq) + "|" + std::to_string(m.under_freq);
    ordered_json row;
    row["method"] = m.method;
    row["RMSE_alpha"] = m.rmse_alpha;
    row["RMSE_beta"] = m.rmse_beta;
    row["K_hat_mean"] = m.k_hat_mean;
    row["Freq"] = freq;
    row["RI"] = m.rand_index;
    row["Sensitivity"] = m.sensitivity;
    row["Specificity"] = m.specificity;
    row["reps"] = m.reps;
    row["failures"] = m.failures;
    if (c.timing) row["wall_time_ms"] = m.wall_time_ms;
    std::vector<std::string> line{m.method, format_double(m.rmse_alpha), format_double(m.rmse_beta),
                                  format_double(m.k_hat_mean), freq, format_double(m.rand_index),
                                  format_double(m.sensitivity), format_double(m.specificity),
                                  std::to_string(m.failures)};
    if (c.timing) line.push_back(format_double(m.wall_time_ms));
    table.push_back(line);

    ordered_json recs = ordered_json::array();
    for (const ReplicationRecord& r : m.records) {
      ordered_json rec;
      rec["rep"] = r.rep;
      rec["seed"] = r.seed;
      rec["failed"] = r.failed;
      if (r.failed) {
        rec["error"] = r.error;
      } else {
        rec["k_hat"] = r.k_hat;
        rec["num_factors"] = r.num_factors;
        rec["RI"] = r.rand_index;
        rec["Sensitivity"] = r.sensitivity;
        rec["Specificity"] = r.specificity;
        rec["lambda1"] = r.lambda1_hat;
        rec["lambda2"] = r.lambda2_hat;
      }
      if (c.timing) rec["wall_time_ms"] = r.wall_time_ms;
      reps_table.push_back({m.method, std::to_string(r.rep), std::to_string(r.seed),
                            r.failed ? "1" : "0", std::to_string(r.k_hat),
                            format_double(r.rand_index), format_double(r.sensitivity),
                            format_double(r.specificity)});
      recs.push_back(rec);
    }
    row["replications"] = recs;
    rows.push_back(row);
  }
  ordered_json body;
  body["true_k"] = true_k;
  body["methods"] = rows;
  if (emit.csv()) {
    std::vector<std::string> header{"method", "RMSE_alpha", "RMSE_beta", "K_hat_mean", "Freq",
                                    "RI", "Sensitivity", "Specificity", "failures"};
    if (c.timing) header.push_back("wall_time_ms");
    emit.table("table", header, table);
    emit.table("replications",
               {"method", "rep", "seed", "failed", "k_hat", "RI", "Sensitivity", "Specificity"},
               reps_table);
    for (auto& row : body["methods"]) row.erase("replications");
  }
  emit.document(body);
  return kOk;
}

inline int cmd_factors(const RunConfig& c, std::ostream& out) {
  const Dataset data = load_input(c);
  if (c.r) throw ConfigError("factors selects r itself; --r is not accepted");
  const Index r_star = c.r_star > 0 ? c.r_star : default_r_star(data);
  const Index r_hat = select_num_factors(data, r_star, c.c_np);
  const Vector ev = gram_eigenvalues(data.design);
  const Vector share = explained_variance(ev);
  Emitter emit(c, out);
  ordered_json body;
  body["n"] = data.n();
  body["p"] = data.p();
  body["r_star"] = r_star;
  body["r_hat"] = r_hat;
  if (emit.csv()) {
    std::vector<std::vector<std::string>> rows;
    double cum = 0.0;
    for (Index i = 0; i < ev.size(); ++i) {
      cum += share[i];
      rows.push_back({std::to_string(i + 1), format_double(ev[i]), format_double(share[i]),
                      format_double(cum)});
    }
    emit.table("eigenvalues", {"index", "eigenvalue", "explained", "cumulative"}, rows);
  } else {
    body["eigenvalues"] = to_json(ev);
    body["explained_variance"] = to_json(share);
  }
  emit.document(body);
  return kOk;
}

inline void report_error(std::ostream& err, int code, const std::string& kind,
                         const std::string& message) {
  ordered_json j;
  j["error"] = {{"code", code}, {"kind", kind}, {"message", message}};
  err << j.dump() << "\n";
}

/// Parses arguments, runs the command and returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  RunConfig c;
  CLI::App app{"Subgroup identification with latent factor structure"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  auto common = [&c](CLI::App* s) {
    s->add_option("--output", c.output, "Output file (json) or directory (csv)");
    s->add_option("--format", c.format, "json or csv")->capture_default_str();
  };
  auto factor_opts = [&c](CLI::App* s) {
    s->add_option("--r", c.r, "Number of factors (0 disables the factor step)");
    s->add_flag("--r-auto", c.r_auto, "Choose the number of factors by eigenvalue ratio");
    s->add_option("--r-star", c.r_star, "Largest factor count considered (0: default)");
    s->add_option("--c-np", c.c_np, "Shift added to eigenvalues in the ratio rule");
  };
  auto model_opts = [&c](CLI::App* s) {
    s->add_option("--solver", c.solver, "l2-ccd or l1-admm")->capture_default_str();
    s->add_option("--k", c.k, "Number of subgroups");
    s->add_option("--k-grid", c.k_grid, "Candidate subgroup counts")->delimiter(',');
    s->add_option("--lambda1", c.lambda1, "lambda1 value or grid")->delimiter(',');
    s->add_option("--lambda2", c.lambda2, "lambda2 value or grid")->delimiter(',');
    s->add_option("--max-iter", c.max_iter, "Cap on CCD sweeps and DC-ADMM outer steps");
  };
  auto scenario_opts = [&c](CLI::App* s) {
    s->add_option("--scenario", c.scenario, "A, B, collinear or toy")->capture_default_str();
    s->add_option("--seed", c.seed, "First seed")->capture_default_str();
    s->add_option("--reps", c.reps, "Replications")->capture_default_str();
    s->add_option("--a", c.a, "Intercept magnitude (A, B)")->capture_default_str();
    s->add_option("--n", c.n, "Sample size")->capture_default_str();
    s->add_option("--p", c.p, "Number of covariates")->capture_default_str();
    s->add_option("--true-r", c.true_r, "Generating factor count (A, B)")->capture_default_str();
    s->add_option("--s", c.s, "Spike count (collinear)")->capture_default_str();
    s->add_option("--rho", c.rho, "Equicorrelation (toy)")->capture_default_str();
  };

  CLI::App* fit = app.add_subcommand("fit", "Fit SILFS and write the estimates");
  CLI::App* select = app.add_subcommand("select", "Select K and (lambda1, lambda2)");
  CLI::App* simulate = app.add_subcommand("simulate", "Generate synthetic datasets");
  CLI::App* bench = app.add_subcommand("bench", "Run a replicated benchmark");
  CLI::App* factors = app.add_subcommand("factors", "Eigenvalue scree and factor count");
  for (CLI::App* s : {fit, select, factors}) {
    s->add_option("--input", c.input, "CSV with a \"y\" column followed by covariates");
  }
  for (CLI::App* s : {fit, select, simulate, bench, factors}) common(s);
  for (CLI::App* s : {fit, select, bench, factors}) factor_opts(s);
  for (CLI::App* s : {fit, select, bench}) model_opts(s);
  for (CLI::App* s : {simulate, bench}) scenario_opts(s);
  bench->add_option("--methods", c.methods, "Any of l1, l2, scar")->delimiter(',');
  bench->add_flag("--timing", c.timing, "Include wall-clock times in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, kConfigError, "config_error", e.what());
    return kConfigError;
  }
  c.command = app.get_subcommands().front()->get_name();

  try {
    if (c.command == "fit") return cmd_fit(c, out);
    if (c.command == "select") return cmd_select(c, out);
    if (c.command == "simulate") return cmd_simulate(c, out);
    if (c.command == "bench") return cmd_bench(c, out);
    return cmd_factors(c, out);
  } catch (const ConfigError& e) {
    report_error(err, kConfigError, "config_error", e.what());
    return kConfigError;
  } catch (const InvalidArgument& e) {
    report_error(err, kConfigError, "invalid_argument", e.what());
    return kConfigError;
  } catch (const DataError& e) {
    report_error(err, kDataError, "data_error", e.what());
    return kDataError;
  } catch (const SelectionFailure& e) {
    report_error(err, kNumericalFailure, "selection_failure", e.what());
    return kNumericalFailure;
  } catch (const NumericalFailure& e) {
    report_error(err, kNumericalFailure, "numerical_failure", e.what());
    return kNumericalFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    report_error(err, kDataError, "io_error", e.what());
    return kDataError;
  }
}

}  // namespace silfs::cli
