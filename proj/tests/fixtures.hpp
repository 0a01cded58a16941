#pragma once

// Shared instance builders for solver and selection tests.

#include "silfs/pipeline.hpp"
#include "silfs/simulate.hpp"

namespace fixture {

using namespace silfs;

/// Scenario data with its true-rank factor decomposition and a refined start.
struct Instance {
  SyntheticDataset truth;
  FactorDecomposition dec;
  double lambda_max = 0.0;
  RidgeInit ridge;                    // refined at 0.03 lambda_max
  std::vector<RidgeInit> candidates;  // refined at the pipeline's default levels
};

inline Instance scenario_instance(Scenario sc, double a, Index n, Index p, std::uint64_t seed) {
  Instance out;
  out.truth = generate_scenario_ab(sc, a, n, p, 4, seed);
  const Dataset& data = out.truth.dataset;
  out.dec = estimate_factors(data, 4);
  out.lambda_max = lambda_max(data, out.dec);
  const double lstar = select_ridge_lambda(data.response, out.dec.factors, default_ridge_grid(), 5);
  const RidgeInit base = ridge_init(data.response, out.dec.factors, lstar);
  out.ridge = refine_start(data, out.dec, base, 0.03 * out.lambda_max);
  for (double f : PipelineConfig{}.refine_fractions) {
    out.candidates.push_back(refine_start(data, out.dec, base, f * out.lambda_max));
  }
  return out;
}

inline SolverConfig solver(Distance d, double lambda1, double lambda2) {
  SolverConfig cfg;
  cfg.distance = d;
  cfg.lambda1 = lambda1;
  cfg.lambda2 = lambda2;
  return cfg;
}

}  // namespace fixture
