#pragma once

// End-to-end SILFS: factor step, ridge start, K by BIC, (lambda1, lambda2) by
// GCV, final fit.

#include "silfs/selection.hpp"

#include <limits>
#include <map>

namespace silfs {

enum class InitStrategy {
  ridge,    // alpha0 from the factor ridge regression
  refined,  // alpha0 with the factor part and a LASSO fit on U removed
};

enum class FactorMode {
  fixed,  // use `num_factors`
  automatic,  // eigenvalue-ratio rule with `r_star` and `c_np`
  none,   // r = 0, U = X (plain CAR)
};

struct PipelineConfig {
  FactorMode factor_mode = FactorMode::automatic;
  Index num_factors = 1;
  Index r_star = 0;  // 0 selects min(8, min(n, p) - 1)
  double c_np = 0.0;

  SolverConfig solver{};  // distance, tolerances; lambdas are overwritten by selection

  std::vector<Index> k_grid{1, 2, 3, 4, 5};
  std::optional<Index> fixed_k;  // skips BIC selection

  double probe_lambda1 = 1.0;
  std::vector<double> probe_lambda2_fractions = default_lambda2_fractions();  // of lambda_max

  std::vector<double> lambda1_grid = default_lambda1_grid();
  std::vector<double> lambda2_fractions = default_lambda2_fractions();
  std::vector<double> lambda2_absolute;  // replaces the fractions when nonempty
  std::optional<std::pair<double, double>> fixed_lambdas;  // skips GCV selection

  std::vector<double> ridge_grid = default_ridge_grid();
  int ridge_folds = 5;
  InitStrategy init = InitStrategy::refined;
  // LASSO levels of the refined starts, times lambda_max. For each K the
  // candidate reaching the lowest objective at (probe_lambda1,
  // start_lambda2_fraction * lambda_max) is used for every fit at that K.
  std::vector<double> refine_fractions{0.003, 0.01, 0.03, 0.1, 0.3};
  double start_lambda2_fraction = 0.03;
};

struct PipelineResult {
  FactorDecomposition decomposition;
  Index num_factors = 0;
  double lambda_star = 0.0;
  double lambda_max = 0.0;
  SelectionReport selection;
  SilfsFit fit;
};

inline FactorDecomposition decompose(const Dataset& data, const PipelineConfig& cfg) {
  switch (cfg.factor_mode) {
    case FactorMode::none:
      return no_factors(data);
    case FactorMode::fixed:
      return estimate_factors(data, cfg.num_factors);
    case FactorMode::automatic: {
      const Index r_star = cfg.r_star > 0 ? cfg.r_star : default_r_star(data);
      return estimate_factors(data, select_num_factors(data, r_star, cfg.c_np));
    }
  }
  throw InvalidArgument("unknown factor mode");
}

/// Replaces alpha0 by a partial residual that has the factor part and a
/// sparse idiosyncratic part removed: beta0 is the LASSO of Y on U after
/// projecting both off span(1, F), and alpha0 = (I - P_F)(Y - U beta0).
inline RidgeInit refine_start(const Dataset& data, const FactorDecomposition& dec,
                              const RidgeInit& ridge, double lambda2,
                              const LassoOptions& lasso = {}) {
  const Index n = data.n();
  Matrix basis(n, 1 + dec.r());
  basis.col(0).setOnes();
  if (dec.r() > 0) basis.rightCols(dec.r()) = dec.factors;
  const Eigen::ColPivHouseholderQR<Matrix> qr(basis);
  const Vector e = data.response - basis * qr.solve(data.response);
  const Matrix u = dec.idiosyncratic - basis * qr.solve(dec.idiosyncratic);
  const Vector beta0 = lasso_cd(u, e, lambda2, lasso).beta;

  RidgeInit out = ridge;
  const Vector partial = data.response - dec.idiosyncratic * beta0;
  out.theta0 = ccd_update_theta(partial, Vector::Zero(n), dec);
  out.alpha0 = partial - dec.factor_part(out.theta0);
  return out;
}

/// Among the candidate starts, the one whose fit at `reference` reaches the
/// lowest objective; the first candidate wins ties. Candidates whose fit
/// fails are skipped.
inline StartingPoint best_start(const Dataset& data, const FactorDecomposition& dec, Index k,
                                const SolverConfig& reference,
                                const std::vector<RidgeInit>& candidates) {
  if (candidates.empty()) throw InvalidArgument("best_start: no candidate starts");
  if (candidates.size() == 1) return make_start(candidates.front(), k, reference.distance);
  std::optional<StartingPoint> best;
  double best_z = std::numeric_limits<double>::infinity();
  for (const RidgeInit& c : candidates) {
    StartingPoint s = make_start(c, k, reference.distance);
    try {
      const SilfsFit fit = fit_silfs(data, dec, k, reference, s);
      if (fit.objective_trace.back() < best_z) {
        best_z = fit.objective_trace.back();
        best = std::move(s);
      }
    } catch (const Error&) {
    }
  }
  if (!best) return make_start(candidates.front(), k, reference.distance);
  return *best;
}

inline PipelineResult run_pipeline(const Dataset& data, const PipelineConfig& cfg) {
  data.validate();
  PipelineResult out;
  out.decomposition = decompose(data, cfg);
  const FactorDecomposition& dec = out.decomposition;
  out.num_factors = dec.r();

  out.lambda_star = select_ridge_lambda(data.response, dec.factors, cfg.ridge_grid, cfg.ridge_folds);
  RidgeInit ridge = ridge_init(data.response, dec.factors, out.lambda_star);
  out.lambda_max = lambda_max(data, dec);

  SelectionReport& rep = out.selection;
  rep.solver_distance = cfg.solver.distance;

  SolverConfig probe = cfg.solver;
  probe.lambda1 = cfg.probe_lambda1;
  rep.probe_lambda1 = probe.lambda1;
  for (double f : cfg.probe_lambda2_fractions) rep.probe_lambda2.push_back(f * out.lambda_max);
  std::vector<RidgeInit> candidates;
  if (cfg.init == InitStrategy::refined && !cfg.refine_fractions.empty()) {
    for (double f : cfg.refine_fractions) {
      candidates.push_back(refine_start(data, dec, ridge, f * out.lambda_max, cfg.solver.lasso));
    }
  } else {
    candidates.push_back(ridge);
  }
  SolverConfig reference = probe;
  reference.lambda2 = cfg.start_lambda2_fraction * out.lambda_max;
  std::map<Index, StartingPoint> chosen;
  auto start_for_k = [&](Index k) {
    auto it = chosen.find(k);
    if (it == chosen.end()) {
      it = chosen.emplace(k, best_start(data, dec, k, reference, candidates)).first;
    }
    return it->second;
  };

  if (cfg.fixed_k) {
    rep.k_grid = {*cfg.fixed_k};
    rep.k_hat = *cfg.fixed_k;
  } else {
    KSelection ks = select_k(data, dec, cfg.k_grid, probe, rep.probe_lambda2, start_for_k);
    rep.k_grid = ks.k_grid;
    rep.bic_values = ks.bic_values;
    rep.k_lambda2 = ks.best_lambda2;
    rep.k_hat = ks.k_hat;
  }

  const StartingPoint start = start_for_k(rep.k_hat);
  if (cfg.fixed_lambdas) {
    SolverConfig final_cfg = cfg.solver;
    final_cfg.lambda1 = cfg.fixed_lambdas->first;
    final_cfg.lambda2 = cfg.fixed_lambdas->second;
    rep.lambda1_hat = final_cfg.lambda1;
    rep.lambda2_hat = final_cfg.lambda2;
    out.fit = fit_silfs(data, dec, rep.k_hat, final_cfg, start);
  } else {
    std::vector<double> l2_grid;
    if (cfg.lambda2_absolute.empty()) {
      for (double f : cfg.lambda2_fractions) l2_grid.push_back(f * out.lambda_max);
    } else {
      l2_grid = cfg.lambda2_absolute;
    }
    LambdaSelection ls =
        select_lambdas(data, dec, rep.k_hat, cfg.lambda1_grid, l2_grid, cfg.solver, start);
    rep.lambda_grid = ls.lambda_grid;
    rep.gcv_values = ls.gcv_values;
    rep.lambda1_hat = ls.lambda1_hat;
    rep.lambda2_hat = ls.lambda2_hat;
    out.fit = std::move(*ls.best_fit);
  }
  return out;
}

}  // namespace silfs
