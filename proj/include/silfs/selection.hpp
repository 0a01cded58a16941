#pragma once

// Model selection: K by BIC at a large probe lambda1, then (lambda1, lambda2)
// by GCV at the chosen K.

#include "silfs/ccd.hpp"
#include "silfs/dc_admm.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>

namespace silfs {

/// Dispatches on config.distance: squared -> CCD, absolute -> DC-ADMM.
inline SilfsFit fit_silfs(const Dataset& data, const FactorDecomposition& dec, Index k,
                          const SolverConfig& config, const StartingPoint& start) {
  return config.distance == Distance::squared ? fit_ccd(data, dec, k, config, start)
                                              : fit_dc_admm(data, dec, k, config, start);
}

inline double residual_sum_of_squares(const SilfsFit& fit, const Dataset& data,
                                      const FactorDecomposition& dec) {
  return (data.response - fitted_values(fit, dec)).squaredNorm();
}

/// log(RSS/n) + 2 log(nK + p) (S + K) log(n) / n, RSS/n floored at 1e-12.
inline double bic(const SilfsFit& fit, const Dataset& data, const FactorDecomposition& dec) {
  const double n = static_cast<double>(data.n());
  const double p = static_cast<double>(data.p());
  const double k = static_cast<double>(fit.k());
  const double s = static_cast<double>(support_size(fit.beta_hat));
  const double mse = std::max(residual_sum_of_squares(fit, data, dec) / n, 1e-12);
  const double a_n = 2.0 * std::log(n * k + p);
  return std::log(mse) + a_n * (s + k) * std::log(n) / n;
}

/// RSS / (n - df)^2 with df the support size of beta.
inline double gcv(const SilfsFit& fit, const Dataset& data, const FactorDecomposition& dec) {
  const Index df = support_size(fit.beta_hat);
  if (df >= data.n()) {
    throw InvalidArgument("gcv: support size " + std::to_string(df) + " is not below n");
  }
  const double denom = static_cast<double>(data.n() - df);
  return residual_sum_of_squares(fit, data, dec) / (denom * denom);
}

/// ||U'e||_inf / n with e the residual of Y on (1, F): the smallest lambda2
/// giving beta = 0 when every subject shares one intercept. Without factors
/// e = Y - mean(Y).
inline double lambda_max(const Dataset& data, const FactorDecomposition& dec) {
  const Index n = data.n();
  Matrix basis(n, 1 + dec.r());
  basis.col(0).setOnes();
  if (dec.r() > 0) basis.rightCols(dec.r()) = dec.factors;
  const Vector coef = basis.colPivHouseholderQr().solve(data.response);
  const Vector resid = data.response - basis * coef;
  const double m = (dec.idiosyncratic.transpose() * resid).lpNorm<Eigen::Infinity>() /
                   static_cast<double>(n);
  return m > 0.0 ? m : 1.0;
}

inline std::vector<double> logspace(double lo, double hi, int count) {
  std::vector<double> out;
  if (count == 1) return {lo};
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < count; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / (count - 1)));
  return out;
}

inline std::vector<double> default_lambda1_grid() { return logspace(1e-3, 1e1, 7); }

/// Multiples of lambda_max.
inline std::vector<double> default_lambda2_fractions() { return logspace(1e-3, 1.0, 7); }

struct SelectionReport {
  std::vector<Index> k_grid;
  std::vector<double> bic_values;  // +inf where the fit failed
  std::vector<double> k_lambda2;      // lambda2 attaining each K's BIC
  Index k_hat = 0;
  double probe_lambda1 = 0.0;
  std::vector<double> probe_lambda2;  // lambda2 grid searched for each K

  std::vector<std::pair<double, double>> lambda_grid;
  std::vector<double> gcv_values;  // +inf where the fit failed
  double lambda1_hat = 0.0;
  double lambda2_hat = 0.0;
  Distance solver_distance = Distance::squared;
};

struct KSelection {
  std::vector<Index> k_grid;
  std::vector<double> bic_values;     // per K, minimum over the lambda2 grid
  std::vector<double> best_lambda2;   // per K, lambda2 attaining that minimum
  Index k_hat = 0;
  std::optional<SilfsFit> best_fit;
};

/// Fits every K in the grid at probe.lambda1 and every lambda2 in
/// `lambda2_grid` from start_for_k(K), scores K by its smallest BIC and keeps
/// the minimizer. The smallest K wins ties; the grid is processed in
/// ascending order. A one-point lambda2 grid gives a single fixed probe.
inline KSelection select_k(const Dataset& data, const FactorDecomposition& dec,
                           std::vector<Index> k_grid, const SolverConfig& probe,
                           const std::vector<double>& lambda2_grid,
                           const std::function<StartingPoint(Index)>& start_for_k) {
  if (k_grid.empty()) throw InvalidArgument("select_k: K grid is empty");
  if (lambda2_grid.empty()) throw InvalidArgument("select_k: lambda2 grid is empty");
  for (Index k : k_grid) {
    if (k < 1) throw InvalidArgument("select_k: every K must be at least 1");
  }
  std::sort(k_grid.begin(), k_grid.end());
  k_grid.erase(std::unique(k_grid.begin(), k_grid.end()), k_grid.end());

  constexpr double kInf = std::numeric_limits<double>::infinity();
  KSelection out;
  out.k_grid = k_grid;
  double best = kInf;
  for (Index k : k_grid) {
    double k_best = kInf;
    StartingPoint start;
    try {
      start = start_for_k(k);
    } catch (const Error&) {
      out.bic_values.push_back(kInf);
      out.best_lambda2.push_back(lambda2_grid.front());
      continue;
    }
    double k_lambda2 = lambda2_grid.front();
    for (double l2 : lambda2_grid) {
      SolverConfig cfg = probe;
      cfg.lambda2 = l2;
      try {
        SilfsFit fit = fit_silfs(data, dec, k, cfg, start);
        const double value = bic(fit, data, dec);
        if (value < k_best) {
          k_best = value;
          k_lambda2 = l2;
        }
        if (value < best) {
          best = value;
          out.k_hat = k;
          out.best_fit = std::move(fit);
        }
      } catch (const Error&) {
      }
    }
    out.bic_values.push_back(k_best);
    out.best_lambda2.push_back(k_lambda2);
  }
  if (!out.best_fit) throw SelectionFailure("select_k: every candidate K failed to fit");
  return out;
}

/// Single-start form: every K starts from `ridge`.
inline KSelection select_k(const Dataset& data, const FactorDecomposition& dec,
                           std::vector<Index> k_grid, const SolverConfig& probe,
                           const std::vector<double>& lambda2_grid, const RidgeInit& ridge) {
  return select_k(data, dec, std::move(k_grid), probe, lambda2_grid,
                  [&](Index k) { return make_start(ridge, k, probe.distance); });
}

struct LambdaSelection {
  std::vector<std::pair<double, double>> lambda_grid;
  std::vector<double> gcv_values;
  double lambda1_hat = 0.0;
  double lambda2_hat = 0.0;
  std::optional<SilfsFit> best_fit;
};

/// Full grid search of GCV at fixed K. Ties prefer the larger lambda2, then
/// the larger lambda1.
inline LambdaSelection select_lambdas(const Dataset& data, const FactorDecomposition& dec, Index k,
                                      const std::vector<double>& lambda1_grid,
                                      const std::vector<double>& lambda2_grid,
                                      const SolverConfig& base, const StartingPoint& start) {
  if (lambda1_grid.empty() || lambda2_grid.empty()) {
    throw InvalidArgument("select_lambdas: lambda grids must be nonempty");
  }
  LambdaSelection out;
  double best = std::numeric_limits<double>::infinity();
  std::pair<double, double> best_pair{};
  for (double l1 : lambda1_grid) {
    for (double l2 : lambda2_grid) {
      SolverConfig cfg = base;
      cfg.lambda1 = l1;
      cfg.lambda2 = l2;
      double value = std::numeric_limits<double>::infinity();
      try {
        SilfsFit fit = fit_silfs(data, dec, k, cfg, start);
        value = gcv(fit, data, dec);
        const bool better =
            value < best ||
            (value == best && out.best_fit &&
             (l2 > best_pair.second || (l2 == best_pair.second && l1 > best_pair.first)));
        if (better) {
          best = value;
          best_pair = {l1, l2};
          out.best_fit = std::move(fit);
        }
      } catch (const Error&) {
      }
      out.lambda_grid.emplace_back(l1, l2);
      out.gcv_values.push_back(value);
    }
  }
  if (!out.best_fit) throw SelectionFailure("select_lambdas: every (lambda1, lambda2) failed");
  out.lambda1_hat = best_pair.first;
  out.lambda2_hat = best_pair.second;
  return out;
}

}  // namespace silfs
