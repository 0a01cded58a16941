#pragma once

// Cyclic coordinate descent for the squared-distance SILFS problem.
//
// Each sweep updates theta (closed form), beta (LASSO on the idiosyncratic
// block), alpha (closed-form minimizer of the DC majorizer of the penalty) and
// gamma (exact 1-D K-means), in that order. With ccd_joint_centers the alpha
// step is replaced by an exact block step: each subject joins the centroid
// nearest its partial residual (the exact minimizer of Z over alpha_i for fixed
// gamma), then (alpha, gamma) are solved jointly for that assignment. This
// avoids the 1 / (1 + 2 lambda1 n) crawl of gamma at large lambda1.

#include "silfs/objective.hpp"

namespace silfs {

/// theta = F'(Y - alpha) / n. Relies on F'F = nI and F'U = 0.
inline Vector ccd_update_theta(const Vector& response, const Vector& alpha,
                               const FactorDecomposition& dec) {
  if (dec.r() == 0) return Vector(0);
  return dec.factors.transpose() * (response - alpha) / static_cast<double>(response.size());
}

/// LASSO of Y - alpha - F theta on U.
inline Vector ccd_update_beta(const Vector& response, const Vector& alpha, const Vector& theta,
                              const FactorDecomposition& dec, double lambda2,
                              const LassoOptions& lasso = {},
                              const std::optional<Vector>& warm_start = std::nullopt) {
  if (lambda2 < 0.0) throw InvalidArgument("lambda2 must be nonnegative");
  const Vector target = response - alpha - dec.factor_part(theta);
  return lasso_cd(dec.idiosyncratic, target, lambda2, lasso, warm_start).beta;
}

/// Subgradient in alpha of g2 = sum_i sum_{k>=2} max{(a_i - g_{k-1})^2, (a_i - g_k)^2}.
inline Vector ccd_g2_subgradient(const Vector& alpha, const Vector& gamma) {
  Vector grad = Vector::Zero(alpha.size());
  for (Index i = 0; i < alpha.size(); ++i) {
    double acc = 0.0;
    for (Index k = 1; k < gamma.size(); ++k) {
      const double far = std::max(std::abs(alpha[i] - gamma[k - 1]), std::abs(alpha[i] - gamma[k]));
      acc += 2.0 * far * sgn(alpha[i] - 0.5 * (gamma[k - 1] + gamma[k]));
    }
    grad[i] = acc;
  }
  return grad;
}

/// Closed-form alpha step:
/// n / (1 + 2 lambda1 K n) * [ (Y - F theta - U beta)/n + 2 lambda1 sum(gamma) + lambda1 grad g2(alpha_prev) ].
inline Vector ccd_update_alpha(const Vector& response, const Vector& theta, const Vector& beta,
                               const Vector& gamma, const Vector& alpha_prev,
                               const FactorDecomposition& dec, double lambda1) {
  if (lambda1 < 0.0) throw InvalidArgument("lambda1 must be nonnegative");
  for (Index k = 1; k < gamma.size(); ++k) {
    if (gamma[k] < gamma[k - 1]) throw InvalidArgument("ccd_update_alpha: gamma must be sorted");
  }
  const Vector resid = response - dec.factor_part(theta) - dec.idiosyncratic * beta;
  if (lambda1 == 0.0) return resid;
  const double n = static_cast<double>(response.size());
  const double kk = static_cast<double>(gamma.size());
  const double scale = n / (1.0 + 2.0 * lambda1 * kk * n);
  const Vector grad = ccd_g2_subgradient(alpha_prev, gamma);
  return scale * (resid / n + lambda1 * grad).array() + scale * 2.0 * lambda1 * gamma.sum();
}

/// Exact minimizer over (alpha, gamma) of
/// (1/2n)||resid - alpha||^2 + lambda1 sum_i (alpha_i - gamma_{label_i})^2
/// for fixed labels: gamma_k is the mean residual of group k and alpha_i is
/// pulled toward it by 2 lambda1 n / (1 + 2 lambda1 n). Empty groups keep
/// their centroid.
inline void ccd_joint_centers(const Vector& resid, const Labels& labels, double lambda1,
                              Vector& alpha, Vector& gamma) {
  const Index k = gamma.size();
  Vector sum = Vector::Zero(k);
  Vector count = Vector::Zero(k);
  for (Index i = 0; i < resid.size(); ++i) {
    const auto g = static_cast<Index>(labels[static_cast<std::size_t>(i)] - 1);
    sum[g] += resid[i];
    count[g] += 1.0;
  }
  for (Index g = 0; g < k; ++g) {
    if (count[g] > 0.0) gamma[g] = sum[g] / count[g];
  }
  const double w = 2.0 * lambda1 * static_cast<double>(resid.size());
  alpha.resize(resid.size());
  for (Index i = 0; i < resid.size(); ++i) {
    alpha[i] = (resid[i] + w * gamma[labels[static_cast<std::size_t>(i)] - 1]) / (1.0 + w);
  }
}

/// Exact 1-D K-means centroids of alpha. With fewer than K distinct values the
/// largest centroid is repeated to keep length K.
inline Vector ccd_update_gamma(const Vector& alpha, Index k) {
  const Index distinct = count_distinct(alpha);
  if (distinct >= k) return cluster_1d(alpha, k, Distance::squared).centroids;
  const Vector base = cluster_1d(alpha, distinct, Distance::squared).centroids;
  Vector out = Vector::Constant(k, base[base.size() - 1]);
  out.head(base.size()) = base;
  return out;
}

/// Cyclic coordinate descent for the squared-distance problem.
inline SilfsFit fit_ccd(const Dataset& data, const FactorDecomposition& dec, Index k,
                        const SolverConfig& config, const StartingPoint& start) {
  config.validate();
  detail::check_fit_inputs(data, dec, k, start);
  const Vector& y = data.response;

  Vector alpha = start.alpha;
  Vector gamma = start.gamma;
  Vector theta = ccd_update_theta(y, alpha, dec);
  Vector beta = Vector::Zero(data.p());

  auto objective = [&] {
    return silfs_objective(data, dec, alpha, gamma, theta, beta, config.lambda1, config.lambda2,
                           Distance::squared);
  };

  SilfsFit fit;
  fit.distance = Distance::squared;
  fit.lambda1 = config.lambda1;
  fit.lambda2 = config.lambda2;
  const double z0 = objective();
  if (!std::isfinite(z0)) throw NumericalFailure("CCD: objective is not finite at the start");
  fit.objective_trace.push_back(z0);
  const double eps = config.ccd_eps * (1.0 + std::abs(z0));

  for (int sweep = 1; sweep <= config.ccd_max_sweeps; ++sweep) {
    theta = ccd_update_theta(y, alpha, dec);
    beta = ccd_update_beta(y, alpha, theta, dec, config.lambda2, config.lasso, beta);
    if (config.ccd_joint_centers && config.lambda1 > 0.0) {
      // Voronoi cells are intervals, so alpha stays with its centroid and the
      // joint step minimizes a majorizer that touches Z.
      const Vector resid = model_residual(data, dec, Vector::Zero(data.n()), theta, beta);
      ccd_joint_centers(resid, assign_labels(resid, gamma), config.lambda1, alpha, gamma);
    } else {
      alpha = ccd_update_alpha(y, theta, beta, gamma, alpha, dec, config.lambda1);
    }
    gamma = ccd_update_gamma(alpha, k);

    const double z = objective();
    if (!std::isfinite(z)) {
      throw NumericalFailure("CCD: objective became non-finite at sweep " + std::to_string(sweep));
    }
    const double prev = fit.objective_trace.back();
    fit.objective_trace.push_back(z);
    fit.outer_iters = sweep;
    if (std::abs(z - prev) <= eps) {
      fit.converged = true;
      break;
    }
  }

  fit.alpha_hat = std::move(alpha);
  fit.gamma_hat = std::move(gamma);
  fit.theta_hat = std::move(theta);
  fit.beta_hat = std::move(beta);
  fit.labels = assign_labels(fit.alpha_hat, fit.gamma_hat);
  return fit;
}

}  // namespace silfs
