#pragma once

#include "silfs/core.hpp"
#include "silfs/factor_model.hpp"
#include "silfs/numeric.hpp"

#include <algorithm>
#include <limits>

namespace silfs {

/// Tuning and stopping parameters shared by both solvers.
///
/// Tolerances are relative: the absolute threshold is tol * (1 + |Z0|) where
/// Z0 is the objective at the starting point.
struct SolverConfig {
  Distance distance = Distance::squared;
  double lambda1 = 0.1;
  double lambda2 = 0.01;

  // DC-ADMM augmentation and stopping.
  double rho1 = 0.5;
  double rho2 = 0.5;
  double rho3 = 0.5;
  double eps_outer = 1e-5;
  double eps_inner = 1e-4;
  int max_outer = 100;
  int max_inner = 500;
  double feasibility_tol = 1e-4;  // inner primal residual, times (1 + max|alpha|)

  // Cyclic coordinate descent stopping.
  double ccd_eps = 1e-6;
  int ccd_max_sweeps = 200;
  // Replace the closed-form alpha step by an exact (alpha, gamma) block step
  // with assignments taken from the partial residual.
  bool ccd_joint_centers = true;

  LassoOptions lasso{};

  void validate() const {
    if (lambda1 < 0.0 || lambda2 < 0.0) throw InvalidArgument("lambda1, lambda2 must be >= 0");
    if (!(rho1 > 0.0 && rho2 > 0.0 && rho3 > 0.0)) {
      throw InvalidArgument("rho1, rho2, rho3 must be positive");
    }
    if (!(eps_outer > 0.0 && eps_inner > 0.0 && ccd_eps > 0.0 && feasibility_tol > 0.0)) {
      throw InvalidArgument("tolerances must be positive");
    }
    if (max_outer < 1 || max_inner < 1 || ccd_max_sweeps < 1) {
      throw InvalidArgument("iteration caps must be at least 1");
    }
  }
};

/// Starting intercepts and (sorted) centroids for a solver.
struct StartingPoint {
  Vector alpha;
  Vector gamma;
};

/// Result of one SILFS fit.
struct SilfsFit {
  Vector alpha_hat;
  Vector gamma_hat;  // nondecreasing
  Vector theta_hat;
  Vector beta_hat;
  Labels labels;  // 1..K
  std::vector<double> objective_trace;
  bool converged = false;
  int outer_iters = 0;
  int total_inner_iters = 0;
  double primal_residual = 0.0;  // DC-ADMM: inner primal residual behind the returned iterate
  Distance distance = Distance::squared;
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  Index k() const { return gamma_hat.size(); }
};

/// Sum over subjects of the distance to the nearest centroid.
inline double car_penalty(const Vector& alpha, const Vector& gamma, Distance dist) {
  if (gamma.size() < 1) throw InvalidArgument("car_penalty: need at least one centroid");
  double total = 0.0;
  for (Index i = 0; i < alpha.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < gamma.size(); ++k) best = std::min(best, distance(alpha[i], gamma[k], dist));
    total += best;
  }
  return total;
}

/// Nearest-centroid labels in 1..K; the smallest index wins ties.
inline Labels assign_labels(const Vector& alpha, const Vector& gamma) {
  Labels out(static_cast<std::size_t>(alpha.size()));
  for (Index i = 0; i < alpha.size(); ++i) {
    Index arg = 0;
    double best = std::abs(alpha[i] - gamma[0]);
    for (Index k = 1; k < gamma.size(); ++k) {
      const double d = std::abs(alpha[i] - gamma[k]);
      if (d < best) {
        best = d;
        arg = k;
      }
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(arg) + 1;
  }
  return out;
}

/// Y - alpha - F theta - U beta
inline Vector model_residual(const Dataset& data, const FactorDecomposition& dec,
                             const Vector& alpha, const Vector& theta, const Vector& beta) {
  return data.response - alpha - dec.factor_part(theta) - dec.idiosyncratic * beta;
}

/// Z = (1/2n)||Y - alpha - F theta - U beta||^2 + lambda1 g(alpha, gamma) + lambda2 ||beta||_1
inline double silfs_objective(const Dataset& data, const FactorDecomposition& dec,
                              const Vector& alpha, const Vector& gamma, const Vector& theta,
                              const Vector& beta, double lambda1, double lambda2, Distance dist) {
  const double n = static_cast<double>(data.n());
  const double loss = model_residual(data, dec, alpha, theta, beta).squaredNorm() / (2.0 * n);
  return loss + lambda1 * car_penalty(alpha, gamma, dist) + lambda2 * beta.lpNorm<1>();
}

inline double silfs_objective(const Dataset& data, const FactorDecomposition& dec,
                              const SilfsFit& fit) {
  return silfs_objective(data, dec, fit.alpha_hat, fit.gamma_hat, fit.theta_hat, fit.beta_hat,
                         fit.lambda1, fit.lambda2, fit.distance);
}

/// Fitted values gamma_{label(i)} + f_i' theta + u_i' beta.
inline Vector fitted_values(const SilfsFit& fit, const FactorDecomposition& dec) {
  Vector out = dec.factor_part(fit.theta_hat) + dec.idiosyncratic * fit.beta_hat;
  for (Index i = 0; i < out.size(); ++i) {
    out[i] += fit.gamma_hat[fit.labels[static_cast<std::size_t>(i)] - 1];
  }
  return out;
}

namespace detail {

inline void check_fit_inputs(const Dataset& data, const FactorDecomposition& dec, Index k,
                             const StartingPoint& start) {
  data.validate();
  if (dec.n() != data.n() || dec.p() != data.p()) {
    throw InvalidArgument("factor decomposition does not match the dataset dimensions");
  }
  if (k < 1) throw InvalidArgument("number of groups K must be at least 1");
  if (start.alpha.size() != data.n()) throw InvalidArgument("starting alpha must have length n");
  if (start.gamma.size() != k) throw InvalidArgument("starting gamma must have length K");
  for (Index j = 1; j < k; ++j) {
    if (start.gamma[j] < start.gamma[j - 1]) throw InvalidArgument("starting gamma must be sorted");
  }
}

}  // namespace detail

/// Ridge start: alpha0 from the (F, I_n) ridge fit, gamma0 its optimal 1-D
/// K-means (squared) or K-median (absolute) centroids.
inline StartingPoint make_start(const RidgeInit& ridge, Index k, Distance dist) {
  StartingPoint s;
  s.alpha = ridge.alpha0;
  const Index distinct = count_distinct(ridge.alpha0);
  if (distinct >= k) {
    s.gamma = cluster_1d(ridge.alpha0, k, dist).centroids;
  } else {
    const Vector base = cluster_1d(ridge.alpha0, distinct, dist).centroids;
    s.gamma = Vector::Constant(k, base[base.size() - 1]);
    s.gamma.head(base.size()) = base;
  }
  return s;
}

}  // namespace silfs
