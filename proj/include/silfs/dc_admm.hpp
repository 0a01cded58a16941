#pragma once

// DC-ADMM for the absolute-distance SILFS problem.
//
// The penalty sum_i min_k |alpha_i - gamma_k| is written as g1 - g2 over
// delta_ik = alpha_i - gamma_k with sorted gamma. Each outer (DC) step
// linearizes g2 at the current anchor and solves the resulting convex problem
// by ADMM with splittings
//   delta = C1 alpha - C2 gamma,   D gamma = y (y <= 0),   beta = eta.
// delta is stored subject-major: delta[i * K + k].

#include "silfs/objective.hpp"

#include <Eigen/Cholesky>

#include <numeric>

namespace silfs {

/// Iterates of the inner ADMM, with u, v, w the scaled duals.
struct AdmmState {
  Vector alpha;  // n
  Vector gamma;  // K
  Vector theta;  // r
  Vector beta;   // p
  Vector delta;  // nK
  Vector y;      // K - 1
  Vector eta;    // p
  Vector u;      // nK
  Vector v;      // K - 1
  Vector w;      // p
};

namespace detail {

inline Index num_groups_from(const Vector& delta, Index k) {
  if (k < 1 || delta.size() % k != 0) {
    throw InvalidArgument("delta length must be a multiple of K");
  }
  return delta.size() / k;
}

// C1 alpha - C2 gamma
inline Vector pairwise_gaps(const Vector& alpha, const Vector& gamma) {
  const Index n = alpha.size();
  const Index k = gamma.size();
  Vector out(n * k);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < k; ++j) out[i * k + j] = alpha[i] - gamma[j];
  }
  return out;
}

// D gamma, D the (K-1) x K first-difference matrix with rows e_k - e_{k+1}.
inline Vector first_differences(const Vector& gamma) {
  const Index k = gamma.size();
  Vector out(std::max<Index>(k - 1, 0));
  for (Index j = 0; j + 1 < k; ++j) out[j] = gamma[j] - gamma[j + 1];
  return out;
}

// D' x
inline Vector first_differences_adjoint(const Vector& x, Index k) {
  Vector out = Vector::Zero(k);
  for (Index j = 0; j + 1 < k; ++j) {
    out[j] += x[j];
    out[j + 1] -= x[j];
  }
  return out;
}

}  // namespace detail

/// Subgradient of g2(delta) = sum_i sum_{k>=2} max{|delta_{i,k-1}|, |delta_ik|}.
inline Vector dc_subgradient(const Vector& delta, Index k) {
  const Index n = detail::num_groups_from(delta, k);
  Vector grad = Vector::Zero(delta.size());
  for (Index i = 0; i < n; ++i) {
    const Index base = i * k;
    for (Index j = 0; j < k; ++j) {
      const double d = delta[base + j];
      const double a = std::abs(d);
      double hits = 0.0;
      if (j > 0 && a > std::abs(delta[base + j - 1])) hits += 1.0;
      if (j + 1 < k && a > std::abs(delta[base + j + 1])) hits += 1.0;
      grad[base + j] = sgn(d) * hits;
    }
  }
  return grad;
}

/// g2 itself, for finite-difference checks and surrogate evaluation.
inline double dc_concave_part(const Vector& delta, Index k) {
  const Index n = detail::num_groups_from(delta, k);
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 1; j < k; ++j) {
      total += std::max(std::abs(delta[i * k + j - 1]), std::abs(delta[i * k + j]));
    }
  }
  return total;
}

/// delta = ST(C1 alpha - C2 gamma - u + lambda1 grad / rho1, lambda1 / rho1)
inline Vector admm_delta_update(const AdmmState& state, const SolverConfig& config,
                                const Vector& dc_grad) {
  Vector arg = detail::pairwise_gaps(state.alpha, state.gamma) - state.u;
  if (config.lambda1 != 0.0) arg += (config.lambda1 / config.rho1) * dc_grad;
  return soft_threshold(arg, config.lambda1 / config.rho1);
}

/// y_k = min{0, (D gamma)_k + v_k}
inline Vector admm_y_update(const Vector& gamma, const Vector& v) {
  const Vector dg = detail::first_differences(gamma);
  if (dg.size() != v.size()) throw InvalidArgument("admm_y_update: v must have length K - 1");
  return (dg + v).cwiseMin(0.0);
}

/// Exact minimizer of the quadratic (alpha, theta, beta, gamma) block.
///
/// theta is eliminated through theta = F'(Y - alpha - U beta) / n, leaving a
/// symmetric positive-definite system in (alpha, beta, gamma). Its matrix does
/// not depend on the iterates, so it is factored once per fit.
class ThetaBlockSolver {
 public:
  ThetaBlockSolver(const Dataset& data, const FactorDecomposition& dec, Index k,
                   const SolverConfig& config)
      : data_(&data), dec_(&dec), n_(data.n()), p_(data.p()), k_(k), config_(config) {
    const double n = static_cast<double>(n_);
    const Matrix& u = dec.idiosyncratic;
    const Index dim = n_ + p_ + k_;
    Matrix h = Matrix::Zero(dim, dim);

    // alpha-alpha: (I - P)/n + rho1 K I, P = F F' / n.
    h.topLeftCorner(n_, n_).diagonal().array() += 1.0 / n + config.rho1 * static_cast<double>(k_);
    if (dec.r() > 0) h.topLeftCorner(n_, n_).noalias() -= dec.factors * dec.factors.transpose() / (n * n);
    // alpha-beta: U / n
    h.block(0, n_, n_, p_) = u / n;
    h.block(n_, 0, p_, n_) = u.transpose() / n;
    // beta-beta: U'U / n + rho3 I
    h.block(n_, n_, p_, p_).noalias() = u.transpose() * u / n;
    h.block(n_, n_, p_, p_).diagonal().array() += config.rho3;
    // alpha-gamma: -rho1 1 1'
    h.block(0, n_ + p_, n_, k_).setConstant(-config.rho1);
    h.block(n_ + p_, 0, k_, n_).setConstant(-config.rho1);
    // gamma-gamma: rho1 n I + rho2 D'D
    auto hg = h.block(n_ + p_, n_ + p_, k_, k_);
    hg.diagonal().array() += config.rho1 * n;
    for (Index j = 0; j + 1 < k_; ++j) {
      hg(j, j) += config.rho2;
      hg(j + 1, j + 1) += config.rho2;
      hg(j, j + 1) -= config.rho2;
      hg(j + 1, j) -= config.rho2;
    }

    llt_.compute(h);
    if (llt_.info() != Eigen::Success) {
      h.diagonal().array() += 1e-10;
      llt_.compute(h);
      if (llt_.info() != Eigen::Success) {
        throw NumericalFailure("DC-ADMM: the quadratic block system is singular after jitter");
      }
    }

    // Constant parts of the right-hand side.
    const Vector& y = data.response;
    rhs_alpha_ = y / n;
    if (dec.r() > 0) rhs_alpha_.noalias() -= dec.factors * (dec.factors.transpose() * y) / (n * n);
    rhs_beta_ = u.transpose() * y / n;
  }

  /// Returns the block minimizer given delta, u, y, v, eta, w from `state`.
  void solve(AdmmState& state) const {
    const double rho1 = config_.rho1;
    const Vector a = state.delta + state.u;
    Vector rhs(n_ + p_ + k_);
    auto ra = rhs.head(n_);
    ra = rhs_alpha_;
    auto rg = rhs.tail(k_);
    rg.setZero();
    for (Index i = 0; i < n_; ++i) {
      double s = 0.0;
      for (Index j = 0; j < k_; ++j) {
        s += a[i * k_ + j];
        rg[j] -= rho1 * a[i * k_ + j];
      }
      ra[i] += rho1 * s;
    }
    if (k_ > 1) rg += config_.rho2 * detail::first_differences_adjoint(state.y - state.v, k_);
    rhs.segment(n_, p_) = rhs_beta_ + config_.rho3 * (state.eta + state.w);

    const Vector sol = llt_.solve(rhs);
    state.alpha = sol.head(n_);
    state.beta = sol.segment(n_, p_);
    state.gamma = sol.tail(k_);
    if (dec_->r() > 0) {
      state.theta = dec_->factors.transpose() *
                    (data_->response - state.alpha - dec_->idiosyncratic * state.beta) /
                    static_cast<double>(n_);
    } else {
      state.theta = Vector(0);
    }
  }

 private:
  const Dataset* data_;
  const FactorDecomposition* dec_;
  Index n_, p_, k_;
  SolverConfig config_;
  Eigen::LLT<Matrix> llt_;
  Vector rhs_alpha_;
  Vector rhs_beta_;
};

/// One exact quadratic-block update; see ThetaBlockSolver.
inline AdmmState admm_theta_block_update(const AdmmState& state, const Dataset& data,
                                         const FactorDecomposition& dec,
                                         const SolverConfig& config) {
  const ThetaBlockSolver solver(data, dec, state.gamma.size(), config);
  AdmmState out = state;
  solver.solve(out);
  return out;
}

namespace detail {

// Value of the DC surrogate at an ADMM iterate (beta's l1 norm taken on eta).
inline double admm_surrogate(const Dataset& data, const FactorDecomposition& dec,
                             const AdmmState& s, const Vector& grad, const Vector& anchor,
                             const SolverConfig& config) {
  const double n = static_cast<double>(data.n());
  const double loss = model_residual(data, dec, s.alpha, s.theta, s.beta).squaredNorm() / (2.0 * n);
  return loss + config.lambda1 * (s.delta.lpNorm<1>() - grad.dot(s.delta - anchor)) +
         config.lambda2 * s.eta.lpNorm<1>();
}

inline double primal_residual(const AdmmState& s) {
  double r = (s.delta - pairwise_gaps(s.alpha, s.gamma)).lpNorm<Eigen::Infinity>();
  if (s.y.size() > 0) r = std::max(r, (first_differences(s.gamma) - s.y).lpNorm<Eigen::Infinity>());
  if (s.eta.size() > 0) r = std::max(r, (s.eta - s.beta).lpNorm<Eigen::Infinity>());
  return r;
}

}  // namespace detail

/// DC-ADMM for the absolute-distance problem.
///
/// The outer trace is kept strictly decreasing: an outer step whose candidate
/// does not lower Z is discarded and the fit stops at the previous iterate.
/// `converged` reports whether the last outer change fell within eps_outer.
inline SilfsFit fit_dc_admm(const Dataset& data, const FactorDecomposition& dec, Index k,
                            const SolverConfig& config, const StartingPoint& start) {
  config.validate();
  detail::check_fit_inputs(data, dec, k, start);
  const Index n = data.n();
  const Index p = data.p();

  const ThetaBlockSolver block(data, dec, k, config);

  // Current DC iterate.
  Vector alpha = start.alpha;
  Vector gamma = start.gamma;
  Vector beta = Vector::Zero(p);
  Vector theta = dec.r() > 0 ? Vector(dec.factors.transpose() * (data.response - alpha) /
                                      static_cast<double>(n))
                             : Vector(0);

  auto true_objective = [&](const Vector& a, const Vector& g, const Vector& t, const Vector& b) {
    return silfs_objective(data, dec, a, g, t, b, config.lambda1, config.lambda2,
                           Distance::absolute);
  };

  SilfsFit fit;
  fit.distance = Distance::absolute;
  fit.lambda1 = config.lambda1;
  fit.lambda2 = config.lambda2;
  const double z0 = true_objective(alpha, gamma, theta, beta);
  if (!std::isfinite(z0)) throw NumericalFailure("DC-ADMM: objective is not finite at the start");
  fit.objective_trace.push_back(z0);
  const double eps1 = config.eps_outer * (1.0 + std::abs(z0));
  const double eps2 = config.eps_inner * (1.0 + std::abs(z0));

  AdmmState s;
  s.alpha = alpha;
  s.gamma = gamma;
  s.theta = theta;
  s.beta = beta;
  s.delta = detail::pairwise_gaps(alpha, gamma);
  s.u = Vector::Zero(n * k);
  s.v = Vector::Zero(k - 1);
  s.w = Vector::Zero(p);
  s.eta = Vector::Ones(p);
  s.y = admm_y_update(gamma, s.v);

  for (int m = 1; m <= config.max_outer; ++m) {
    const Vector anchor = detail::pairwise_gaps(alpha, gamma);
    const Vector grad = dc_subgradient(anchor, k);

    // ADMM initialization for this surrogate.
    s.alpha = alpha;
    s.gamma = gamma;
    s.y = admm_y_update(gamma, s.v);

    double prev_sur = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= config.max_inner; ++it) {
      block.solve(s);
      s.delta = admm_delta_update(s, config, grad);
      s.y = admm_y_update(s.gamma, s.v);
      s.eta = soft_threshold(s.beta - s.w, config.lambda2 / config.rho3);
      s.u += s.delta - detail::pairwise_gaps(s.alpha, s.gamma);
      if (k > 1) s.v += detail::first_differences(s.gamma) - s.y;
      s.w += s.eta - s.beta;
      ++fit.total_inner_iters;

      const double sur = detail::admm_surrogate(data, dec, s, grad, anchor, config);
      if (!std::isfinite(sur)) {
        throw NumericalFailure("DC-ADMM: surrogate became non-finite at outer step " +
                               std::to_string(m));
      }
      const double feas = config.feasibility_tol * (1.0 + s.alpha.lpNorm<Eigen::Infinity>());
      if (std::abs(sur - prev_sur) <= eps2 && detail::primal_residual(s) <= feas) break;
      prev_sur = sur;
    }

    const double cand_residual = detail::primal_residual(s);

    // Candidate DC iterate: sorted centroids, exactly sparse beta, refit theta.
    Vector cand_gamma = s.gamma;
    std::vector<Index> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::stable_sort(perm.begin(), perm.end(),
                     [&](Index a, Index b) { return s.gamma[a] < s.gamma[b]; });
    bool reordered = false;
    for (Index j = 0; j < k; ++j) {
      cand_gamma[j] = s.gamma[perm[static_cast<std::size_t>(j)]];
      reordered = reordered || perm[static_cast<std::size_t>(j)] != j;
    }
    if (reordered) {
      // Duals tied to the old centroid order no longer apply.
      s.u.setZero();
      s.v.setZero();
    }
    const Vector cand_alpha = s.alpha;
    const Vector cand_beta = s.eta;
    const Vector cand_theta =
        dec.r() > 0 ? Vector(dec.factors.transpose() *
                             (data.response - cand_alpha - dec.idiosyncratic * cand_beta) /
                             static_cast<double>(n))
                    : Vector(0);
    const double z = true_objective(cand_alpha, cand_gamma, cand_theta, cand_beta);
    if (!std::isfinite(z)) {
      throw NumericalFailure("DC-ADMM: objective became non-finite at outer step " +
                             std::to_string(m));
    }
    const double prev = fit.objective_trace.back();
    if (!(z < prev)) {
      // No decrease: keep the previous iterate.
      fit.converged = prev - z >= -eps1;
      break;
    }
    alpha = cand_alpha;
    gamma = cand_gamma;
    beta = cand_beta;
    theta = cand_theta;
    fit.objective_trace.push_back(z);
    fit.outer_iters = m;
    fit.primal_residual = cand_residual;
    if (prev - z <= eps1) {
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
