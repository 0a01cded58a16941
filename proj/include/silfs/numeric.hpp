#pragma once

#include "silfs/core.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <span>

namespace silfs {

/// Proximal operator of t|.|: sgn(u) * max(|u| - t, 0).
inline double soft_threshold(double u, double t) {
  const double mag = std::abs(u) - t;
  return mag > 0.0 ? sgn(u) * mag : 0.0;
}

inline Vector soft_threshold(const Vector& u, double t) {
  return u.unaryExpr([t](double x) { return soft_threshold(x, t); });
}

// ---------------------------------------------------------------------------
// LASSO by cyclic coordinate descent
// ---------------------------------------------------------------------------

struct LassoOptions {
  double tol = 1e-7;  // on max_j c_j |change in beta_j|, c_j = ||x_j||^2 / n
  int max_iter = 10000;
};

struct LassoResult {
  Vector beta;
  bool converged = false;
  int sweeps = 0;
};

/// (1/2n)||target - design * beta||^2 + lambda * ||beta||_1
inline double lasso_objective(const Matrix& design, const Vector& target, const Vector& beta,
                              double lambda) {
  const double n = static_cast<double>(design.rows());
  return (target - design * beta).squaredNorm() / (2.0 * n) + lambda * beta.lpNorm<1>();
}

/// Largest violation of the LASSO optimality conditions at `beta`.
inline double lasso_kkt_violation(const Matrix& design, const Vector& target, const Vector& beta,
                                  double lambda) {
  const double n = static_cast<double>(design.rows());
  const Vector grad = design.transpose() * (target - design * beta) / n;
  double worst = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    const double v = beta[j] != 0.0 ? std::abs(grad[j] - lambda * sgn(beta[j]))
                                     : std::max(std::abs(grad[j]) - lambda, 0.0);
    worst = std::max(worst, v);
  }
  return worst;
}

namespace detail {

// Moves `beta` toward the minimizer of the LASSO objective restricted to
// `support` with the current signs, stopping where the first coefficient
// reaches zero. Returns false, leaving `beta` unchanged, when the Gram block
// of the support is singular or rounding would raise the objective.
inline bool lasso_support_step(const Matrix& design, const Vector& target, double lambda,
                               const std::vector<Index>& support, Vector& beta) {
  const Index m = static_cast<Index>(support.size());
  const double n = static_cast<double>(design.rows());
  Matrix xa(design.rows(), m);
  Vector rhs(m);
  for (Index a = 0; a < m; ++a) {
    const Index j = support[static_cast<std::size_t>(a)];
    xa.col(a) = design.col(j);
    rhs[a] = design.col(j).dot(target) / n - lambda * sgn(beta[j]);
  }
  const Eigen::LDLT<Matrix> ldlt((xa.transpose() * xa) / n);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
  const Vector sol = ldlt.solve(rhs);
  if (!sol.allFinite()) return false;
  const Vector before = beta;
  double t = 1.0;
  Index blocking = -1;
  for (Index a = 0; a < m; ++a) {
    const double cur = beta[support[static_cast<std::size_t>(a)]];
    if (sgn(sol[a]) != sgn(cur)) {
      const double ta = cur / (cur - sol[a]);
      if (ta < t) {
        t = ta;
        blocking = a;
      }
    }
  }
  for (Index a = 0; a < m; ++a) {
    double& b = beta[support[static_cast<std::size_t>(a)]];
    b = a == blocking ? 0.0 : b + t * (sol[a] - b);
  }
  if (lasso_objective(design, target, beta, lambda) > lasso_objective(design, target, before, lambda)) {
    beta = before;
    return false;
  }
  return true;
}

}  // namespace detail

/// Cyclic coordinate descent on unstandardized columns. Stops once a full
/// sweep's largest scaled coordinate change is below `tol` and the KKT
/// violation is within 10 * tol; otherwise returns the last iterate with
/// converged = false. Between full sweeps the iterate moves to the solution
/// on the current support when its Gram block is nonsingular, and cycles over
/// the support otherwise. `max_iter` counts full and active-set sweeps.
inline LassoResult lasso_cd(const Matrix& design, const Vector& target, double lambda,
                            const LassoOptions& opts = {},
                            const std::optional<Vector>& warm_start = std::nullopt) {
  const Index n = design.rows();
  const Index q = design.cols();
  if (target.size() != n) throw InvalidArgument("lasso_cd: target length does not match design");
  if (lambda < 0.0) throw InvalidArgument("lasso_cd: lambda must be nonnegative");
  if (!(opts.tol > 0.0) || opts.max_iter < 1) {
    throw InvalidArgument("lasso_cd: tol must be positive and max_iter >= 1");
  }

  LassoResult out;
  out.beta = warm_start ? *warm_start : Vector::Zero(q);
  if (out.beta.size() != q) throw InvalidArgument("lasso_cd: warm start has wrong length");
  if (q == 0) {
    out.converged = true;
    return out;
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  const Vector scale = design.colwise().squaredNorm().transpose() * inv_n;
  Vector resid = target - design * out.beta;

  auto update = [&](Index j) {
    const double c = scale[j];
    const double old = out.beta[j];
    if (c <= 0.0) {
      out.beta[j] = 0.0;
      return std::abs(old);
    }
    const double z = design.col(j).dot(resid) * inv_n + c * old;
    const double fresh = soft_threshold(z, lambda) / c;
    const double delta = fresh - old;
    if (delta == 0.0) return 0.0;
    resid.noalias() -= delta * design.col(j);
    out.beta[j] = fresh;
    return c * std::abs(delta);
  };

  // Full sweeps alternate with steps restricted to the current support; only
  // a full sweep can declare convergence.
  std::vector<Index> active;
  int sweep = 0;
  while (sweep < opts.max_iter) {
    double max_change = 0.0;
    for (Index j = 0; j < q; ++j) max_change = std::max(max_change, update(j));
    out.sweeps = ++sweep;
    if (max_change < opts.tol &&
        lasso_kkt_violation(design, target, out.beta, lambda) <= 10.0 * opts.tol) {
      out.converged = true;
      break;
    }
    active.clear();
    for (Index j = 0; j < q; ++j) {
      if (out.beta[j] != 0.0) active.push_back(j);
    }
    // Coordinate descent crawls on correlated columns, so jump to the
    // solution on the current support before cycling over it.
    if (!active.empty() && static_cast<Index>(active.size()) <= n &&
        detail::lasso_support_step(design, target, lambda, active, out.beta)) {
      resid = target - design * out.beta;
      continue;
    }
    while (sweep < opts.max_iter) {
      double active_change = 0.0;
      for (Index j : active) active_change = std::max(active_change, update(j));
      out.sweeps = ++sweep;
      if (active_change < opts.tol) break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact univariate K-means / K-median
// ---------------------------------------------------------------------------

struct UnivariateClustering {
  Vector centroids;   // K, nondecreasing
  Labels labels;      // n, values in 1..K
  double within_cost = 0.0;
};

namespace detail {

// Segment costs over the distinct sorted values with multiplicities.
class SegmentCost {
 public:
  SegmentCost(const std::vector<double>& distinct, const std::vector<double>& counts,
              Distance dist)
      : v_(distinct), dist_(dist) {
    const std::size_t m = distinct.size();
    pw_.assign(m + 1, 0.0);
    pv_.assign(m + 1, 0.0);
    pvv_.assign(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      pw_[i + 1] = pw_[i] + counts[i];
      pv_[i + 1] = pv_[i] + counts[i] * distinct[i];
      pvv_[i + 1] = pvv_[i] + counts[i] * distinct[i] * distinct[i];
    }
  }

  // Cost of the segment of distinct values [a, b], inclusive.
  double operator()(std::size_t a, std::size_t b) const {
    const double w = pw_[b + 1] - pw_[a];
    const double s = pv_[b + 1] - pv_[a];
    if (dist_ == Distance::squared) {
      return std::max(pvv_[b + 1] - pvv_[a] - s * s / w, 0.0);
    }
    // A weighted median: first distinct value whose cumulative count reaches half.
    const double half = pw_[a] + 0.5 * w;
    auto it = std::lower_bound(pw_.begin() + static_cast<std::ptrdiff_t>(a) + 1,
                               pw_.begin() + static_cast<std::ptrdiff_t>(b) + 2, half);
    const std::size_t c = static_cast<std::size_t>(it - pw_.begin()) - 1;
    const double med = v_[c];
    const double below = med * (pw_[c] - pw_[a]) - (pv_[c] - pv_[a]);
    const double above = (pv_[b + 1] - pv_[c + 1]) - med * (pw_[b + 1] - pw_[c + 1]);
    return std::max(below + above, 0.0);
  }

 private:
  std::vector<double> v_;
  Distance dist_;
  std::vector<double> pw_, pv_, pvv_;
};

// One layer of the segmentation DP by divide and conquer over the monotone
// optimal split point.
inline void dp_layer(const SegmentCost& cost, const std::vector<double>& prev,
                     std::vector<double>& cur, std::vector<std::size_t>& arg, std::size_t lo,
                     std::size_t hi, std::size_t opt_lo, std::size_t opt_hi) {
  if (lo > hi) return;
  const std::size_t mid = lo + (hi - lo) / 2;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_t = opt_lo;
  const std::size_t upper = std::min(mid, opt_hi);
  for (std::size_t t = opt_lo; t <= upper; ++t) {
    // Last segment is [t, mid]; the previous layer ends at t - 1.
    const double val = prev[t - 1] + cost(t, mid);
    if (val < best) {
      best = val;
      best_t = t;
    }
  }
  cur[mid] = best;
  arg[mid] = best_t;
  if (mid > lo) dp_layer(cost, prev, cur, arg, lo, mid - 1, opt_lo, best_t);
  dp_layer(cost, prev, cur, arg, mid + 1, hi, best_t, opt_hi);
}

}  // namespace detail

/// Number of distinct values in `values`.
inline Index count_distinct(const Vector& values) {
  std::vector<double> s(values.data(), values.data() + values.size());
  std::sort(s.begin(), s.end());
  return static_cast<Index>(std::unique(s.begin(), s.end()) - s.begin());
}

/// Globally optimal partition of `values` into K contiguous (in sorted order)
/// clusters. Squared distance uses segment means, absolute distance segment
/// medians (mean of the two middle order statistics for even sizes).
inline UnivariateClustering cluster_1d(const Vector& values, Index k, Distance dist) {
  const Index n = values.size();
  if (k < 1) throw InvalidArgument("cluster_1d: K must be positive");
  if (!values.allFinite()) throw InvalidArgument("cluster_1d: values must be finite");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values[a] < values[b]; });
  std::vector<double> sorted(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = values[order[i]];

  std::vector<double> distinct;
  std::vector<double> counts;
  for (double v : sorted) {
    if (distinct.empty() || v != distinct.back()) {
      distinct.push_back(v);
      counts.push_back(1.0);
    } else {
      counts.back() += 1.0;
    }
  }
  const std::size_t m = distinct.size();
  if (static_cast<std::size_t>(k) > m) {
    throw InvalidArgument("cluster_1d: K = " + std::to_string(k) + " exceeds the " +
                          std::to_string(m) + " distinct values");
  }

  const detail::SegmentCost cost(distinct, counts, dist);
  const std::size_t kk = static_cast<std::size_t>(k);
  // table[l][j]: best cost of splitting distinct[0..j] into l + 1 segments.
  std::vector<std::vector<double>> table(kk, std::vector<double>(m, 0.0));
  std::vector<std::vector<std::size_t>> split(kk, std::vector<std::size_t>(m, 0));
  for (std::size_t j = 0; j < m; ++j) table[0][j] = cost(0, j);
  for (std::size_t l = 1; l < kk; ++l) {
    detail::dp_layer(cost, table[l - 1], table[l], split[l], l, m - 1, l, m - 1);
  }

  // Backtrack segment starts.
  std::vector<std::size_t> starts(kk);
  std::size_t end = m - 1;
  for (std::size_t l = kk; l-- > 0;) {
    starts[l] = l == 0 ? 0 : split[l][end];
    if (l > 0) end = starts[l] - 1;
  }

  std::vector<int> distinct_label(m);
  for (std::size_t l = 0; l < kk; ++l) {
    const std::size_t stop = l + 1 < kk ? starts[l + 1] : m;
    for (std::size_t j = starts[l]; j < stop; ++j) distinct_label[j] = static_cast<int>(l) + 1;
  }

  UnivariateClustering out;
  out.centroids.resize(k);
  out.labels.assign(static_cast<std::size_t>(n), 0);
  std::size_t pos = 0;  // position in `sorted`
  for (std::size_t l = 0; l < kk; ++l) {
    const std::size_t stop = l + 1 < kk ? starts[l + 1] : m;
    std::size_t len = 0;
    for (std::size_t j = starts[l]; j < stop; ++j) len += static_cast<std::size_t>(counts[j]);
    const std::size_t first = pos;
    double centroid;
    if (dist == Distance::squared) {
      double s = 0.0;
      for (std::size_t i = first; i < first + len; ++i) s += sorted[i];
      centroid = s / static_cast<double>(len);
    } else {
      centroid = len % 2 == 1 ? sorted[first + len / 2]
                              : 0.5 * (sorted[first + len / 2 - 1] + sorted[first + len / 2]);
    }
    out.centroids[static_cast<Index>(l)] = centroid;
    pos += len;
  }

  // Map labels back to original order.
  pos = 0;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t c = 0; c < static_cast<std::size_t>(counts[j]); ++c, ++pos) {
      out.labels[static_cast<std::size_t>(order[pos])] = distinct_label[j];
    }
  }
  for (Index i = 0; i < n; ++i) {
    out.within_cost +=
        distance(values[i], out.centroids[out.labels[static_cast<std::size_t>(i)] - 1], dist);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ridge initialization on the pseudo-design (F, I_n)
// ---------------------------------------------------------------------------

struct RidgeInit {
  Vector alpha0;  // n
  Vector theta0;  // r
  double lambda_star = 0.0;
};

/// Exact minimizer of (1/2n)||Y - F theta - alpha||^2 + lambda*(||theta||^2 + ||alpha||^2).
///
/// Solved in dual form: with M = FF' + (1 + 2n lambda*) I_n, alpha = M^{-1} Y
/// and theta = F' alpha; M^{-1} is applied through the r x r Woodbury identity.
inline RidgeInit ridge_init(const Vector& response, const Matrix& factors, double lambda_star) {
  const Index n = response.size();
  if (factors.rows() != n) throw InvalidArgument("ridge_init: factor rows must equal n");
  if (!(lambda_star > 0.0)) throw InvalidArgument("ridge_init: lambda* must be positive");
  const double c = 1.0 + 2.0 * static_cast<double>(n) * lambda_star;
  const Index r = factors.cols();

  RidgeInit out;
  out.lambda_star = lambda_star;
  if (r == 0) {
    out.alpha0 = response / c;
    out.theta0 = Vector(0);
    return out;
  }
  Matrix small = factors.transpose() * factors;
  small.diagonal().array() += c;
  const Vector fy = factors.transpose() * response;
  const Vector coef = small.llt().solve(fy);
  out.alpha0 = (response - factors * coef) / c;
  out.theta0 = factors.transpose() * out.alpha0;
  return out;
}

/// Default candidate grid for lambda*: 10^-6 .. 10^2, one point per decade.
inline std::vector<double> default_ridge_grid() {
  std::vector<double> g;
  for (int e = -6; e <= 2; ++e) g.push_back(std::pow(10.0, e));
  return g;
}

/// Contiguous-fold cross-validation for lambda*. Held-out rows are predicted by
/// F theta alone (their alpha coordinates are unidentified, hence zero).
inline double select_ridge_lambda(const Vector& response, const Matrix& factors,
                                  std::span<const double> grid, int folds = 5) {
  const Index n = response.size();
  if (grid.empty()) throw InvalidArgument("select_ridge_lambda: grid is empty");
  if (folds < 2) throw InvalidArgument("select_ridge_lambda: need at least 2 folds");
  if (n < folds) throw InvalidArgument("select_ridge_lambda: fewer observations than folds");
  if (factors.rows() != n) throw InvalidArgument("select_ridge_lambda: factor rows must equal n");
  for (double g : grid) {
    if (!(g > 0.0)) throw InvalidArgument("select_ridge_lambda: grid values must be positive");
  }
  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() == 1) return sorted.front();

  const Index r = factors.cols();
  double best_err = std::numeric_limits<double>::infinity();
  double best_lambda = sorted.front();
  for (double lam : sorted) {
    double sse = 0.0;
    for (int f = 0; f < folds; ++f) {
      const Index lo = n * f / folds;
      const Index hi = n * (f + 1) / folds;
      const Index n_train = n - (hi - lo);
      Vector y_train(n_train);
      Matrix f_train(n_train, r);
      y_train << response.head(lo), response.tail(n - hi);
      if (r > 0) f_train << factors.topRows(lo), factors.bottomRows(n - hi);
      const RidgeInit fit = ridge_init(y_train, f_train, lam);
      for (Index i = lo; i < hi; ++i) {
        const double pred = r > 0 ? factors.row(i).dot(fit.theta0) : 0.0;
        const double e = response[i] - pred;
        sse += e * e;
      }
    }
    const double err = sse / static_cast<double>(n);
    if (err < best_err) {
      best_err = err;
      best_lambda = lam;
    }
  }
  return best_lambda;
}

}  // namespace silfs
