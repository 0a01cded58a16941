#pragma once

// Independent reference implementations used only by the tests. They favor
// obviousness over speed and share no code with the library beyond the
// Eigen containers.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Cyclic Jacobi rotations for a symmetric matrix. Returns eigenvalues in
/// nonincreasing order with unit eigenvectors in the matching columns.
inline std::pair<Vector, Matrix> jacobi_eigen(Matrix a, int max_sweeps = 100) {
  const Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off < 1e-30) break;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Index x, Index y) { return a(x, x) > a(y, y); });
  Vector values(n);
  Matrix vectors(n, n);
  for (Index i = 0; i < n; ++i) {
    values[i] = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return {values, vectors};
}

/// Triple-loop matrix-vector product.
inline Vector naive_matvec(const Matrix& a, const Vector& x) {
  Vector out = Vector::Zero(a.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (Index j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    out[i] = s;
  }
  return out;
}

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

/// Minimum cost over every split of the sorted values into K nonempty
/// contiguous runs, by enumerating all cut positions.
inline double brute_force_cluster_cost(std::vector<double> values, int k, bool squared) {
  std::sort(values.begin(), values.end());
  const int n = static_cast<int>(values.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> cuts;
  std::function<void(int, int)> rec = [&](int start, int remaining) {
    if (remaining == 0) {
      std::vector<int> bounds{0};
      for (int c : cuts) bounds.push_back(c);
      bounds.push_back(n);
      double cost = 0.0;
      for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
        std::vector<double> seg(values.begin() + bounds[s], values.begin() + bounds[s + 1]);
        double center;
        if (squared) {
          center = 0.0;
          for (double x : seg) center += x;
          center /= static_cast<double>(seg.size());
        } else {
          center = median_of(seg);
        }
        for (double x : seg) cost += squared ? (x - center) * (x - center) : std::abs(x - center);
      }
      best = std::min(best, cost);
      return;
    }
    for (int c = start; c <= n - remaining; ++c) {
      cuts.push_back(c);
      rec(c + 1, remaining - 1);
      cuts.pop_back();
    }
  };
  rec(1, k - 1);
  return best;
}

/// Rand index by enumerating every pair.
inline double rand_index_pairs(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = a.size();
  double agree = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool sa = a[i] == a[j];
      const bool sb = b[i] == b[j];
      if (sa == sb) agree += 1.0;
      total += 1.0;
    }
  }
  return agree / total;
}

/// Ridge on the pseudo-design (F, I_n) solved by forming the full
/// (r + n)-dimensional normal equations.
inline Vector dense_ridge(const Vector& y, const Matrix& f, double lambda) {
  const Index n = y.size();
  const Index r = f.cols();
  Matrix xs(n, r + n);
  xs.leftCols(r) = f;
  xs.rightCols(n) = Matrix::Identity(n, n);
  Matrix h = xs.transpose() * xs / static_cast<double>(n);
  h.diagonal().array() += 2.0 * lambda;
  return h.fullPivLu().solve(xs.transpose() * y / static_cast<double>(n));
}

/// Worst violation of the LASSO subgradient conditions at beta, computed
/// entry by entry.
inline double lasso_kkt(const Matrix& x, const Vector& y, const Vector& beta, double lambda) {
  const double n = static_cast<double>(x.rows());
  Vector resid = y;
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) resid[i] -= x(i, j) * beta[j];
  }
  double worst = 0.0;
  for (Index j = 0; j < x.cols(); ++j) {
    double g = 0.0;
    for (Index i = 0; i < x.rows(); ++i) g += x(i, j) * resid[i];
    g /= n;
    if (beta[j] > 0) {
      worst = std::max(worst, std::abs(g - lambda));
    } else if (beta[j] < 0) {
      worst = std::max(worst, std::abs(g + lambda));
    } else {
      worst = std::max(worst, std::abs(g) - lambda);
    }
  }
  return worst;
}

/// Deterministic helpers for random test instances.
struct Random {
  explicit Random(std::uint64_t seed) : engine(seed) {}
  double normal() { return norm(engine); }
  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
  Matrix matrix(Index r, Index c) {
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i) {
      for (Index j = 0; j < c; ++j) m(i, j) = normal();
    }
    return m;
  }
  Vector vector(Index n) { return matrix(n, 1).col(0); }
  std::mt19937_64 engine;
  std::normal_distribution<double> norm{0.0, 1.0};
};

}  // namespace oracle
