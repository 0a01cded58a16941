#pragma once

#include "silfs/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>
#include <span>

namespace silfs {

/// Principal-component estimate of X = F B' + U.
///
/// `factors` is normalized so that F'F / n = I_r; the r = 0 decomposition
/// (no factor step) has empty `factors`/`loadings` and `idiosyncratic` = X.
struct FactorDecomposition {
  Matrix factors;        // n x r
  Matrix loadings;       // p x r
  Matrix idiosyncratic;  // n x p
  Vector eigenvalues;    // leading min(n, p) eigenvalues of XX', nonincreasing
  Index num_factors = 0;

  Index n() const { return idiosyncratic.rows(); }
  Index p() const { return idiosyncratic.cols(); }
  Index r() const { return num_factors; }

  /// F theta, or zero when r = 0.
  Vector factor_part(const Vector& theta) const {
    if (num_factors == 0) return Vector::Zero(n());
    return factors * theta;
  }
};

namespace detail {

// Flip each column so its largest-magnitude entry (first one on ties) is positive.
inline void fix_signs(Matrix& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, c));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (vectors(arg, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

struct GramSpectrum {
  Vector values;   // nonincreasing, clamped at zero
  Matrix vectors;  // n x m, columns are unit eigenvectors of XX'
};

// Eigen-decomposition of XX' through whichever Gram matrix is smaller.
// Only the leading `keep` eigenvectors are materialized.
inline GramSpectrum gram_spectrum(const Matrix& x, Index keep) {
  const Index n = x.rows();
  const Index p = x.cols();
  const Index m = std::min(n, p);
  keep = std::min(keep, m);

  const bool row_form = n <= p;
  const Matrix gram = row_form ? Matrix(x * x.transpose()) : Matrix(x.transpose() * x);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("symmetric eigensolver did not converge on a " +
                           std::to_string(gram.rows()) + "x" + std::to_string(gram.cols()) +
                           " Gram matrix");
  }
  // Eigen returns ascending order.
  const Vector& asc = solver.eigenvalues();
  const Index g = gram.rows();
  GramSpectrum out;
  out.values.resize(m);
  for (Index i = 0; i < m; ++i) out.values[i] = std::max(asc[g - 1 - i], 0.0);

  out.vectors.resize(n, keep);
  for (Index i = 0; i < keep; ++i) {
    const Vector v = solver.eigenvectors().col(g - 1 - i);
    if (row_form) {
      out.vectors.col(i) = v;
    } else {
      // XX' (Xv) = lambda (Xv); normalize to a unit vector.
      Vector xv = x * v;
      const double norm = xv.norm();
      if (!(norm > 0.0)) {
        throw NumericalFailure("factor " + std::to_string(i + 1) +
                               " has a zero eigenvalue; reduce the number of factors");
      }
      out.vectors.col(i) = xv / norm;
    }
  }
  fix_signs(out.vectors);
  return out;
}

}  // namespace detail

/// Eigenvalues of XX' in nonincreasing order (length min(n, p)).
inline Vector gram_eigenvalues(const Matrix& x) { return detail::gram_spectrum(x, 0).values; }

/// PCA estimate with r factors: F = sqrt(n) * top-r eigenvectors of XX',
/// B = X'F / n, U = X - F B'.
inline FactorDecomposition estimate_factors(const Dataset& data, Index r) {
  data.validate();
  const Index n = data.n();
  const Index p = data.p();
  if (r < 1 || r > std::min(n, p)) {
    throw InvalidArgument("number of factors must lie in [1, min(n, p)] = [1, " +
                          std::to_string(std::min(n, p)) + "], got " + std::to_string(r));
  }
  auto spectrum = detail::gram_spectrum(data.design, r);
  FactorDecomposition out;
  out.num_factors = r;
  out.eigenvalues = std::move(spectrum.values);
  out.factors = std::sqrt(static_cast<double>(n)) * spectrum.vectors;
  out.loadings = data.design.transpose() * out.factors / static_cast<double>(n);
  out.idiosyncratic = data.design - out.factors * out.loadings.transpose();
  return out;
}

/// The r = 0 decomposition used by the plain CAR baseline: U = X.
inline FactorDecomposition no_factors(const Dataset& data) {
  data.validate();
  FactorDecomposition out;
  out.num_factors = 0;
  out.factors = Matrix(data.n(), 0);
  out.loadings = Matrix(data.p(), 0);
  out.idiosyncratic = data.design;
  out.eigenvalues = gram_eigenvalues(data.design);
  return out;
}

/// Eigenvalue-ratio rule on a nonincreasing spectrum: the i in [1, r_star]
/// maximizing (ev[i-1] + c) / (ev[i] + c). Smallest i wins ties.
inline Index select_num_factors(std::span<const double> eigenvalues, Index r_star,
                                double c_np = 0.0) {
  if (r_star < 1 || r_star + 1 > static_cast<Index>(eigenvalues.size())) {
    throw InvalidArgument("r_star must lie in [1, " + std::to_string(eigenvalues.size() - 1) +
                          "], got " + std::to_string(r_star));
  }
  if (c_np < 0.0) throw InvalidArgument("C_{n,p} must be nonnegative");
  Index best = 1;
  double best_ratio = -1.0;
  for (Index i = 1; i <= r_star; ++i) {
    const double num = eigenvalues[i - 1] + c_np;
    const double den = eigenvalues[i] + c_np;
    double ratio;
    if (den > 0.0) {
      ratio = num / den;
    } else {
      ratio = num > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    }
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = i;
    }
  }
  return best;
}

inline Index default_r_star(const Dataset& data) {
  return std::max<Index>(1, std::min<Index>(8, std::min(data.n(), data.p()) - 1));
}

inline Index select_num_factors(const Dataset& data, Index r_star, double c_np = 0.0) {
  data.validate();
  if (r_star < 1 || r_star + 1 > std::min(data.n(), data.p())) {
    throw InvalidArgument("r_star + 1 must not exceed min(n, p) = " +
                          std::to_string(std::min(data.n(), data.p())));
  }
  const Vector ev = gram_eigenvalues(data.design);
  return select_num_factors(std::span<const double>(ev.data(), ev.size()), r_star, c_np);
}

/// Share of total variance carried by each eigenvalue.
inline Vector explained_variance(const Vector& eigenvalues) {
  const double total = eigenvalues.sum();
  if (!(total > 0.0)) return Vector::Zero(eigenvalues.size());
  return eigenvalues / total;
}

}  // namespace silfs
