#pragma once

// Seeded synthetic data generators.
//
// Randomness comes from std::mt19937_64, whose output sequence is fixed by the
// C++ standard. Uniforms use the top 53 bits of each draw and normals are
// obtained by inverting the standard normal CDF, so a (generator, seed) pair
// yields the same dataset on every conforming platform.

#include "silfs/core.hpp"

#include <boost/math/distributions/normal.hpp>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cstdint>
#include <random>
#include <string>

namespace silfs {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal by inversion of a uniform on the open interval (0, 1).
  double normal() {
    const double u = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    return boost::math::quantile(standard_, u);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 engine_;
  boost::math::normal_distribution<double> standard_{};
};

struct SyntheticDataset {
  Dataset dataset;
  Vector true_alpha;
  Vector true_beta;
  Labels true_labels;   // 1..K, increasing with the alpha level
  Matrix true_factors;  // n x r, empty without a factor structure
  Index true_k = 0;
  std::string generator_tag;
  std::uint64_t seed = 0;
};

enum class Scenario { A, B };

namespace detail {

// Draws equiprobable group labels and their intercept levels.
inline void draw_groups(Rng& rng, Index n, const std::vector<double>& levels, Vector& alpha,
                        Labels& labels) {
  const auto k = static_cast<double>(levels.size());
  alpha.resize(n);
  labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    auto g = static_cast<std::size_t>(rng.uniform() * k);
    if (g >= levels.size()) g = levels.size() - 1;
    alpha[i] = levels[g];
    labels[static_cast<std::size_t>(i)] = static_cast<int>(g) + 1;
  }
}

inline Vector sparse_beta(Rng& rng, Index p, Index nonzero, double lo, double hi) {
  Vector beta = Vector::Zero(p);
  for (Index j = 0; j < nonzero; ++j) beta[j] = rng.uniform(lo, hi);
  return beta;
}

// G = 5 (q_1..q_s), the leading columns of the orthogonal factor of a U(0,1)
// p x p matrix, so G G' + I has s eigenvalues 26 and p - s eigenvalues 1.
inline Matrix spike_matrix(Rng& rng, Index p, Index s) {
  Matrix spikes(p, s);
  if (s == 0) return spikes;
  Matrix a(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) a(i, j) = rng.uniform();
  }
  const Matrix q = Eigen::HouseholderQR<Matrix>(a).householderQ();
  spikes = 5.0 * q.leftCols(s);
  return spikes;
}

}  // namespace detail

/// Factor-structured data: X = F B' + U with vector AR(1) factors
/// f_t = Phi f_{t-1} + xi_t, Phi_st = 0.5^[s=t] 0.3^|s-t|, xi ~ N(0, 0.1 I),
/// f_0 = 0 and 50 discarded burn-in steps; B_ij ~ U(0, 1); U ~ N(0, 0.1 I);
/// beta = (U(0.8, 1) x 5, 0, ...); eps ~ N(0, 0.1). Scenario A has
/// alpha in {-a, a}, scenario B alpha in {-a, 0, a}, equiprobable.
inline SyntheticDataset generate_scenario_ab(Scenario scenario, double a, Index n, Index p,
                                             Index r, std::uint64_t seed) {
  if (n < 5 || p < 5) throw InvalidArgument("scenario A/B needs n >= 5 and p >= 5");
  if (r < 1) throw InvalidArgument("scenario A/B needs at least one factor");
  constexpr int kBurnIn = 50;
  const double sd = std::sqrt(0.1);
  Rng rng(seed);

  SyntheticDataset out;
  out.seed = seed;
  out.generator_tag = scenario == Scenario::A ? "A" : "B";
  const std::vector<double> levels =
      scenario == Scenario::A ? std::vector<double>{-a, a} : std::vector<double>{-a, 0.0, a};
  out.true_k = static_cast<Index>(levels.size());
  detail::draw_groups(rng, n, levels, out.true_alpha, out.true_labels);
  out.true_beta = detail::sparse_beta(rng, p, 5, 0.8, 1.0);

  Matrix loadings(p, r);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < r; ++j) loadings(i, j) = rng.uniform();
  }

  Matrix phi(r, r);
  for (Index s = 0; s < r; ++s) {
    for (Index t = 0; t < r; ++t) {
      phi(s, t) = (s == t ? 0.5 : 1.0) * std::pow(0.3, static_cast<double>(std::abs(s - t)));
    }
  }
  out.true_factors.resize(n, r);
  Vector f = Vector::Zero(r);
  Vector xi(r);
  for (Index t = 0; t < kBurnIn + n; ++t) {
    for (Index j = 0; j < r; ++j) xi[j] = rng.normal(0.0, sd);
    f = phi * f + xi;
    if (t >= kBurnIn) out.true_factors.row(t - kBurnIn) = f.transpose();
  }

  Matrix x = out.true_factors * loadings.transpose();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) x(i, j) += rng.normal(0.0, sd);
  }
  Vector y = out.true_alpha + x * out.true_beta;
  for (Index i = 0; i < n; ++i) y[i] += rng.normal(0.0, sd);

  out.dataset = Dataset{std::move(y), std::move(x)};
  return out;
}

/// Spiked-covariance data without a factor model: x ~ N(0, G G' + I_p) with
/// G = 5 (q_1..q_s) from the QR decomposition of a U(0,1) p x p matrix. s = 0
/// gives x ~ N(0, I_p). beta has 10 U(1, 2) entries, alpha = +/-3, eps ~ N(0, 0.1).
inline SyntheticDataset generate_collinearity_case(Index s, Index n, Index p, std::uint64_t seed) {
  if (s < 0 || s > p) throw InvalidArgument("collinearity case needs 0 <= s <= p");
  if (p < 10) throw InvalidArgument("collinearity case needs p >= 10");
  if (n < 2) throw InvalidArgument("collinearity case needs n >= 2");
  Rng rng(seed);
  SyntheticDataset out;
  out.seed = seed;
  out.generator_tag = s == 0 ? "uncorrelated" : "collinear-s" + std::to_string(s);
  out.true_k = 2;
  detail::draw_groups(rng, n, {-3.0, 3.0}, out.true_alpha, out.true_labels);
  out.true_beta = detail::sparse_beta(rng, p, 10, 1.0, 2.0);

  const Matrix spikes = detail::spike_matrix(rng, p, s);
  Matrix x(n, p);
  Vector z1(s);
  Vector z2(p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < s; ++j) z1[j] = rng.normal();
    for (Index j = 0; j < p; ++j) z2[j] = rng.normal();
    x.row(i) = (s > 0 ? Vector(spikes * z1 + z2) : z2).transpose();
  }
  Vector y = out.true_alpha + x * out.true_beta;
  for (Index i = 0; i < n; ++i) y[i] += rng.normal(0.0, std::sqrt(0.1));
  out.true_factors = Matrix(n, 0);
  out.dataset = Dataset{std::move(y), std::move(x)};
  return out;
}

/// Equicorrelated design: x ~ N(0, Xi), Xi with unit diagonal and off-diagonal
/// rho, drawn through the Cholesky factor of Xi. beta has 10 U(2, 5) entries,
/// alpha = +/-1, eps ~ N(0, 0.01).
inline SyntheticDataset generate_toy(double rho, Index n, Index p, std::uint64_t seed) {
  if (!(rho >= 0.0 && rho <= 0.95)) throw InvalidArgument("toy example needs rho in [0, 0.95]");
  if (p < 10) throw InvalidArgument("toy example needs p >= 10");
  if (n < 2) throw InvalidArgument("toy example needs n >= 2");
  Rng rng(seed);
  SyntheticDataset out;
  out.seed = seed;
  out.generator_tag = "toy";
  out.true_k = 2;
  detail::draw_groups(rng, n, {-1.0, 1.0}, out.true_alpha, out.true_labels);
  out.true_beta = detail::sparse_beta(rng, p, 10, 2.0, 5.0);

  Matrix xi = Matrix::Constant(p, p, rho);
  xi.diagonal().setOnes();
  const Eigen::LLT<Matrix> chol(xi);
  if (chol.info() != Eigen::Success) throw NumericalFailure("toy covariance is not positive definite");
  const Matrix lower = chol.matrixL();

  Matrix z(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) z(i, j) = rng.normal();
  }
  Matrix x = z * lower.transpose();
  Vector y = out.true_alpha + x * out.true_beta;
  for (Index i = 0; i < n; ++i) y[i] += rng.normal(0.0, 0.1);
  out.true_factors = Matrix(n, 0);
  out.dataset = Dataset{std::move(y), std::move(x)};
  return out;
}

}  // namespace silfs
