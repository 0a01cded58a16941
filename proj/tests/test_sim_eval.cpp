#include "oracles.hpp"
#include "silfs/benchmark.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

using namespace silfs;

namespace {

Vector vec(std::initializer_list<double> v) { return to_vector(std::vector<double>(v)); }

Matrix sample_covariance(const Matrix& x) {
  const Matrix centered = x.rowwise() - x.colwise().mean();
  return centered.transpose() * centered / static_cast<double>(x.rows() - 1);
}

bool bitwise_equal(const SyntheticDataset& a, const SyntheticDataset& b) {
  return a.dataset.response == b.dataset.response && a.dataset.design == b.dataset.design &&
         a.true_alpha == b.true_alpha && a.true_beta == b.true_beta && a.true_labels == b.true_labels;
}

Labels random_labels(oracle::Random& rng, int n, int k) {
  Labels out(static_cast<std::size_t>(n));
  for (int& l : out) l = rng.integer(1, k);
  return out;
}

}  // namespace

// --- generators ---------------------------------------------------------------------------

TEST(Generators, SameSeedSameData) {
  EXPECT_TRUE(bitwise_equal(generate_scenario_ab(Scenario::A, 3.0, 50, 20, 4, 9),
                            generate_scenario_ab(Scenario::A, 3.0, 50, 20, 4, 9)));
  EXPECT_TRUE(bitwise_equal(generate_collinearity_case(3, 40, 20, 9), generate_collinearity_case(3, 40, 20, 9)));
  EXPECT_TRUE(bitwise_equal(generate_toy(0.5, 40, 20, 9), generate_toy(0.5, 40, 20, 9)));
  EXPECT_FALSE(bitwise_equal(generate_toy(0.5, 40, 20, 9), generate_toy(0.5, 40, 20, 10)));
}

TEST(Generators, ScenarioAGroupProportions) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const SyntheticDataset d = generate_scenario_ab(Scenario::A, 3.0, 100, 50, 4, seed);
    const auto ones = std::count(d.true_labels.begin(), d.true_labels.end(), 1);
    EXPECT_LE(std::abs(static_cast<double>(ones) - 50.0), 4.0 * 5.0);
  }
}

TEST(Generators, LabelsFollowAlphaLevels) {
  const SyntheticDataset d = generate_scenario_ab(Scenario::B, 5.0, 100, 50, 4, 3);
  const std::vector<double> levels{-5.0, 0.0, 5.0};
  for (Index i = 0; i < 100; ++i) {
    EXPECT_EQ(d.true_alpha[i], levels[static_cast<std::size_t>(d.true_labels[static_cast<std::size_t>(i)] - 1)]);
  }
  EXPECT_EQ(d.true_k, 3);
  EXPECT_EQ(d.true_factors.cols(), 4);
}

TEST(Generators, ScenarioBCoefficients) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SyntheticDataset d = generate_scenario_ab(Scenario::B, 5.0, 100, 50, 4, seed);
    EXPECT_EQ(support_size(d.true_beta), 5);
    for (Index j = 0; j < 5; ++j) {
      EXPECT_GT(d.true_beta[j], 0.8);
      EXPECT_LT(d.true_beta[j], 1.0);
    }
  }
}

TEST(Generators, UncorrelatedDesignHasSmallCorrelations) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Matrix c = sample_covariance(generate_collinearity_case(0, 500, 20, seed).dataset.design);
    const Matrix off = c - Matrix(c.diagonal().asDiagonal());
    EXPECT_LE(off.cwiseAbs().maxCoeff(), 0.5);
  }
}

TEST(Generators, SpikedCovarianceSpectrum) {
  Rng rng(4);
  const Matrix g = detail::spike_matrix(rng, 20, 3);
  const Matrix lambda = g * g.transpose() + Matrix::Identity(20, 20);
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(lambda).eigenvalues().reverse();
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(ev[i], 26.0, 1e-10);
  for (Index i = 3; i < 20; ++i) EXPECT_NEAR(ev[i], 1.0, 1e-10);
  const SyntheticDataset d = generate_collinearity_case(3, 30, 20, 4);
  EXPECT_EQ(support_size(d.true_beta), 10);
  EXPECT_EQ(d.true_factors.cols(), 0);
}

TEST(Generators, ToyWithoutCorrelationIsStandardNormal) {
  const Matrix x = generate_toy(0.0, 2000, 10, 5).dataset.design;
  const Matrix c = sample_covariance(x);
  EXPECT_LE((c - Matrix::Identity(10, 10)).cwiseAbs().maxCoeff(), 0.15);
}

TEST(Generators, ToyEquicorrelationIsSpiked) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Matrix c = sample_covariance(generate_toy(0.9, 100, 100, seed).dataset.design);
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(c).eigenvalues().reverse();
    EXPECT_GT(ev[0], 10.0 * ev[1]);
  }
}

TEST(Generators, RejectOutOfRangeParameters) {
  EXPECT_THROW(generate_toy(0.96, 50, 20, 1), InvalidArgument);
  EXPECT_THROW(generate_collinearity_case(21, 50, 20, 1), InvalidArgument);
  EXPECT_THROW(generate_scenario_ab(Scenario::A, 3.0, 50, 20, 0, 1), InvalidArgument);
}

// --- Rand index -------------------------------------------------------------------------------

TEST(RandIndex, Examples) {
  EXPECT_DOUBLE_EQ(rand_index({1, 1, 2, 2}, {2, 2, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(rand_index({1, 1, 2, 2}, {1, 2, 1, 2}), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(rand_index({1, 2, 3}, {1, 1, 1}), 0.0);
}

TEST(RandIndex, MatchesPairEnumeration) {
  oracle::Random rng(61);
  for (int t = 0; t < 500; ++t) {
    const int n = rng.integer(2, 10);
    const Labels a = random_labels(rng, n, rng.integer(1, 4));
    const Labels b = random_labels(rng, n, rng.integer(1, 4));
    EXPECT_NEAR(rand_index(a, b), oracle::rand_index_pairs(a, b), 1e-15);
  }
}

TEST(RandIndex, SymmetricRelabelingInvariantAndOneOnlyForEqualPartitions) {
  oracle::Random rng(62);
  for (int t = 0; t < 200; ++t) {
    const int n = rng.integer(2, 12);
    const Labels a = random_labels(rng, n, 3);
    const Labels b = random_labels(rng, n, 3);
    EXPECT_EQ(rand_index(a, b), rand_index(b, a));
    Labels c = a;
    for (int& l : c) l = 10 - l;  // relabel
    EXPECT_EQ(rand_index(a, c), 1.0);
    EXPECT_EQ(rand_index(c, b), rand_index(a, b));
    bool same_partition = true;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        same_partition &= (a[static_cast<std::size_t>(i)] == a[static_cast<std::size_t>(j)]) ==
                          (b[static_cast<std::size_t>(i)] == b[static_cast<std::size_t>(j)]);
      }
    }
    EXPECT_EQ(rand_index(a, b) == 1.0, same_partition);
    EXPECT_GE(rand_index(a, b), 0.0);
    EXPECT_LE(rand_index(a, b), 1.0);
  }
}

TEST(RandIndex, RejectsMismatchedInput) {
  EXPECT_THROW(rand_index({1, 2}, {1}), InvalidArgument);
  EXPECT_THROW(rand_index({1}, {1}), InvalidArgument);
}

// --- RMSE and support metrics ------------------------------------------------------------------

TEST(PooledRmse, Examples) {
  const Vector beta = vec({1, 0, 2, 0});
  EXPECT_EQ(pooled_rmse({beta, beta}, {beta, beta}), 0.0);
  EXPECT_DOUBLE_EQ(pooled_rmse({vec({2, 0, 2, 0})}, {beta}), 0.5);
  oracle::Random rng(63);
  std::vector<Vector> est, est2, truth;
  for (int i = 0; i < 5; ++i) {
    truth.push_back(rng.vector(6));
    est.push_back(truth.back() + rng.vector(6));
    est2.push_back(truth.back() + 2.0 * (est.back() - truth.back()));
  }
  EXPECT_NEAR(pooled_rmse(est2, truth), 2.0 * pooled_rmse(est, truth), 1e-14);
}

TEST(SelectionMetrics, Examples) {
  Vector truth = Vector::Zero(50);
  truth.head(5).setOnes();
  const SelectionRates exact = selection_metrics(truth, truth);
  EXPECT_EQ(exact.sensitivity, 1.0);
  EXPECT_EQ(exact.specificity, 1.0);
  const SelectionRates none = selection_metrics(Vector::Zero(50), truth);
  EXPECT_EQ(none.sensitivity, 0.0);
  EXPECT_EQ(none.specificity, 1.0);
  Vector est = Vector::Zero(50);
  est.head(4).setConstant(0.5);
  est[5] = -0.2;
  const SelectionRates mixed = selection_metrics(est, truth);
  EXPECT_DOUBLE_EQ(mixed.sensitivity, 0.8);
  EXPECT_DOUBLE_EQ(mixed.specificity, 44.0 / 45.0);
}

TEST(SelectionMetrics, DegenerateTruthIsFlagged) {
  const SelectionRates zero = selection_metrics(vec({0, 1}), vec({0, 0}));
  EXPECT_TRUE(zero.sensitivity_undefined);
  EXPECT_EQ(zero.sensitivity, 1.0);
  EXPECT_EQ(zero.specificity, 0.5);
  const SelectionRates full = selection_metrics(vec({1, 0}), vec({1, 1}));
  EXPECT_TRUE(full.specificity_undefined);
  EXPECT_EQ(full.specificity, 1.0);
}

TEST(SelectionMetrics, RatesStayInUnitInterval) {
  oracle::Random rng(64);
  for (int t = 0; t < 200; ++t) {
    Vector a = rng.vector(10), b = rng.vector(10);
    for (Index j = 0; j < 10; ++j) {
      if (rng.uniform() < 0.5) a[j] = 0.0;
      if (rng.uniform() < 0.5) b[j] = 0.0;
    }
    const SelectionRates r = selection_metrics(a, b);
    EXPECT_GE(r.sensitivity, 0.0);
    EXPECT_LE(r.sensitivity, 1.0);
    EXPECT_GE(r.specificity, 0.0);
    EXPECT_LE(r.specificity, 1.0);
  }
}

// --- benchmark --------------------------------------------------------------------------------------

TEST(Benchmark, SeparableScenarioIsRecoveredExactly) {
  BenchmarkConfig cfg;
  cfg.scenario.kind = ScenarioKind::A;
  cfg.scenario.a = 10.0;
  cfg.reps = 1;
  const MetricsReport rep = run_benchmark(cfg).front();
  EXPECT_EQ(rep.failures, 0);
  EXPECT_EQ(rep.rand_index, 1.0);
  EXPECT_EQ(rep.k_hat_mean, 2.0);
}

TEST(Benchmark, AggregateCountsAndRanges) {
  std::vector<ReplicationRecord> recs(4);
  for (int i = 0; i < 4; ++i) {
    recs[static_cast<std::size_t>(i)].k_hat = i + 1;
    recs[static_cast<std::size_t>(i)].rand_index = 0.5 + 0.1 * i;
    recs[static_cast<std::size_t>(i)].sensitivity = 1.0;
    recs[static_cast<std::size_t>(i)].specificity = 0.5;
    recs[static_cast<std::size_t>(i)].alpha_error = vec({1, -1});
    recs[static_cast<std::size_t>(i)].beta_error = vec({0, 0, 0});
  }
  recs[3].failed = true;
  const MetricsReport rep = aggregate("m", 2, recs);
  EXPECT_EQ(rep.reps, 4);
  EXPECT_EQ(rep.failures, 1);
  EXPECT_EQ(rep.over_freq, 1);
  EXPECT_EQ(rep.under_freq, 1);
  EXPECT_DOUBLE_EQ(rep.k_hat_mean, 2.0);
  EXPECT_DOUBLE_EQ(rep.rand_index, 0.6);
  EXPECT_DOUBLE_EQ(rep.rmse_alpha, 1.0);
  EXPECT_DOUBLE_EQ(rep.rmse_beta, 0.0);
}

TEST(Benchmark, ResultsDoNotDependOnWorkerCount) {
  BenchmarkConfig cfg;
  cfg.scenario.n = 40;
  cfg.scenario.p = 15;
  cfg.reps = 3;
  cfg.methods = {Method::silfs_l2, Method::s_car};
  cfg.pipeline.k_grid = {1, 2, 3};
  cfg.threads = 1;
  const auto a = run_benchmark(cfg);
  cfg.threads = 3;
  const auto b = run_benchmark(cfg);
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t m = 0; m < 2; ++m) {
    EXPECT_EQ(a[m].rand_index, b[m].rand_index);
    EXPECT_EQ(a[m].rmse_alpha, b[m].rmse_alpha);
    EXPECT_EQ(a[m].rmse_beta, b[m].rmse_beta);
    for (std::size_t r = 0; r < 3; ++r) {
      EXPECT_EQ(a[m].records[r].alpha_error, b[m].records[r].alpha_error);
      EXPECT_EQ(a[m].records[r].seed, cfg.seed0 + r);
    }
  }
}

TEST(Benchmark, ScenarioARandIndex) {
  BenchmarkConfig cfg;
  cfg.scenario.kind = ScenarioKind::A;
  cfg.reps = 20;
  const MetricsReport rep = run_benchmark(cfg).front();
  EXPECT_GE(rep.rand_index, 0.95);
}

TEST(Benchmark, ToyCorrelatedDesignFavorsFactorAdjustment) {
  BenchmarkConfig cfg;
  cfg.scenario.kind = ScenarioKind::toy;
  cfg.scenario.rho = 0.9;
  cfg.scenario.n = 100;
  cfg.scenario.p = 100;
  cfg.reps = 20;
  cfg.methods = {Method::silfs_l2, Method::s_car};
  const auto reps = run_benchmark(cfg);
  EXPECT_GT(reps[0].rand_index, reps[1].rand_index);
}

TEST(Benchmark, RejectsEmptyRuns) {
  BenchmarkConfig cfg;
  cfg.reps = 0;
  EXPECT_THROW(run_benchmark(cfg), InvalidArgument);
  cfg.reps = 1;
  cfg.methods.clear();
  EXPECT_THROW(run_benchmark(cfg), InvalidArgument);
}
