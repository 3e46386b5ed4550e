#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <blockopt/error.hpp>
#include <blockopt/gp.hpp>
#include <blockopt/rng.hpp>

namespace blockopt {
namespace {

double rbf(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const GPHyperparameters& h) {
  double r2 = 0.0;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    const double t = (a(j) - b(j)) / h.length_scales[static_cast<std::size_t>(j)];
    r2 += t * t;
  }
  return h.signal_variance * std::exp(-0.5 * r2);
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& X, const GPHyperparameters& h) {
  Eigen::MatrixXd K(X.rows(), X.rows());
  for (Eigen::Index a = 0; a < X.rows(); ++a) {
    for (Eigen::Index b = 0; b < X.rows(); ++b) K(a, b) = rbf(X.row(a), X.row(b), h);
  }
  K.diagonal().array() += h.noise_variance;
  return K;
}

struct Data {
  Eigen::MatrixXd X;
  std::vector<double> y;
};

Data random_data(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  Data out{Eigen::MatrixXd(n, d), {}};
  for (int i = 0; i < n; ++i) {
    double f = 0.0;
    for (int j = 0; j < d; ++j) {
      out.X(i, j) = rng.uniform();
      f += std::sin(3.0 * out.X(i, j) + j);
    }
    out.y.push_back(2.0 + 0.5 * f + 0.01 * rng.normal());
  }
  return out;
}

TEST(GP, LogMarginalLikelihoodMatchesDenseFormula) {
  const auto data = random_data(12, 2, 1);
  const GPHyperparameters h{{0.3, 0.7}, 1.4, 0.05};
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(data.y.data(), 12).array() - 2.0;
  const Eigen::MatrixXd K = gram(data.X, h);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  const double expected = -0.5 * y.dot(lu.solve(y)) - 0.5 * std::log(lu.determinant()) -
                          6.0 * std::log(2.0 * std::numbers::pi);
  EXPECT_NEAR(gp_log_marginal_likelihood(data.X, y, h), expected, 1e-9);
}

TEST(GP, FixedHyperparametersMatchDensePosterior) {
  const auto data = random_data(10, 2, 2);
  GPOptions opts;
  opts.fixed = GPHyperparameters{{0.4, 0.25}, 1.1, 1e-3};
  const auto model = GPModel::fit_normalized(data.X, data.y, opts);

  double mean = 0.0;
  for (double v : data.y) mean += v;
  mean /= 10.0;
  double ss = 0.0;
  for (double v : data.y) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / 10.0);
  Eigen::VectorXd z(10);
  for (int i = 0; i < 10; ++i) z(i) = (data.y[static_cast<std::size_t>(i)] - mean) / sd;

  const Eigen::MatrixXd Kinv = gram(data.X, *opts.fixed).inverse();
  Rng rng(9);
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd x(2);
    x << rng.uniform(), rng.uniform();
    Eigen::VectorXd ks(10);
    for (int i = 0; i < 10; ++i) ks(i) = rbf(data.X.row(i), x, *opts.fixed);
    const double m = mean + sd * ks.dot(Kinv * z);
    const double v = sd * sd * (opts.fixed->signal_variance - ks.dot(Kinv * ks));
    const auto p = model.predict_normalized(x);
    EXPECT_NEAR(p.mean, m, 1e-9);
    EXPECT_NEAR(p.variance, std::max(0.0, v), 1e-9);
  }
}

TEST(GP, FitImprovesOnDefaultStart) {
  const auto data = random_data(15, 2, 3);
  const auto model = GPModel::fit_normalized(data.X, data.y);
  Eigen::VectorXd z(15);
  for (int i = 0; i < 15; ++i) z(i) = model.standardize(data.y[static_cast<std::size_t>(i)]);
  const GPHyperparameters start{{0.5, 0.5}, 1.0, 1e-3};
  EXPECT_GE(model.log_marginal_likelihood(), gp_log_marginal_likelihood(data.X, z, start) - 1e-9);
  EXPECT_NEAR(model.log_marginal_likelihood(), gp_log_marginal_likelihood(data.X, z, model.hyperparameters()), 1e-9);
  const auto& h = model.hyperparameters();
  for (double l : h.length_scales) {
    EXPECT_GE(l, 1e-2);
    EXPECT_LE(l, 1e2);
  }
  EXPECT_GE(h.noise_variance, 1e-6);
  EXPECT_LE(h.noise_variance, 1.0);
}

TEST(GP, FitIsDeterministicForSeed) {
  const auto data = random_data(15, 3, 4);
  GPOptions opts;
  opts.seed = 17;
  const auto a = GPModel::fit_normalized(data.X, data.y, opts);
  const auto b = GPModel::fit_normalized(data.X, data.y, opts);
  EXPECT_EQ(a.hyperparameters(), b.hyperparameters());
}

TEST(GP, InterpolatesTrainingData) {
  auto data = random_data(8, 1, 5);
  for (int i = 0; i < 8; ++i) data.X(i, 0) = i / 7.0;
  GPOptions opts;
  opts.fixed = GPHyperparameters{{0.2}, 1.0, 1e-6};
  const auto model = GPModel::fit_normalized(data.X, data.y, opts);
  for (int i = 0; i < 8; ++i) {
    const auto p = model.predict_normalized(data.X.row(i));
    EXPECT_NEAR(p.mean, data.y[static_cast<std::size_t>(i)], 1e-4);
    EXPECT_LT(p.variance, 1e-4);
  }
}

TEST(GP, RevertsToPriorFarAway) {
  const auto data = random_data(8, 1, 6);
  const auto model = GPModel::fit_normalized(data.X, data.y);
  const double lmax = model.hyperparameters().length_scales[0];
  Eigen::VectorXd x(1);
  x << 1.0 + 50.0 * lmax;
  const auto p = model.predict_normalized(x);
  EXPECT_NEAR(p.mean, model.target_mean(), 1e-3);
  EXPECT_NEAR(p.variance, model.prior_variance(), 1e-3);
}

TEST(GP, SymmetricConfiguration) {
  Eigen::MatrixXd X(2, 1);
  X << 0.2, 0.8;
  GPOptions opts;
  opts.fixed = GPHyperparameters{{0.3}, 1.0, 1e-4};
  const std::vector<double> eq{3.0, 3.0};
  const auto sym = GPModel::fit_normalized(X, eq, opts);
  for (double delta : {0.05, 0.1, 0.27}) {
    Eigen::VectorXd a(1), b(1);
    a << 0.5 - delta;
    b << 0.5 + delta;
    EXPECT_NEAR(sym.predict_normalized(a).mean, sym.predict_normalized(b).mean, 1e-10);
    EXPECT_NEAR(sym.predict_normalized(a).variance, sym.predict_normalized(b).variance, 1e-10);
  }
  // Targets symmetric about their mean give antisymmetric deviations.
  const std::vector<double> anti{1.0, 3.0};
  const auto m = GPModel::fit_normalized(X, anti, opts);
  Eigen::VectorXd a(1), b(1);
  a << 0.4;
  b << 0.6;
  EXPECT_NEAR(m.predict_normalized(a).mean - 2.0, -(m.predict_normalized(b).mean - 2.0), 1e-10);
  EXPECT_NEAR(m.predict_normalized(a).variance, m.predict_normalized(b).variance, 1e-10);
}

TEST(GP, DegenerateTargets) {
  Eigen::MatrixXd X(2, 1);
  X << 0.2, 0.8;
  const std::vector<double> y{4.0, 4.0};
  const auto model = GPModel::fit_normalized(X, y);
  EXPECT_TRUE(model.degenerate());
  Eigen::VectorXd x(1);
  x << 0.5;
  const auto p = model.predict_normalized(x);
  EXPECT_EQ(p.mean, 4.0);
  EXPECT_EQ(p.variance, model.prior_variance());
  EXPECT_GT(p.variance, 0.0);
}

TEST(GP, RejectsBadInputs) {
  Eigen::MatrixXd one(1, 1);
  one << 0.5;
  EXPECT_THROW(GPModel::fit_normalized(one, std::vector<double>{1.0}), InvalidArgument);
  Eigen::MatrixXd dup(2, 1);
  dup << 0.5, 0.5;
  EXPECT_THROW(GPModel::fit_normalized(dup, std::vector<double>{1.0, 2.0}), InvalidArgument);
}

TEST(GP, BatchMatchesSinglePredictions) {
  const auto data = random_data(20, 3, 7);
  const auto model = GPModel::fit_normalized(data.X, data.y);
  Rng rng(8);
  Eigen::MatrixXd Q(1100, 3);
  for (Eigen::Index i = 0; i < Q.rows(); ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) Q(i, j) = rng.uniform();
  }
  Eigen::VectorXd mean, var;
  model.predict_batch(Q, mean, var);
  for (Eigen::Index i = 0; i < Q.rows(); i += 97) {
    const auto p = model.predict_normalized(Q.row(i));
    EXPECT_NEAR(mean(i), p.mean, 1e-12 * (1.0 + std::abs(p.mean)));
    EXPECT_NEAR(var(i), p.variance, 1e-12);
  }
}

TEST(GP, SpecInputsAreNormalized) {
  const std::vector<int> bounds{50, 11};
  const auto x = normalize_spec(BlockSpec{1, 6}, bounds);
  EXPECT_DOUBLE_EQ(x(0), 0.0);
  EXPECT_DOUBLE_EQ(x(1), 0.5);
  const std::vector<BlockSpec> specs{{1, 1}, {50, 11}, {25, 6}};
  const std::vector<double> y{0.1, 0.3, 0.2};
  const auto model = GPModel::fit(specs, y, bounds);
  EXPECT_EQ(model.training_size(), 3u);
  EXPECT_DOUBLE_EQ(model.predict(BlockSpec{25, 6}).mean,
                   model.predict_normalized(normalize_spec(BlockSpec{25, 6}, bounds)).mean);
}

}  // namespace
}  // namespace blockopt
