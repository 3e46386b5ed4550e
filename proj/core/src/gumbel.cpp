#include "blockopt/gumbel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "blockopt/error.hpp"
#include "blockopt/optimize.hpp"

namespace blockopt {

namespace {

void check_params(const GumbelParams& p) {
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma) || !std::isfinite(p.mu)) {
    throw InvalidArgument("Gumbel scale must be positive and parameters finite");
  }
}

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

Moments sample_moments(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  Moments m;
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  m.stddev = x.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return m;
}

bool is_degenerate(std::span<const double> x, const Moments& m) {
  if (x.size() < 2) return true;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double scale = std::max(std::abs(*lo), std::abs(*hi));
  return *lo == *hi || m.stddev <= 1e-13 * scale;
}

// Maximizes the (penalized) Gumbel log-likelihood on standardized data,
// parameterized as (mu, log sigma). prior_power is 0 for MLE, 2 for the
// Jeffreys posterior.
FitReport fit_impl(const MaximaSample& sample, Estimator method, const SolverOptions& opts) {
  const auto x = sample.values();
  const std::size_t m = x.size();
  if (m < 2) {
    throw InvalidArgument("Gumbel estimation needs at least 2 block maxima (got " + std::to_string(m) + ")");
  }
  const Moments mom = sample_moments(x);
  if (is_degenerate(x, mom)) {
    throw NumericError("degenerate block-maxima sample: all values equal, scale would collapse to 0");
  }

  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i) y[i] = (x[i] - mom.mean) / mom.stddev;
  const double prior_power = method == Estimator::MAP ? 2.0 : 0.0;
  const double inv_m = 1.0 / static_cast<double>(m);

  auto objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
    const double a = theta[0];
    const double b = theta[1];
    const double inv_sigma = std::exp(-b);
    double sum_z = 0.0, sum_e = 0.0, sum_ze = 0.0;
    for (double yi : y) {
      const double z = (yi - a) * inv_sigma;
      const double e = std::exp(-z);
      sum_z += z;
      sum_e += e;
      sum_ze += z * e;
    }
    const double md = static_cast<double>(m);
    const double loglik = -(md + prior_power) * b - sum_z - sum_e;
    grad.resize(2);
    grad[0] = -inv_sigma * (md - sum_e) * inv_m;
    grad[1] = -(-(md + prior_power) + sum_z - sum_ze) * inv_m;
    return -loglik * inv_m;
  };

  const GumbelParams start = moment_init(MaximaSample(y));
  Eigen::VectorXd theta0(2);
  theta0 << start.mu, std::log(start.sigma);

  BfgsOptions bopts;
  bopts.gradient_tolerance = opts.gradient_tolerance;
  bopts.max_iterations = opts.max_iterations;
  const BfgsResult res = bfgs_minimize(objective, theta0, bopts);

  FitReport report;
  report.method = method;
  report.params.mu = mom.mean + mom.stddev * res.x[0];
  report.params.sigma = mom.stddev * std::exp(res.x[1]);
  report.iterations = res.iterations;
  report.converged = res.converged && std::isfinite(report.params.mu) &&
                     std::isfinite(report.params.sigma) && report.params.sigma > 0.0;
  if (report.converged) {
    report.log_objective_at_optimum = method == Estimator::MAP
                                          ? log_posterior_jeffreys(report.params, sample)
                                          : log_likelihood(report.params, sample);
  }
  return report;
}

}  // namespace

MaximaSample::MaximaSample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidArgument("block-maxima sample must be non-empty");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("block-maxima sample contains a non-finite value");
  }
}

std::string_view to_string(Estimator e) { return e == Estimator::MAP ? "MAP" : "MLE"; }

Estimator parse_estimator(std::string_view name) {
  if (name == "MAP" || name == "map") return Estimator::MAP;
  if (name == "MLE" || name == "mle") return Estimator::MLE;
  throw InvalidArgument("unknown estimator '" + std::string(name) + "' (expected MAP or MLE)");
}

double cdf(const GumbelParams& p, double x) {
  check_params(p);
  return std::exp(-std::exp(-(x - p.mu) / p.sigma));
}

double pdf(const GumbelParams& p, double x) {
  check_params(p);
  const double z = (x - p.mu) / p.sigma;
  return std::exp(-z - std::exp(-z)) / p.sigma;
}

double log_likelihood(const GumbelParams& p, const MaximaSample& sample) {
  check_params(p);
  double sum_z = 0.0, sum_e = 0.0;
  for (double x : sample.values()) {
    const double z = (x - p.mu) / p.sigma;
    sum_z += z;
    sum_e += std::exp(-z);
  }
  return -static_cast<double>(sample.block_count()) * std::log(p.sigma) - sum_z - sum_e;
}

double log_posterior_jeffreys(const GumbelParams& p, const MaximaSample& sample) {
  return log_likelihood(p, sample) - 2.0 * std::log(p.sigma);
}

GumbelParams moment_init(const MaximaSample& sample) {
  const auto x = sample.values();
  const Moments mom = sample_moments(x);
  if (is_degenerate(x, mom)) throw NumericError("moment_init: sample has zero variance");
  GumbelParams p;
  p.sigma = mom.stddev * std::sqrt(6.0) / std::numbers::pi;
  p.mu = mom.mean - std::numbers::egamma * p.sigma;
  return p;
}

FitReport fit_mle(const MaximaSample& sample, const SolverOptions& opts) {
  return fit_impl(sample, Estimator::MLE, opts);
}

FitReport fit_map(const MaximaSample& sample, const SolverOptions& opts) {
  return fit_impl(sample, Estimator::MAP, opts);
}

FitReport fit(const MaximaSample& sample, Estimator estimator, const SolverOptions& opts) {
  return fit_impl(sample, estimator, opts);
}

double return_level(const GumbelParams& p, double m) {
  check_params(p);
  if (!(m >= 2.0)) throw InvalidArgument("return_level requires m >= 2");
  // log(m) - log(m - 1) == -log1p(-1/m), without the cancellation.
  return p.mu - p.sigma * std::log(-std::log1p(-1.0 / m));
}

double ks_statistic(const MaximaSample& sample, const GumbelParams& p) {
  check_params(p);
  std::vector<double> x(sample.values().begin(), sample.values().end());
  std::sort(x.begin(), x.end());
  const double m = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double g = cdf(p, x[i]);
    const double above = static_cast<double>(i + 1) / m - g;
    const double below = g - static_cast<double>(i) / m;
    d = std::max({d, above, below});
  }
  return std::clamp(d, 0.0, 1.0);
}

}  // namespace blockopt
