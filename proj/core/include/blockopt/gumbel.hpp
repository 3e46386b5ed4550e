#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace blockopt {

/// Gumbel (GEV with zero shape) location/scale pair. Scale must be positive.
struct GumbelParams {
  double mu = 0.0;
  double sigma = 1.0;

  friend bool operator==(const GumbelParams&, const GumbelParams&) = default;
};

/// A block-maxima sample. `block_count()` is m, the number of blocks.
class MaximaSample {
 public:
  explicit MaximaSample(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t block_count() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

enum class Estimator { MAP, MLE };

std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view name);

struct SolverOptions {
  /// Infinity-norm tolerance on the gradient of the per-block log objective,
  /// i.e. the log objective divided by m. Scale-free across sample sizes.
  double gradient_tolerance = 1e-8;
  int max_iterations = 500;
};

struct FitReport {
  GumbelParams params;
  Estimator method = Estimator::MAP;
  /// Log-likelihood (MLE) or unnormalized log-posterior (MAP) at params.
  double log_objective_at_optimum = 0.0;
  int iterations = 0;
  bool converged = false;
};

double cdf(const GumbelParams& p, double x);
double pdf(const GumbelParams& p, double x);

/// -m log(sigma) - sum z_i - sum exp(-z_i), with z_i = (x_i - mu) / sigma.
double log_likelihood(const GumbelParams& p, const MaximaSample& sample);

/// log_likelihood - 2 log(sigma): the posterior under the Jeffreys prior 1/sigma^2,
/// up to its normalizing constant.
double log_posterior_jeffreys(const GumbelParams& p, const MaximaSample& sample);

/// Method-of-moments start: sigma = s sqrt(6)/pi, mu = mean - gamma_E sigma.
GumbelParams moment_init(const MaximaSample& sample);

FitReport fit_mle(const MaximaSample& sample, const SolverOptions& opts = {});
FitReport fit_map(const MaximaSample& sample, const SolverOptions& opts = {});
FitReport fit(const MaximaSample& sample, Estimator estimator, const SolverOptions& opts = {});

/// Level exceeded with probability 1/m: mu - sigma log(log m - log(m - 1)). Requires m >= 2.
double return_level(const GumbelParams& p, double m);

/// Exact Kolmogorov-Smirnov distance between the sample EDF and the Gumbel CDF.
double ks_statistic(const MaximaSample& sample, const GumbelParams& p);

}  // namespace blockopt
