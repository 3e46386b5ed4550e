#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include "blockopt/objectives.hpp"

namespace blockopt {

/// RBF-ARD kernel hyperparameters, in standardized target units.
struct GPHyperparameters {
  std::vector<double> length_scales;  ///< per input dimension, normalized units
  double signal_variance = 1.0;
  double noise_variance = 1e-6;

  friend bool operator==(const GPHyperparameters&, const GPHyperparameters&) = default;
};

struct GPOptions {
  int restarts = 8;
  int max_iterations = 100;  ///< BFGS iterations per restart
  double gradient_tolerance = 1e-5;
  double length_scale_min = 1e-2;
  double length_scale_max = 1e2;
  double signal_variance_min = 1e-2;
  double signal_variance_max = 1e2;
  double noise_min = 1e-6;
  double noise_max = 1.0;
  std::uint64_t seed = 0;
  /// Skip the likelihood search and use these values as given.
  std::optional<GPHyperparameters> fixed;
};

struct GaussianPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Maps a decision to [0,1]^d via (D_j - 1) / (U_j - 1).
Eigen::VectorXd normalize_spec(const BlockSpec& spec, std::span<const int> bounds);

/// Log marginal likelihood of zero-mean GP targets y at inputs X (rows).
/// Returns -inf when the kernel matrix cannot be factorized.
double gp_log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GPHyperparameters& h);

/// Fitted Gaussian-process regressor for one objective. Immutable; safe to
/// query from several threads.
class GPModel {
 public:
  /// Fits on decisions within `bounds`. Requires >= 2 distinct inputs.
  static GPModel fit(std::span<const BlockSpec> inputs, std::span<const double> targets,
                     std::span<const int> bounds, const GPOptions& opts = {});

  /// Same, with inputs already normalized (one row per point).
  static GPModel fit_normalized(const Eigen::MatrixXd& X, std::span<const double> targets,
                                const GPOptions& opts = {});

  GaussianPrediction predict(const BlockSpec& spec) const;
  GaussianPrediction predict_normalized(const Eigen::VectorXd& x) const;

  /// Batched prediction for query rows of Q (normalized inputs).
  void predict_batch(const Eigen::MatrixXd& Q, Eigen::VectorXd& mean, Eigen::VectorXd& variance) const;

  const GPHyperparameters& hyperparameters() const { return hyper_; }
  /// Log marginal likelihood of the standardized targets at the fitted hyperparameters.
  double log_marginal_likelihood() const { return lml_; }
  /// Signal variance in objective units.
  double prior_variance() const { return hyper_.signal_variance * scale_ * scale_; }
  double target_mean() const { return mean_; }
  double target_scale() const { return scale_; }
  /// True when all targets were equal; predictions are then the constant with prior variance.
  bool degenerate() const { return degenerate_; }
  std::size_t training_size() const { return static_cast<std::size_t>(X_.rows()); }
  double jitter() const { return jitter_; }

  double standardize(double y) const { return (y - mean_) / scale_; }
  double destandardize(double z) const { return mean_ + scale_ * z; }

 private:
  GPModel() = default;

  Eigen::MatrixXd X_;
  Eigen::MatrixXd X_scaled_;  // X_ with column j divided by length_scales[j]
  Eigen::VectorXd alpha_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  GPHyperparameters hyper_;
  double mean_ = 0.0;
  double scale_ = 1.0;
  double lml_ = 0.0;
  double jitter_ = 0.0;
  bool degenerate_ = false;
  std::vector<int> spec_bounds_;
};

}  // namespace blockopt
