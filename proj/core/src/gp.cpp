#include "blockopt/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "blockopt/error.hpp"
#include "blockopt/optimize.hpp"
#include "blockopt/rng.hpp"

namespace blockopt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kJitterStart = 1e-6;
constexpr double kJitterMax = 1e-2;
constexpr Eigen::Index kPredictChunk = 512;

// Squared coordinate differences, one n x n matrix per input dimension.
struct PairwiseDiffs {
  std::vector<Eigen::MatrixXd> sq;

  explicit PairwiseDiffs(const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.rows();
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      Eigen::MatrixXd d(n, n);
      for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
          const double t = X(a, j) - X(b, j);
          d(a, b) = t * t;
        }
      }
      sq.push_back(std::move(d));
    }
  }
};

Eigen::MatrixXd signal_kernel(const PairwiseDiffs& diffs, const GPHyperparameters& h, Eigen::Index n) {
  Eigen::MatrixXd r2 = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t j = 0; j < diffs.sq.size(); ++j) {
    const double l = h.length_scales[j];
    r2 += diffs.sq[j] / (l * l);
  }
  return h.signal_variance * (-0.5 * r2.array()).exp().matrix();
}

// Log marginal likelihood; when grad is non-null it receives the derivative
// with respect to (log l_1..log l_d, log signal, log noise).
double lml_impl(const PairwiseDiffs& diffs, const Eigen::VectorXd& y, const GPHyperparameters& h,
                Eigen::VectorXd* grad) {
  const Eigen::Index n = y.size();
  const Eigen::MatrixXd Kf = signal_kernel(diffs, h, n);
  Eigen::MatrixXd K = Kf;
  K.diagonal().array() += h.noise_variance;
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) return -kInf;
  const Eigen::VectorXd alpha = llt.solve(y);
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double value =
      -0.5 * y.dot(alpha) - 0.5 * logdet - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  if (!std::isfinite(value)) return -kInf;
  if (grad) {
    const std::size_t d = diffs.sq.size();
    grad->resize(static_cast<Eigen::Index>(d + 2));
    const Eigen::MatrixXd W = alpha * alpha.transpose() - llt.solve(Eigen::MatrixXd::Identity(n, n));
    const Eigen::MatrixXd WK = W.cwiseProduct(Kf);
    for (std::size_t j = 0; j < d; ++j) {
      const double l = h.length_scales[j];
      (*grad)(static_cast<Eigen::Index>(j)) = 0.5 * WK.cwiseProduct(diffs.sq[j]).sum() / (l * l);
    }
    (*grad)(static_cast<Eigen::Index>(d)) = 0.5 * WK.sum();
    (*grad)(static_cast<Eigen::Index>(d + 1)) = 0.5 * h.noise_variance * W.trace();
  }
  return value;
}

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

// Box in log space for each unconstrained coordinate.
struct HyperBox {
  std::vector<double> lo, hi;

  HyperBox(std::size_t d, const GPOptions& o) {
    for (std::size_t j = 0; j < d; ++j) {
      lo.push_back(std::log(o.length_scale_min));
      hi.push_back(std::log(o.length_scale_max));
    }
    lo.push_back(std::log(o.signal_variance_min));
    hi.push_back(std::log(o.signal_variance_max));
    lo.push_back(std::log(o.noise_min));
    hi.push_back(std::log(o.noise_max));
  }

  std::size_t size() const { return lo.size(); }

  GPHyperparameters decode(const Eigen::VectorXd& u) const {
    GPHyperparameters h;
    const std::size_t d = size() - 2;
    for (std::size_t k = 0; k < size(); ++k) {
      const double v = std::exp(lo[k] + (hi[k] - lo[k]) * sigmoid(u(static_cast<Eigen::Index>(k))));
      if (k < d) {
        h.length_scales.push_back(v);
      } else if (k == d) {
        h.signal_variance = v;
      } else {
        h.noise_variance = v;
      }
    }
    return h;
  }

  double encode(std::size_t k, double value) const {
    const double p = std::clamp((std::log(value) - lo[k]) / (hi[k] - lo[k]), 1e-6, 1.0 - 1e-6);
    return logit(p);
  }
};

void check_options(const GPOptions& o) {
  const bool ok = o.restarts >= 1 && o.max_iterations >= 1 && o.length_scale_min > 0 &&
                  o.length_scale_min < o.length_scale_max && o.signal_variance_min > 0 &&
                  o.signal_variance_min < o.signal_variance_max && o.noise_min > 0 && o.noise_min < o.noise_max;
  if (!ok) throw InvalidArgument("invalid GP hyperparameter search options");
}

GPHyperparameters search_hyperparameters(const PairwiseDiffs& diffs, const Eigen::VectorXd& y, std::size_t d,
                                         const GPOptions& opts) {
  const HyperBox box(d, opts);
  const Eigen::Index p = static_cast<Eigen::Index>(box.size());
  const double n = static_cast<double>(y.size());

  // Minimize -LML / n in the unconstrained coordinates.
  const Objective objective = [&](const Eigen::VectorXd& u, Eigen::VectorXd& g) {
    const GPHyperparameters h = box.decode(u);
    Eigen::VectorXd glog;
    const double v = lml_impl(diffs, y, h, &glog);
    g.resize(p);
    if (!std::isfinite(v)) {
      g.setZero();
      return kInf;
    }
    for (Eigen::Index k = 0; k < p; ++k) {
      const double s = sigmoid(u(k));
      const auto kk = static_cast<std::size_t>(k);
      g(k) = -glog(k) * (box.hi[kk] - box.lo[kk]) * s * (1.0 - s) / n;
    }
    return -v / n;
  };

  BfgsOptions bopts;
  bopts.gradient_tolerance = opts.gradient_tolerance;
  bopts.max_iterations = opts.max_iterations;

  Rng rng(mix_seed(opts.seed, 0x6770));
  double best = kInf;
  GPHyperparameters best_h;
  for (int start = 0; start < opts.restarts; ++start) {
    Eigen::VectorXd u0(p);
    if (start == 0) {
      for (std::size_t j = 0; j < d; ++j) u0(static_cast<Eigen::Index>(j)) = box.encode(j, 0.5);
      u0(p - 2) = box.encode(d, 1.0);
      u0(p - 1) = box.encode(d + 1, 1e-3);
    } else {
      for (Eigen::Index k = 0; k < p; ++k) u0(k) = logit(0.05 + 0.9 * rng.uniform());
    }
    const BfgsResult r = bfgs_minimize(objective, u0, bopts);
    if (std::isfinite(r.value) && r.value < best) {
      best = r.value;
      best_h = box.decode(r.x);
    }
  }
  if (!std::isfinite(best)) throw NumericError("GP likelihood could not be evaluated at any start");
  return best_h;
}

}  // namespace

Eigen::VectorXd normalize_spec(const BlockSpec& spec, std::span<const int> bounds) {
  if (spec.size() != bounds.size()) throw InvalidArgument("block spec rank does not match the bounds");
  Eigen::VectorXd x(static_cast<Eigen::Index>(spec.size()));
  for (std::size_t j = 0; j < spec.size(); ++j) {
    x(static_cast<Eigen::Index>(j)) =
        bounds[j] > 1 ? static_cast<double>(spec[j] - 1) / static_cast<double>(bounds[j] - 1) : 0.0;
  }
  return x;
}

double gp_log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GPHyperparameters& h) {
  if (X.rows() != y.size()) throw InvalidArgument("GP inputs and targets differ in length");
  if (h.length_scales.size() != static_cast<std::size_t>(X.cols())) {
    throw InvalidArgument("need one length scale per input dimension");
  }
  return lml_impl(PairwiseDiffs(X), y, h, nullptr);
}

GPModel GPModel::fit(std::span<const BlockSpec> inputs, std::span<const double> targets, std::span<const int> bounds,
                     const GPOptions& opts) {
  if (inputs.size() != targets.size()) throw InvalidArgument("GP inputs and targets differ in length");
  Eigen::MatrixXd X(static_cast<Eigen::Index>(inputs.size()), static_cast<Eigen::Index>(bounds.size()));
  for (std::size_t i = 0; i < inputs.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = normalize_spec(inputs[i], bounds);
  GPModel model = fit_normalized(X, targets, opts);
  model.spec_bounds_.assign(bounds.begin(), bounds.end());
  return model;
}

GPModel GPModel::fit_normalized(const Eigen::MatrixXd& X, std::span<const double> targets, const GPOptions& opts) {
  check_options(opts);
  const Eigen::Index n = X.rows();
  const auto d = static_cast<std::size_t>(X.cols());
  if (static_cast<std::size_t>(n) != targets.size()) throw InvalidArgument("GP inputs and targets differ in length");
  if (n < 2) throw InvalidArgument("GP needs at least two training points");
  if (d == 0) throw InvalidArgument("GP needs at least one input dimension");
  for (double t : targets) {
    if (!std::isfinite(t)) throw InvalidArgument("GP targets must be finite");
  }
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      if (X.row(a) == X.row(b)) throw InvalidArgument("duplicate GP training inputs");
    }
  }
  if (opts.fixed && opts.fixed->length_scales.size() != d) {
    throw InvalidArgument("need one length scale per input dimension");
  }

  GPModel m;
  m.X_ = X;
  double sum = 0.0;
  for (double t : targets) sum += t;
  m.mean_ = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double t : targets) ss += (t - m.mean_) * (t - m.mean_);
  const double sd = std::sqrt(ss / static_cast<double>(n));

  if (!(sd > 1e-12 * std::max(1.0, std::abs(m.mean_)))) {
    m.degenerate_ = true;
    m.scale_ = 1.0;
    if (opts.fixed) {
      m.hyper_ = *opts.fixed;
    } else {
      m.hyper_.length_scales.assign(d, 0.5);
      m.hyper_.signal_variance = 1.0;
      m.hyper_.noise_variance = opts.noise_min;
    }
    return m;
  }
  m.scale_ = sd;
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = (targets[static_cast<std::size_t>(i)] - m.mean_) / sd;

  const PairwiseDiffs diffs(X);
  m.hyper_ = opts.fixed ? *opts.fixed : search_hyperparameters(diffs, y, d, opts);

  const Eigen::MatrixXd Kf = signal_kernel(diffs, m.hyper_, n);
  double jitter = 0.0;
  for (;;) {
    Eigen::MatrixXd K = Kf;
    K.diagonal().array() += m.hyper_.noise_variance + jitter;
    m.chol_.compute(K);
    if (m.chol_.info() == Eigen::Success) break;
    jitter = jitter == 0.0 ? kJitterStart : 2.0 * jitter;
    if (jitter > kJitterMax) throw NumericError("GP kernel matrix is not positive definite even with jitter");
  }
  m.jitter_ = jitter;
  m.alpha_ = m.chol_.solve(y);
  m.lml_ = lml_impl(diffs, y, m.hyper_, nullptr);

  m.X_scaled_ = X;
  for (std::size_t j = 0; j < d; ++j) m.X_scaled_.col(static_cast<Eigen::Index>(j)) /= m.hyper_.length_scales[j];
  return m;
}

GaussianPrediction GPModel::predict(const BlockSpec& spec) const {
  if (spec_bounds_.empty()) throw InvalidArgument("model was fitted on normalized inputs; use predict_normalized");
  return predict_normalized(normalize_spec(spec, spec_bounds_));
}

GaussianPrediction GPModel::predict_normalized(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd Q(1, x.size());
  Q.row(0) = x.transpose();
  Eigen::VectorXd mean, var;
  predict_batch(Q, mean, var);
  return {mean(0), var(0)};
}

void GPModel::predict_batch(const Eigen::MatrixXd& Q, Eigen::VectorXd& mean, Eigen::VectorXd& variance) const {
  if (Q.cols() != X_.cols()) throw InvalidArgument("query dimension does not match the training inputs");
  const Eigen::Index nq = Q.rows();
  mean.resize(nq);
  variance.resize(nq);
  if (degenerate_) {
    mean.setConstant(mean_);
    variance.setConstant(prior_variance());
    return;
  }
  const Eigen::Index n = X_.rows();
  const Eigen::Index d = X_.cols();
  const double s2 = hyper_.signal_variance;
  Eigen::RowVectorXd inv_l(d);
  for (Eigen::Index j = 0; j < d; ++j) inv_l(j) = 1.0 / hyper_.length_scales[static_cast<std::size_t>(j)];

  for (Eigen::Index start = 0; start < nq; start += kPredictChunk) {
    const Eigen::Index c = std::min(kPredictChunk, nq - start);
    Eigen::MatrixXd Ks(n, c);
    for (Eigen::Index q = 0; q < c; ++q) {
      const Eigen::RowVectorXd qs = Q.row(start + q).cwiseProduct(inv_l);
      for (Eigen::Index i = 0; i < n; ++i) {
        Ks(i, q) = s2 * std::exp(-0.5 * (X_scaled_.row(i) - qs).squaredNorm());
      }
    }
    const Eigen::VectorXd mz = Ks.transpose() * alpha_;
    chol_.matrixL().solveInPlace(Ks);
    const Eigen::VectorXd reduction = Ks.colwise().squaredNorm().transpose();
    for (Eigen::Index q = 0; q < c; ++q) {
      mean(start + q) = destandardize(mz(q));
      const double vz = std::max(0.0, s2 - reduction(q));
      variance(start + q) = vz * scale_ * scale_;
    }
  }
}

}  // namespace blockopt
