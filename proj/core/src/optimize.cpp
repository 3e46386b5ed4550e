#include "blockopt/optimize.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace blockopt {

namespace {
// Near a minimum the decrease predicted by a small gradient falls below the
// precision of f itself; allow that much slack so gradient steps continue.
constexpr double kRoundoff = 4.0 * std::numeric_limits<double>::epsilon();
}  // namespace

BfgsResult bfgs_minimize(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& opts) {
  const Eigen::Index n = x0.size();
  BfgsResult res;
  res.x = std::move(x0);
  res.gradient = Eigen::VectorXd::Zero(n);
  res.value = f(res.x, res.gradient);
  if (!std::isfinite(res.value) || !res.gradient.allFinite()) return res;

  Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd trial_grad(n);
  bool fresh = true;

  for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
    if (res.gradient.lpNorm<Eigen::Infinity>() < opts.gradient_tolerance) {
      res.converged = true;
      return res;
    }
    Eigen::VectorXd direction = -inv_hessian * res.gradient;
    double slope = direction.dot(res.gradient);
    if (!(slope < 0.0)) {
      inv_hessian.setIdentity();
      direction = -res.gradient;
      slope = direction.dot(res.gradient);
      fresh = true;
    }
    if (fresh) {
      // First step after a reset: keep the trial step at most unit length.
      const double norm = direction.norm();
      if (norm > 1.0) {
        direction /= norm;
        slope /= norm;
      }
    }

    double step = 1.0;
    double trial_value = 0.0;
    Eigen::VectorXd trial_x(n);
    bool accepted = false;
    for (int ls = 0; ls < opts.max_line_search_steps; ++ls) {
      trial_x = res.x + step * direction;
      if (trial_x == res.x) break;  // step below resolution; no progress possible
      trial_value = f(trial_x, trial_grad);
      if (std::isfinite(trial_value) && trial_grad.allFinite() &&
          trial_value <= res.value + 1e-4 * step * slope + kRoundoff * std::abs(res.value)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (fresh) break;  // steepest descent cannot make progress either
      inv_hessian.setIdentity();
      fresh = true;
      continue;
    }

    const Eigen::VectorXd s = trial_x - res.x;
    const Eigen::VectorXd y = trial_grad - res.gradient;
    const double sy = s.dot(y);
    res.x = trial_x;
    res.value = trial_value;
    res.gradient = trial_grad;

    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh) {
        // Scale the initial inverse Hessian (Nocedal & Wright 6.20).
        inv_hessian = Eigen::MatrixXd::Identity(n, n) * (sy / y.dot(y));
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      inv_hessian = (I - rho * s * y.transpose()) * inv_hessian * (I - rho * y * s.transpose()) +
                    rho * s * s.transpose();
      fresh = false;
    }
  }
  res.converged = res.gradient.lpNorm<Eigen::Infinity>() < opts.gradient_tolerance;
  return res;
}

}  // namespace blockopt
