#pragma once

#include <functional>

#include <Eigen/Core>

namespace blockopt {

struct BfgsOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 500;
  int max_line_search_steps = 60;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  bool converged = false;
};

/// Objective callback: returns f(x) and writes grad f(x). Non-finite values
/// are treated as "outside the domain" by the line search.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/// Minimizes `f` with BFGS and a backtracking Armijo line search. Convergence
/// is declared when the infinity norm of the gradient drops below the tolerance.
BfgsResult bfgs_minimize(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& opts = {});

}  // namespace blockopt
