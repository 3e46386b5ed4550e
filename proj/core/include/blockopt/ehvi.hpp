#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "blockopt/gp.hpp"
#include "blockopt/pareto.hpp"

namespace blockopt {

/// Standard normal CDF via erfc; accurate in both tails.
double normal_cdf(double x);
double normal_pdf(double x);

/// E[(c - Y)^+] for Y ~ N(mu, sd^2); (c - mu)^+ when sd == 0.
double partial_expectation(double c, double mu, double sd);

/// Non-dominated members strictly inside the r-box, sorted by increasing f1.
std::vector<Point2> strip_front(std::span<const Point2> points, const Point2& r);

/// Exact bi-objective EHVI for independent Gaussians at a point. `front` must
/// come from strip_front.
double ehvi_gaussian(std::span<const Point2> front, const Point2& r, const GaussianPrediction& y1,
                     const GaussianPrediction& y2);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// Monte-Carlo mean of hvi over independent Gaussian draws. Requires samples >= 1000.
MonteCarloEstimate ehvi_mc_gaussian(std::span<const Point2> points, const Point2& r, const GaussianPrediction& y1,
                                    const GaussianPrediction& y2, std::size_t samples, std::uint64_t seed);

/// Two surrogate models plus an archive snapshot and reference point.
class AcquisitionContext {
 public:
  AcquisitionContext(const GPModel& model_f1, const GPModel& model_f2, std::span<const Point2> archive,
                     const Point2& reference);

  const GPModel& model_f1() const { return *f1_; }
  const GPModel& model_f2() const { return *f2_; }
  const Point2& reference() const { return reference_; }
  std::span<const Point2> archive() const { return archive_; }
  /// Archive reduced to the strips' corner points.
  std::span<const Point2> front() const { return front_; }

 private:
  const GPModel* f1_;
  const GPModel* f2_;
  std::vector<Point2> archive_;
  std::vector<Point2> front_;
  Point2 reference_;
};

double ehvi_exact(const AcquisitionContext& ctx, const BlockSpec& spec);

MonteCarloEstimate ehvi_mc(const AcquisitionContext& ctx, const BlockSpec& spec, std::size_t samples,
                           std::uint64_t seed);

/// EHVI for each query row (normalized inputs), using batched GP prediction.
std::vector<double> ehvi_batch(const AcquisitionContext& ctx, const Eigen::MatrixXd& queries);

}  // namespace blockopt
