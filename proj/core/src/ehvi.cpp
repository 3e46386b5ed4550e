#include "blockopt/ehvi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "blockopt/error.hpp"
#include "blockopt/rng.hpp"

namespace blockopt {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double partial_expectation(double c, double mu, double sd) {
  if (!(sd > 0.0)) return std::max(0.0, c - mu);
  const double u = (c - mu) / sd;
  return std::max(0.0, sd * (u * normal_cdf(u) + normal_pdf(u)));
}

std::vector<Point2> strip_front(std::span<const Point2> points, const Point2& r) {
  std::vector<Point2> inside;
  for (const auto& p : points) {
    if (p.f1 < r.f1 && p.f2 < r.f2) inside.push_back(p);
  }
  std::vector<Point2> out;
  for (std::size_t i : non_dominated_indices(inside)) out.push_back(inside[i]);
  return out;
}

double ehvi_gaussian(std::span<const Point2> front, const Point2& r, const GaussianPrediction& y1,
                     const GaussianPrediction& y2) {
  const double s1 = std::sqrt(std::max(0.0, y1.variance));
  const double s2 = std::sqrt(std::max(0.0, y2.variance));
  // Strip i spans [x_i, x_{i+1}) in f1 with free height below H_i; its
  // contribution factorizes into E[(H_i - y2)^+] times the expected overlap
  // of [y1, inf) with the strip.
  double total = 0.0;
  double g_left = 0.0;
  double height = r.f2;
  for (std::size_t i = 0; i <= front.size(); ++i) {
    const double right = i < front.size() ? front[i].f1 : r.f1;
    const double g_right = partial_expectation(right, y1.mean, s1);
    const double width = g_right - g_left;
    if (width > 0.0) total += width * partial_expectation(height, y2.mean, s2);
    g_left = g_right;
    if (i < front.size()) height = front[i].f2;
  }
  return std::max(0.0, total);
}

MonteCarloEstimate ehvi_mc_gaussian(std::span<const Point2> points, const Point2& r, const GaussianPrediction& y1,
                                    const GaussianPrediction& y2, std::size_t samples, std::uint64_t seed) {
  if (samples < 1000) throw InvalidArgument("Monte-Carlo EHVI needs at least 1000 samples");
  const double s1 = std::sqrt(std::max(0.0, y1.variance));
  const double s2 = std::sqrt(std::max(0.0, y2.variance));
  const std::vector<Point2> front = strip_front(points, r);
  Rng rng(seed);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const Point2 draw{y1.mean + s1 * rng.normal(), y2.mean + s2 * rng.normal()};
    const double v = hvi(front, r, draw);
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  const double n = static_cast<double>(samples);
  return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

AcquisitionContext::AcquisitionContext(const GPModel& model_f1, const GPModel& model_f2,
                                       std::span<const Point2> archive, const Point2& reference)
    : f1_(&model_f1),
      f2_(&model_f2),
      archive_(archive.begin(), archive.end()),
      front_(strip_front(archive, reference)),
      reference_(reference) {}

double ehvi_exact(const AcquisitionContext& ctx, const BlockSpec& spec) {
  return ehvi_gaussian(ctx.front(), ctx.reference(), ctx.model_f1().predict(spec), ctx.model_f2().predict(spec));
}

MonteCarloEstimate ehvi_mc(const AcquisitionContext& ctx, const BlockSpec& spec, std::size_t samples,
                           std::uint64_t seed) {
  return ehvi_mc_gaussian(ctx.archive(), ctx.reference(), ctx.model_f1().predict(spec), ctx.model_f2().predict(spec),
                          samples, seed);
}

std::vector<double> ehvi_batch(const AcquisitionContext& ctx, const Eigen::MatrixXd& queries) {
  Eigen::VectorXd m1, v1, m2, v2;
  ctx.model_f1().predict_batch(queries, m1, v1);
  ctx.model_f2().predict_batch(queries, m2, v2);
  std::vector<double> out(static_cast<std::size_t>(queries.rows()));
  for (Eigen::Index i = 0; i < queries.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = ehvi_gaussian(ctx.front(), ctx.reference(), {m1(i), v1(i)}, {m2(i), v2(i)});
  }
  return out;
}

}  // namespace blockopt
