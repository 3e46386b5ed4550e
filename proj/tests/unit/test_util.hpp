#pragma once

#include <cmath>
#include <vector>

#include <blockopt/gumbel.hpp>
#include <blockopt/rng.hpp>

namespace blockopt::testing {

/// Inverse-CDF Gumbel draws.
inline std::vector<double> gumbel_draws(double mu, double sigma, std::size_t n, Rng& rng) {
  std::vector<double> out(n);
  for (auto& v : out) {
    double u = rng.uniform();
    while (u == 0.0) u = rng.uniform();
    v = mu - sigma * std::log(-std::log(u));
  }
  return out;
}

/// Stationary point of the Gumbel log-likelihood plus prior_power * log(1/sigma),
/// by bisection on the profile equation for sigma in long double.
inline GumbelParams profile_fit(const std::vector<double>& x, double prior_power) {
  using R = long double;
  const R m = static_cast<R>(x.size());
  R mean = 0;
  for (double v : x) mean += v;
  mean /= m;
  const auto weighted_mean = [&](R s) {
    R mx = -1e300L;
    for (double v : x) mx = std::max(mx, -static_cast<R>(v) / s);
    R num = 0, den = 0;
    for (double v : x) {
      const R w = std::exp(-static_cast<R>(v) / s - mx);
      num += w * v;
      den += w;
    }
    return num / den;
  };
  const auto residual = [&](R s) { return m / (m + prior_power) * (mean - weighted_mean(s)) - s; };
  R lo = 1e-6L, hi = 1e6L;
  for (int i = 0; i < 400; ++i) {
    const R mid = std::sqrt(lo * hi);
    if (residual(mid) > 0) lo = mid; else hi = mid;
  }
  const R s = std::sqrt(lo * hi);
  R mx = -1e300L;
  for (double v : x) mx = std::max(mx, -static_cast<R>(v) / s);
  R sum = 0;
  for (double v : x) sum += std::exp(-static_cast<R>(v) / s - mx);
  const R mu = -s * (std::log(sum / m) + mx);
  return {static_cast<double>(mu), static_cast<double>(s)};
}

}  // namespace blockopt::testing
