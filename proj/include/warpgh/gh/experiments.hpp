#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "warpgh/core/error.hpp"
#include "warpgh/core/json_io.hpp"
#include "warpgh/gh/bounds.hpp"
#include "warpgh/gh/sampling.hpp"
#include "warpgh/model/full_model.hpp"

namespace warpgh::gh {

struct CollapseRow {
  double delta = 0.0;
  double bound = 0.0;     ///< gh_upper to a point
  double analytic = 0.0;  ///< pi * radius / 2
};

/// One-point space.
inline FiniteMetricSpace point_space() { return FiniteMetricSpace::from_matrix({0.0}); }

/**
 * @brief GH upper bound between the fiber S^2 of radius delta * phi(r_ref) and a point.
 *
 * The net metric is computed once and scaled, so rows are exactly linear in delta.
 */
inline std::vector<CollapseRow> collapse_check(const profile::DoubleWarpProfile& p, const std::vector<double>& deltas,
                                               double r_ref, size_t net2 = 642, unsigned threads = 1) {
  for (double d : deltas)
    if (!(d > 0.0 && d <= 1.0)) fail(ErrorKind::Domain, "gh_lab", "collapse_check", "deltas must lie in (0, 1]");
  const double radius = p.phi().eval(r_ref, 0);
  const FiniteMetricSpace unit = sphere_space(icosphere_net(net2), 1.0, threads);
  const FiniteMetricSpace pt = point_space();
  const Correspondence corr = to_point_correspondence(unit.size());
  std::vector<CollapseRow> rows;
  for (double d : deltas)
    rows.push_back({d, gh_upper(unit.scaled(d * radius), pt, corr), std::numbers::pi * d * radius / 2.0});
  return rows;
}

struct ConeComparison {
  double bound = 0.0;     ///< gh_upper(neck sample, cone sample)
  double analytic = 0.0;  ///< pi * delta * b^alpha / 2
  size_t points = 0;
};

/// Sampling sizes shared by both sides of a neck/cone comparison.
struct NeckSampling {
  size_t n_r = 6;
  size_t net2 = 12;
  size_t netn = 16;
  uint64_t seed = 1;
  unsigned threads = 1;
};

/**
 * @brief Compares dr^2 + (delta r^alpha)^2 g_{S^2} + ((1-e) r)^2 g_{S^n} on [a, b]
 * with the cone annulus dr^2 + ((1-e) r)^2 g_{S^n} on the same radial grid and S^n net.
 *
 * The correspondence pairs (r, x, y) with (r, y).
 */
inline ConeComparison neck_cone_compare(double delta, double alpha, double epsilon, int n, double a, double b,
                                        const NeckSampling& s = {}) {
  const SphereNet s2 = icosphere_net(s.net2);
  const SphereNet none = icosphere_net(1);
  const SphereNet sn = farthest_point_net(n, s.netn, s.seed);
  const auto cone_rho = [epsilon](double r) { return (1.0 - epsilon) * r; };
  const WarpFns neck{[delta, alpha](double r) { return delta * std::pow(r, alpha); }, cone_rho};
  const WarpFns cone{[](double) { return 0.0; }, cone_rho};
  const FiniteMetricSpace X = sample_warp(neck, a, b, s.n_r, s2, sn, kDefaultPointCap, s.threads);
  const FiniteMetricSpace Y = sample_warp(cone, a, b, s.n_r, none, sn, kDefaultPointCap, s.threads);
  Correspondence corr;
  for (size_t i = 0; i < s.n_r; ++i)
    for (size_t p = 0; p < s2.size(); ++p)
      for (size_t q = 0; q < sn.size(); ++q) corr.pairs.emplace_back((i * s2.size() + p) * sn.size() + q, i * sn.size() + q);
  return {gh_upper(X, Y, corr), std::numbers::pi * delta * std::pow(b, alpha) / 2.0, X.size()};
}

/// neck_cone_compare on the exact neck of a local model; [a, b] must lie inside it.
inline ConeComparison cone_compare(const model::LocalModel& m, double a, double b, const NeckSampling& s = {}) {
  if (!(a < b) || a < m.neck_lo * (1.0 - 1e-12) || b > m.neck_hi * (1.0 + 1e-12))
    fail(ErrorKind::Domain, "gh_lab", "cone_compare", "annulus [" + fmt17(a) + ", " + fmt17(b) + "] is outside the neck");
  return neck_cone_compare(m.neck_delta, m.params.tail_exponent(), m.params.epsilon, m.params.n, a, b, s);
}

}  // namespace warpgh::gh
