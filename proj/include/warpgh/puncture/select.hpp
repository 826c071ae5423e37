#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "warpgh/core/error.hpp"
#include "warpgh/puncture/surgery.hpp"

namespace warpgh::puncture {

struct SelectParams {
  double S = 1.0;               ///< surrogate scale
  double target = 1.0;          ///< covering radius to reach on the stage ball
  double r_star = 0.0;          ///< inner radius the new holes will get
  size_t min_work_points = 20;
};

struct Selection {
  std::vector<HoleSpec> centers;
  double covering = 0.0;             ///< max distance from a stage-ball base point to the nearest center
  double admissible_covering = 0.0;  ///< same, over points still admissible after selection
  size_t admissible = 0;             ///< admissible points before selection
};

/// Radius of the smallest closed ball around x holding `k` points (x included), padded by 1%.
inline double work_radius(const SampledSpace& s, size_t x, size_t k) {
  std::vector<double> d;
  d.reserve(s.size());
  for (const auto& p : s.xyz) d.push_back(s.geom.distance(p, s.xyz[x]));
  if (k == 0 || k > d.size()) fail(ErrorKind::Selection, "puncture_pipeline", "work_radius", "not enough points");
  std::nth_element(d.begin(), d.begin() + static_cast<long>(k - 1), d.end());
  return 1.01 * d[k - 1];
}

/// True when x is at least S 2^{-4i} away from every protected shell radius S 2^j, j = 0..i.
inline bool outside_shells(double dist_p0, double S, int stage) {
  const double half = S * std::ldexp(1.0, -4 * stage);
  for (int j = 0; j <= stage; ++j)
    if (std::fabs(dist_p0 - S * std::ldexp(1.0, j)) <= half) return false;
  return true;
}

/**
 * @brief Greedy farthest-point centers inside B_{S 2^i}(p0).
 *
 * Admissible points are base points outside the protected shells whose hole
 * would avoid every existing and newly chosen work region (and vice versa).
 * Each hole's work radius is the 20-point radius at its center. Selection
 * stops when the covering radius reaches the target or nothing admissible is
 * left uncovered. Distances are coordinate distances.
 */
inline Selection select_centers(const SampledSpace& s, size_t p0, int stage, const std::vector<Hole>& holes,
                                const SelectParams& sp) {
  const char* op = "select_centers";
  if (stage < 1) fail(ErrorKind::Selection, "puncture_pipeline", op, "stage must be >= 1");
  const size_t n = s.size();
  const double R = sp.S * std::ldexp(1.0, stage);
  std::vector<double> dp0(n);
  for (size_t x = 0; x < n; ++x) dp0[x] = s.geom.distance(s.xyz[x], s.xyz[p0]);

  std::vector<size_t> ball;
  for (size_t x = 0; x < n; ++x)
    if (s.is_base(x) && dp0[x] <= R) ball.push_back(x);
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> gap(n, inf), r0(n, 0.0);
  std::vector<char> adm(n, 0);
  for (size_t x : ball) {
    for (const auto& h : holes) gap[x] = std::min(gap[x], s.geom.distance(s.xyz[x], h.center_xyz));
    if (x == p0 || dp0[x] < 2.0 * sp.r_star || !outside_shells(dp0[x], sp.S, stage)) continue;
    r0[x] = work_radius(s, x, sp.min_work_points);
    if (!(sp.r_star <= r0[x] / 10.0)) continue;
    bool ok = true;
    for (const auto& h : holes)
      if (s.geom.distance(s.xyz[x], h.center_xyz) < h.r0 + sp.r_star) ok = false;
    adm[x] = ok;
  }
  Selection out;
  out.admissible = static_cast<size_t>(std::count(adm.begin(), adm.end(), 1));
  if (out.admissible == 0) fail(ErrorKind::Selection, "puncture_pipeline", op, "admissible region is empty");

  for (;;) {
    double cover = 0.0;
    for (size_t x : ball) cover = std::max(cover, gap[x]);
    if (cover <= sp.target) break;
    size_t best = n;
    for (size_t x : ball) {
      if (!adm[x]) continue;
      // With no holes yet every gap is infinite; start next to p0.
      if (best == n || gap[x] > gap[best] || (gap[x] == inf && gap[best] == inf && dp0[x] < dp0[best])) best = x;
    }
    if (best == n || gap[best] <= sp.target) break;
    out.centers.push_back({best, sp.r_star, r0[best]});
    for (size_t x : ball) {
      const double d = s.geom.distance(s.xyz[x], s.xyz[best]);
      gap[x] = std::min(gap[x], d);
      if (adm[x] && d < std::max(r0[best], r0[x]) + sp.r_star) adm[x] = 0;
    }
  }
  for (size_t x : ball) {
    out.covering = std::max(out.covering, gap[x]);
    if (adm[x]) out.admissible_covering = std::max(out.admissible_covering, gap[x]);
  }
  return out;
}

}  // namespace warpgh::puncture
