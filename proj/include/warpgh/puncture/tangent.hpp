#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "warpgh/core/error.hpp"
#include "warpgh/core/json_io.hpp"
#include "warpgh/puncture/surgery.hpp"

namespace warpgh::puncture {

struct TangentRow {
  double r = 0.0;
  size_t points = 0;
  double full = 0.0;  ///< rescaled bound against the Euclidean ball
  double half = std::numeric_limits<double>::quiet_NaN();  ///< against the half-space ball (boundary points only)

  json to_json() const {
    json j;
    j["r"] = r;
    j["points"] = points;
    j["full"] = full;
    j["half"] = std::isnan(half) ? json(nullptr) : json(half);
    return j;
  }
};

struct TangentReport {
  std::vector<TangentRow> rows;
  double resolution = 0.0;  ///< smallest admissible radius
  double max_radius = 0.0;  ///< largest radius whose ball cannot wrap
  bool shrinks_with_r = false;  ///< full bounds do not grow as r decreases

  json to_json() const {
    json j;
    j["resolution"] = resolution;
    j["max_radius"] = max_radius;
    j["shrinks_with_r"] = shrinks_with_r;
    j["rows"] = json::array();
    for (const auto& r : rows) j["rows"].push_back(r.to_json());
    return j;
  }
};

/// Median nearest-neighbor distance among base points.
inline double sample_spacing(const SampledSpace& s) {
  std::vector<double> nn;
  for (size_t i = 0; i < s.size(); ++i) {
    if (!s.is_base(i)) continue;
    double best = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < s.size(); ++j)
      if (j != i && s.is_base(j)) best = std::min(best, s.geom.distance(s.xyz[i], s.xyz[j]));
    nn.push_back(best);
  }
  std::nth_element(nn.begin(), nn.begin() + static_cast<long>(nn.size() / 2), nn.end());
  return nn[nn.size() / 2];
}

/**
 * @brief Rescaled GH upper bounds between graph balls B_r(point) and model balls.
 *
 * The model ball holds the same points at their tangent coordinates (log map
 * at the point), with Euclidean distances. For a point on a hole boundary the
 * half-space model folds those coordinates across the tangent plane of the
 * boundary sphere. Radii must lie between `resolution_factor` sample spacings
 * and a quarter of the base's injectivity diameter (L/4 or pi/2), beyond
 * which pairs in the ball can be closer around the base than in the chart.
 */
inline TangentReport tangent_spotcheck(const SampledSpace& s, size_t point, const std::vector<double>& radii,
                                       const std::vector<Hole>& holes = {}, double resolution_factor = 2.5) {
  const char* op = "tangent_spotcheck";
  if (point >= s.size()) fail(ErrorKind::Domain, "puncture_pipeline", op, "point index out of range");
  TangentReport rep;
  rep.resolution = resolution_factor * sample_spacing(s);
  rep.max_radius = s.geom.kind == BaseKind::Torus ? s.geom.L / 4.0 : std::numbers::pi / 2.0;
  for (double r : radii) {
    if (!(r >= rep.resolution))
      fail(ErrorKind::Resolution, "puncture_pipeline", op, "radius " + fmt6(r) + " below resolution " + fmt6(rep.resolution));
    if (r > rep.max_radius)
      fail(ErrorKind::Resolution, "puncture_pipeline", op, "radius " + fmt6(r) + " above chart limit " + fmt6(rep.max_radius));
  }

  const auto& p = s.xyz[point];
  std::vector<double> normal;
  if (!s.is_base(point)) {
    const int h = s.hole_of[point];
    for (const auto& hole : holes)
      if (std::find(hole.boundary_ids.begin(), hole.boundary_ids.end(), point) != hole.boundary_ids.end()) {
        normal = s.geom.log_map(p, hole.center_xyz);
        double nn = 0.0;
        for (double& x : normal) x = -x, nn += x * x;
        for (double& x : normal) x /= std::sqrt(nn);
      }
    if (normal.empty()) fail(ErrorKind::Domain, "puncture_pipeline", op, "boundary point of hole " + std::to_string(h) + " not found");
  }
  auto dist = [](const std::vector<double>& a, const std::vector<double>& b) {
    double q = 0.0;
    for (size_t c = 0; c < 3; ++c) q += (a[c] - b[c]) * (a[c] - b[c]);
    return std::sqrt(q);
  };
  for (double r : radii) {
    std::vector<size_t> ball;
    for (size_t x = 0; x < s.size(); ++x)
      if (s.space(point, x) <= r) ball.push_back(x);
    std::vector<std::vector<double>> u, f;
    for (size_t x : ball) {
      u.push_back(s.geom.log_map(p, s.xyz[x]));
      if (!normal.empty()) {
        auto v = u.back();
        double dot = 0.0;
        for (size_t c = 0; c < 3; ++c) dot += v[c] * normal[c];
        if (dot < 0.0)
          for (size_t c = 0; c < 3; ++c) v[c] -= 2.0 * dot * normal[c];
        f.push_back(v);
      }
    }
    TangentRow row{r, ball.size(), 0.0, std::numeric_limits<double>::quiet_NaN()};
    double full = 0.0, half = 0.0;
    for (size_t a = 0; a < ball.size(); ++a)
      for (size_t b = a + 1; b < ball.size(); ++b) {
        const double d = s.space(ball[a], ball[b]);
        full = std::max(full, std::fabs(d - dist(u[a], u[b])));
        if (!f.empty()) half = std::max(half, std::fabs(d - dist(f[a], f[b])));
      }
    row.full = 0.5 * full / r;
    if (!f.empty()) row.half = 0.5 * half / r;
    rep.rows.push_back(row);
  }
  std::vector<TangentRow> by_r(rep.rows);
  std::sort(by_r.begin(), by_r.end(), [](const TangentRow& a, const TangentRow& b) { return a.r < b.r; });
  rep.shrinks_with_r = true;
  for (size_t k = 1; k < by_r.size(); ++k)
    if (by_r[k].full < by_r[k - 1].full) rep.shrinks_with_r = false;
  return rep;
}

}  // namespace warpgh::puncture
