#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "warpgh/core/error.hpp"
#include "warpgh/core/json_io.hpp"
#include "warpgh/gh/graph.hpp"
#include "warpgh/gh/metric_space.hpp"
#include "warpgh/gh/sampling.hpp"

namespace warpgh::puncture {

using gh::FiniteMetricSpace;
using gh::WeightedGraph;

enum class BaseKind { Torus, Sphere };

inline const char* to_string(BaseKind k) { return k == BaseKind::Torus ? "torus" : "sphere"; }

inline BaseKind base_kind_from_string(const std::string& s) {
  if (s == "torus") return BaseKind::Torus;
  if (s == "sphere") return BaseKind::Sphere;
  fail(ErrorKind::Validation, "puncture_pipeline", "base_kind", "unknown base kind '" + s + "'");
}

/// Flat 3-torus of side L (coordinates in [0, L)^3) or unit S^3 in R^4.
struct BaseGeometry {
  BaseKind kind = BaseKind::Torus;
  double L = 4.0;

  size_t coord_dim() const { return kind == BaseKind::Torus ? 3 : 4; }
  double diameter() const { return kind == BaseKind::Torus ? L * std::sqrt(3.0) / 2.0 : std::numbers::pi; }

  double distance(const std::vector<double>& a, const std::vector<double>& b) const {
    if (kind == BaseKind::Torus) {
      double s = 0.0;
      for (size_t c = 0; c < 3; ++c) {
        double d = std::fabs(a[c] - b[c]);
        d = std::min(d, L - d);
        s += d * d;
      }
      return std::sqrt(s);
    }
    return gh::sphere_angle(a, b);
  }

  /// Tangent coordinates of b at a (torus: minimal image; sphere: log map into the tangent 3-space).
  std::vector<double> log_map(const std::vector<double>& a, const std::vector<double>& b) const {
    if (kind == BaseKind::Torus) {
      std::vector<double> v(3);
      for (size_t c = 0; c < 3; ++c) {
        double d = b[c] - a[c];
        d -= L * std::round(d / L);
        v[c] = d;
      }
      return v;
    }
    const auto E = tangent_frame(a);
    const double th = gh::sphere_angle(a, b);
    double dot = 0.0;
    for (size_t c = 0; c < 4; ++c) dot += a[c] * b[c];
    std::vector<double> w(4);
    for (size_t c = 0; c < 4; ++c) w[c] = b[c] - dot * a[c];
    double nw = 0.0;
    for (double x : w) nw += x * x;
    nw = std::sqrt(nw);
    std::vector<double> v(3, 0.0);
    if (nw > 0.0)
      for (size_t k = 0; k < 3; ++k) {
        double p = 0.0;
        for (size_t c = 0; c < 4; ++c) p += E[k][c] * w[c];
        v[k] = th * p / nw;
      }
    return v;
  }

  /// Point at distance |v| from a along tangent direction v (3 components).
  std::vector<double> exp_map(const std::vector<double>& a, const std::vector<double>& v) const {
    if (kind == BaseKind::Torus) {
      std::vector<double> p(3);
      for (size_t c = 0; c < 3; ++c) {
        p[c] = std::fmod(a[c] + v[c], L);
        if (p[c] < 0.0) p[c] += L;
      }
      return p;
    }
    const auto E = tangent_frame(a);
    const double t = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    std::vector<double> p(a);
    if (t == 0.0) return p;
    for (size_t c = 0; c < 4; ++c) {
      double w = 0.0;
      for (size_t k = 0; k < 3; ++k) w += E[k][c] * v[k] / t;
      p[c] = std::cos(t) * a[c] + std::sin(t) * w;
    }
    return p;
  }

  /// Orthonormal basis of the tangent space of S^3 at a (Gram-Schmidt on the standard basis).
  static std::vector<std::vector<double>> tangent_frame(const std::vector<double>& a) {
    std::vector<std::vector<double>> E;
    for (size_t e = 0; e < 4 && E.size() < 3; ++e) {
      std::vector<double> v(4, 0.0);
      v[e] = 1.0;
      auto proj = [&](const std::vector<double>& u) {
        double d = 0.0;
        for (size_t c = 0; c < 4; ++c) d += u[c] * v[c];
        for (size_t c = 0; c < 4; ++c) v[c] -= d * u[c];
      };
      proj(a);
      for (const auto& u : E) proj(u);
      double n = 0.0;
      for (double x : v) n += x * x;
      n = std::sqrt(n);
      if (n < 1e-6) continue;
      for (double& x : v) x /= n;
      E.push_back(v);
    }
    return E;
  }
};

/// Sampled space with coordinates, its graph and the graph metric.
struct SampledSpace {
  BaseGeometry geom;
  std::vector<std::vector<double>> xyz;
  std::vector<int> hole_of;  ///< -1 for base points, else index of the hole whose boundary the point is on
  std::vector<std::string> ids;
  WeightedGraph graph;
  FiniteMetricSpace space;
  double edge_radius = 0.0;

  size_t size() const { return xyz.size(); }
  bool is_base(size_t i) const { return hole_of[i] < 0; }

  /// Rebuilds the metric from the graph.
  void recompute(unsigned threads) {
    std::vector<gh::PointLabel> labels(size());
    for (size_t i = 0; i < size(); ++i) labels[i].id = ids[i];
    space = FiniteMetricSpace(std::move(labels), gh::all_pairs(graph, size(), threads));
  }
};

struct Calibration {
  double edge_radius = 0.0;
  double long_range_error = 0.0;  ///< max relative error over pairs at analytic distance >= diam/2
  double max_error = 0.0;         ///< max relative error over all pairs
  double p99_error = 0.0;
  size_t attempts = 0;

  json to_json() const {
    json j;
    j["edge_radius"] = edge_radius;
    j["long_range_error"] = long_range_error;
    j["max_error"] = max_error;
    j["p99_error"] = p99_error;
    j["attempts"] = attempts;
    return j;
  }
};

struct BaseManifoldSample {
  SampledSpace s;
  size_t p0 = 0;
  Calibration calibration;
};

struct BaseParams {
  BaseKind kind = BaseKind::Torus;
  double L = 4.0;
  size_t samples = 2000;
  uint64_t seed = 1;
  size_t cap = gh::kDefaultPointCap;
  double tolerance = 0.03;
};

namespace detail {

inline std::vector<double> random_point(const BaseGeometry& g, std::mt19937_64& rng) {
  if (g.kind == BaseKind::Torus) {
    std::uniform_real_distribution<double> u(0.0, g.L);
    return {u(rng), u(rng), u(rng)};
  }
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> p(4);
  double s = 0.0;
  for (double& x : p) x = n(rng), s += x * x;
  for (double& x : p) x /= std::sqrt(s);
  return p;
}

/// Radius graph over analytic distances.
inline WeightedGraph radius_graph(const BaseGeometry& g, const std::vector<std::vector<double>>& xyz, double rho) {
  WeightedGraph G(xyz.size());
  for (size_t i = 0; i < xyz.size(); ++i)
    for (size_t j = i + 1; j < xyz.size(); ++j) {
      const double d = g.distance(xyz[i], xyz[j]);
      if (d <= rho) G.add_edge(i, j, d);
    }
  return G;
}

}  // namespace detail

/**
 * @brief Seeded quasi-uniform sample of the base with a calibrated radius-graph metric.
 *
 * Points are a farthest-point net over 20x as many uniform samples, started at
 * the basepoint (index 0). The edge radius starts at 4.5x the median spacing
 * and grows by 15% until long-range pairs are within tolerance.
 */
inline BaseManifoldSample build_base(const BaseParams& bp, unsigned threads = 1) {
  const char* op = "build_base";
  if (bp.samples < 2) fail(ErrorKind::Validation, "puncture_pipeline", op, "need at least 2 samples");
  if (bp.samples > bp.cap)
    fail(ErrorKind::Capacity, "puncture_pipeline", op, std::to_string(bp.samples) + " samples exceed cap " + std::to_string(bp.cap));
  if (bp.kind == BaseKind::Torus && !(bp.L > 0.0)) fail(ErrorKind::Validation, "puncture_pipeline", op, "torus side must be positive");
  BaseGeometry geom{bp.kind, bp.L};
  std::mt19937_64 rng(bp.seed);
  std::vector<std::vector<double>> pool(20 * bp.samples);
  pool[0] = bp.kind == BaseKind::Torus ? std::vector<double>{0.0, 0.0, 0.0} : std::vector<double>{0.0, 0.0, 0.0, 1.0};
  for (size_t i = 1; i < pool.size(); ++i) pool[i] = detail::random_point(geom, rng);

  BaseManifoldSample out;
  auto& s = out.s;
  s.geom = geom;
  std::vector<double> gap(pool.size(), std::numeric_limits<double>::infinity());
  size_t next = 0;
  for (size_t k = 0; k < bp.samples; ++k) {
    s.xyz.push_back(pool[next]);
    size_t best = 0;
    for (size_t i = 0; i < pool.size(); ++i) {
      gap[i] = std::min(gap[i], geom.distance(pool[i], pool[next]));
      if (gap[i] > gap[best]) best = i;
    }
    next = best;
  }
  const size_t n = s.xyz.size();
  s.hole_of.assign(n, -1);
  for (size_t i = 0; i < n; ++i) s.ids.push_back("b" + std::to_string(i));

  std::vector<double> nn(n, std::numeric_limits<double>::infinity());
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (i != j) nn[i] = std::min(nn[i], geom.distance(s.xyz[i], s.xyz[j]));
  std::vector<double> sorted(nn);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(n / 2), sorted.end());
  double rho = 4.5 * sorted[n / 2];
  const double half = geom.diameter() / 2.0;
  for (size_t attempt = 1; attempt <= 8; ++attempt, rho *= 1.15) {
    s.graph = detail::radius_graph(geom, s.xyz, rho);
    s.edge_radius = rho;
    try {
      s.recompute(threads);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Validation) continue;  // disconnected at this radius
      throw;
    }
    Calibration c;
    c.edge_radius = rho;
    c.attempts = attempt;
    std::vector<double> rel;
    rel.reserve(n * (n - 1) / 2);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j) {
        const double ex = geom.distance(s.xyz[i], s.xyz[j]);
        if (ex <= 0.0) continue;
        const double e = std::fabs(s.space(i, j) - ex) / ex;
        rel.push_back(e);
        c.max_error = std::max(c.max_error, e);
        if (ex >= half) c.long_range_error = std::max(c.long_range_error, e);
      }
    std::nth_element(rel.begin(), rel.begin() + static_cast<long>(rel.size() * 99 / 100), rel.end());
    c.p99_error = rel[rel.size() * 99 / 100];
    out.calibration = c;
    if (c.long_range_error <= bp.tolerance) return out;
  }
  fail(ErrorKind::Construction, "puncture_pipeline", op,
       "calibration failed: long-range error " + fmt6(out.calibration.long_range_error) + " above tolerance");
}

}  // namespace warpgh::puncture
