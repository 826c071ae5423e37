#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "warpgh/core/error.hpp"
#include "warpgh/core/json_io.hpp"
#include "warpgh/gh/bounds.hpp"
#include "warpgh/gh/sphere_nets.hpp"
#include "warpgh/puncture/base.hpp"

namespace warpgh::puncture {

using gh::Correspondence;

/// An excised ball B_{r_star}(center) with its attached boundary sphere.
struct Hole {
  int stage = 0;
  size_t center = 0;               ///< index of the center in the space it was cut from
  std::vector<double> center_xyz;  ///< coordinates of the center
  double r_star = 0.0;
  double r0 = 0.0;
  std::vector<size_t> boundary_ids;  ///< indices of the boundary net points in the current space

  json to_json() const {
    json j;
    j["stage"] = stage;
    j["center"] = center;
    j["center_xyz"] = center_xyz;
    j["r_star"] = r_star;
    j["r0"] = r0;
    j["boundary_ids"] = boundary_ids;
    return j;
  }
};

/// Requested puncture before retries shrink r_star.
struct HoleSpec {
  size_t center = 0;
  double r_star = 0.0;
  double r0 = 0.0;
};

struct PunctureOptions {
  size_t net_points = 12;
  size_t min_work_points = 20;
  int retries = 4;
  unsigned threads = 1;
};

struct PunctureOutcome {
  SampledSpace space;
  std::vector<Hole> holes;      ///< prior holes (remapped) followed by the new ones
  Correspondence corr;          ///< old space -> new space
  std::vector<size_t> old_to_new;  ///< SIZE_MAX for removed points
  double gh = 0.0;              ///< gh_upper(old, new, corr)
  double bilipschitz = 1.0;     ///< max old/new or new/old ratio over pairs outside every new work region
  size_t pairs_checked = 0;
  int attempts = 0;
};

/// Points of `s` within analytic distance r of x.
inline size_t count_within(const SampledSpace& s, const std::vector<double>& x, double r) {
  size_t c = 0;
  for (const auto& p : s.xyz)
    if (s.geom.distance(p, x) <= r) ++c;
  return c;
}

namespace detail {

inline void check_specs(const SampledSpace& s, const std::vector<Hole>& prior, const std::vector<HoleSpec>& specs,
                        const PunctureOptions& o) {
  const char* op = "puncture";
  for (size_t k = 0; k < specs.size(); ++k) {
    const auto& h = specs[k];
    if (h.center >= s.size()) fail(ErrorKind::Surgery, "puncture_pipeline", op, "center index out of range");
    if (!s.is_base(h.center)) fail(ErrorKind::Surgery, "puncture_pipeline", op, "center lies on a hole boundary");
    if (!(h.r_star > 0.0) || !(h.r_star <= h.r0 / 10.0))
      fail(ErrorKind::Surgery, "puncture_pipeline", op, "need 0 < r_star <= r0/10");
    const auto& c = s.xyz[h.center];
    const size_t inside = count_within(s, c, h.r0);
    if (inside < o.min_work_points)
      fail(ErrorKind::Surgery, "puncture_pipeline", op,
           "work ball holds " + std::to_string(inside) + " points, need " + std::to_string(o.min_work_points));
    for (const auto& p : prior)
      if (s.geom.distance(c, p.center_xyz) < p.r0 + h.r_star)
        fail(ErrorKind::Surgery, "puncture_pipeline", op, "hole meets the work region of a prior hole");
    for (size_t m = 0; m < specs.size(); ++m) {
      if (m == k) continue;
      const double d = s.geom.distance(c, s.xyz[specs[m].center]);
      if (d < specs[m].r0 + h.r_star) fail(ErrorKind::Surgery, "puncture_pipeline", op, "batch holes meet each other's work regions");
    }
  }
}

/// One surgery attempt with the given radii; no verification.
inline PunctureOutcome cut(const SampledSpace& s, const std::vector<Hole>& prior, const std::vector<HoleSpec>& specs,
                           int stage, const PunctureOptions& o) {
  const size_t n = s.size(), H = specs.size();
  constexpr size_t none = std::numeric_limits<size_t>::max();
  std::vector<size_t> hole_of_removed(n, none);
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < H; ++k)
      if (s.geom.distance(s.xyz[i], s.xyz[specs[k].center]) < specs[k].r_star) hole_of_removed[i] = k;

  PunctureOutcome out;
  auto& t = out.space;
  t.geom = s.geom;
  t.edge_radius = s.edge_radius;
  out.old_to_new.assign(n, none);
  for (size_t i = 0; i < n; ++i) {
    if (hole_of_removed[i] != none) continue;
    out.old_to_new[i] = t.xyz.size();
    t.xyz.push_back(s.xyz[i]);
    t.hole_of.push_back(s.hole_of[i]);
    t.ids.push_back(s.ids[i]);
  }
  const gh::SphereNet unit = gh::icosphere_net(o.net_points);
  std::vector<size_t> first(H);
  for (size_t k = 0; k < H; ++k) {
    first[k] = t.xyz.size();
    const auto& c = s.xyz[specs[k].center];
    for (size_t a = 0; a < unit.size(); ++a) {
      std::vector<double> v(3);
      for (size_t d = 0; d < 3; ++d) v[d] = specs[k].r_star * unit.pts[a][d];
      t.xyz.push_back(s.geom.exp_map(c, v));
      t.hole_of.push_back(static_cast<int>(prior.size() + k));
      t.ids.push_back("h" + std::to_string(prior.size() + k) + ":" + std::to_string(a));
    }
  }

  t.graph = WeightedGraph(t.xyz.size());
  for (size_t u = 0; u < n; ++u) {
    if (out.old_to_new[u] == none) continue;
    for (const auto& [v, w] : s.graph.adj[u])
      if (v > u && out.old_to_new[v] != none) t.graph.add_edge(out.old_to_new[u], out.old_to_new[v], w);
  }
  for (size_t k = 0; k < H; ++k)
    for (size_t a = 0; a < unit.size(); ++a)
      for (size_t b = a + 1; b < unit.size(); ++b)
        t.graph.add_edge(first[k] + a, first[k] + b, specs[k].r_star * gh::sphere_angle(unit.pts[a], unit.pts[b]));

  // Survivors adjacent to the removed region attach to their nearest boundary point.
  auto nearest_net = [&](size_t k, const std::vector<double>& x) {
    size_t best = first[k];
    double bd = std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < unit.size(); ++a) {
      const double d = s.geom.distance(x, t.xyz[first[k] + a]);
      if (d < bd) bd = d, best = first[k] + a;
    }
    return best;
  };
  std::vector<std::vector<char>> attached(H, std::vector<char>(n, 0));
  for (size_t z = 0; z < n; ++z) {
    const size_t k = hole_of_removed[z];
    if (k == none) continue;
    for (const auto& [x, w] : s.graph.adj[z]) {
      const size_t k2 = hole_of_removed[x];
      if (k2 != none && k2 > k) {
        // Adjacent removed regions of two holes: join their spheres along the center line.
        const auto& c1 = s.xyz[specs[k].center];
        const auto& c2 = s.xyz[specs[k2].center];
        const double d = s.geom.distance(c1, c2) - specs[k].r_star - specs[k2].r_star;
        t.graph.add_edge(nearest_net(k, c2), nearest_net(k2, c1), std::max(0.0, d));
      }
      if (out.old_to_new[x] == none || attached[k][x]) continue;
      attached[k][x] = 1;
      const double d = s.geom.distance(s.xyz[x], s.xyz[specs[k].center]) - specs[k].r_star;
      t.graph.add_edge(out.old_to_new[x], nearest_net(k, s.xyz[x]), std::max(0.0, d));
    }
  }
  t.recompute(o.threads);

  // Nearest-survivor correspondence.
  for (size_t i = 0; i < n; ++i) {
    if (out.old_to_new[i] != none) out.corr.pairs.emplace_back(i, out.old_to_new[i]);
    else out.corr.pairs.emplace_back(i, nearest_net(hole_of_removed[i], s.xyz[i]));
  }
  for (size_t k = 0; k < H; ++k)
    for (size_t a = 0; a < unit.size(); ++a) {
      size_t best = specs[k].center;
      double bd = std::numeric_limits<double>::infinity();
      for (size_t z = 0; z < n; ++z)
        if (hole_of_removed[z] == k) {
          const double d = s.geom.distance(s.xyz[z], t.xyz[first[k] + a]);
          if (d < bd) bd = d, best = z;
        }
      out.corr.pairs.emplace_back(best, first[k] + a);
    }
  std::sort(out.corr.pairs.begin(), out.corr.pairs.end());

  for (auto h : prior) {
    for (auto& b : h.boundary_ids) b = out.old_to_new.at(b);
    out.holes.push_back(std::move(h));
  }
  for (size_t k = 0; k < H; ++k) {
    Hole h{stage, specs[k].center, s.xyz[specs[k].center], specs[k].r_star, specs[k].r0, {}};
    for (size_t a = 0; a < unit.size(); ++a) h.boundary_ids.push_back(first[k] + a);
    out.holes.push_back(std::move(h));
  }
  return out;
}

/// Max ratio over survivor pairs outside every new work region.
inline void measure_bilipschitz(const SampledSpace& s, const std::vector<HoleSpec>& specs, PunctureOutcome& out) {
  std::vector<size_t> far;
  for (size_t i = 0; i < s.size(); ++i) {
    if (out.old_to_new[i] == std::numeric_limits<size_t>::max()) continue;
    bool ok = true;
    for (const auto& h : specs)
      if (s.geom.distance(s.xyz[i], s.xyz[h.center]) < h.r0) ok = false;
    if (ok) far.push_back(i);
  }
  double worst = 1.0;
  for (size_t a = 0; a < far.size(); ++a)
    for (size_t b = a + 1; b < far.size(); ++b) {
      const double d0 = s.space(far[a], far[b]);
      const double d1 = out.space.space(out.old_to_new[far[a]], out.old_to_new[far[b]]);
      if (d0 <= 0.0 || d1 <= 0.0) continue;
      worst = std::max(worst, std::max(d1 / d0, d0 / d1));
    }
  out.bilipschitz = worst;
  out.pairs_checked = far.size() * (far.size() - 1) / 2;
}

}  // namespace detail

/**
 * @brief Cuts every ball B_{r_star}(center) of the batch, attaches a boundary
 * sphere net of radius r_star and rewires the removed points' neighbors.
 *
 * Verifies gh_upper(old, new) <= eps_i and the (1+eps_i)-bi-Lipschitz bound on
 * pairs outside every B_{r0}; on failure all r_star are halved, up to
 * `retries` times.
 */
inline PunctureOutcome puncture_batch(const SampledSpace& s, const std::vector<Hole>& prior, std::vector<HoleSpec> specs,
                                      double eps_i, int stage, const PunctureOptions& o = {}) {
  if (!(eps_i > 0.0)) fail(ErrorKind::Surgery, "puncture_pipeline", "puncture", "eps_i must be positive");
  detail::check_specs(s, prior, specs, o);
  for (int a = 0; a <= o.retries; ++a) {
    PunctureOutcome out = detail::cut(s, prior, specs, stage, o);
    out.gh = gh::gh_upper(s.space, out.space.space, out.corr);
    detail::measure_bilipschitz(s, specs, out);
    out.attempts = a + 1;
    if (out.gh <= eps_i && out.bilipschitz <= 1.0 + eps_i) return out;
    for (auto& h : specs) h.r_star *= 0.5;
  }
  fail(ErrorKind::Budget, "puncture_pipeline", "puncture",
       "verification failed after " + std::to_string(o.retries) + " r_star halvings");
}

/// Single puncture; r_star == 0 returns the space unchanged with an empty hole.
inline PunctureOutcome puncture(const SampledSpace& s, const std::vector<Hole>& prior, size_t center, double r_star,
                                double r0, double eps_i, int stage = 1, const PunctureOptions& o = {}) {
  if (r_star == 0.0) {
    PunctureOutcome out;
    out.space = s;
    out.holes = prior;
    out.corr = Correspondence::identity(s.size());
    for (size_t i = 0; i < s.size(); ++i) out.old_to_new.push_back(i);
    return out;
  }
  return puncture_batch(s, prior, {{center, r_star, r0}}, eps_i, stage, o);
}

}  // namespace warpgh::puncture
