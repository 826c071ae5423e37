#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "warpgh/core/error.hpp"
#include "warpgh/gh/graph.hpp"
#include "warpgh/gh/metric_space.hpp"
#include "warpgh/gh/sphere_nets.hpp"
#include "warpgh/profile/double_warp.hpp"

namespace warpgh::gh {

inline constexpr size_t kDefaultPointCap = 20000;

/// Graph metric of a sphere net scaled to the given radius.
inline FiniteMetricSpace sphere_space(const SphereNet& net, double radius, unsigned threads = 1) {
  const size_t m = net.size();
  WeightedGraph g(m);
  for (size_t i = 0; i < m; ++i)
    for (const auto& [j, a] : net.nbrs[i])
      if (j > i) g.add_edge(i, j, radius * a);
  std::vector<PointLabel> labels(m);
  for (size_t i = 0; i < m; ++i) labels[i] = {std::to_string(i), std::nullopt, {static_cast<int>(i)}};
  return FiniteMetricSpace(std::move(labels), all_pairs(g, m, threads));
}

/// Warping functions of dr^2 + phi(r)^2 g_{S^2} + rho(r)^2 g_{S^n}.
struct WarpFns {
  std::function<double(double)> phi;
  std::function<double(double)> rho;
};

namespace detail {

/// Implicit product graph on radial grid x net2 x netn. Moves combine a radial
/// step with a hop in at most one fiber, which keeps the degree additive.
struct ProductGraph {
  const std::vector<double>& r;
  const std::vector<double>& phi_mid;  // index 2i (grid) and 2i+1 (midpoint i, i+1)
  const std::vector<double>& rho_mid;
  const SphereNet& s2;
  const SphereNet& sn;

  size_t index(size_t i, size_t p, size_t q) const { return (i * s2.size() + p) * sn.size() + q; }

  template <class Emit>
  void neighbors(size_t u, Emit&& emit) const {
    const size_t q = u % sn.size(), p = (u / sn.size()) % s2.size(), i = u / (sn.size() * s2.size());
    for (int di = -1; di <= 1; ++di) {
      if ((di < 0 && i == 0) || (di > 0 && i + 1 >= r.size())) continue;
      const size_t j = i + static_cast<size_t>(static_cast<long>(di));
      const size_t mid = di == 0 ? 2 * i : (di > 0 ? 2 * i + 1 : 2 * j + 1);
      const double dr = r[j] > r[i] ? r[j] - r[i] : r[i] - r[j];
      const double f = phi_mid[mid], h = rho_mid[mid];
      if (di != 0) emit(index(j, p, q), dr);
      for (const auto& [p2, a2] : s2.nbrs[p]) {
        const double x = f * a2;
        emit(index(j, p2, q), std::sqrt(dr * dr + x * x));
      }
      for (const auto& [q2, an] : sn.nbrs[q]) {
        const double y = h * an;
        emit(index(j, p, q2), std::sqrt(dr * dr + y * y));
      }
    }
  }
};

}  // namespace detail

/**
 * @brief Graph-metric sample of the warped product over [a, b] on given nets.
 *
 * Edges join a radial step (or none) with a hop in one fiber net; an edge's
 * length uses phi and rho at its radial midpoint.
 */
inline FiniteMetricSpace sample_warp(const WarpFns& w, double a, double b, size_t n_r, const SphereNet& s2,
                                     const SphereNet& sn, size_t cap = kDefaultPointCap, unsigned threads = 1) {
  const char* op = "sample_warp";
  if (n_r < 2) fail(ErrorKind::Domain, "gh_lab", op, "n_r must be >= 2");
  if (!(a < b)) fail(ErrorKind::Domain, "gh_lab", op, "empty radial interval");
  if (s2.size() < 1 || sn.size() < 1) fail(ErrorKind::Domain, "gh_lab", op, "nets must be nonempty");
  const size_t total = n_r * s2.size() * sn.size();
  if (total > cap)
    fail(ErrorKind::Capacity, "gh_lab", op, std::to_string(total) + " points exceed cap " + std::to_string(cap));
  std::vector<double> r(n_r), pm(2 * n_r), hm(2 * n_r);
  for (size_t i = 0; i < n_r; ++i) r[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n_r - 1);
  for (size_t i = 0; i < n_r; ++i) {
    pm[2 * i] = w.phi(r[i]);
    hm[2 * i] = w.rho(r[i]);
    if (i + 1 < n_r) {
      const double m = 0.5 * (r[i] + r[i + 1]);
      pm[2 * i + 1] = w.phi(m);
      hm[2 * i + 1] = w.rho(m);
    }
  }
  detail::ProductGraph g{r, pm, hm, s2, sn};
  std::vector<PointLabel> labels(total);
  for (size_t i = 0; i < n_r; ++i)
    for (size_t p = 0; p < s2.size(); ++p)
      for (size_t q = 0; q < sn.size(); ++q) {
        auto& l = labels[g.index(i, p, q)];
        l.id = std::to_string(i) + ":" + std::to_string(p) + ":" + std::to_string(q);
        l.r = r[i];
        l.fiber = {static_cast<int>(p), static_cast<int>(q)};
      }
  return FiniteMetricSpace(std::move(labels), all_pairs(g, total, threads));
}

/// Samples a double warped profile on [a, b]; S^2 icosphere with >= net2 points, seeded S^n net of netn points.
inline FiniteMetricSpace sample_double_warp(const profile::DoubleWarpProfile& p, double a, double b, size_t n_r,
                                            size_t net2, size_t netn, uint64_t seed, size_t cap = kDefaultPointCap,
                                            unsigned threads = 1) {
  const auto dom = p.domain();
  if (a < dom.lo - 1e-12 || b > dom.hi + 1e-12) fail(ErrorKind::Domain, "gh_lab", "sample_double_warp", "interval outside profile domain");
  if (net2 < 1 || netn < 1) fail(ErrorKind::Domain, "gh_lab", "sample_double_warp", "net sizes must be positive");
  const SphereNet s2 = icosphere_net(net2);
  const SphereNet sn = farthest_point_net(p.n(), netn, seed);
  const WarpFns w{[&p](double r) { return p.phi().eval(r, 0); }, [&p](double r) { return p.rho().eval(r, 0); }};
  return sample_warp(w, a, b, n_r, s2, sn, cap, threads);
}

}  // namespace warpgh::gh
