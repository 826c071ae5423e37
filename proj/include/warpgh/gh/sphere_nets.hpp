#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

#include "warpgh/core/error.hpp"

namespace warpgh::gh {

/// Quasi-uniform net on the unit sphere S^dim in R^{dim+1} with a local neighbor graph.
struct SphereNet {
  int dim = 2;
  std::vector<std::vector<double>> pts;
  /// Neighbor lists with great-circle angles as weights.
  std::vector<std::vector<std::pair<uint32_t, double>>> nbrs;

  size_t size() const { return pts.size(); }
};

/// Great-circle angle, accurate for nearby points.
inline double sphere_angle(const std::vector<double>& x, const std::vector<double>& y) {
  double c = 0.0;
  for (size_t k = 0; k < x.size(); ++k) c += (x[k] - y[k]) * (x[k] - y[k]);
  return 2.0 * std::asin(std::min(1.0, std::sqrt(c) / 2.0));
}

namespace detail {

inline void normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  s = std::sqrt(s);
  for (double& x : v) x /= s;
}

/// Connects every pair within max(factor * median nearest-neighbor angle, min_radius),
/// and every point to its nearest neighbor.
inline void connect(SphereNet& net, double factor, double min_radius) {
  const size_t m = net.size();
  net.nbrs.assign(m, {});
  if (m < 2) return;
  std::vector<double> nn(m, 10.0);
  std::vector<size_t> nn_idx(m, 0);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < m; ++j)
      if (i != j) {
        const double a = sphere_angle(net.pts[i], net.pts[j]);
        if (a < nn[i]) nn[i] = a, nn_idx[i] = j;
      }
  std::vector<double> sorted(nn);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(m / 2), sorted.end());
  const double radius = std::max(factor * sorted[m / 2], min_radius);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 1; j < m; ++j) {
      const double a = sphere_angle(net.pts[i], net.pts[j]);
      if (a <= radius || nn_idx[i] == j || nn_idx[j] == i) {
        net.nbrs[i].emplace_back(static_cast<uint32_t>(j), a);
        net.nbrs[j].emplace_back(static_cast<uint32_t>(i), a);
      }
    }
}

}  // namespace detail

/// Neighbor radius: a multiple of the typical spacing, never below kNetMinRadius.
/// A fixed floor makes the path stretch shrink as nets are refined.
inline constexpr double kNetRadiusFactor = 3.0;
inline constexpr double kNetMinRadius = 0.8;
/// Farthest-point nets up to this size use the complete graph (exact angles).
inline constexpr size_t kCompleteNetMax = 64;

/**
 * @brief Icosahedral subdivision of S^2 with frequency f = ceil(sqrt((m-2)/10)),
 * giving 10 f^2 + 2 >= m points.
 */
inline SphereNet icosphere_net(size_t min_points, double radius_factor = kNetRadiusFactor) {
  if (min_points < 1) fail(ErrorKind::Domain, "gh_lab", "icosphere_net", "net size must be positive");
  SphereNet net;
  net.dim = 2;
  if (min_points == 1) {
    net.pts = {{0.0, 0.0, 1.0}};
    net.nbrs.assign(1, {});
    return net;
  }
  const int f = std::max(1, static_cast<int>(std::ceil(std::sqrt((static_cast<double>(min_points) - 2.0) / 10.0))));
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  const std::vector<std::array<double, 3>> v = {{-1, g, 0}, {1, g, 0}, {-1, -g, 0}, {1, -g, 0}, {0, -1, g}, {0, 1, g},
                                               {0, -1, -g}, {0, 1, -g}, {g, 0, -1}, {g, 0, 1}, {-g, 0, -1}, {-g, 0, 1}};
  const int faces[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                            {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                            {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  std::map<std::tuple<long long, long long, long long>, size_t> seen;
  for (const auto& fc : faces) {
    for (int i = 0; i <= f; ++i)
      for (int j = 0; i + j <= f; ++j) {
        const int k = f - i - j;
        std::vector<double> p(3);
        for (int c = 0; c < 3; ++c) p[c] = (k * v[fc[0]][c] + i * v[fc[1]][c] + j * v[fc[2]][c]) / f;
        detail::normalize(p);
        const auto key = std::make_tuple(std::llround(p[0] * 1e9), std::llround(p[1] * 1e9), std::llround(p[2] * 1e9));
        if (seen.emplace(key, net.pts.size()).second) net.pts.push_back(p);
      }
  }
  detail::connect(net, radius_factor, kNetMinRadius);
  return net;
}

/// Seeded farthest-point greedy net of m points on S^dim over 50 m uniform samples.
/// Sparse random nets have poor path stretch, so small ones are fully connected.
inline SphereNet farthest_point_net(int dim, size_t m, uint64_t seed, double radius_factor = kNetRadiusFactor) {
  if (dim < 1) fail(ErrorKind::Domain, "gh_lab", "farthest_point_net", "sphere dimension must be >= 1");
  if (m < 1) fail(ErrorKind::Domain, "gh_lab", "farthest_point_net", "net size must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const size_t pool = 50 * m;
  std::vector<std::vector<double>> cand(pool, std::vector<double>(static_cast<size_t>(dim) + 1));
  for (auto& c : cand) {
    for (double& x : c) x = gauss(rng);
    detail::normalize(c);
  }
  SphereNet net;
  net.dim = dim;
  std::vector<double> gap(pool, 10.0);
  size_t next = 0;
  for (size_t k = 0; k < m; ++k) {
    net.pts.push_back(cand[next]);
    size_t best = 0;
    for (size_t i = 0; i < pool; ++i) {
      gap[i] = std::min(gap[i], sphere_angle(cand[i], cand[next]));
      if (gap[i] > gap[best]) best = i;
    }
    next = best;
  }
  detail::connect(net, radius_factor, m <= kCompleteNetMax ? 4.0 : kNetMinRadius);
  return net;
}

/// S^2 uses the icosphere; other dimensions the farthest-point net.
inline SphereNet make_sphere_net(int dim, size_t m, uint64_t seed) {
  return dim == 2 ? icosphere_net(m) : farthest_point_net(dim, m, seed);
}

}  // namespace warpgh::gh
