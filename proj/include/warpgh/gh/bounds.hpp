#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "warpgh/core/error.hpp"
#include "warpgh/gh/metric_space.hpp"

namespace warpgh::gh {

/// Half the distortion of a correspondence; an upper bound for d_GH(A, B).
inline double gh_upper(const FiniteMetricSpace& A, const FiniteMetricSpace& B, const Correspondence& corr) {
  if (!corr.valid_for(A.size(), B.size()))
    fail(ErrorKind::Contract, "gh_lab", "gh_upper", "correspondence does not cover both spaces");
  const auto& P = corr.pairs;
  double dis = 0.0;
  for (size_t u = 0; u < P.size(); ++u)
    for (size_t v = u + 1; v < P.size(); ++v)
      dis = std::max(dis, std::fabs(A(P[u].first, P[v].first) - B(P[u].second, P[v].second)));
  return 0.5 * dis;
}

/// Every point of A paired with the single point of a one-point space.
inline Correspondence to_point_correspondence(size_t n) {
  Correspondence c;
  for (size_t i = 0; i < n; ++i) c.pairs.emplace_back(i, 0);
  return c;
}

/// Hausdorff distance between two finite subsets of the line.
inline double hausdorff_1d(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) return 0.0;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  auto one_side = [](const std::vector<double>& from, const std::vector<double>& to) {
    double h = 0.0;
    for (double v : from) {
      const auto it = std::lower_bound(to.begin(), to.end(), v);
      double best = std::numeric_limits<double>::infinity();
      if (it != to.end()) best = *it - v;
      if (it != to.begin()) best = std::min(best, v - *(it - 1));
      h = std::max(h, best);
    }
    return h;
  };
  return std::max(one_side(x, y), one_side(y, x));
}

/**
 * @brief Lower bound max(|diam A - diam B|/2, H(ecc A, ecc B)/2).
 *
 * Paired points of a correspondence with distortion D have eccentricities
 * within D, so the Hausdorff distance of the eccentricity sets is at most
 * 2 d_GH. The diameter term is implied but kept explicit.
 */
inline double gh_lower(const FiniteMetricSpace& A, const FiniteMetricSpace& B) {
  if (A.size() == 0 || B.size() == 0) return 0.0;
  const double diam = 0.5 * std::fabs(A.diameter() - B.diameter());
  const double ecc = 0.5 * hausdorff_1d(A.eccentricities(), B.eccentricities());
  return std::max(diam, ecc);
}

/// Exact result with a witness correspondence.
struct GhExact {
  double value = 0.0;
  Correspondence witness;
};

namespace detail {

/// Search for a correspondence whose pairs are pairwise compatible at distortion D.
struct CoverSearch {
  const FiniteMetricSpace& A;
  const FiniteMetricSpace& B;
  double D;
  std::vector<std::pair<size_t, size_t>> chosen;

  bool compatible(size_t i, size_t j) const {
    for (const auto& [a, b] : chosen)
      if (std::fabs(A(i, a) - B(j, b)) > D) return false;
    return true;
  }

  /// Phase 1 picks a partner for every point of A; phase 2 covers the rest of B.
  bool run(size_t i) {
    if (i < A.size()) {
      for (size_t j = 0; j < B.size(); ++j) {
        if (!compatible(i, j)) continue;
        chosen.emplace_back(i, j);
        if (run(i + 1)) return true;
        chosen.pop_back();
      }
      return false;
    }
    const size_t k = i - A.size();
    if (k == B.size()) return true;
    for (const auto& pr : chosen)
      if (pr.second == k) return run(i + 1);
    for (size_t a = 0; a < A.size(); ++a) {
      if (!compatible(a, k)) continue;
      chosen.emplace_back(a, k);
      if (run(i + 1)) return true;
      chosen.pop_back();
    }
    return false;
  }
};

}  // namespace detail

inline constexpr size_t kExactMaxPoints = 6;

/**
 * @brief Exact d_GH for spaces of at most 6 points.
 *
 * Every minimal correspondence is a choice of partner for each point of A
 * plus partners for the uncovered points of B. The optimal distortion is one
 * of the values |d_A - d_B|, so the smallest feasible one is found by binary
 * search over that sorted list.
 */
inline GhExact gh_exact_small(const FiniteMetricSpace& A, const FiniteMetricSpace& B) {
  if (A.size() > kExactMaxPoints || B.size() > kExactMaxPoints)
    fail(ErrorKind::Capacity, "gh_lab", "gh_exact_small", "spaces must have at most 6 points");
  if (A.size() == 0 || B.size() == 0) fail(ErrorKind::Domain, "gh_lab", "gh_exact_small", "spaces must be nonempty");
  std::vector<double> cand = {0.0};
  for (size_t i = 0; i < A.size(); ++i)
    for (size_t a = 0; a < A.size(); ++a)
      for (size_t j = 0; j < B.size(); ++j)
        for (size_t b = 0; b < B.size(); ++b) cand.push_back(std::fabs(A(i, a) - B(j, b)));
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  size_t lo = 0, hi = cand.size() - 1;  // the full product is feasible at the largest value
  while (lo < hi) {
    const size_t mid = (lo + hi) / 2;
    detail::CoverSearch s{A, B, cand[mid], {}};
    if (s.run(0)) hi = mid;
    else lo = mid + 1;
  }
  detail::CoverSearch s{A, B, cand[lo], {}};
  s.run(0);
  Correspondence best{s.chosen};
  return {gh_upper(A, B, best), best};
}

}  // namespace warpgh::gh
