#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "warpgh/model/builders.hpp"

namespace warpgh::model {

namespace detail {

/// Index of the piece starting at knot r0, or nullopt when r0 is not a knot.
inline std::optional<size_t> knot_index(const ProfileFunction& f, double r0) {
  for (size_t i = 1; i < f.pieces().size(); ++i)
    if (profile::knot_close(f.pieces()[i].domain().lo, r0)) return i;
  return std::nullopt;
}

/// Replaces [r0-dl, r0+dr] around knot i by a quintic matching both branches to second order.
inline ProfileFunction blend_knot(const ProfileFunction& f, size_t i, double dl, double dr) {
  const auto& L = f.pieces()[i - 1];
  const auto& R = f.pieces()[i];
  const double r0 = R.domain().lo, a = r0 - dl, b = r0 + dr;
  std::vector<ProfilePiece> out(f.pieces().begin(), f.pieces().begin() + static_cast<long>(i - 1));
  out.push_back(L.restricted({L.domain().lo, a}));
  out.push_back(ProfilePiece::quintic_hermite({a, b}, L.derivative(a, 0), L.derivative(a, 1), L.derivative(a, 2),
                                              R.derivative(b, 0), R.derivative(b, 1), R.derivative(b, 2)));
  out.push_back(R.restricted({b, R.domain().hi}));
  out.insert(out.end(), f.pieces().begin() + static_cast<long>(i + 1), f.pieces().end());
  return ProfileFunction(std::move(out), f.positive());
}

/// max |f - g| sampled on [a, b]; both evaluated with right limits.
inline double sup_distance(const ProfileFunction& f, const ProfileFunction& g, double a, double b, int samples = 400) {
  double m = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double r = a + (b - a) * k / samples;
    m = std::max(m, std::fabs(f.eval(r, 0) - g.eval(r, 0)));
  }
  return m;
}

/// Sampled two-sided inf of the min eigenvalue on [a, b].
inline double sampled_inf(const DoubleWarpProfile& p, double a, double b, int samples = 400) {
  const auto curve = curvature::min_eigenvalue_curve(p, a, b, (b - a) / samples);
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : curve) m = std::min(m, c.e.min());
  return m;
}

}  // namespace detail

/**
 * @brief C2 smoothing of a slope-drop or curvature-jump knot at r0.
 *
 * Each function with a knot at r0 is replaced on [r0-d, r0+d] by a quintic
 * Hermite blend of its two branches. d starts at min(half_width, drop/(4|f''|))
 * and is halved
 * up to 8 times until the sup distance is within eps_tol and the certified
 * inf of the min eigenvalue on the 2d window is at least the previous sampled
 * inf minus eps_tol.
 */
inline DoubleWarpProfile smooth_c1_glue(const DoubleWarpProfile& p, double r0, double half_width, double eps_tol,
                                        const CertifyOptions& opt = detail::quick_options()) {
  const char* op = "smooth_c1_glue";
  if (!(half_width > 0.0) || !(eps_tol > 0.0)) fail(ErrorKind::Validation, "model_forge", op, "half_width and eps_tol must be positive");
  const auto kf = detail::knot_index(p.phi(), r0);
  const auto kg = detail::knot_index(p.rho(), r0);
  if (!kf && !kg) fail(ErrorKind::Precondition, "model_forge", op, "no knot at r0 = " + fmt17(r0));

  auto jump2 = [](const ProfilePiece& L, const ProfilePiece& R, double x) {
    const double a = L.derivative(x, 2), b = R.derivative(x, 2);
    return std::abs(a - b) > 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  bool any_drop = false;
  double cross = std::numeric_limits<double>::infinity();
  auto check = [&](const ProfileFunction& f, std::optional<size_t> k, const char* name) {
    if (!k) return;
    const auto& L = f.pieces()[*k - 1];
    const auto& R = f.pieces()[*k];
    const double x = R.domain().lo;
    const double sl = L.derivative(x, 1), sr = R.derivative(x, 1);
    if (profile::knot_close(sl, sr)) {
      // C1 already; a jump in f'' is still blended away.
      if (!jump2(L, R, x)) return;
      any_drop = true;
      return;
    }
    if (sr > sl)
      fail(ErrorKind::Precondition, "model_forge", op, std::string(name) + " slope increases across the knot");
    if (!(sl > 0.0 && sr > 0.0)) fail(ErrorKind::Precondition, "model_forge", op, std::string(name) + " not increasing near r0");
    any_drop = true;
    // Extended branches cross roughly drop/|f''| away from r0; the blend must stay inside that.
    const double curv = std::max(std::abs(L.derivative(x, 2)), std::abs(R.derivative(x, 2)));
    if (curv > 0.0) cross = std::min(cross, (sl - sr) / curv);
  };
  check(p.phi(), kf, "phi");
  check(p.rho(), kg, "rho");
  if (!any_drop) return p;  // already C2 there

  const auto dom = p.domain();
  double d = std::min(half_width, 0.25 * cross);
  for (int attempt = 0; attempt <= 8; ++attempt, d *= 0.5) {
    auto room = [&](const ProfileFunction& f, std::optional<size_t> k) {
      if (!k) return true;
      return f.pieces()[*k - 1].domain().width() > d && f.pieces()[*k].domain().width() > d;
    };
    if (!room(p.phi(), kf) || !room(p.rho(), kg)) continue;
    auto smooth_one = [&](const ProfileFunction& f, std::optional<size_t> k) {
      if (!k) return f;
      const auto& L = f.pieces()[*k - 1];
      const auto& R = f.pieces()[*k];
      const double x = R.domain().lo;
      if (!profile::knot_close(L.derivative(x, 1), R.derivative(x, 1))) return detail::blend_knot(f, *k, d, d);
      if (!jump2(L, R, x)) return f;
      // Pure f'' jump: a symmetric quintic overshoots, so the window leans into the more curved branch.
      if (std::abs(L.derivative(x, 2)) >= std::abs(R.derivative(x, 2))) return detail::blend_knot(f, *k, d, 0.1 * d);
      return detail::blend_knot(f, *k, 0.1 * d, d);
    };
    const ProfileFunction phi = smooth_one(p.phi(), kf);
    const ProfileFunction rho = smooth_one(p.rho(), kg);
    const double a = std::max(dom.lo, r0 - 2.0 * d), b = std::min(dom.hi, r0 + 2.0 * d);
    const double dist = detail::sup_distance(phi, p.phi(), r0 - d, r0 + d) + detail::sup_distance(rho, p.rho(), r0 - d, r0 + d);
    if (dist > eps_tol) continue;
    DoubleWarpProfile q(phi, rho, p.n(), p.boundary_kind());
    const double before = detail::sampled_inf(p, a, b);
    const auto cert = curvature::certify_bound(q, a, b, BoundFn::constant(before - eps_tol), opt);
    if (cert.passed()) return q;
  }
  fail(ErrorKind::Smoothing, "model_forge", op, "no half-width passed after 8 shrinks at r0 = " + fmt17(r0));
}

}  // namespace warpgh::model
