#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "warpgh/profile/double_warp.hpp"

namespace warpgh::curvature {

using profile::DoubleWarpProfile;
using profile::ProfileFunction;
using profile::ProfilePiece;
using profile::RatioKind;

/// Ricci operator eigenvalues on unit vectors: radial, S^2 fiber, S^n fiber.
struct RicciEigenvalues {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double min() const { return std::min({lambda0, lambda1, lambda2}); }
};

/// Value and first two derivatives of a warping function at one radius.
struct Jet {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

inline Jet jet(const ProfilePiece& p, double r) { return {p.derivative(r, 0), p.derivative(r, 1), p.derivative(r, 2)}; }

/// Eigenvalues from the three ratio families; requires phi, rho nonzero.
inline RicciEigenvalues eigen_from_jets(const Jet& f, const Jet& g, int n) {
  const double af = f.d2 / f.v, ag = g.d2 / g.v;
  const double bf = (1.0 - f.d1 * f.d1) / (f.v * f.v);
  const double bg = (1.0 - g.d1 * g.d1) / (g.v * g.v);
  const double pr = (f.d1 * g.d1) / (f.v * g.v);
  return {-(2.0 * af + n * ag), -af + bf - n * pr, -ag + (n - 1) * bg - 2.0 * pr};
}

inline RicciEigenvalues eigen_from_pieces(const ProfilePiece& phi, const ProfilePiece& rho, int n, double r) {
  return eigen_from_jets(jet(phi, r), jet(rho, r), n);
}

/// Eigenvalues at r; the right limit at knots, Taylor limits at a closed-disc origin.
inline RicciEigenvalues ricci_eigenvalues(const DoubleWarpProfile& p, double r) {
  const auto& f = p.phi();
  const auto& g = p.rho();
  const int n = p.n();
  const double fv = f.eval(r, 0), gv = g.eval(r, 0);
  if (fv != 0.0 && gv != 0.0) return eigen_from_pieces(f.piece_at(r), g.piece_at(r), n, r);
  const double af = profile::eval_ratio(f, g, r, RatioKind::SecondOverValue);
  const double ag = profile::eval_ratio(g, f, r, RatioKind::SecondOverValue);
  const double bf = profile::eval_ratio(f, g, r, RatioKind::OneMinusSlopeSqOverSq);
  const double bg = profile::eval_ratio(g, f, r, RatioKind::OneMinusSlopeSqOverSq);
  const double pr = profile::eval_ratio(f, g, r, RatioKind::SlopeProduct);
  return {-(2.0 * af + n * ag), -af + bf - n * pr, -ag + (n - 1) * bg - 2.0 * pr};
}

/// Left limit at a knot (identical to ricci_eigenvalues away from knots).
inline RicciEigenvalues ricci_eigenvalues_left(const DoubleWarpProfile& p, double r) {
  auto left_piece = [r](const ProfileFunction& f) -> const ProfilePiece& {
    size_t i = f.piece_index(r);
    if (i > 0 && r == f.pieces()[i].domain().lo) --i;
    return f.pieces()[i];
  };
  const auto& a = left_piece(p.phi());
  const auto& b = left_piece(p.rho());
  if (a.derivative(r, 0) == 0.0 || b.derivative(r, 0) == 0.0) return ricci_eigenvalues(p, r);
  return eigen_from_pieces(a, b, p.n(), r);
}

/// Eigenvalues after phi -> c phi. lambda0 and lambda2 do not involve |phi| scale.
inline RicciEigenvalues fiber_rescale_eigenvalues(const DoubleWarpProfile& p, double c, double r) {
  if (!(c > 0.0 && c <= 1.0)) fail(ErrorKind::Validation, "curvature_engine", "fiber_rescale_eigenvalues", "c must be in (0,1]");
  RicciEigenvalues e = ricci_eigenvalues(p, r);
  if (c == 1.0) return e;
  const double f = p.phi().eval(r, 0);
  if (f == 0.0) fail(ErrorKind::Singularity, "curvature_engine", "fiber_rescale_eigenvalues", "phi vanishes at r");
  e.lambda1 += (1.0 / (c * c) - 1.0) / (f * f);
  return e;
}

struct WarpedRicci {
  double base = 0.0;
  double fiber = 0.0;
};

/// Ricci of B x_f S^n from scalar reductions of f on the base, fiber value as an eigenvalue.
inline WarpedRicci general_warped_ricci(double base_ricci, double hessian_over_f, double grad_sq_over_f_sq,
                                        double laplacian_over_f, double f, int n) {
  if (!(f > 0.0)) fail(ErrorKind::Domain, "curvature_engine", "general_warped_ricci", "f must be positive");
  return {base_ricci - n * hessian_over_f, 1.0 / (f * f) - (n - 1) * grad_sq_over_f_sq - laplacian_over_f};
}

struct CurvePoint {
  double r = 0.0;
  RicciEigenvalues e;
};

/// Samples on [a, b] at the given step plus every knot; knots report the smaller one-sided min.
inline std::vector<CurvePoint> min_eigenvalue_curve(const DoubleWarpProfile& p, double a, double b, double step) {
  if (!(step > 0.0)) fail(ErrorKind::Validation, "curvature_engine", "min_eigenvalue_curve", "step must be positive");
  const auto d = p.domain();
  if (a < d.lo || b > d.hi || a > b) fail(ErrorKind::Domain, "curvature_engine", "min_eigenvalue_curve", "interval outside domain");
  std::vector<double> rs;
  const auto count = static_cast<long long>(std::ceil((b - a) / step));
  for (long long i = 0; i <= count; ++i) rs.push_back(std::min(b, a + static_cast<double>(i) * step));
  for (const auto& f : {p.phi().knots(), p.rho().knots()})
    for (double k : f)
      if (k > a && k < b) rs.push_back(k);
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  std::vector<CurvePoint> out;
  out.reserve(rs.size());
  for (double r : rs) {
    RicciEigenvalues e = ricci_eigenvalues(p, r);
    if (r > d.lo) {
      const RicciEigenvalues l = ricci_eigenvalues_left(p, r);
      if (l.min() < e.min()) e = l;
    }
    out.push_back({r, e});
  }
  return out;
}

inline std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream os;
  os << "r,lambda0,lambda1,lambda2,min\n";
  for (const auto& c : curve)
    os << fmt17(c.r) << ',' << fmt17(c.e.lambda0) << ',' << fmt17(c.e.lambda1) << ',' << fmt17(c.e.lambda2) << ','
       << fmt17(c.e.min()) << '\n';
  return os.str();
}

}  // namespace warpgh::curvature
