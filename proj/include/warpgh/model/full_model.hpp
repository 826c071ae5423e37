#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "warpgh/model/smoothing.hpp"

namespace warpgh::model {

namespace detail {

/// Full-strength certificate options for published certificates.
inline CertifyOptions final_options(unsigned threads) {
  CertifyOptions o;
  o.threads = threads;
  return o;
}

inline CertifyOptions search_options(unsigned threads) {
  CertifyOptions o = quick_options();
  o.threads = threads;
  o.max_cells = std::size_t{1} << 17;
  return o;
}

/// tau/(1+r^2) certificate on the whole domain, or found=false.
inline curvature::TauSearch certify_tau(const DoubleWarpProfile& p, unsigned threads) {
  const auto d = p.domain();
  auto s = curvature::find_tau(p, d.lo, d.hi, BoundFn::inverse_quadratic(1.0), search_options(threads));
  if (s.found) {
    s.certificate = curvature::certify_bound(p, d.lo, d.hi, BoundFn::inverse_quadratic(s.tau), final_options(threads));
    s.found = s.certificate.passed();
  }
  return s;
}

/**
 * Re-cap of phi~ scaled by s: t sin(r/t) on [0, r_j], s sin(r + theta) up
 * to 2 r_j, a quintic transition to s sin r ending at the outer edge
 * of the base sine cap, then the remaining s phi~ pieces unshifted.
 */
/// Join radius where t sin(r/t) meets s sin(r + theta) in value and slope.
inline double recap_join(double s, double t) {
  return t * std::asin(std::sqrt((1.0 - s * s) / (1.0 - t * t)));
}

inline DoubleWarpProfile recap(const DoubleWarpProfile& base, double s, double t) {
  const int n = base.n();
  const auto& cap = base.phi().pieces().front();
  if (cap.kind() != profile::PieceKind::SineCap)
    fail(ErrorKind::Precondition, "model_forge", "recap", "phi must start with a sine cap");
  const double rj = recap_join(s, t);
  const double u = rj / t;
  const double theta = std::atan2(t * std::sin(u), std::cos(u)) - rj;
  const double r_a = 2.0 * rj, r_b = cap.domain().hi;
  if (!(r_a < 0.5 * r_b))
    fail(ErrorKind::Precondition, "model_forge", "recap", "t too large for the base sine cap");
  std::vector<ProfilePiece> phi;
  phi.push_back(ProfilePiece::sine_cap({0.0, rj}, t));
  const ProfilePiece left = cap.shifted_scaled({rj, r_a}, s, theta);
  phi.push_back(left);
  const ProfilePiece right = cap.times(s);
  phi.push_back(ProfilePiece::quintic_hermite({r_a, r_b}, left.derivative(r_a, 0), left.derivative(r_a, 1),
                                              left.derivative(r_a, 2), right.derivative(r_b, 0),
                                              right.derivative(r_b, 1), right.derivative(r_b, 2)));
  const auto& ps = base.phi().pieces();
  for (size_t i = 1; i < ps.size(); ++i) phi.push_back(ps[i].times(s));
  return DoubleWarpProfile(ProfileFunction(std::move(phi)), base.rho(), n, BoundaryKind::ClosedDisc);
}

}  // namespace detail

/**
 * @brief Parts 1-3 on [0, r_max] with a tau/(1+r^2) certificate.
 *
 * delta = 0 selects delta0. For delta < delta0 the cap is replaced using
 * s = delta/delta0 and the first t of a decreasing logarithmic sweep that
 * certifies.
 */
inline ModelResult build_full_profile(int n, double epsilon, double alpha, double delta, double r_max = 0.0,
                                      unsigned threads = 1) {
  const char* op = "build_full_profile";
  ModelParams mp;
  mp.n = n;
  mp.epsilon = epsilon;
  mp.alpha = alpha;
  mp.delta = delta;
  mp.r_max = r_max;
  validate(mp, false);
  const ModelResult p1 = build_part1(n);
  ModelResult p2 = build_part2(p1, epsilon, alpha, r_max);
  const double delta0 = p2.constants.delta0;
  if (delta == 0.0) delta = delta0;
  if (delta > delta0 * (1.0 + 1e-12))
    fail(ErrorKind::Validation, "model_forge", op, "delta exceeds delta0 = " + fmt17(delta0));

  if (delta >= delta0) {
    auto s = detail::certify_tau(p2.profile, threads);
    if (!s.found)
      fail(ErrorKind::Construction, "model_forge", op, "no tau in [1e-8, 10] certified; margin " + fmt17(s.certificate.margin));
    p2.constants.tau = s.tau;
    p2.certificate = s.certificate;
    return p2;
  }

  const double s = delta / delta0;
  const double t_top = std::min(1.0 / (200.0 * n), 0.5 / std::sqrt(1.0 / (s * s) - 1.0));
  double best_margin = -std::numeric_limits<double>::infinity();
  for (double t = t_top; t >= 1e-8; t /= std::sqrt(10.0)) {
    DoubleWarpProfile raw = detail::recap(p2.profile, s, t);
    DoubleWarpProfile smooth;
    try {
      smooth = smooth_c1_glue(raw, detail::recap_join(s, t), 0.25 * detail::recap_join(s, t), 1e-3);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Smoothing) throw;
      continue;
    }
    auto cert = detail::certify_tau(smooth, threads);
    if (cert.found) {
      ModelResult out{smooth, p2.constants, cert.certificate};
      out.constants.tau = cert.tau;
      out.constants.t_recap = t;
      return out;
    }
    best_margin = std::max(best_margin, cert.certificate.margin);
  }
  fail(ErrorKind::Construction, "model_forge", op, "no re-cap scale t certified; best margin " + fmt17(best_margin));
}

struct LocalModel {
  DoubleWarpProfile profile;
  ModelParams params;
  ModelConstants constants;
  double neck_lo = 0.0;
  double neck_hi = 1.0;
  double neck_delta = 0.0;  ///< phi = neck_delta r^alpha on the neck
  CurvatureCertificate certificate;
};

/**
 * @brief Rescaled model on [0, 1] with tau/(r+kappa) curvature and an exact neck
 * phi = neck_delta r^alpha, rho = (1-e) r on [kappa, 1].
 *
 * params.delta = 0 uses delta0 before rescaling; otherwise params.delta is the
 * neck coefficient and must not exceed delta0 t^(alpha-1).
 */
inline LocalModel build_local_model(const ModelParams& params, unsigned threads = 1) {
  const char* op = "build_local_model";
  validate(params, true);
  const double al = params.tail_exponent();
  const ModelResult p1 = build_part1(params.n);
  const ModelResult probe = build_part2(p1, params.epsilon, al);
  const double R = probe.constants.R;
  const double t = 2.0 * R / params.kappa;
  const double delta0 = probe.constants.delta0;
  const double delta_full = params.delta == 0.0 ? delta0 : params.delta * std::pow(t, 1.0 - al);
  if (delta_full > delta0 * (1.0 + 1e-12))
    fail(ErrorKind::Validation, "model_forge", op,
         "neck delta exceeds delta0 t^(alpha-1) = " + fmt17(delta0 * std::pow(t, al - 1.0)));
  const ModelResult full = build_full_profile(params.n, params.epsilon, al, std::min(delta_full, delta0), t, threads);

  LocalModel lm;
  lm.params = params;
  lm.constants = full.constants;
  lm.constants.t_local = t;
  lm.constants.mu = 1.0 / t;
  const auto& fp = full.profile;
  lm.profile = DoubleWarpProfile(fp.phi().rescaled(t), fp.rho().rescaled(t), fp.n(), BoundaryKind::ClosedDisc);
  lm.neck_lo = params.kappa;
  lm.neck_hi = 1.0;

  const auto& np = lm.profile.phi().piece_at(params.kappa);
  const auto& nr = lm.profile.rho().piece_at(params.kappa);
  const bool exact = np.kind() == profile::PieceKind::Power && np.param(1) == 0.0 && np.param(2) == al &&
                     np.domain().lo <= params.kappa && np.domain().hi >= 1.0 && nr.kind() == profile::PieceKind::Affine &&
                     nr.param(1) == 0.0 && nr.param(0) == 1.0 - params.epsilon && nr.domain().lo <= params.kappa &&
                     nr.domain().hi >= 1.0;
  if (!exact) fail(ErrorKind::Construction, "model_forge", op, "neck is not the exact power/cone form on [kappa, 1]");
  lm.neck_delta = np.param(0);

  const double tau = full.constants.tau;
  auto cert = curvature::certify_bound(lm.profile, 0.0, 1.0, BoundFn::inverse_linear(tau, params.kappa), detail::final_options(threads));
  if (!cert.passed()) {
    auto s = curvature::find_tau(lm.profile, 0.0, 1.0, BoundFn::inverse_linear(1.0, params.kappa), detail::search_options(threads));
    if (!s.found) fail(ErrorKind::Construction, "model_forge", op, "local model tau/(r+kappa) not certified");
    cert = curvature::certify_bound(lm.profile, 0.0, 1.0, BoundFn::inverse_linear(s.tau, params.kappa), detail::final_options(threads));
    lm.constants.tau = s.tau;
  }
  lm.certificate = cert;
  return lm;
}

/**
 * @brief Shrinks the S^n factor to delta rho on [mu/2, mu] keeping Ric > lambda.
 *
 * Tries C2 quintic transitions starting at 0.4, 0.3, 0.2, 0.1 mu, then the
 * uniform shrink rho -> delta rho. The certificate must be a passing constant bound.
 */
inline DoubleWarpProfile modify_fiber(const DoubleWarpProfile& p, const CurvatureCertificate& cert, double delta,
                                      double eps_tol, unsigned threads = 1) {
  const char* op = "modify_fiber";
  if (!(delta > 0.0 && delta <= 1.0)) fail(ErrorKind::Validation, "model_forge", op, "delta must lie in (0, 1]");
  if (cert.bound.kind != BoundFn::Kind::Constant || !cert.passed() || cert.profile_id != p.id())
    fail(ErrorKind::Precondition, "model_forge", op, "needs a passing constant-bound certificate for this profile");
  const auto& cp = p.phi().pieces().front();
  const auto& cr = p.rho().pieces().front();
  const bool form = cp.kind() == profile::PieceKind::SineCap && cr.kind() == profile::PieceKind::Quartic &&
                    std::fabs(cr.param(0) - cp.param(0)) <= 1e-9 * cp.param(0) &&
                    std::fabs(cr.param(1) * std::pow(cp.param(0), 3.0) - 1.0) <= 1e-9;
  if (!form) fail(ErrorKind::Precondition, "model_forge", op, "profile does not start with A^-1 sin(Ar), A^-1 + A^3 r^4");
  if (delta == 1.0) return p;

  const double mu = p.domain().hi;
  const double lambda = cert.bound.lambda;
  double rho_max = 0.0;
  for (int k = 0; k <= 200; ++k) rho_max = std::max(rho_max, p.rho().eval(0.5 * mu + 0.5 * mu * k / 200.0, 0));
  if ((1.0 - delta) * rho_max > eps_tol)
    fail(ErrorKind::Modification, "model_forge", op,
         "required change " + fmt17((1.0 - delta) * rho_max) + " exceeds eps_tol " + fmt17(eps_tol));

  const ProfileFunction inner_part = p.rho().restricted(0.5 * mu, mu).times(delta);
  std::vector<ProfileFunction> candidates;
  for (double frac : {0.4, 0.3, 0.2, 0.1}) {
    const double ra = frac * mu, rb = 0.5 * mu;
    const ProfileFunction head = p.rho().restricted(0.0, ra);
    const auto& L = head.pieces().back();
    const auto& R = inner_part.pieces().front();
    std::vector<ProfilePiece> ps = head.pieces();
    ps.push_back(ProfilePiece::quintic_hermite({ra, rb}, L.derivative(ra, 0), L.derivative(ra, 1), L.derivative(ra, 2),
                                               R.derivative(rb, 0), R.derivative(rb, 1), R.derivative(rb, 2)));
    ps.insert(ps.end(), inner_part.pieces().begin(), inner_part.pieces().end());
    candidates.emplace_back(std::move(ps));
  }
  candidates.push_back(p.rho().times(delta));

  CertifyOptions opt = detail::final_options(threads);
  opt.refine_fraction = 0.0;
  for (const auto& rho : candidates) {
    if (detail::sup_distance(rho, p.rho(), 0.0, mu) > eps_tol) continue;
    DoubleWarpProfile q;
    try {
      q = DoubleWarpProfile(p.phi(), rho, p.n(), p.boundary_kind());
    } catch (const Error&) {
      continue;
    }
    if (curvature::certify_bound(q, 0.0, mu, BoundFn::constant(lambda), opt).passed()) return q;
  }
  fail(ErrorKind::Modification, "model_forge", op, "no transition keeps Ric > " + fmt17(lambda));
}

}  // namespace warpgh::model
