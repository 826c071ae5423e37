#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "warpgh/curvature/certificate.hpp"
#include "warpgh/model/params.hpp"

namespace warpgh::model {

using curvature::BoundFn;
using curvature::CertifyOptions;
using curvature::CurvatureCertificate;
using profile::BoundaryKind;
using profile::DoubleWarpProfile;
using profile::Interval;
using profile::ProfileFunction;
using profile::ProfilePiece;

struct ModelResult {
  DoubleWarpProfile profile;
  ModelConstants constants;
  CurvatureCertificate certificate;
};

namespace detail {

/// Bisection for a root of an increasing function on [lo, hi].
inline double bisect_increasing(const std::function<double(double)>& g, double lo, double hi, int iters = 200) {
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

/// Concave power piece on [r0, r1] with value v0, slope s0 at r0 and slope s1 < s0 at r1.
inline ProfilePiece concave_power(double r0, double r1, double v0, double s0, double s1) {
  const double L = r1 - r0, m = s0 / s1;
  auto g = [&](double B) { return (B * v0 / s0) * (std::pow(m, 1.0 / (1.0 - B)) - 1.0) - L; };
  if (!(g(1e-9) < 0.0 && g(1.0 - 1e-9) > 0.0))
    fail(ErrorKind::Construction, "model_forge", "build_part1", "concave tail cannot reach the slope target");
  const double B = bisect_increasing(g, 1e-9, 1.0 - 1e-9);
  const double xb = B * v0 / s0;
  return ProfilePiece::power({r0, r1}, v0 / std::pow(xb, B), xb - r0, B);
}

/// Same closed form continued up to r_max (power and affine tails).
inline ProfileFunction extend_to(const ProfileFunction& f, double r_max) {
  std::vector<ProfilePiece> ps = f.pieces();
  const Interval d = ps.back().domain();
  if (r_max < d.hi) return f.restricted(f.domain().lo, r_max);
  ps.back() = ps.back().restricted({d.lo, r_max});
  return ProfileFunction(std::move(ps), f.positive());
}

inline CertifyOptions quick_options() {
  CertifyOptions o;
  o.refine_fraction = 0.0;
  return o;
}

}  // namespace detail

/**
 * @brief Cap, bridges and concave tails on [0, R1].
 *
 * phi = sin r and rho = 1 + r^4 on [0, 1/(10n)]; constant-second-derivative
 * bridges to slopes (2 c1, rho'(1/(9n))); power tails reaching slope c1 at R1.
 */
inline ModelResult build_part1(int n, const CertifyOptions& opt = detail::quick_options()) {
  if (n < 2) fail(ErrorKind::Validation, "model_forge", "build_part1", "n must be >= 2");
  const double c1 = std::pow(10.0 * n, -3.0);
  const double a = 1.0 / (10.0 * n), b = 1.0 / (9.0 * n), w = b - a;
  const double R1 = 100.0 / c1;

  const double phi_b = std::sin(a) + 0.5 * w * (std::cos(a) + 2.0 * c1);
  const double phi_dd = (2.0 * c1 - std::cos(a)) / w;
  if (!(phi_dd < -std::sin(b))) fail(ErrorKind::Construction, "model_forge", "build_part1", "phi bridge is not below phi0''");
  const double sa = 4.0 * a * a * a, sb = sa + 12.0 * a * a * w;
  const double rho_b = 1.0 + a * a * a * a + 0.5 * w * (sa + sb);
  if (!(sb > c1)) fail(ErrorKind::Construction, "model_forge", "build_part1", "rho bridge slope below c1");

  std::vector<ProfilePiece> phi{ProfilePiece::sine_cap({0.0, a}, 1.0),
                                ProfilePiece::cubic_hermite({a, b}, std::sin(a), std::cos(a), phi_b, 2.0 * c1),
                                detail::concave_power(b, R1, phi_b, 2.0 * c1, c1)};
  std::vector<ProfilePiece> rho{ProfilePiece::quartic({0.0, a}, 1.0, 1.0),
                                ProfilePiece::cubic_hermite({a, b}, 1.0 + a * a * a * a, sa, rho_b, sb),
                                detail::concave_power(b, R1, rho_b, sb, c1)};
  DoubleWarpProfile p(ProfileFunction(std::move(phi)), ProfileFunction(std::move(rho)), n, BoundaryKind::ClosedDisc);

  ModelResult out{p, {}, {}};
  out.constants.c1 = c1;
  out.constants.R1 = R1;
  out.constants.xi = p.phi().eval(R1, 0) / c1 - R1;
  out.certificate = curvature::certify_bound(p, 0.0, R1, BoundFn::constant(0.0), opt);
  if (!out.certificate.passed())
    fail(ErrorKind::Construction, "model_forge", "build_part1",
         "Part-1 eigenvalues not certified positive; worst slack " + fmt17(out.certificate.margin));
  return out;
}

namespace detail {

struct RampState {
  double r, P, dP, Q, dQ;
};

struct RampStage {
  double beta, q, xp, Cp, xq, Cq;
};

inline RampStage ramp_stage(const RampState& s, double s_end, int n) {
  const double lim = (n - 1) * (1.0 - s_end * s_end) / (s_end * s_end);
  const double beta = std::min(0.5, 0.3 * lim);
  const double kk = 0.8 * 2.0 * beta * (1.0 - beta) / n;
  const double q = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * kk));
  const double xq = q * s.Q / s.dQ;
  const double xp = std::max(beta * s.P / s.dP, xq);
  return {beta, q, xp, xp - s.r, xq, xq - s.r};
}

/// State at the radius where rho' reaches s_end inside a stage.
inline RampState ramp_advance(const RampState& s, const RampStage& g, double s_end) {
  const double xe = g.xq * std::pow(s_end / s.dQ, 1.0 / (g.q - 1.0));
  const double re = xe - g.Cq;
  RampState t;
  t.r = re;
  t.P = s.P * std::pow((re + g.Cp) / g.xp, g.beta);
  t.dP = g.beta * t.P / (re + g.Cp);
  t.Q = s.Q * std::pow(xe / g.xq, g.q);
  t.dQ = s_end;
  return t;
}

}  // namespace detail

/**
 * @brief Extends Part 1 through a slope ramp to the cone tail on [0, r_max].
 *
 * Beyond the ramp, phi = delta0 r^alpha, rho is affine with slope in (1-e, 1-e/2]
 * until it meets (1-e) r at R, then rho = (1-e) r. r_max = 0 selects 4 R.
 */
inline ModelResult build_part2(const ModelResult& part1, double epsilon, double alpha, double r_max = 0.0,
                               const CertifyOptions& opt = detail::quick_options()) {
  const char* op = "build_part2";
  const auto& p1 = part1.profile;
  const int n = p1.n();
  const double R1 = part1.constants.R1, c1 = part1.constants.c1;
  if (!(epsilon > 0.0 && epsilon <= 0.01)) fail(ErrorKind::Validation, "model_forge", op, "epsilon must lie in (0, 1/100]");
  if (!(alpha > 0.0 && alpha <= alpha0(n, epsilon))) fail(ErrorKind::Validation, "model_forge", op, "alpha outside (0, alpha0]");

  detail::RampState st{R1, p1.phi().eval(R1, 0), p1.phi().eval_left(R1, 1), p1.rho().eval(R1, 0), p1.rho().eval_left(R1, 1)};
  std::vector<ProfilePiece> phi = p1.phi().pieces();
  std::vector<ProfilePiece> rho = p1.rho().pieces();
  const double s_target = 1.0 - 0.5 * epsilon;
  const double cone = 1.0 - epsilon;
  const double rho_cap = cone - epsilon / 20.0;  // rho/r must end below the cone line
  int stages = 0;
  bool finished = false;
  while (!finished) {
    if (++stages > 200) fail(ErrorKind::Construction, "model_forge", op, "ramp did not converge");
    double s_end = st.dQ < 0.25 ? 4.0 * st.dQ : st.dQ + 0.5 * (1.0 - st.dQ);
    s_end = std::min(s_end, s_target);
    if (s_target - s_end < 1e-3 * (1.0 - s_target)) s_end = s_target;
    const detail::RampStage g = detail::ramp_stage(st, s_end, n);
    detail::RampState nx = detail::ramp_advance(st, g, s_end);
    if (s_end > cone && nx.Q / nx.r > rho_cap) {
      // Stop inside this stage at the largest slope keeping rho/r <= rho_cap.
      const double lo0 = std::max(st.dQ, cone);
      auto excess = [&](double s) { return detail::ramp_advance(st, g, s).Q / detail::ramp_advance(st, g, s).r - rho_cap; };
      if (!(excess(lo0) < 0.0))
        fail(ErrorKind::Construction, "model_forge", op, "rho crosses the cone line before its slope exceeds 1-e");
      const double s_c = detail::bisect_increasing(excess, lo0, s_end, 200);
      double s_ok = s_c;
      while (excess(s_ok) >= 0.0) s_ok = std::nextafter(s_ok, lo0);
      nx = detail::ramp_advance(st, g, s_ok);
      finished = true;
    } else if (s_end == s_target) {
      finished = true;
    }
    phi.push_back(ProfilePiece::power({st.r, nx.r}, st.P / std::pow(g.xp, g.beta), g.Cp, g.beta));
    rho.push_back(ProfilePiece::power({st.r, nx.r}, st.Q / std::pow(g.xq, g.q), g.Cq, g.q));
    st = nx;
  }
  if (!(st.Q / st.r < cone)) fail(ErrorKind::Construction, "model_forge", op, "ramp ends above the cone line");

  const double re = st.r;
  const double delta0 = st.P / std::pow(re, alpha);
  if (!(alpha * st.P / re <= st.dP))
    fail(ErrorKind::Construction, "model_forge", op, "phi slope would increase at the ramp end");
  const double b0 = st.Q - st.dQ * re;
  const double R = -b0 / (st.dQ - cone);
  if (!(R > re)) fail(ErrorKind::Construction, "model_forge", op, "cone crossing not bracketed");
  if (r_max == 0.0) r_max = 4.0 * R;
  if (!(r_max > R)) fail(ErrorKind::Validation, "model_forge", op, "r_max must exceed R = " + fmt17(R));

  phi.push_back(ProfilePiece::power({re, r_max}, delta0, 0.0, alpha));
  rho.push_back(ProfilePiece::affine({re, R}, st.dQ, b0 / st.dQ));
  rho.push_back(ProfilePiece::affine({R, r_max}, cone, 0.0));
  DoubleWarpProfile p(ProfileFunction(std::move(phi)), ProfileFunction(std::move(rho)), n, BoundaryKind::ClosedDisc);

  ModelResult out{p, part1.constants, {}};
  auto& k = out.constants;
  k.log_c2 = -(R1 * R1) / (alpha * alpha * c1 * c1 * epsilon * epsilon);
  k.delta0 = delta0;
  k.C = 0.0;
  k.R = R;
  k.alpha0 = alpha0(n, epsilon);
  k.ramp_end = re;
  k.ramp_stages = stages;
  out.certificate = curvature::certify_bound(p, R1, r_max, BoundFn::constant(0.0), opt);
  if (!out.certificate.passed())
    fail(ErrorKind::Construction, "model_forge", op,
         "Part-2 eigenvalues not certified positive; worst slack " + fmt17(out.certificate.margin));
  return out;
}

}  // namespace warpgh::model
