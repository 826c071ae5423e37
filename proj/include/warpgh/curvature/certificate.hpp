#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "warpgh/core/parallel.hpp"
#include "warpgh/curvature/ricci.hpp"

namespace warpgh::curvature {

/// Nonincreasing lower-bound functions of r >= 0.
struct BoundFn {
  enum class Kind { Constant, InverseQuadratic, InverseLinear };
  Kind kind = Kind::Constant;
  double lambda = 0.0;  ///< constant value
  double tau = 0.0;     ///< numerator for the inverse kinds
  double kappa = 0.0;   ///< offset for tau/(r+kappa)

  static BoundFn constant(double l) { return {Kind::Constant, l, 0.0, 0.0}; }
  static BoundFn inverse_quadratic(double t) { return {Kind::InverseQuadratic, 0.0, t, 0.0}; }
  static BoundFn inverse_linear(double t, double k) { return {Kind::InverseLinear, 0.0, t, k}; }

  double operator()(double r) const {
    switch (kind) {
      case Kind::Constant: return lambda;
      case Kind::InverseQuadratic: return tau / (1.0 + r * r);
      case Kind::InverseLinear: return tau / (r + kappa);
    }
    return 0.0;
  }
  /// Maximum over [a, b] with a >= 0.
  double max_on(double a, double /*b*/) const { return (*this)(a); }

  json to_json() const {
    json j;
    switch (kind) {
      case Kind::Constant: j["kind"] = "constant"; j["params"] = {{"lambda", lambda}}; break;
      case Kind::InverseQuadratic: j["kind"] = "inverse-quadratic"; j["params"] = {{"tau", tau}}; break;
      case Kind::InverseLinear: j["kind"] = "inverse-linear"; j["params"] = {{"tau", tau}, {"kappa", kappa}}; break;
    }
    return j;
  }
};

struct CellSlack {
  double r_lo = 0.0;
  double r_hi = 0.0;
  double slack = 0.0;
};

struct CurvatureCertificate {
  std::string profile_id;
  double a = 0.0;
  double b = 0.0;
  BoundFn bound;
  double step = 0.0;     ///< smallest cell width used
  double margin = 0.0;   ///< min over cells of (certified lower bound - bound max)
  std::size_t cells = 0;
  std::vector<CellSlack> worst_cells;
  bool passed() const { return margin > 0.0; }

  json to_json() const {
    json j;
    j["profile_id"] = profile_id;
    j["interval"] = json::array({a, b});
    j["bound"] = bound.to_json();
    j["step"] = step;
    j["margin"] = margin;
    j["worst_cells"] = json::array();
    for (const auto& c : worst_cells) j["worst_cells"].push_back({{"r_lo", c.r_lo}, {"r_hi", c.r_hi}, {"slack", c.slack}});
    j["passed"] = passed();
    return j;
  }
};

struct CertifyOptions {
  std::size_t cells_per_segment = 64;
  std::size_t max_cells = std::size_t{1} << 20;
  unsigned threads = 1;
  std::size_t worst_reported = 8;
  /// Keep splitting a passing cell while its slack is below this fraction of
  /// its grid-point margin, so the reported margin approaches the true one.
  double refine_fraction = 0.9;
};

namespace detail {

struct Iv {
  double lo, hi;
};
inline Iv operator+(Iv x, Iv y) { return {x.lo + y.lo, x.hi + y.hi}; }
inline Iv operator*(double s, Iv x) { return s >= 0 ? Iv{s * x.lo, s * x.hi} : Iv{s * x.hi, s * x.lo}; }
inline Iv operator*(Iv x, Iv y) {
  const double c[4] = {x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi};
  return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}
/// y strictly positive.
inline Iv operator/(Iv x, Iv y) { return x * Iv{1.0 / y.hi, 1.0 / y.lo}; }
inline Iv sq(Iv x) {
  if (x.lo >= 0) return {x.lo * x.lo, x.hi * x.hi};
  if (x.hi <= 0) return {x.hi * x.hi, x.lo * x.lo};
  return {0.0, std::max(x.lo * x.lo, x.hi * x.hi)};
}

/// Range of a function on [a, b] from end values and a Lipschitz constant.
inline Iv lip_range(double fa, double fb, double lip, double w) {
  const double lo = 0.5 * (fa + fb - lip * w), hi = 0.5 * (fa + fb + lip * w);
  return {std::min({lo, fa, fb}), std::max({hi, fa, fb})};
}

struct Envelope {
  double f1, f2, fmin;  // bounds on |f'|, |f''| and min f on the cell
};

inline Envelope envelope(const Jet& ja, const Jet& jb, double l2, double w) {
  Envelope e;
  e.f2 = 0.5 * (std::fabs(ja.d2) + std::fabs(jb.d2) + w * l2);
  e.f2 = std::max({e.f2, std::fabs(ja.d2), std::fabs(jb.d2)});
  e.f1 = std::max({0.5 * (std::fabs(ja.d1) + std::fabs(jb.d1) + w * e.f2), std::fabs(ja.d1), std::fabs(jb.d1)});
  e.fmin = std::min({0.5 * (ja.v + jb.v - w * e.f1), ja.v, jb.v});
  return e;
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Lipschitz-envelope lower bound of min eigenvalue on [a, b]; -inf when unusable.
inline double envelope_lower(const ProfilePiece& P, const ProfilePiece& Q, int n, double a, double b) {
  const Jet fa = jet(P, a), fb = jet(P, b), ga = jet(Q, a), gb = jet(Q, b);
  if (!(fa.v > 0 && fb.v > 0 && ga.v > 0 && gb.v > 0)) return kNegInf;
  const double w = b - a;
  const double Lf = P.l2_on(a, b), Lg = Q.l2_on(a, b);
  const Envelope F = envelope(fa, fb, Lf, w), G = envelope(ga, gb, Lg, w);
  if (!(F.fmin > 0 && G.fmin > 0)) return kNegInf;
  const double f = F.fmin, g = G.fmin;
  const double lipAf = Lf / f + F.f2 * F.f1 / (f * f);
  const double lipAg = Lg / g + G.f2 * G.f1 / (g * g);
  const double lipBf = 2 * F.f1 * F.f2 / (f * f) + 2 * (1 + F.f1 * F.f1) * F.f1 / (f * f * f);
  const double lipBg = 2 * G.f1 * G.f2 / (g * g) + 2 * (1 + G.f1 * G.f1) * G.f1 / (g * g * g);
  const double lipP = (F.f2 * G.f1 + F.f1 * G.f2) / (f * g) + F.f1 * F.f1 * G.f1 / (f * f * g) +
                      F.f1 * G.f1 * G.f1 / (f * g * g);
  const double lip0 = 2 * lipAf + n * lipAg;
  const double lip1 = lipAf + lipBf + n * lipP;
  const double lip2 = lipAg + (n - 1) * lipBg + 2 * lipP;
  const RicciEigenvalues ea = eigen_from_jets(fa, ga, n), eb = eigen_from_jets(fb, gb, n);
  const double l0 = 0.5 * (ea.lambda0 + eb.lambda0 - lip0 * w);
  const double l1 = 0.5 * (ea.lambda1 + eb.lambda1 - lip1 * w);
  const double l2 = 0.5 * (ea.lambda2 + eb.lambda2 - lip2 * w);
  const double m = std::min({l0, l1, l2});
  return std::isfinite(m) ? m : kNegInf;
}

/// Interval-arithmetic lower bound for cells inside a cap phi = a sin(r/a) or phi = r
/// that starts at the origin. Handles a = 0 where phi vanishes.
inline double cap_lower(const ProfilePiece& P, const ProfilePiece& Q, int n, double a, double b) {
  if (!P.anchored_at_origin()) return kNegInf;
  double Af, Bf;
  Iv u;  // r phi'/phi, decreasing in r
  if (P.kind() == profile::PieceKind::SineCap) {
    const double s = P.param(0);
    if (b / s > 1.5) return kNegInf;
    Af = -1.0 / (s * s);
    Bf = 1.0 / (s * s);
    auto ucot = [s](double r) { return r == 0.0 ? 1.0 : (r / s) / std::tan(r / s); };
    u = {ucot(b), ucot(a)};
  } else {
    if (P.param(0) != 1.0) return kNegInf;
    Af = 0.0;
    Bf = 0.0;
    u = {1.0, 1.0};
  }
  const double w = b - a;
  const Jet ga = jet(Q, a), gb = jet(Q, b);
  if (!(ga.v > 0 && gb.v > 0)) return kNegInf;
  const double Lg = Q.l2_on(a, b);
  const double G2 = std::max({0.5 * (std::fabs(ga.d2) + std::fabs(gb.d2) + w * Lg), std::fabs(ga.d2), std::fabs(gb.d2)});
  const Iv g2 = lip_range(ga.d2, gb.d2, Lg, w);
  const Iv g1 = lip_range(ga.d1, gb.d1, G2, w);
  const double G1 = std::max(std::fabs(g1.lo), std::fabs(g1.hi));
  const Iv g = lip_range(ga.v, gb.v, G1, w);
  if (!(g.lo > 0)) return kNegInf;
  // rho'/r: from rho'(0) = 0 when rho's piece starts at 0, otherwise rho'/r directly.
  Iv h;
  if (Q.domain().lo == 0.0 && std::fabs(Q.derivative(0.0, 1)) <= 1e-14 * std::max(1.0, std::fabs(Q.derivative(0.0, 2)))) {
    const Jet g0 = jet(Q, 0.0);
    h = lip_range(g0.d2, gb.d2, Q.l2_on(0.0, b), b);
    if (a > 0) {
      const Iv h2 = g1 / Iv{a, b};
      h = {std::max(h.lo, h2.lo), std::min(h.hi, h2.hi)};
    }
  } else {
    if (!(a > 0)) return kNegInf;
    h = g1 / Iv{a, b};
  }
  const Iv Ag = g2 / g;
  const Iv Bg = (Iv{1.0, 1.0} + (-1.0) * sq(g1)) / sq(g);
  const Iv Pr = u * h / g;
  const double l0 = -(2 * Af + n * Ag.hi);
  const double l1 = -Af + Bf - n * Pr.hi;
  const double l2 = -Ag.hi + (n - 1) * Bg.lo - 2 * Pr.hi;
  const double m = std::min({l0, l1, l2});
  return std::isfinite(m) ? m : kNegInf;
}

struct Cell {
  double a, b;
  std::size_t seg;
};

inline double split_point(double a, double b) {
  if (a > 0 && b / a > 2.0) return std::sqrt(a) * std::sqrt(b);
  return 0.5 * (a + b);
}

}  // namespace detail

/// Lower bound of min eigenvalue on a cell lying inside one piece of each function.
inline double cell_lower_bound(const ProfilePiece& P, const ProfilePiece& Q, int n, double a, double b) {
  return std::max(detail::envelope_lower(P, Q, n, a, b), detail::cap_lower(P, Q, n, a, b));
}

/**
 * @brief Certifies min eigenvalue >= bound on [a, b].
 *
 * Cells never straddle knots. Failing cells are bisected until they pass, a
 * grid point violates the bound, or max_cells is reached. Deterministic for
 * any thread count.
 */
inline CurvatureCertificate certify_bound(const DoubleWarpProfile& p, double a, double b, const BoundFn& bound,
                                          const CertifyOptions& opt = {}) {
  const char* op = "certify_bound";
  const auto dom = p.domain();
  if (!(a >= dom.lo && b <= dom.hi && a < b)) fail(ErrorKind::Domain, "curvature_engine", op, "interval outside profile domain");
  std::vector<double> cuts{a, b};
  for (const auto& ks : {p.phi().knots(), p.rho().knots()})
    for (double k : ks)
      if (k > a && k < b) cuts.push_back(k);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  struct Segment {
    const ProfilePiece* P;
    const ProfilePiece* Q;
  };
  std::vector<Segment> segs;
  std::vector<detail::Cell> cells;
  for (size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double lo = cuts[s], hi = cuts[s + 1];
    const double mid = 0.5 * (lo + hi);
    segs.push_back({&p.phi().piece_at(mid), &p.rho().piece_at(mid)});
    const std::size_t m = std::max<std::size_t>(1, opt.cells_per_segment);
    const bool geo = lo > 0 && hi / lo > 4.0;
    for (std::size_t i = 0; i < m; ++i) {
      double x0, x1;
      if (geo) {
        const double q = std::log(hi / lo);
        x0 = i == 0 ? lo : lo * std::exp(q * static_cast<double>(i) / m);
        x1 = i + 1 == m ? hi : lo * std::exp(q * static_cast<double>(i + 1) / m);
      } else {
        x0 = i == 0 ? lo : lo + (hi - lo) * static_cast<double>(i) / m;
        x1 = i + 1 == m ? hi : lo + (hi - lo) * static_cast<double>(i + 1) / m;
      }
      if (x1 > x0) cells.push_back({x0, x1, s});
    }
  }

  std::vector<CellSlack> done;
  std::vector<detail::Cell> pending = std::move(cells);
  std::size_t total = pending.size();
  const std::size_t tighten_cap = std::max<std::size_t>(16 * total, 4096);
  bool budget_missing = false;
  while (!pending.empty()) {
    std::vector<double> slack(pending.size());
    std::vector<char> hard(pending.size(), 0);
    std::vector<char> nobudget(pending.size(), 0);
    std::vector<double> point_margin(pending.size(), std::numeric_limits<double>::infinity());
    parallel_for(pending.size(), opt.threads, [&](std::size_t i) {
      const auto& c = pending[i];
      const auto& sg = segs[c.seg];
      const double lb = cell_lower_bound(*sg.P, *sg.Q, p.n(), c.a, c.b);
      slack[i] = lb - bound.max_on(c.a, c.b);
      if (lb == detail::kNegInf) {
        const bool singular = sg.P->derivative(c.a, 0) == 0.0;
        nobudget[i] = singular && !sg.P->anchored_at_origin();
      }
      // A grid point already violating the bound cannot be rescued by refinement.
      for (double r : {c.a, c.b}) {
        if (sg.P->derivative(r, 0) == 0.0 || sg.Q->derivative(r, 0) == 0.0) continue;
        const double m = eigen_from_pieces(*sg.P, *sg.Q, p.n(), r).min();
        point_margin[i] = std::min(point_margin[i], m - bound(r));
        if (!(m > bound(r))) {
          hard[i] = 1;
          slack[i] = std::min(slack[i], m - bound(r));
        }
      }
    });
    std::vector<detail::Cell> next;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const auto& c = pending[i];
      if (nobudget[i]) budget_missing = true;
      const double mid = detail::split_point(c.a, c.b);
      const bool can_split = mid > c.a && mid < c.b && total + next.size() + 2 <= opt.max_cells;
      const bool settled = slack[i] > 0.0 && (total >= tighten_cap || !(slack[i] < opt.refine_fraction * point_margin[i]));
      if (settled || hard[i] || nobudget[i] || !can_split) {
        done.push_back({c.a, c.b, slack[i]});
      } else {
        next.push_back({c.a, mid, c.seg});
        next.push_back({mid, c.b, c.seg});
      }
    }
    total += next.size() / 2;
    pending = std::move(next);
  }
  if (budget_missing)
    fail(ErrorKind::BudgetUnavailable, "curvature_engine", op, "phi vanishes at r=0 on a piece without a cap budget");

  std::sort(done.begin(), done.end(), [](const CellSlack& x, const CellSlack& y) { return x.r_lo < y.r_lo; });
  CurvatureCertificate cert;
  cert.profile_id = p.id();
  cert.a = a;
  cert.b = b;
  cert.bound = bound;
  cert.cells = done.size();
  cert.margin = std::numeric_limits<double>::infinity();
  cert.step = std::numeric_limits<double>::infinity();
  for (const auto& c : done) {
    cert.margin = std::min(cert.margin, c.slack);
    cert.step = std::min(cert.step, c.r_hi - c.r_lo);
  }
  std::vector<CellSlack> worst = done;
  std::stable_sort(worst.begin(), worst.end(), [](const CellSlack& x, const CellSlack& y) { return x.slack < y.slack; });
  if (worst.size() > opt.worst_reported) worst.resize(opt.worst_reported);
  cert.worst_cells = worst;
  return cert;
}

/// Largest tau in [lo, hi] certified for the given bound family (bisection).
struct TauSearch {
  double tau = 0.0;
  CurvatureCertificate certificate;
  bool found = false;
};

inline TauSearch find_tau(const DoubleWarpProfile& p, double a, double b, BoundFn family, const CertifyOptions& opt = {},
                          double lo = 1e-8, double hi = 10.0, int iterations = 60) {
  auto at = [&](double t) {
    BoundFn f = family;
    f.tau = t;
    return certify_bound(p, a, b, f, opt);
  };
  TauSearch out;
  CurvatureCertificate c = at(lo);
  if (!c.passed()) {
    out.certificate = c;
    return out;
  }
  out.found = true;
  out.tau = lo;
  out.certificate = c;
  double x = lo, y = hi;
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (x + y);
    CurvatureCertificate cm = at(mid);
    if (cm.passed()) {
      x = mid;
      out.tau = mid;
      out.certificate = std::move(cm);
    } else {
      y = mid;
    }
  }
  return out;
}

/// Dense re-check: min eigenvalue at `factor` points per certified cell never drops below the bound.
struct DenseCheck {
  bool ok = true;
  double worst = std::numeric_limits<double>::infinity();  ///< min of (lambda_min - bound)
  std::size_t points = 0;
};

inline DenseCheck dense_recheck(const DoubleWarpProfile& p, const CurvatureCertificate& cert, std::size_t cells,
                                std::size_t factor = 10) {
  DenseCheck out;
  std::vector<double> cuts{cert.a, cert.b};
  for (const auto& ks : {p.phi().knots(), p.rho().knots()})
    for (double k : ks)
      if (k > cert.a && k < cert.b) cuts.push_back(k);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const std::size_t m = std::max<std::size_t>(1, cells * factor);
  for (size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double lo = cuts[s], hi = cuts[s + 1];
    const double mid = 0.5 * (lo + hi);
    const auto& P = p.phi().piece_at(mid);
    const auto& Q = p.rho().piece_at(mid);
    const bool geo = lo > 0 && hi / lo > 4.0;
    for (std::size_t i = 0; i <= m; ++i) {
      const double t = static_cast<double>(i) / m;
      const double r = i == m ? hi : (geo ? lo * std::exp(std::log(hi / lo) * t) : lo + (hi - lo) * t);
      double lam;
      if (P.derivative(r, 0) == 0.0 || Q.derivative(r, 0) == 0.0) lam = ricci_eigenvalues(p, r).min();
      else lam = eigen_from_pieces(P, Q, p.n(), r).min();
      const double d = lam - cert.bound(r);
      out.worst = std::min(out.worst, d);
      if (!(d >= 0.0)) out.ok = false;
      ++out.points;
    }
  }
  return out;
}

}  // namespace warpgh::curvature
