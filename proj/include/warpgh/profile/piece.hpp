#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <string>

#include "warpgh/core/error.hpp"
#include "warpgh/core/json_io.hpp"

namespace warpgh::profile {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double r) const { return r >= lo && r <= hi; }
};

enum class PieceKind { SineCap, Quartic, Power, Affine, CubicHermite, QuinticHermite, ScaledComposite };

inline const char* to_string(PieceKind k) {
  switch (k) {
    case PieceKind::SineCap: return "sine-cap";
    case PieceKind::Quartic: return "quartic";
    case PieceKind::Power: return "power";
    case PieceKind::Affine: return "affine";
    case PieceKind::CubicHermite: return "cubic-hermite";
    case PieceKind::QuinticHermite: return "quintic-hermite";
    case PieceKind::ScaledComposite: return "scaled-composite";
  }
  return "unknown";
}

/**
 * @brief One closed-form segment of a warping function.
 *
 * Kinds and parameters:
 *  - sine-cap        a sin(r/a)                       {a}
 *  - quartic         b + c r^4                        {b, c}
 *  - power           delta (r+C)^alpha                {delta, C, alpha}
 *  - affine          k (r+C)                          {k, C}
 *  - cubic-hermite   cubic through end values/slopes  {v0, d0, v1, d1}
 *  - quintic-hermite quintic through end values, slopes, second derivatives {v0, d0, s0, v1, d1, s1}
 *  - scaled-composite s f(r+theta)                    {s, theta, inner}
 *
 * Derivatives up to order 4 are exact; `l2()` bounds |f'''| on the domain.
 */
class ProfilePiece {
 public:
  static ProfilePiece sine_cap(Interval d, double a) {
    ProfilePiece p(PieceKind::SineCap, d);
    p.p_[0] = a;
    p.finish();
    return p;
  }
  static ProfilePiece quartic(Interval d, double b, double c) {
    ProfilePiece p(PieceKind::Quartic, d);
    p.p_[0] = b;
    p.p_[1] = c;
    p.finish();
    return p;
  }
  static ProfilePiece power(Interval d, double delta, double C, double alpha) {
    ProfilePiece p(PieceKind::Power, d);
    p.p_[0] = delta;
    p.p_[1] = C;
    p.p_[2] = alpha;
    if (d.lo + C <= 0.0) fail(ErrorKind::Domain, "profile_kit", "power", "r + C must stay positive");
    p.finish();
    return p;
  }
  static ProfilePiece affine(Interval d, double k, double C) {
    ProfilePiece p(PieceKind::Affine, d);
    p.p_[0] = k;
    p.p_[1] = C;
    p.finish();
    return p;
  }
  static ProfilePiece cubic_hermite(Interval d, double v0, double d0, double v1, double d1) {
    ProfilePiece p(PieceKind::CubicHermite, d);
    p.p_ = {v0, d0, v1, d1, 0.0, 0.0};
    p.finish();
    return p;
  }
  static ProfilePiece quintic_hermite(Interval d, double v0, double d0, double s0, double v1, double d1,
                                      double s1) {
    ProfilePiece p(PieceKind::QuinticHermite, d);
    p.p_ = {v0, d0, s0, v1, d1, s1};
    p.finish();
    return p;
  }
  static ProfilePiece scaled_composite(Interval d, double s, double theta, const ProfilePiece& inner) {
    ProfilePiece p(PieceKind::ScaledComposite, d);
    p.p_[0] = s;
    p.p_[1] = theta;
    p.inner_ = std::make_shared<const ProfilePiece>(inner);
    p.finish();
    return p;
  }

  PieceKind kind() const { return kind_; }
  const Interval& domain() const { return dom_; }
  double param(int i) const { return p_[static_cast<size_t>(i)]; }
  const ProfilePiece* inner() const { return inner_.get(); }

  /// Exact derivative of order 0..4 at r. No domain check; callers own that.
  double derivative(double r, int order) const {
    switch (kind_) {
      case PieceKind::SineCap: {
        const double a = p_[0], u = r / a;
        switch (order) {
          case 0: return a * std::sin(u);
          case 1: return std::cos(u);
          case 2: return -std::sin(u) / a;
          case 3: return -std::cos(u) / (a * a);
          default: return std::sin(u) / (a * a * a);
        }
      }
      case PieceKind::Quartic: {
        const double b = p_[0], c = p_[1];
        switch (order) {
          case 0: return b + c * r * r * r * r;
          case 1: return 4.0 * c * r * r * r;
          case 2: return 12.0 * c * r * r;
          case 3: return 24.0 * c * r;
          default: return 24.0 * c;
        }
      }
      case PieceKind::Power: {
        const double delta = p_[0], x = r + p_[1], al = p_[2];
        double coef = delta;
        for (int k = 0; k < order; ++k) coef *= (al - k);
        if (coef == 0.0) return 0.0;
        return coef * std::pow(x, al - order);
      }
      case PieceKind::Affine:
        if (order == 0) return p_[0] * (r + p_[1]);
        return order == 1 ? p_[0] : 0.0;
      case PieceKind::CubicHermite:
      case PieceKind::QuinticHermite: {
        const double u = r - dom_.lo;
        // Horner on the stored monomial coefficients, differentiated `order` times.
        double acc = 0.0;
        for (int k = 5; k >= order; --k) {
          double f = mono_[static_cast<size_t>(k)];
          for (int j = 0; j < order; ++j) f *= (k - j);
          acc = acc * u + f;
        }
        return acc;
      }
      case PieceKind::ScaledComposite:
        return p_[0] * inner_->derivative(r + p_[1], order);
    }
    return 0.0;
  }

  double value(double r) const { return derivative(r, 0); }

  /// Bound on |f'''| over the closed domain.
  double l2() const { return l2_; }

  /// Bound on the third derivative over [a, b] inside the domain. Tighter than
  /// l2() for power pieces spanning many decades.
  double l2_on(double a, double b) const {
    switch (kind_) {
      case PieceKind::Power: {
        const double al = p_[2];
        const double c3 = std::fabs(p_[0] * al * (al - 1.0) * (al - 2.0));
        if (c3 == 0.0) return 0.0;
        return c3 * std::max(std::pow(a + p_[1], al - 3.0), std::pow(b + p_[1], al - 3.0));
      }
      case PieceKind::SineCap: {
        const double s = p_[0];
        if (a >= 0.0 && b <= M_PI * s) return std::max(std::fabs(std::cos(a / s)), std::fabs(std::cos(b / s))) / (s * s);
        return 1.0 / (s * s);
      }
      case PieceKind::Quartic: return 24.0 * std::fabs(p_[1]) * std::max(std::fabs(a), std::fabs(b));
      case PieceKind::QuinticHermite: {
        auto f3 = [&](double r) { return std::fabs(derivative(r, 3)); };
        double m = std::max(f3(a), f3(b));
        if (mono_[5] != 0.0) {
          const double rv = dom_.lo - 24.0 * mono_[4] / (120.0 * mono_[5]);
          if (rv > a && rv < b) m = std::max(m, f3(rv));
        }
        return m;
      }
      case PieceKind::ScaledComposite: return std::fabs(p_[0]) * inner_->l2_on(a + p_[1], b + p_[1]);
      default: return l2_;
    }
  }

  /// Same closed form on a different interval (hermite kinds are re-anchored).
  ProfilePiece restricted(Interval d) const {
    switch (kind_) {
      case PieceKind::CubicHermite:
        return cubic_hermite(d, derivative(d.lo, 0), derivative(d.lo, 1), derivative(d.hi, 0),
                             derivative(d.hi, 1));
      case PieceKind::QuinticHermite:
        return quintic_hermite(d, derivative(d.lo, 0), derivative(d.lo, 1), derivative(d.lo, 2),
                               derivative(d.hi, 0), derivative(d.hi, 1), derivative(d.hi, 2));
      case PieceKind::ScaledComposite:
        return scaled_composite(d, p_[0], p_[1], inner_->restricted({d.lo + p_[1], d.hi + p_[1]}));
      default: {
        ProfilePiece p = *this;
        p.dom_ = d;
        p.finish();
        return p;
      }
    }
  }

  /// g(r) = f(t r) / t on domain / t.
  ProfilePiece rescaled(double t) const {
    const Interval d{dom_.lo / t, dom_.hi / t};
    switch (kind_) {
      case PieceKind::SineCap: return sine_cap(d, p_[0] / t);
      case PieceKind::Quartic: return quartic(d, p_[0] / t, p_[1] * t * t * t);
      case PieceKind::Power: return power(d, p_[0] * std::pow(t, p_[2] - 1.0), p_[1] / t, p_[2]);
      case PieceKind::Affine: return affine(d, p_[0], p_[1] / t);
      case PieceKind::CubicHermite: return cubic_hermite(d, p_[0] / t, p_[1], p_[2] / t, p_[3]);
      case PieceKind::QuinticHermite:
        return quintic_hermite(d, p_[0] / t, p_[1], p_[2] * t, p_[3] / t, p_[4], p_[5] * t);
      case PieceKind::ScaledComposite: return scaled_composite(d, p_[0], p_[1] / t, inner_->rescaled(t));
    }
    return *this;
  }

  /// s * f, folded into the parameters where the kind allows it.
  ProfilePiece times(double s) const {
    switch (kind_) {
      case PieceKind::Quartic: return quartic(dom_, s * p_[0], s * p_[1]);
      case PieceKind::Power: return power(dom_, s * p_[0], p_[1], p_[2]);
      case PieceKind::Affine: return affine(dom_, s * p_[0], p_[1]);
      case PieceKind::CubicHermite: return cubic_hermite(dom_, s * p_[0], s * p_[1], s * p_[2], s * p_[3]);
      case PieceKind::QuinticHermite:
        return quintic_hermite(dom_, s * p_[0], s * p_[1], s * p_[2], s * p_[3], s * p_[4], s * p_[5]);
      case PieceKind::ScaledComposite: return scaled_composite(dom_, s * p_[0], p_[1], *inner_);
      case PieceKind::SineCap: break;
    }
    return scaled_composite(dom_, s, 0.0, *this);
  }

  /// s * f(r + theta) on `d`; theta = 0 folds like times().
  ProfilePiece shifted_scaled(Interval d, double s, double theta) const {
    if (theta == 0.0) return restricted(d).times(s);
    return scaled_composite(d, s, theta, restricted({d.lo + theta, d.hi + theta}));
  }

  /// True for pieces of the form a sin(r/a) or k r that start at r = 0.
  bool anchored_at_origin() const {
    if (dom_.lo != 0.0) return false;
    return kind_ == PieceKind::SineCap || (kind_ == PieceKind::Affine && p_[1] == 0.0);
  }

  json to_json() const {
    json j;
    j["kind"] = to_string(kind_);
    j["domain"] = json::array({dom_.lo, dom_.hi});
    json params = json::object();
    switch (kind_) {
      case PieceKind::SineCap: params["a"] = p_[0]; break;
      case PieceKind::Quartic: params["b"] = p_[0]; params["c"] = p_[1]; break;
      case PieceKind::Power: params["delta"] = p_[0]; params["C"] = p_[1]; params["alpha"] = p_[2]; break;
      case PieceKind::Affine: params["k"] = p_[0]; params["C"] = p_[1]; break;
      case PieceKind::CubicHermite:
        params["v0"] = p_[0]; params["d0"] = p_[1]; params["v1"] = p_[2]; params["d1"] = p_[3];
        break;
      case PieceKind::QuinticHermite:
        params["v0"] = p_[0]; params["d0"] = p_[1]; params["s0"] = p_[2];
        params["v1"] = p_[3]; params["d1"] = p_[4]; params["s1"] = p_[5];
        break;
      case PieceKind::ScaledComposite:
        params["s"] = p_[0]; params["theta"] = p_[1]; params["inner"] = inner_->to_json();
        break;
    }
    j["params"] = params;
    return j;
  }

  static ProfilePiece from_json(const json& j) {
    auto bad = [](const std::string& why) -> void { fail(ErrorKind::Parse, "profile_kit", "from_json", why); };
    if (!j.is_object() || !j.contains("kind") || !j.contains("domain") || !j.contains("params")) bad("piece fields missing");
    try {
      const std::string kind = j.at("kind").get<std::string>();
      const auto& dj = j.at("domain");
      if (!dj.is_array() || dj.size() != 2) bad("domain must be [lo, hi]");
      const Interval d{dj[0].get<double>(), dj[1].get<double>()};
      const auto& p = j.at("params");
      auto g = [&](const char* k) { return p.at(k).get<double>(); };
      if (kind == "sine-cap") return sine_cap(d, g("a"));
      if (kind == "quartic") return quartic(d, g("b"), g("c"));
      if (kind == "power") return power(d, g("delta"), g("C"), g("alpha"));
      if (kind == "affine") return affine(d, g("k"), g("C"));
      if (kind == "cubic-hermite") return cubic_hermite(d, g("v0"), g("d0"), g("v1"), g("d1"));
      if (kind == "quintic-hermite") return quintic_hermite(d, g("v0"), g("d0"), g("s0"), g("v1"), g("d1"), g("s1"));
      if (kind == "scaled-composite") return scaled_composite(d, g("s"), g("theta"), from_json(p.at("inner")));
      bad("unknown piece kind " + kind);
    } catch (const nlohmann::json::exception& e) {
      bad(e.what());
    }
    return sine_cap({0, 1}, 1);  // unreachable
  }

 private:
  ProfilePiece(PieceKind k, Interval d) : kind_(k), dom_(d) {}

  void finish() {
    if (!(dom_.lo < dom_.hi) || !std::isfinite(dom_.lo) || !std::isfinite(dom_.hi))
      fail(ErrorKind::Domain, "profile_kit", "piece", "domain must satisfy lo < hi");
    for (double v : p_)
      if (!std::isfinite(v)) fail(ErrorKind::Domain, "profile_kit", "piece", "non-finite parameter");
    mono_.fill(0.0);
    const double h = dom_.width();
    switch (kind_) {
      case PieceKind::SineCap: {
        const double a = p_[0];
        if (a <= 0.0) fail(ErrorKind::Domain, "profile_kit", "piece", "sine-cap needs a > 0");
        // |f'''| = |cos(r/a)|/a^2; cos is monotone on [0, pi a].
        double m = 1.0;
        if (dom_.lo >= 0.0 && dom_.hi <= M_PI * a) m = std::max(std::fabs(std::cos(dom_.lo / a)), std::fabs(std::cos(dom_.hi / a)));
        l2_ = m / (a * a);
        break;
      }
      case PieceKind::Quartic:
        l2_ = 24.0 * std::fabs(p_[1]) * std::max(std::fabs(dom_.lo), std::fabs(dom_.hi));
        break;
      case PieceKind::Power: {
        const double al = p_[2];
        const double c3 = std::fabs(p_[0] * al * (al - 1.0) * (al - 2.0));
        l2_ = c3 == 0.0 ? 0.0
                        : c3 * std::max(std::pow(dom_.lo + p_[1], al - 3.0), std::pow(dom_.hi + p_[1], al - 3.0));
        break;
      }
      case PieceKind::Affine: l2_ = 0.0; break;
      case PieceKind::CubicHermite: {
        const double v0 = p_[0], d0 = p_[1], v1 = p_[2], d1 = p_[3];
        const double sl = (v1 - v0) / h;
        mono_[0] = v0;
        mono_[1] = d0;
        mono_[2] = (3.0 * sl - 2.0 * d0 - d1) / h;
        mono_[3] = (d0 + d1 - 2.0 * sl) / (h * h);
        l2_ = 6.0 * std::fabs(mono_[3]);
        break;
      }
      case PieceKind::QuinticHermite: {
        const double v0 = p_[0], d0 = p_[1], s0 = p_[2], v1 = p_[3], d1 = p_[4], s1 = p_[5];
        const double dv = v1 - v0, h2 = h * h, h3 = h2 * h;
        mono_[0] = v0;
        mono_[1] = d0;
        mono_[2] = 0.5 * s0;
        mono_[3] = (20.0 * dv - (8.0 * d1 + 12.0 * d0) * h - (3.0 * s0 - s1) * h2) / (2.0 * h3);
        mono_[4] = (-30.0 * dv + (14.0 * d1 + 16.0 * d0) * h + (3.0 * s0 - 2.0 * s1) * h2) / (2.0 * h3 * h);
        mono_[5] = (12.0 * dv - 6.0 * (d1 + d0) * h - (s0 - s1) * h2) / (2.0 * h3 * h2);
        // f''' = 6 a3 + 24 a4 u + 60 a5 u^2 on [0, h]: ends plus the vertex.
        auto f3 = [&](double u) { return 6.0 * mono_[3] + 24.0 * mono_[4] * u + 60.0 * mono_[5] * u * u; };
        double m = std::max(std::fabs(f3(0.0)), std::fabs(f3(h)));
        if (mono_[5] != 0.0) {
          const double uv = -24.0 * mono_[4] / (120.0 * mono_[5]);
          if (uv > 0.0 && uv < h) m = std::max(m, std::fabs(f3(uv)));
        }
        l2_ = m;
        break;
      }
      case PieceKind::ScaledComposite:
        l2_ = std::fabs(p_[0]) * inner_->l2();
        break;
    }
  }

  PieceKind kind_;
  Interval dom_;
  std::array<double, 6> p_{};
  std::array<double, 6> mono_{};
  std::shared_ptr<const ProfilePiece> inner_;
  double l2_ = 0.0;
};

}  // namespace warpgh::profile
