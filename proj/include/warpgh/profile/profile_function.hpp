#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "warpgh/profile/piece.hpp"

namespace warpgh::profile {

/// Relative knot tolerance; scale-aware so values of order 1e40 are handled.
inline constexpr double kKnotTol = 1e-12;

inline bool knot_close(double a, double b, double tol = kKnotTol) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

enum class RatioKind {
  SecondOverValue,        ///< f''/f
  OneMinusSlopeSqOverSq,  ///< (1 - f'^2)/f^2
  SlopeProduct,           ///< f'g'/(f g)
};

/**
 * @brief Piecewise closed-form function on [lo, hi] with knots between pieces.
 *
 * Continuity classes are measured from one-sided derivatives, never trusted
 * from the caller. eval at a knot returns the right limit.
 */
class ProfileFunction {
 public:
  ProfileFunction() = default;

  explicit ProfileFunction(std::vector<ProfilePiece> pieces, bool positive = true)
      : pieces_(std::move(pieces)), positive_(positive) {
    if (pieces_.empty()) fail(ErrorKind::Domain, "profile_kit", "profile", "no pieces");
    for (size_t i = 1; i < pieces_.size(); ++i) {
      const double a = pieces_[i - 1].domain().hi, b = pieces_[i].domain().lo;
      if (!knot_close(a, b)) fail(ErrorKind::Domain, "profile_kit", "profile", "gap or overlap at knot " + fmt17(a));
      const double vl = pieces_[i - 1].derivative(a, 0), vr = pieces_[i].derivative(b, 0);
      if (!knot_close(vl, vr))
        fail(ErrorKind::Continuity, "profile_kit", "profile",
             "value mismatch at knot " + fmt17(b) + ": " + fmt17(vl) + " vs " + fmt17(vr));
    }
    measure_continuity();
  }

  const std::vector<ProfilePiece>& pieces() const { return pieces_; }
  bool positive() const { return positive_; }
  Interval domain() const { return {pieces_.front().domain().lo, pieces_.back().domain().hi}; }
  const std::vector<int>& continuity() const { return continuity_; }

  std::vector<double> knots() const {
    std::vector<double> k;
    for (size_t i = 1; i < pieces_.size(); ++i) k.push_back(pieces_[i].domain().lo);
    return k;
  }

  /// Index of the active piece at r (right limit at knots).
  size_t piece_index(double r) const {
    const Interval d = domain();
    if (!(r >= d.lo && r <= d.hi))
      fail(ErrorKind::Domain, "profile_kit", "eval", "r=" + fmt17(r) + " outside [" + fmt17(d.lo) + ", " + fmt17(d.hi) + "]");
    size_t i = 0;
    while (i + 1 < pieces_.size() && r >= pieces_[i + 1].domain().lo) ++i;
    return i;
  }

  const ProfilePiece& piece_at(double r) const { return pieces_[piece_index(r)]; }

  double eval(double r, int order) const {
    if (order < 0 || order > 2) fail(ErrorKind::Unsupported, "profile_kit", "eval", "order must be 0, 1 or 2");
    return piece_at(r).derivative(r, order);
  }

  /// Left limit at a knot (same as eval elsewhere).
  double eval_left(double r, int order) const {
    size_t i = piece_index(r);
    if (i > 0 && r == pieces_[i].domain().lo) --i;
    return pieces_[i].derivative(r, order);
  }

  /// Copy restricted to [lo, hi] (must lie in the domain).
  ProfileFunction restricted(double lo, double hi) const {
    std::vector<ProfilePiece> out;
    for (const auto& p : pieces_) {
      const double a = std::max(lo, p.domain().lo), b = std::min(hi, p.domain().hi);
      if (a < b) out.push_back((a == p.domain().lo && b == p.domain().hi) ? p : p.restricted({a, b}));
    }
    return ProfileFunction(std::move(out), positive_);
  }

  /// g(r) = f(t r)/t.
  ProfileFunction rescaled(double t) const {
    std::vector<ProfilePiece> out;
    for (const auto& p : pieces_) out.push_back(p.rescaled(t));
    return ProfileFunction(std::move(out), positive_);
  }

  ProfileFunction times(double s) const {
    std::vector<ProfilePiece> out;
    for (const auto& p : pieces_) out.push_back(p.times(s));
    return ProfileFunction(std::move(out), positive_);
  }

  json to_json() const {
    json j;
    j["pieces"] = json::array();
    for (const auto& p : pieces_) j["pieces"].push_back(p.to_json());
    j["positive"] = positive_;
    return j;
  }

  static ProfileFunction from_json(const json& j) {
    if (!j.is_object() || !j.contains("pieces") || !j.at("pieces").is_array())
      fail(ErrorKind::Parse, "profile_kit", "from_json", "profile needs a pieces array");
    std::vector<ProfilePiece> ps;
    for (const auto& pj : j.at("pieces")) ps.push_back(ProfilePiece::from_json(pj));
    const bool pos = j.contains("positive") ? j.at("positive").get<bool>() : true;
    return ProfileFunction(std::move(ps), pos);
  }

  std::string serialize() const { return dump17(to_json()); }

 private:
  void measure_continuity() {
    continuity_.clear();
    for (size_t i = 1; i < pieces_.size(); ++i) {
      const double r = pieces_[i].domain().lo;
      int cls = 0;
      if (knot_close(pieces_[i - 1].derivative(r, 1), pieces_[i].derivative(r, 1))) {
        cls = 1;
        if (knot_close(pieces_[i - 1].derivative(r, 2), pieces_[i].derivative(r, 2), 1e-9)) cls = 2;
      }
      continuity_.push_back(cls);
    }
  }

  std::vector<ProfilePiece> pieces_;
  std::vector<int> continuity_;
  bool positive_ = true;
};

/// Concatenates two profiles sharing an endpoint.
inline ProfileFunction knot_join(const ProfileFunction& left, const ProfileFunction& right) {
  const double a = left.domain().hi, b = right.domain().lo;
  if (!knot_close(a, b)) fail(ErrorKind::Domain, "profile_kit", "knot_join", "left.hi != right.lo");
  const double vl = left.pieces().back().derivative(a, 0), vr = right.pieces().front().derivative(b, 0);
  if (!knot_close(vl, vr))
    fail(ErrorKind::Continuity, "profile_kit", "knot_join", "value jump " + fmt17(vr - vl) + " at " + fmt17(a));
  std::vector<ProfilePiece> ps = left.pieces();
  ps.insert(ps.end(), right.pieces().begin(), right.pieces().end());
  return ProfileFunction(std::move(ps), left.positive() && right.positive());
}

namespace detail {

using Series = std::array<double, 5>;  // coefficients of r^0..r^4; NaN marks unknown

inline Series taylor(const ProfilePiece& p, int shift) {
  // Series of f^(shift) around 0 from derivatives up to order 4.
  Series s;
  s.fill(std::nan(""));
  double fact = 1.0;
  for (int k = 0; k + shift <= 4; ++k) {
    if (k > 0) fact *= k;
    s[static_cast<size_t>(k)] = p.derivative(0.0, k + shift) / fact;
  }
  return s;
}

inline Series mul(const Series& a, const Series& b) {
  Series c;
  for (size_t k = 0; k < 5; ++k) {
    double acc = 0.0;
    for (size_t i = 0; i <= k; ++i) acc += a[i] * b[k - i];
    c[k] = acc;
  }
  return c;
}

/// lim_{r->0} num/den from truncated series; NaN if the limit is infinite or unknown.
inline double series_limit(const Series& num, const Series& den) {
  // Only reached when f(0) is exactly zero, so leading zeros of den are exact.
  size_t m = 0;
  while (m < 5 && den[m] == 0.0) ++m;
  if (m >= 5 || !std::isfinite(den[m])) return std::nan("");
  double nscale = 0.0;
  for (size_t k = 0; k <= m; ++k) {
    if (!std::isfinite(num[k])) return std::nan("");
    nscale = std::max(nscale, std::fabs(num[k]));
  }
  for (size_t k = 0; k < m; ++k)
    if (std::fabs(num[k]) > 1e-10 * std::max(1.0, nscale)) return std::nan("");
  return num[m] / den[m];
}

}  // namespace detail

/**
 * @brief The Ricci building-block ratios with exact limits at a zero of f or g at r = 0.
 *
 * g is only consulted for SlopeProduct.
 */
inline double eval_ratio(const ProfileFunction& f, const ProfileFunction& g, double r, RatioKind kind) {
  const ProfilePiece& pf = f.piece_at(r);
  const double fv = pf.derivative(r, 0), f1 = pf.derivative(r, 1), f2 = pf.derivative(r, 2);
  if (kind == RatioKind::SlopeProduct) {
    const ProfilePiece& pg = g.piece_at(r);
    const double gv = pg.derivative(r, 0), g1 = pg.derivative(r, 1);
    if (fv != 0.0 && gv != 0.0) return (f1 * g1) / (fv * gv);
    if (r != 0.0) fail(ErrorKind::Singularity, "profile_kit", "eval_ratio", "f g vanishes at r=" + fmt17(r));
    const auto num = detail::mul(detail::taylor(pf, 1), detail::taylor(pg, 1));
    const auto den = detail::mul(detail::taylor(pf, 0), detail::taylor(pg, 0));
    const double v = detail::series_limit(num, den);
    if (!std::isfinite(v)) fail(ErrorKind::Singularity, "profile_kit", "eval_ratio", "f'g'/(fg) unbounded at 0");
    return v;
  }
  if (fv != 0.0) {
    if (kind == RatioKind::SecondOverValue) return f2 / fv;
    return (1.0 - f1 * f1) / (fv * fv);
  }
  if (r != 0.0) fail(ErrorKind::Singularity, "profile_kit", "eval_ratio", "f vanishes at r=" + fmt17(r));
  const auto t0 = detail::taylor(pf, 0);
  double v;
  if (kind == RatioKind::SecondOverValue) {
    v = detail::series_limit(detail::taylor(pf, 2), t0);
  } else {
    detail::Series one{1.0, 0.0, 0.0, 0.0, 0.0};
    const auto t1 = detail::taylor(pf, 1);
    const auto sq = detail::mul(t1, t1);
    detail::Series num;
    for (size_t k = 0; k < 5; ++k) num[k] = one[k] - sq[k];
    v = detail::series_limit(num, detail::mul(t0, t0));
  }
  if (!std::isfinite(v)) fail(ErrorKind::Singularity, "profile_kit", "eval_ratio", "ratio unbounded at 0");
  return v;
}

}  // namespace warpgh::profile
