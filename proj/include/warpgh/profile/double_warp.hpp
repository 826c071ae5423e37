#pragma once

#include <string>

#include "warpgh/profile/profile_function.hpp"

namespace warpgh::profile {

enum class BoundaryKind { ClosedDisc, OpenAnnulus };

inline const char* to_string(BoundaryKind b) { return b == BoundaryKind::ClosedDisc ? "closed-disc" : "open-annulus"; }

/// Metric dr^2 + phi^2 g_{S^2} + rho^2 g_{S^n} on [lo, hi].
class DoubleWarpProfile {
 public:
  DoubleWarpProfile() = default;

  DoubleWarpProfile(ProfileFunction phi, ProfileFunction rho, int n, BoundaryKind kind)
      : phi_(std::move(phi)), rho_(std::move(rho)), n_(n), kind_(kind) {
    validate();
  }

  const ProfileFunction& phi() const { return phi_; }
  const ProfileFunction& rho() const { return rho_; }
  int n() const { return n_; }
  BoundaryKind boundary_kind() const { return kind_; }
  Interval domain() const { return phi_.domain(); }

  json to_json() const {
    json j;
    j["n"] = n_;
    j["boundary_kind"] = to_string(kind_);
    j["phi"] = phi_.to_json();
    j["rho"] = rho_.to_json();
    return j;
  }

  static DoubleWarpProfile from_json(const json& j) {
    try {
      const std::string bk = j.at("boundary_kind").get<std::string>();
      BoundaryKind kind;
      if (bk == "closed-disc") kind = BoundaryKind::ClosedDisc;
      else if (bk == "open-annulus") kind = BoundaryKind::OpenAnnulus;
      else fail(ErrorKind::Parse, "profile_kit", "from_json", "unknown boundary_kind " + bk);
      return DoubleWarpProfile(ProfileFunction::from_json(j.at("phi")), ProfileFunction::from_json(j.at("rho")),
                               j.at("n").get<int>(), kind);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::Parse, "profile_kit", "from_json", e.what());
    }
  }

  std::string serialize() const { return dump17(to_json()); }
  std::string id() const { return content_hash(dump17(to_json(), -1)); }

 private:
  void validate() const {
    const char* op = "double_warp";
    if (n_ < 2) fail(ErrorKind::Validation, "profile_kit", op, "n must be >= 2");
    const Interval a = phi_.domain(), b = rho_.domain();
    if (!knot_close(a.lo, b.lo) || !knot_close(a.hi, b.hi))
      fail(ErrorKind::Domain, "profile_kit", op, "phi and rho domains differ");
    if (kind_ == BoundaryKind::ClosedDisc) {
      if (a.lo != 0.0) fail(ErrorKind::Validation, "profile_kit", op, "closed-disc profile must start at r=0");
      const auto& p = phi_.pieces().front();
      const auto& q = rho_.pieces().front();
      const double tol = 1e-10;
      auto need = [&](bool ok, const char* what) {
        if (!ok) fail(ErrorKind::Validation, "profile_kit", op, std::string("closed-disc condition failed: ") + what);
      };
      need(std::fabs(p.derivative(0, 0)) <= tol, "phi(0)=0");
      need(std::fabs(p.derivative(0, 1) - 1.0) <= tol, "phi'(0)=1");
      const double f3 = std::fabs(p.derivative(0, 3));
      need(std::fabs(p.derivative(0, 2)) <= tol * std::max(1.0, std::sqrt(f3)) &&
               std::fabs(p.derivative(0, 4)) <= tol * std::max(1.0, f3 * std::sqrt(f3)),
           "phi even derivatives vanish");
      need(q.derivative(0, 0) > 0.0, "rho(0)>0");
      need(std::fabs(q.derivative(0, 1)) <= tol, "rho'(0)=0");
      need(std::fabs(q.derivative(0, 3)) <= tol, "rho'''(0)=0");
    } else if (!(a.lo > 0.0)) {
      fail(ErrorKind::Validation, "profile_kit", op, "open-annulus profile needs r_min > 0");
    }
    auto positive_on_interior = [&](const ProfileFunction& f, const char* name) {
      for (const auto& pc : f.pieces()) {
        const Interval d = pc.domain();
        for (double r : {d.lo, 0.5 * (d.lo + d.hi), d.hi}) {
          if (r <= a.lo || r >= a.hi) continue;
          if (!(pc.derivative(r, 0) > 0.0))
            fail(ErrorKind::Validation, "profile_kit", op, std::string(name) + " not positive at r=" + fmt17(r));
        }
      }
    };
    positive_on_interior(phi_, "phi");
    positive_on_interior(rho_, "rho");
  }

  ProfileFunction phi_;
  ProfileFunction rho_;
  int n_ = 2;
  BoundaryKind kind_ = BoundaryKind::ClosedDisc;
};

}  // namespace warpgh::profile
