#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "warpgh/gh/sampling.hpp"
#include "warpgh/model/full_model.hpp"

using namespace warpgh;
using namespace warpgh::test;
using curvature::BoundFn;
using curvature::ricci_eigenvalues;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Contract;
}

double curve_inf(const DoubleWarpProfile& p, double a, double b, double step) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : curvature::min_eigenvalue_curve(p, a, b, step)) m = std::min(m, c.e.min());
  return m;
}

/// phi has a slope drop s1 -> s2 at r0; rho is smooth.
DoubleWarpProfile corner_fixture(double r0, double s1, double s2, double rho_b, double rho_c, int n) {
  const Interval L{0.2, r0}, R{r0, 1.0};
  const double C2 = s1 * r0 / s2 - r0;
  return DoubleWarpProfile(ProfileFunction({ProfilePiece::affine(L, s1, 0.0), ProfilePiece::affine(R, s2, C2)}),
                           ProfileFunction({ProfilePiece::quartic({0.2, 1.0}, rho_b, rho_c)}), n, BoundaryKind::OpenAnnulus);
}

struct Shared {
  model::ModelResult full;
  model::LocalModel local;
};

const Shared& shared() {
  static const Shared s = [] {
    Shared out;
    out.full = model::build_full_profile(3, 0.01, 1e-4, 0.0);
    out.local = model::build_local_model(model::ModelParams{});
    return out;
  }();
  return s;
}

}  // namespace

TEST(ModelParams, RejectsLargeEpsilonAndKappa) {
  model::ModelParams p;
  p.epsilon = 0.2;
  EXPECT_EQ(kind_of([&] { model::validate(p, true); }), ErrorKind::Validation);
  EXPECT_EQ(kind_of([] { model::build_full_profile(3, 0.2, 1e-4, 0.0); }), ErrorKind::Validation);
  p = {};
  p.kappa = 0.05;
  EXPECT_EQ(kind_of([&] { model::validate(p, true); }), ErrorKind::Validation);
  p = {};
  p.alpha = 1.0;
  EXPECT_EQ(kind_of([&] { model::validate(p, true); }), ErrorKind::Validation);
}

TEST(BuildPart1, CapReproducesDisplayedSlack) {
  // The knot at 1/(9n) starts the tail piece, so the cap is checked with left limits there.
  const auto p1 = model::build_part1(2);
  const double hi = 1.0 / 18.0;
  std::vector<double> rs;
  for (int k = 0; k < 5000; ++k) rs.push_back(hi * k / 5000.0);
  double rho_sq_min = std::numeric_limits<double>::infinity();
  for (double r : rs) rho_sq_min = std::min(rho_sq_min, std::pow(p1.profile.rho().eval(r, 0), 2));
  rho_sq_min = std::min(rho_sq_min, std::pow(p1.profile.rho().eval_left(hi, 0), 2));
  std::vector<curvature::RicciEigenvalues> es;
  for (double r : rs) es.push_back(ricci_eigenvalues(p1.profile, r));
  es.push_back(curvature::ricci_eigenvalues_left(p1.profile, hi));
  for (size_t k = 0; k < es.size(); ++k) {
    EXPECT_GE(es[k].lambda0, 2.0 - 12.0 / 81.0 - 1e-6) << "sample " << k;
    EXPECT_GE(es[k].lambda2, (-12.0 / 81.0 + 0.5 - 8.0 / 81.0) * rho_sq_min - 1e-6) << "sample " << k;
  }
}

TEST(BuildPart1, TailSlopeIsC1) {
  const auto p1 = model::build_part1(2);
  EXPECT_DOUBLE_EQ(p1.constants.c1, 1.0 / 8000.0);
  EXPECT_NEAR(p1.profile.phi().eval_left(p1.constants.R1, 1), 1.0 / 8000.0, 1e-15);
  EXPECT_GT(p1.constants.R1, 1.0 / 18.0);
  EXPECT_TRUE(p1.certificate.passed());
}

TEST(BuildPart2, SlopeAtR1DoesNotExceedC1) {
  const auto p1 = model::build_part1(3);
  const auto p2 = model::build_part2(p1, 0.01, 1e-4);
  EXPECT_LE(p2.profile.phi().eval(p1.constants.R1, 1), p1.constants.c1 * (1 + 1e-12));
}

TEST(BuildPart2, FiberEigenvaluePositiveOnConeTail) {
  const auto p2 = model::build_part2(model::build_part1(3), 0.01, 1e-4);
  const double R = p2.constants.R, hi = p2.profile.domain().hi;
  ASSERT_GT(hi, R);
  for (int k = 0; k <= 50; ++k) {
    const double r = R * std::pow(hi / R, k / 50.0);
    EXPECT_GT(ricci_eigenvalues(p2.profile, r).lambda2, 0.0) << "r=" << r;
  }
}

TEST(SmoothC1Glue, EqualSlopesOnlyUpgradesContinuity) {
  const Interval L{0.2, 0.5}, R{0.5, 1.0};
  const DoubleWarpProfile p(ProfileFunction({ProfilePiece::affine(L, 1.0, 0.0), ProfilePiece::affine(R, 1.0, 0.0)}),
                            ProfileFunction({ProfilePiece::quartic({0.2, 1.0}, 1.0, 0.1)}), 2, BoundaryKind::OpenAnnulus);
  const auto q = model::smooth_c1_glue(p, 0.5, 0.1, 1e-3);
  for (double r : {0.2, 0.45, 0.5, 0.55, 0.9})
    for (int o = 0; o <= 2; ++o) EXPECT_EQ(p.phi().eval(r, o), q.phi().eval(r, o));
  EXPECT_EQ(q.serialize(), model::smooth_c1_glue(q, 0.5, 0.1, 1e-3).serialize());
}

TEST(SmoothC1Glue, CornerDropLosesAtMostTolerance) {
  const auto p = corner_fixture(0.5, 1.0, 0.7, 1.0, 0.1, 2);
  const double before = curve_inf(p, 0.2, 1.0, 1e-4);
  const auto q = model::smooth_c1_glue(p, 0.5, 0.1, 1e-3);
  EXPECT_GE(curve_inf(q, 0.2, 1.0, 1e-4), before - 1e-3);
  for (int k = 0; k <= 400; ++k) {
    const double r = 0.2 + 0.8 * k / 400.0;
    EXPECT_LE(std::fabs(q.phi().eval(r, 0) - p.phi().eval(r, 0)), 1e-3);
  }
  for (int c : q.phi().continuity()) EXPECT_GE(c, 1);
}

TEST(SmoothC1Glue, RandomCornersKeepInfRicci) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 20; ++s) {
    const double r0 = 0.4 + 0.3 * u(rng), s1 = 0.5 + u(rng), s2 = s1 * (0.5 + 0.4 * u(rng));
    const auto p = corner_fixture(r0, s1, s2, 0.8 + 0.4 * u(rng), 0.3 * u(rng), 2 + s % 3);
    const double before = curve_inf(p, 0.2, 1.0, 1e-4);
    const auto q = model::smooth_c1_glue(p, r0, 0.1, 1e-3);
    EXPECT_GE(curve_inf(q, 0.2, 1.0, 1e-4), before - 1e-3) << "fixture " << s;
  }
}

TEST(SmoothC1Glue, SlopeIncreaseIsAPreconditionError) {
  const auto p = corner_fixture(0.5, 0.7, 1.0, 1.0, 0.1, 2);
  EXPECT_EQ(kind_of([&] { model::smooth_c1_glue(p, 0.5, 0.1, 1e-3); }), ErrorKind::Precondition);
}

TEST(BuildFullProfile, JunctionTrigIdentity) {
  for (double s : {0.1, 0.5, 0.9})
    for (double t : {1e-3, 0.1}) EXPECT_NEAR(t * std::sin((1.0 / t) * t * std::acos(s)), t * std::sqrt(1 - s * s), 1e-15);
}

TEST(BuildFullProfile, CertifiedTauSurvivesTenfoldRecheck) {
  const auto& f = shared().full;
  EXPECT_GT(f.constants.tau, 0.0);
  EXPECT_TRUE(f.certificate.passed());
  EXPECT_EQ(f.certificate.bound.kind, BoundFn::Kind::InverseQuadratic);
  const auto dense = curvature::dense_recheck(f.profile, f.certificate, f.certificate.cells, 10);
  EXPECT_TRUE(dense.ok) << dense.worst;
}

TEST(BuildFullProfile, SmallerDeltaCollapsesPointwiseOnTail) {
  const auto& big = shared().full;
  const auto small = model::build_full_profile(3, 0.01, 1e-4, 0.5 * big.constants.delta0);
  const double R = big.constants.R, hi = std::min(big.profile.domain().hi, small.profile.domain().hi);
  ASSERT_GT(hi, R);
  for (int k = 0; k <= 100; ++k) {
    const double r = R + (hi - R) * k / 100.0;
    EXPECT_LE(small.profile.phi().eval(r, 0), big.profile.phi().eval(r, 0)) << "r=" << r;
  }
}

TEST(BuildLocalModel, RescalingMultipliesEigenvaluesByTSquared) {
  const auto& lm = shared().local;
  const double t = lm.constants.t_local;
  const auto& mp = lm.params;
  const auto full = model::build_full_profile(mp.n, mp.epsilon, mp.tail_exponent(), std::min(lm.constants.delta0, lm.constants.delta0), t);
  for (double r0 : {0.02, 0.1, 0.5, 0.9}) {
    const auto a = ricci_eigenvalues(lm.profile, r0), b = ricci_eigenvalues(full.profile, t * r0);
    EXPECT_NEAR(a.lambda0, t * t * b.lambda0, 1e-8 * std::max(1.0, std::fabs(a.lambda0)));
    EXPECT_NEAR(a.lambda1, t * t * b.lambda1, 1e-8 * std::max(1.0, std::fabs(a.lambda1)));
    EXPECT_NEAR(a.lambda2, t * t * b.lambda2, 1e-8 * std::max(1.0, std::fabs(a.lambda2)));
  }
}

TEST(BuildLocalModel, NeckIsExactPowerAndCone) {
  const auto& lm = shared().local;
  const double t = lm.constants.t_local, al = lm.params.tail_exponent();
  EXPECT_NEAR(lm.neck_delta, lm.constants.delta0 * std::pow(t, al - 1.0), 1e-12 * lm.neck_delta);
  for (double r : {0.01, 0.1, 0.5, 1.0}) {
    EXPECT_NEAR(lm.profile.phi().eval(r, 0), lm.neck_delta * std::pow(r, al), 1e-12 * lm.profile.phi().eval(r, 0));
    EXPECT_NEAR(lm.profile.rho().eval(r, 0), 0.99 * r, 1e-12);
  }
  EXPECT_TRUE(lm.certificate.passed());
  EXPECT_NEAR(lm.profile.rho().eval(0.0, 0), lm.constants.mu, 1e-12 * lm.constants.mu);
  EXPECT_NEAR(lm.profile.phi().eval(0.0, 1), 1.0, 1e-12);
}

TEST(BuildLocalModel, MuShrinksWithKappa) {
  model::ModelParams a, b;
  a.kappa = 1e-2;
  b.kappa = 1e-3;
  EXPECT_LT(model::build_local_model(b).constants.mu, model::build_local_model(a).constants.mu);
}

TEST(BuildLocalModel, NeckDistancesMatchConeSample) {
  // The sampler on the model must agree with the sampler on the analytic neck metric.
  const auto& lm = shared().local;
  const size_t n_r = 11, netn = 48;
  const auto X = gh::sample_double_warp(lm.profile, 0.5, 1.0, n_r, 1, netn, 3);
  const double d = lm.neck_delta, al = lm.params.tail_exponent();
  const gh::WarpFns cone{[&](double r) { return d * std::pow(r, al); }, [](double r) { return 0.99 * r; }};
  const auto Y = gh::sample_warp(cone, 0.5, 1.0, n_r, gh::icosphere_net(1), gh::farthest_point_net(lm.params.n, netn, 3));
  ASSERT_EQ(X.size(), Y.size());
  for (size_t i = 0; i < X.size(); ++i)
    for (size_t j = i + 1; j < X.size(); ++j) EXPECT_NEAR(X(i, j), Y(i, j), 1e-9 * (1 + Y(i, j)));
}

TEST(BuildLocalModel, NeckDistancesBracketAnnulusGeodesics) {
  // Intrinsic distance in {r >= a} of the flat cone with angle factor 0.99.
  auto annulus = [](double r1, double r2, double t, double a) {
    const double t1 = std::acos(a / r1), t2 = std::acos(a / r2);
    if (t < t1 + t2) return std::sqrt(r1 * r1 + r2 * r2 - 2 * r1 * r2 * std::cos(t));
    return std::sqrt(r1 * r1 - a * a) + std::sqrt(r2 * r2 - a * a) + a * (t - t1 - t2);
  };
  const auto& lm = shared().local;
  const size_t netn = 48;
  const auto X = gh::sample_double_warp(lm.profile, 0.5, 1.0, 11, 1, netn, 3);
  const auto sn = gh::farthest_point_net(lm.params.n, netn, 3);
  for (size_t i = 0; i < X.size(); ++i)
    for (size_t j = i + 1; j < X.size(); ++j) {
      const double r1 = *X.labels()[i].r, r2 = *X.labels()[j].r;
      const auto qi = static_cast<size_t>(X.labels()[i].fiber[1]), qj = static_cast<size_t>(X.labels()[j].fiber[1]);
      const double want = annulus(r1, r2, 0.99 * gh::sphere_angle(sn.pts[qi], sn.pts[qj]), 0.5);
      if (qi == qj) {
        EXPECT_NEAR(X(i, j), want, 1e-12);
      }
      EXPECT_GE(X(i, j), 0.98 * want);
      EXPECT_LE(X(i, j), 1.3 * want);
    }
}

TEST(ModifyFiber, UnitDeltaReturnsInput) {
  const Interval d{0.0, 0.1};
  const DoubleWarpProfile p(ProfileFunction({ProfilePiece::sine_cap(d, 1.0)}), ProfileFunction({ProfilePiece::quartic(d, 1.0, 1.0)}), 2,
                            BoundaryKind::ClosedDisc);
  const auto cert = curvature::certify_bound(p, 0.0, 0.1, BoundFn::constant(0.5));
  EXPECT_EQ(model::modify_fiber(p, cert, 1.0, 1e-3).serialize(), p.serialize());
}

TEST(ModifyFiber, HalvesTheFiberOnTheOuterHalf) {
  const Interval d{0.0, 0.1};
  const DoubleWarpProfile p(ProfileFunction({ProfilePiece::sine_cap(d, 1.0)}), ProfileFunction({ProfilePiece::quartic(d, 1.0, 1.0)}), 2,
                            BoundaryKind::ClosedDisc);
  const auto cert = curvature::certify_bound(p, 0.0, 0.1, BoundFn::constant(0.5));
  ASSERT_TRUE(cert.passed());
  const auto q = model::modify_fiber(p, cert, 0.5, 0.6);
  EXPECT_NEAR(q.rho().eval(0.08, 0), 0.5 * p.rho().eval(0.08, 0), 1e-15);
  EXPECT_TRUE(curvature::certify_bound(q, 0.0, 0.1, BoundFn::constant(0.5)).passed());
}

TEST(ModifyFiber, TightToleranceIsAModificationError) {
  const Interval d{0.0, 0.1};
  const DoubleWarpProfile p(ProfileFunction({ProfilePiece::sine_cap(d, 1.0)}), ProfileFunction({ProfilePiece::quartic(d, 1.0, 1.0)}), 2,
                            BoundaryKind::ClosedDisc);
  const auto cert = curvature::certify_bound(p, 0.0, 0.1, BoundFn::constant(0.5));
  EXPECT_EQ(kind_of([&] { model::modify_fiber(p, cert, 0.5, 0.1); }), ErrorKind::Modification);
}
