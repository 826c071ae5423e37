#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../oracles/ricci_fd.hpp"
#include "test_support.hpp"
#include "warpgh/curvature/certificate.hpp"
#include "warpgh/model/builders.hpp"

using namespace warpgh;
using namespace warpgh::test;
using curvature::BoundFn;
using curvature::ricci_eigenvalues;

namespace {

void expect_near_rel(double a, double b, double rel) { EXPECT_NEAR(a, b, rel * std::max(1.0, std::fabs(b))); }

}  // namespace

TEST(RicciEigenvalues, RoundSphereIsEinstein) {
  for (int n = 2; n <= 6; ++n) {
    const auto p = round_sphere(n);
    for (int k = 1; k < 200; ++k) {
      const double r = 1.5 * k / 200.0;
      const auto e = ricci_eigenvalues(p, r);
      EXPECT_NEAR(e.lambda0, n + 2, 1e-9);
      EXPECT_NEAR(e.lambda1, n + 2, 1e-9);
      EXPECT_NEAR(e.lambda2, n + 2, 1e-9);
    }
  }
}

TEST(RicciEigenvalues, ClosedDiscOriginUsesTaylorLimits) {
  const auto e = ricci_eigenvalues(round_sphere(3), 0.0);
  EXPECT_NEAR(e.lambda0, 5.0, 1e-9);
  EXPECT_NEAR(e.lambda1, 5.0, 1e-9);
  EXPECT_NEAR(e.lambda2, 5.0, 1e-9);
}

TEST(RicciEigenvalues, FlatProduct) {
  const auto e = ricci_eigenvalues(flat_product(3), 0.7);
  EXPECT_NEAR(e.lambda0, 0.0, 1e-12);
  EXPECT_NEAR(e.lambda1, 0.0, 1e-12);
  EXPECT_NEAR(e.lambda2, 2.0, 1e-12);
}

TEST(RicciEigenvalues, CapWithQuarticFiber) {
  const Interval d{0.0, 0.2};
  const DoubleWarpProfile p(ProfileFunction({ProfilePiece::sine_cap(d, 1.0)}), ProfileFunction({ProfilePiece::quartic(d, 1.0, 1.0)}), 2,
                            BoundaryKind::ClosedDisc);
  const double r = 0.05;
  EXPECT_NEAR(ricci_eigenvalues(p, r).lambda0, 2.0 - 24.0 * r * r / (1.0 + std::pow(r, 4)), 1e-12);
  EXPECT_NEAR(ricci_eigenvalues(p, r).lambda0, 1.9400004, 1e-7);
}

TEST(RicciEigenvalues, MatchFiniteDifferenceCurvature) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.2, 0.9);
  for (int s = 0; s < 20; ++s) {
    const int n = 2 + s % 3;
    const auto p = random_profile(rng, n);
    const double r = u(rng);
    const oracle::RicciFd fd([&](double x) { return p.phi().eval(x, 0); }, [&](double x) { return p.rho().eval(x, 0); }, n);
    const auto want = fd.eigenvalues(r);
    const auto got = ricci_eigenvalues(p, r);
    expect_near_rel(got.lambda0, want[0], 1e-4);
    expect_near_rel(got.lambda1, want[1], 1e-4);
    expect_near_rel(got.lambda2, want[2], 1e-4);
  }
}

TEST(RicciEigenvalues, ScalingCovariance) {
  std::mt19937_64 rng(5);
  const double t = 0.5;
  for (int s = 0; s < 5; ++s) {
    const auto p = random_profile(rng, 3);
    // f(t r)/t lives on [0.1/t, 1/t].
    const DoubleWarpProfile q(p.phi().rescaled(t), p.rho().rescaled(t), 3, BoundaryKind::OpenAnnulus);
    for (double r0 : {0.4, 1.0, 1.8}) {
      const auto a = ricci_eigenvalues(p, t * r0), b = ricci_eigenvalues(q, r0);
      EXPECT_NEAR(b.lambda0, t * t * a.lambda0, 1e-8 * std::max(1.0, std::fabs(a.lambda0)));
      EXPECT_NEAR(b.lambda1, t * t * a.lambda1, 1e-8 * std::max(1.0, std::fabs(a.lambda1)));
      EXPECT_NEAR(b.lambda2, t * t * a.lambda2, 1e-8 * std::max(1.0, std::fabs(a.lambda2)));
    }
  }
}

TEST(MinEigenvalueCurve, ConstantForModelSpaces) {
  for (const auto& c : curvature::min_eigenvalue_curve(round_sphere(2), 0.0, 1.5, 0.01)) EXPECT_NEAR(c.e.min(), 4.0, 1e-9);
  for (const auto& c : curvature::min_eigenvalue_curve(flat_product(2), 0.0, 1.0, 0.01)) EXPECT_NEAR(c.e.min(), 0.0, 1e-12);
}

TEST(MinEigenvalueCurve, PartOneCapIsPositive) {
  const auto p1 = model::build_part1(2);
  const auto curve = curvature::min_eigenvalue_curve(p1.profile, 0.0, 1.0 / 18.0, 1e-4);
  ASSERT_GT(curve.size(), 500u);
  for (const auto& c : curve) EXPECT_GT(c.e.min(), 0.0) << "r=" << c.r;
}

TEST(MinEigenvalueCurve, CsvHeaderAndRows) {
  const auto csv = curvature::curve_csv(curvature::min_eigenvalue_curve(round_sphere(2), 0.0, 1.0, 0.5));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "r,lambda0,lambda1,lambda2,min");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(CertifyBound, RoundSpherePassesWithMarginNearTenth) {
  const auto c = curvature::certify_bound(round_sphere(2), 0.0, 1.5, BoundFn::constant(3.9));
  EXPECT_TRUE(c.passed());
  EXPECT_GT(c.margin, 0.05);
  EXPECT_LE(c.margin, 0.1 + 1e-9);
  EXPECT_TRUE(curvature::dense_recheck(round_sphere(2), c, c.cells).ok);
}

TEST(CertifyBound, FlatProductFailsWithWorstSlackMinusTenth) {
  const auto c = curvature::certify_bound(flat_product(2), 0.0, 1.0, BoundFn::constant(0.1));
  EXPECT_FALSE(c.passed());
  EXPECT_NEAR(c.margin, -0.1, 1e-9);
  ASSERT_FALSE(c.worst_cells.empty());
  EXPECT_NEAR(c.worst_cells.front().slack, -0.1, 1e-9);
}

TEST(CertifyBound, IdenticalAcrossThreadCounts) {
  const auto p = model::build_part1(3).profile;
  curvature::CertifyOptions one, four;
  four.threads = 4;
  const auto d = p.domain();
  const auto a = curvature::certify_bound(p, d.lo, d.hi, BoundFn::inverse_quadratic(0.5), one);
  const auto b = curvature::certify_bound(p, d.lo, d.hi, BoundFn::inverse_quadratic(0.5), four);
  EXPECT_EQ(dump17(a.to_json()), dump17(b.to_json()));
}

TEST(CertifyBound, CertifiedIntervalsSurviveDenseRecheck) {
  std::mt19937_64 rng(3);
  for (int s = 0; s < 5; ++s) {
    const auto p = random_profile(rng, 2);
    const double floor = curvature::min_eigenvalue_curve(p, 0.1, 1.0, 1e-3).front().e.min();
    double lo = floor;
    for (const auto& c : curvature::min_eigenvalue_curve(p, 0.1, 1.0, 1e-3)) lo = std::min(lo, c.e.min());
    const auto cert = curvature::certify_bound(p, 0.1, 1.0, BoundFn::constant(lo - 0.5));
    ASSERT_TRUE(cert.passed());
    const auto dense = curvature::dense_recheck(p, cert, cert.cells);
    EXPECT_TRUE(dense.ok) << dense.worst;
  }
}

TEST(CertifyBound, RejectsIntervalOutsideDomain) {
  EXPECT_THROW(curvature::certify_bound(round_sphere(2), 0.0, 2.0, BoundFn::constant(1.0)), Error);
}

TEST(FiberRescale, UnitScaleIsIdentity) {
  std::mt19937_64 rng(2);
  const auto p = random_profile(rng, 3);
  const auto a = ricci_eigenvalues(p, 0.5), b = curvature::fiber_rescale_eigenvalues(p, 1.0, 0.5);
  EXPECT_EQ(a.lambda0, b.lambda0);
  EXPECT_EQ(a.lambda1, b.lambda1);
  EXPECT_EQ(a.lambda2, b.lambda2);
}

TEST(FiberRescale, HalfScaleRoundSphereMatchesScaledProfile) {
  const double r = 0.3, c = 0.5;
  const auto e = curvature::fiber_rescale_eigenvalues(round_sphere(2), c, r);
  EXPECT_NEAR(e.lambda0, 4.0, 1e-12);
  EXPECT_NEAR(e.lambda2, 4.0, 1e-12);
  EXPECT_NEAR(e.lambda1, 4.0 + 3.0 / std::pow(std::sin(r), 2), 1e-9);
  // Oracle: evaluate the profile with phi replaced by c phi.
  const Interval d{0.05, 1.5};
  const DoubleWarpProfile q(ProfileFunction({ProfilePiece::scaled_composite(d, c, 0.0, ProfilePiece::sine_cap(d, 1.0))}),
                            ProfileFunction({cos_piece(d)}), 2, BoundaryKind::OpenAnnulus);
  EXPECT_NEAR(e.lambda1, ricci_eigenvalues(q, r).lambda1, 1e-9);
}

TEST(FiberRescale, LawHoldsOnRandomProfiles) {
  std::mt19937_64 rng(17);
  for (int s = 0; s < 10; ++s) {
    const auto p = random_profile(rng, 2 + s % 3);
    for (double r : {0.2, 0.55, 0.9}) {
      const auto base = ricci_eigenvalues(p, r);
      double prev = base.lambda1;
      for (double c : {1.0, 0.5, 0.1}) {
        const auto e = curvature::fiber_rescale_eigenvalues(p, c, r);
        EXPECT_NEAR(e.lambda0, base.lambda0, 1e-12);
        EXPECT_NEAR(e.lambda2, base.lambda2, 1e-12);
        EXPECT_GE(e.lambda1, prev);
        prev = e.lambda1;
      }
    }
  }
}

TEST(FiberRescale, RejectsScaleOutsideUnitInterval) {
  EXPECT_THROW(curvature::fiber_rescale_eigenvalues(round_sphere(2), 1.5, 0.3), Error);
}

TEST(GeneralWarpedRicci, FlatBaseUnitSphere) {
  const auto w = curvature::general_warped_ricci(0.0, 0.0, 0.0, 0.0, 1.0, 2);
  EXPECT_DOUBLE_EQ(w.base, 0.0);
  EXPECT_DOUBLE_EQ(w.fiber, 1.0);
}

TEST(GeneralWarpedRicci, AgreesWithDoubleWarpOnRoundBase) {
  // Base dr^2 + sin^2 r g_{S^2} (round S^3, Ric = 2), f = sin r, n = 2.
  const double r = std::numbers::pi / 4, n = 2;
  const double f = std::sin(r), fp = std::cos(r), fpp = -std::sin(r), phi = std::sin(r), phip = std::cos(r);
  const double hess_rr = fpp / f, grad = fp * fp / (f * f), lap = fpp / f + 2.0 * phip * fp / (phi * f);
  const auto w = curvature::general_warped_ricci(2.0, hess_rr, grad, lap, f, n);
  const Interval d{0.05, 1.5};
  const DoubleWarpProfile p(ProfileFunction({ProfilePiece::sine_cap(d, 1.0)}), ProfileFunction({ProfilePiece::sine_cap(d, 1.0)}), n,
                            BoundaryKind::OpenAnnulus);
  const auto e = ricci_eigenvalues(p, r);
  EXPECT_NEAR(w.base, e.lambda0, 1e-12);
  EXPECT_NEAR(w.fiber, e.lambda2, 1e-12);
}

TEST(GeneralWarpedRicci, BaseValueInvariantUnderScalingF) {
  const double c = 0.3, f = 0.8, fpp = -0.2, fp = 0.5, lap = 0.7;
  const auto a = curvature::general_warped_ricci(1.0, fpp / f, fp * fp / (f * f), lap / f, f, 3);
  const auto b = curvature::general_warped_ricci(1.0, c * fpp / (c * f), c * c * fp * fp / (c * c * f * f), c * lap / (c * f), c * f, 3);
  EXPECT_NEAR(a.base, b.base, 1e-15);
}
