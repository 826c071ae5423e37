#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"
#include "warpgh/profile/profile_function.hpp"

using namespace warpgh;
using namespace warpgh::test;
using profile::RatioKind;

namespace {

ProfileFunction one(const ProfilePiece& p) { return ProfileFunction({p}); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Contract;
}

/// One piece of every kind on a positive domain.
std::vector<ProfilePiece> sample_pieces() {
  const Interval d{0.2, 1.4};
  return {ProfilePiece::sine_cap(d, 1.3),
          ProfilePiece::quartic(d, 1.0, 0.7),
          ProfilePiece::power(d, 2.0, 0.5, 0.3),
          ProfilePiece::affine(d, 0.9, 0.1),
          ProfilePiece::cubic_hermite(d, 0.5, 1.0, 1.1, 0.2),
          ProfilePiece::quintic_hermite(d, 0.5, 1.0, -0.3, 1.1, 0.2, -0.8),
          ProfilePiece::scaled_composite(d, 0.5, 0.3, ProfilePiece::sine_cap({0.5, 1.7}, 2.0))};
}

}  // namespace

TEST(ProfileEval, SineSlopeAtOriginIsOne) {
  EXPECT_DOUBLE_EQ(one(ProfilePiece::sine_cap({0.0, 1.0}, 1.0)).eval(0.0, 1), 1.0);
}

TEST(ProfileEval, QuarticSecondDerivative) {
  EXPECT_NEAR(one(ProfilePiece::quartic({0.0, 1.0}, 1.0, 1.0)).eval(0.05, 2), 0.03, 1e-15);
}

TEST(ProfileEval, PowerValue) {
  EXPECT_NEAR(one(ProfilePiece::power({0.0, 4.0}, 2.0, 1.0, 0.5)).eval(3.0, 0), 4.0, 1e-15);
}

TEST(ProfileEval, RejectsOutOfDomainAndHighOrder) {
  const auto f = one(ProfilePiece::sine_cap({0.0, 1.0}, 1.0));
  EXPECT_EQ(kind_of([&] { f.eval(1.5, 0); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of([&] { f.eval(0.5, 3); }), ErrorKind::Unsupported);
}

TEST(ProfileRatio, TaylorLimitsAtOrigin) {
  const auto s = one(ProfilePiece::sine_cap({0.0, 1.0}, 1.0));
  EXPECT_NEAR(profile::eval_ratio(s, s, 0.0, RatioKind::SecondOverValue), -1.0, 1e-12);
  EXPECT_NEAR(profile::eval_ratio(s, s, 0.0, RatioKind::OneMinusSlopeSqOverSq), 1.0, 1e-12);
}

TEST(ProfileRatio, SlopeProductMatchesFiniteDifferences) {
  const auto sp = round_sphere(2);
  const double r = std::numbers::pi / 4;
  const double v = profile::eval_ratio(sp.phi(), sp.rho(), r, RatioKind::SlopeProduct);
  EXPECT_NEAR(v, -1.0, 1e-12);
  // Central differences of the values only.
  const double h = 1e-5;
  auto d1 = [&](const ProfileFunction& f) { return (f.eval(r + h, 0) - f.eval(r - h, 0)) / (2 * h); };
  const double fd = d1(sp.phi()) * d1(sp.rho()) / (sp.phi().eval(r, 0) * sp.rho().eval(r, 0));
  EXPECT_NEAR(v, fd, 1e-9);
}

TEST(ProfileRatio, ConvergesQuadraticallyToTheOriginLimit) {
  const Interval d{0.0, 1.0};
  const auto phi = one(ProfilePiece::sine_cap(d, 1.0));
  const auto rho = one(ProfilePiece::quartic(d, 1.0, 1.0));
  const auto cubic = one(ProfilePiece::quintic_hermite(d, 0.0, 1.0, 0.0, 1.1, 1.3, 0.6));  // r + r^3/10
  struct Case {
    const ProfileFunction& f;
    const ProfileFunction& g;
    RatioKind kind;
  };
  for (const Case& c : {Case{phi, rho, RatioKind::SlopeProduct}, Case{cubic, cubic, RatioKind::SecondOverValue}}) {
    const double limit = profile::eval_ratio(c.f, c.g, 0.0, c.kind);
    std::vector<double> err;
    for (double e : {1e-2, 1e-3, 1e-4}) err.push_back(std::fabs(profile::eval_ratio(c.f, c.g, e, c.kind) - limit));
    for (size_t k = 1; k < err.size(); ++k) EXPECT_GE(std::log10(err[k - 1] / err[k]), 1.9);
  }
}

TEST(KnotJoin, HermiteMatchingValueAndSlopeIsC1) {
  const auto left = one(ProfilePiece::sine_cap({0.0, 0.1}, 1.0));
  const double v = std::sin(0.1), s = std::cos(0.1);
  const auto right = one(ProfilePiece::cubic_hermite({0.1, 0.2}, v, s, v + 0.09, 0.8));
  const auto j = profile::knot_join(left, right);
  ASSERT_EQ(j.knots().size(), 1u);
  EXPECT_DOUBLE_EQ(j.knots()[0], 0.1);
  EXPECT_GE(j.continuity()[0], 1);
}

TEST(KnotJoin, ValueJumpIsAContinuityError) {
  const auto left = one(ProfilePiece::affine({0.0, 1.0}, 1.0, 0.0));
  const auto right = one(ProfilePiece::affine({1.0, 2.0}, 1.0, 0.5));
  EXPECT_EQ(kind_of([&] { profile::knot_join(left, right); }), ErrorKind::Continuity);
}

TEST(KnotJoin, AffineToPowerCornerRecordsClassZero) {
  const double R1 = 1.0, c1 = 0.5, xi = 0.2, alpha = 0.5, C = 1.0;
  const auto left = one(ProfilePiece::affine({R1, 2 * R1}, c1, xi));
  const double delta0 = c1 * (2 * R1 + xi) / std::pow(2 * R1 + C, alpha);
  const auto right = one(ProfilePiece::power({2 * R1, 5.0}, delta0, C, alpha));
  const auto j = profile::knot_join(left, right);
  EXPECT_EQ(j.continuity()[0], 0);
  EXPECT_NEAR(j.eval_left(2 * R1, 0), j.eval(2 * R1, 0), 1e-12);
  EXPECT_GT(std::fabs(j.eval_left(2 * R1, 1) - j.eval(2 * R1, 1)), 0.1);
}

TEST(ProfileProperty, FirstDerivativeMatchesCentralDifferences) {
  std::mt19937_64 rng(7);
  for (const auto& p : sample_pieces()) {
    const auto f = one(p);
    std::uniform_real_distribution<double> u(p.domain().lo + 1e-4, p.domain().hi - 1e-4);
    for (int k = 0; k < 100; ++k) {
      const double r = u(rng), h = 1e-5;
      const double fd = (f.eval(r + h, 0) - f.eval(r - h, 0)) / (2 * h);
      EXPECT_NEAR(f.eval(r, 1), fd, 1e-6 * (1 + std::fabs(f.eval(r, 0)))) << profile::to_string(p.kind()) << " r=" << r;
    }
  }
}

TEST(ProfileProperty, SerializationRoundTripIsBitIdentical) {
  for (const auto& p : sample_pieces()) {
    const auto f = one(p);
    const auto g = ProfileFunction::from_json(parse_json(f.serialize(), "test", "roundtrip"));
    for (double r : {0.2, 0.3333, 0.71, 1.0, 1.4})
      for (int o = 0; o <= 2; ++o) EXPECT_EQ(f.eval(r, o), g.eval(r, o)) << profile::to_string(p.kind());
    EXPECT_EQ(f.serialize(), g.serialize());
  }
  const auto sp = round_sphere(3);
  EXPECT_EQ(DoubleWarpProfile::from_json(sp.to_json()).serialize(), sp.serialize());
}

TEST(ProfileProperty, LipschitzBudgetBoundsThirdDerivative) {
  for (const auto& p : sample_pieces()) {
    const double h = 1e-3;
    for (double r = p.domain().lo + h; r < p.domain().hi - h; r += 0.05) {
      const double third = (p.derivative(r + h, 2) - p.derivative(r - h, 2)) / (2 * h);
      EXPECT_LE(std::fabs(third), p.l2() * (1 + 1e-6) + 1e-6) << profile::to_string(p.kind()) << " r=" << r;
    }
  }
}

TEST(DoubleWarp, ClosedDiscRejectsNonzeroPhiAtOrigin) {
  const Interval d{0.0, 1.0};
  EXPECT_THROW(DoubleWarpProfile(one(ProfilePiece::affine(d, 1.0, 0.1)), one(cos_piece(d)), 2, BoundaryKind::ClosedDisc), Error);
}

TEST(DoubleWarp, CorruptedJsonIsAParseError) {
  EXPECT_EQ(kind_of([] { DoubleWarpProfile::from_json(json{{"n", 2}}); }), ErrorKind::Parse);
}
