#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../oracles/gh_bruteforce.hpp"
#include "test_support.hpp"
#include "warpgh/gh/experiments.hpp"
#include "warpgh/report/commands.hpp"

using namespace warpgh;
using namespace warpgh::test;
using gh::Correspondence;
using gh::FiniteMetricSpace;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Contract;
}

using Cloud = std::vector<std::array<double, 2>>;

Cloud random_cloud(std::mt19937_64& rng, size_t m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Cloud c(m);
  for (auto& p : c) p = {u(rng), u(rng)};
  return c;
}

FiniteMetricSpace euclidean(const Cloud& c) {
  const size_t m = c.size();
  std::vector<double> d(m * m);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < m; ++j) d[i * m + j] = std::hypot(c[i][0] - c[j][0], c[i][1] - c[j][1]);
  return FiniteMetricSpace::from_matrix(std::move(d));
}

oracle::Matrix rows(const FiniteMetricSpace& X) {
  oracle::Matrix m(X.size(), std::vector<double>(X.size()));
  for (size_t i = 0; i < X.size(); ++i)
    for (size_t j = 0; j < X.size(); ++j) m[i][j] = X(i, j);
  return m;
}

/// Each point paired with its nearest point of the other cloud, both ways.
Correspondence nearest_neighbor(const Cloud& a, const Cloud& b) {
  auto nearest = [](const std::array<double, 2>& p, const Cloud& c) {
    size_t best = 0;
    for (size_t j = 1; j < c.size(); ++j)
      if (std::hypot(p[0] - c[j][0], p[1] - c[j][1]) < std::hypot(p[0] - c[best][0], p[1] - c[best][1])) best = j;
    return best;
  };
  Correspondence c;
  for (size_t i = 0; i < a.size(); ++i) c.pairs.emplace_back(i, nearest(a[i], b));
  for (size_t j = 0; j < b.size(); ++j) c.pairs.emplace_back(nearest(b[j], a), j);
  return c;
}

FiniteMetricSpace two_point(double a) { return FiniteMetricSpace::from_matrix({0.0, a, a, 0.0}); }

/// Max relative error of the net graph metric against great-circle angles.
double sphere_error(const gh::SphereNet& net) {
  const auto X = gh::sphere_space(net, 1.0);
  double worst = 0.0;
  for (size_t i = 0; i < X.size(); ++i)
    for (size_t j = i + 1; j < X.size(); ++j) {
      const double a = gh::sphere_angle(net.pts[i], net.pts[j]);
      worst = std::max(worst, std::fabs(X(i, j) - a) / a);
    }
  return worst;
}

const model::LocalModel& local_model() {
  static const model::LocalModel m = model::build_local_model(model::ModelParams{});
  return m;
}

}  // namespace

TEST(MetricSpace, RejectsAsymmetricAndNegative) {
  EXPECT_EQ(kind_of([] { FiniteMetricSpace::from_matrix({0.0, 1.0, 2.0, 0.0}); }), ErrorKind::Validation);
  EXPECT_EQ(kind_of([] { FiniteMetricSpace::from_matrix({0.0, -1.0, -1.0, 0.0}); }), ErrorKind::Validation);
  EXPECT_FALSE(gh::satisfies_triangle(FiniteMetricSpace::from_matrix({0, 1, 5, 1, 0, 1, 5, 1, 0})));
}

TEST(MetricSpace, SaveLoadRoundTripIsBitIdentical) {
  const auto X = gh::sample_double_warp(round_sphere(2), 0.5, 1.0, 3, 12, 4, 9);
  const std::string stem = temp_dir("gh_roundtrip") + "/x";
  gh::save_space(X, stem, 9, json{{"kind", "test"}});
  const auto Y = gh::load_space(stem);
  ASSERT_EQ(X.size(), Y.size());
  EXPECT_EQ(X.matrix(), Y.matrix());
  for (size_t i = 0; i < X.size(); ++i) {
    EXPECT_EQ(X.labels()[i].id, Y.labels()[i].id);
    EXPECT_EQ(X.labels()[i].r, Y.labels()[i].r);
    EXPECT_EQ(X.labels()[i].fiber, Y.labels()[i].fiber);
  }
}

TEST(MetricSpace, FixtureSquareAndTriangleHaveExactDistanceHalf) {
  const auto A = gh::load_space(fixture("square4")), B = gh::load_space(fixture("triangle3"));
  EXPECT_DOUBLE_EQ(gh::gh_exact_small(A, B).value, 0.5);
  EXPECT_DOUBLE_EQ(oracle::gh_by_maps(rows(A), rows(B)), 0.5);
}

TEST(SampleDoubleWarp, RoundSphereSliceMatchesGreatCircles) {
  const double h = kPi / 2;
  const auto X = gh::sample_double_warp(round_sphere(2, h), h - 1e-3, h, 2, 500, 1, 1);
  const auto net = gh::icosphere_net(500);
  ASSERT_EQ(X.size(), 2 * net.size());
  double worst = 0.0;
  for (size_t i = 0; i < X.size(); ++i)
    for (size_t j = i + 1; j < X.size(); ++j) {
      if (*X.labels()[i].r != h || *X.labels()[j].r != h) continue;
      const auto p = static_cast<size_t>(X.labels()[i].fiber[0]), q = static_cast<size_t>(X.labels()[j].fiber[0]);
      const double a = gh::sphere_angle(net.pts[p], net.pts[q]);
      worst = std::max(worst, std::fabs(X(i, j) - a) / a);
    }
  EXPECT_LE(worst, 0.03);
}

TEST(SampleDoubleWarp, RadialPairsAreExact) {
  const Interval d{0.5, 1.0};
  const auto lin = ProfileFunction({ProfilePiece::affine(d, 1.0, 0.0)});
  const DoubleWarpProfile p(lin, lin, 2, BoundaryKind::OpenAnnulus);
  const auto X = gh::sample_double_warp(p, 0.5, 1.0, 6, 1, 40, 4);
  for (size_t i = 0; i < X.size(); ++i)
    for (size_t j = i + 1; j < X.size(); ++j)
      if (X.labels()[i].fiber == X.labels()[j].fiber) {
        EXPECT_NEAR(X(i, j), std::fabs(*X.labels()[i].r - *X.labels()[j].r), 0.01 * X(i, j));
      }
}

TEST(SampleDoubleWarp, FiberDiameterIsHalfCircumference) {
  const auto X = gh::sample_double_warp(round_sphere(2), 0.99, 1.0, 2, 162, 1, 1);
  double diam = 0.0;
  for (size_t i = 0; i < X.size(); ++i)
    for (size_t j = 0; j < X.size(); ++j)
      if (*X.labels()[i].r == 1.0 && *X.labels()[j].r == 1.0) diam = std::max(diam, X(i, j));
  EXPECT_NEAR(diam, kPi * std::sin(1.0), 0.05 * kPi * std::sin(1.0));
}

TEST(SampleDoubleWarp, CapacityAndDomainErrors) {
  EXPECT_EQ(kind_of([] { gh::sample_double_warp(round_sphere(2), 0.1, 1.0, 100, 642, 1, 1); }), ErrorKind::Capacity);
  EXPECT_EQ(kind_of([] { gh::sample_double_warp(round_sphere(2), 0.1, 2.0, 3, 12, 1, 1); }), ErrorKind::Domain);
}

TEST(SampleDoubleWarp, DoublingNetSizeNeverIncreasesSphereError) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    double prev = std::numeric_limits<double>::infinity();
    for (size_t m : {100, 200, 400}) {
      const double e = sphere_error(gh::farthest_point_net(2, m, seed));
      EXPECT_LE(e, prev) << "seed " << seed << " m " << m;
      prev = e;
    }
  }
}

TEST(GhUpper, Examples) {
  const auto A = gh::sample_double_warp(round_sphere(2), 0.5, 1.0, 3, 12, 1, 1);
  EXPECT_EQ(gh::gh_upper(A, A, Correspondence::identity(A.size())), 0.0);
  Correspondence ordered{{{0, 0}, {1, 1}}};
  EXPECT_DOUBLE_EQ(gh::gh_upper(two_point(1.0), two_point(0.4), ordered), 0.3);
  EXPECT_DOUBLE_EQ(gh::gh_upper(A, gh::point_space(), gh::to_point_correspondence(A.size())), A.diameter() / 2);
  EXPECT_EQ(kind_of([&] { gh::gh_upper(A, A, ordered); }), ErrorKind::Contract);
}

TEST(GhLower, Examples) {
  const auto A = gh::sample_double_warp(round_sphere(2), 0.5, 1.0, 3, 12, 1, 1);
  EXPECT_EQ(gh::gh_lower(A, A), 0.0);
  EXPECT_DOUBLE_EQ(gh::gh_lower(A, gh::point_space()), A.diameter() / 2);
}

TEST(GhExactSmall, Examples) {
  std::mt19937_64 rng(3);
  const auto A = euclidean(random_cloud(rng, 5));
  EXPECT_EQ(gh::gh_exact_small(A, A).value, 0.0);
  EXPECT_DOUBLE_EQ(gh::gh_exact_small(two_point(1.0), two_point(0.4)).value, 0.3);
  const auto B = FiniteMetricSpace::from_matrix({0, 1, 2, 1, 0, 1.5, 2, 1.5, 0});
  EXPECT_DOUBLE_EQ(gh::gh_exact_small(gh::point_space(), B).value, 1.0);
  const auto big = euclidean(random_cloud(rng, 7));
  EXPECT_EQ(kind_of([&] { gh::gh_exact_small(big, A); }), ErrorKind::Capacity);
}

TEST(GhProperty, BoundsBracketEnumeratedExact) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<size_t> sz(1, 5);
  for (int t = 0; t < 100; ++t) {
    const auto ca = random_cloud(rng, sz(rng)), cb = random_cloud(rng, sz(rng));
    const auto A = euclidean(ca), B = euclidean(cb);
    const double want = oracle::gh_by_maps(rows(A), rows(B));
    const auto ex = gh::gh_exact_small(A, B);
    EXPECT_NEAR(ex.value, want, 1e-12) << "trial " << t;
    ASSERT_TRUE(ex.witness.valid_for(A.size(), B.size()));
    EXPECT_EQ(gh::gh_upper(A, B, ex.witness), ex.value);
    EXPECT_LE(gh::gh_lower(A, B), ex.value + 1e-12) << "trial " << t;
    EXPECT_GE(gh::gh_upper(A, B, nearest_neighbor(ca, cb)), ex.value - 1e-12) << "trial " << t;
    EXPECT_GE(gh::gh_upper(A, B, report::detail::eccentricity_matching(A, B)), ex.value - 1e-12) << "trial " << t;
  }
}

TEST(GhProperty, TriangleInequalityOnSmallTriples) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<size_t> sz(1, 4);
  for (int t = 0; t < 50; ++t) {
    const auto A = euclidean(random_cloud(rng, sz(rng))), B = euclidean(random_cloud(rng, sz(rng))),
               C = euclidean(random_cloud(rng, sz(rng)));
    EXPECT_LE(gh::gh_exact_small(A, C).value, gh::gh_exact_small(A, B).value + gh::gh_exact_small(B, C).value + 1e-9);
  }
}

TEST(GhProperty, BoundsScaleExactlyWithPowersOfTwo) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 20; ++t) {
    const auto ca = random_cloud(rng, 4), cb = random_cloud(rng, 5);
    const auto A = euclidean(ca), B = euclidean(cb);
    for (double s : {0.25, 8.0}) {
      const auto As = A.scaled(s), Bs = B.scaled(s);
      EXPECT_EQ(gh::gh_exact_small(As, Bs).value, s * gh::gh_exact_small(A, B).value);
      EXPECT_EQ(gh::gh_lower(As, Bs), s * gh::gh_lower(A, B));
      const auto c = nearest_neighbor(ca, cb);
      EXPECT_EQ(gh::gh_upper(As, Bs, c), s * gh::gh_upper(A, B, c));
    }
  }
}

TEST(GhProperty, BoundsScaleWithinRoundingForGeneralFactors) {
  std::mt19937_64 rng(14);
  const auto A = euclidean(random_cloud(rng, 5)), B = euclidean(random_cloud(rng, 3));
  const double s = 0.37;
  EXPECT_NEAR(gh::gh_exact_small(A.scaled(s), B.scaled(s)).value, s * gh::gh_exact_small(A, B).value, 1e-15);
  EXPECT_NEAR(gh::gh_lower(A.scaled(s), B.scaled(s)), s * gh::gh_lower(A, B), 1e-15);
}

TEST(CollapseCheck, RoundSphereExamples) {
  const double h = kPi / 2;
  const auto rows = gh::collapse_check(round_sphere(2, h), {1.0, 0.1, 0.01}, h);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(rows[0].bound, kPi / 2, 0.1 * kPi / 2);
  EXPECT_NEAR(rows[1].bound, 0.157, 0.0157);
  EXPECT_GT(rows[0].bound, rows[1].bound);
  EXPECT_GT(rows[1].bound, rows[2].bound);
  for (const auto& r : rows) EXPECT_LE(r.bound, r.analytic * 1.01);
  EXPECT_EQ(kind_of([] { gh::collapse_check(round_sphere(2), {0.0}, 1.0); }), ErrorKind::Domain);
}

TEST(ConeCompare, ZeroDeltaLeavesOnlySamplingSlack) {
  const auto c = gh::neck_cone_compare(0.0, 1e-4, 0.01, 3, 0.5, 1.0);
  EXPECT_LE(c.bound, 1e-12);
  EXPECT_EQ(c.analytic, 0.0);
}

TEST(ConeCompare, BoundTracksHalfFiberDiameter) {
  const auto c = gh::neck_cone_compare(1e-3, 1e-4, 0.01, 3, 0.5, 1.0);
  EXPECT_NEAR(c.analytic, kPi * 5e-4, 1e-12);
  EXPECT_LE(c.bound, c.analytic * 1.05);
  const auto d = gh::neck_cone_compare(1e-4, 1e-4, 0.01, 3, 0.5, 1.0);
  EXPECT_NEAR(c.bound / d.bound, 10.0, 1.0);
}

TEST(ConeCompare, LocalModelNeck) {
  const auto& m = local_model();
  const auto c = gh::cone_compare(m, 0.5, 1.0);
  EXPECT_LE(c.bound, c.analytic * 1.05 + 1e-12);
  EXPECT_EQ(kind_of([&] { gh::cone_compare(m, 0.5 * m.neck_lo, 1.0); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of([&] { gh::cone_compare(m, 0.5, 1.5); }), ErrorKind::Domain);
}
