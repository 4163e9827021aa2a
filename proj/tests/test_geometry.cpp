#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wlab/geometry.hpp"
#include "wlab/random.hpp"

using namespace wlab;

namespace {
const GroundSpace kLine = GroundSpace::euclidean(1);
const GroundSpace kPlane = GroundSpace::euclidean(2);
}  // namespace

TEST_CASE("interpolating two point masses walks the segment") {
  const auto curve = GeodesicCurve::between(DiscreteMeasure::dirac(kLine, Point{0.0}),
                                            DiscreteMeasure::dirac(kLine, Point{1.0}),
                                            2.0);
  CHECK(curve.total_length() == doctest::Approx(1.0).epsilon(1e-14));
  const auto mid = curve.at(0.25);
  REQUIRE(mid.is_dirac());
  CHECK(mid.atoms().front().point[0] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("interpolation midpoint of the pitchfork instance") {
  const DiscreteMeasure mu(kLine, {{Point{0.0}, 0.5}, {Point{2.0}, 0.5}});
  const auto nu = DiscreteMeasure::dirac(kLine, Point{1.0});
  const auto curve = GeodesicCurve::between(mu, nu, 2.0);
  CHECK(curve.total_length() == doctest::Approx(1.0).epsilon(1e-14));
  const auto mid = curve.at(0.5);
  CHECK(mid.mass_at(Point{0.5}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mid.mass_at(Point{1.5}) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("interpolation endpoints reproduce the marginals") {
  Rng rng(71);
  const auto mu = random_measure(rng, kPlane);
  const auto nu = random_measure(rng, kPlane);
  const auto curve = GeodesicCurve::between(mu, nu, 2.0);
  CHECK(curve.at(0.0) == mu);
  CHECK(curve.at(curve.total_length()) == nu);
  CHECK_THROWS_AS(curve.at(curve.total_length() * 1.5), std::out_of_range);
  CHECK_THROWS_AS(curve.at(-0.1), std::out_of_range);
}

TEST_CASE("geodesic speed property on sampled parameter pairs") {
  Rng rng(73);
  MeasureGenOptions opts;
  opts.max_atoms = 4;
  for (double p : {1.5, 2.0, 4.0})
    for (int trial = 0; trial < 10; ++trial) {
      const auto mu = random_measure(rng, kPlane, opts);
      const auto nu = random_measure(rng, kPlane, opts);
      const auto curve = GeodesicCurve::between(mu, nu, p);
      const double total = curve.total_length();
      if (total == 0.0) continue;
      for (int s = 0; s < 20; ++s) {
        const double t1 = total * rng.uniform01();
        const double t2 = total * rng.uniform01();
        CHECK(std::abs(wasserstein_distance(curve.at(t1), curve.at(t2), p) -
                       std::abs(t1 - t2)) <= 1e-8);
      }
    }
}

TEST_CASE("dilation basics") {
  Rng rng(79);
  const auto mu = random_measure(rng, kPlane);
  SUBCASE("ratio one is the identity") { CHECK(dilate(mu, Point{0.5, -0.25}, 1.0) == mu); }
  SUBCASE("ratio zero collapses to the center") {
    CHECK(dilate(mu, Point{0.5, -0.25}, 0.0) ==
          DiscreteMeasure::dirac(kPlane, Point{0.5, -0.25}));
  }
  SUBCASE("ratio minus one reflects point masses") {
    CHECK(dilate(DiscreteMeasure::dirac(kPlane, Point{1.0, 0.5}), Point{0.25, 0.25},
                 -1.0) == DiscreteMeasure::dirac(kPlane, Point{-0.5, 0.0}));
  }
}

TEST_CASE("dirac ray endpoints and doubling") {
  Rng rng(83);
  MeasureGenOptions opts;
  opts.max_atoms = 4;
  const auto nu = random_measure(rng, kPlane, opts);
  const Point x{0.125, -0.5};
  const double p = 2.0;
  const double total = dirac_ray_length(x, nu, p);

  CHECK(dirac_ray(x, nu, p, 0.0) == DiscreteMeasure::dirac(kPlane, x));
  CHECK(dirac_ray(x, nu, p, total) == nu);
  const auto doubled = dirac_ray(x, nu, p, 2.0 * total);
  CHECK(doubled == dilate(nu, x, 2.0));
  CHECK(wasserstein_distance(DiscreteMeasure::dirac(kPlane, x), doubled, p) ==
        doctest::Approx(2.0 * total).epsilon(1e-12));
}

TEST_CASE("dirac ray rejects its own apex") {
  const auto apex = DiscreteMeasure::dirac(kPlane, Point{0.0, 0.0});
  CHECK_THROWS_AS(dirac_ray(Point{0.0, 0.0}, apex, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("dirac ray is a geodesic ray on [0, 3T]") {
  Rng rng(89);
  MeasureGenOptions opts;
  opts.max_atoms = 3;
  for (double p : {1.5, 2.0, 4.0})
    for (int trial = 0; trial < 8; ++trial) {
      const auto nu = random_measure(rng, kPlane, opts);
      const Point x{rng.dyadic01(), rng.dyadic01()};
      if (nu.is_dirac() && nu.atoms().front().point == x) continue;
      const double total = dirac_ray_length(x, nu, p);
      for (int s = 0; s < 20; ++s) {
        const double t1 = 3.0 * total * rng.uniform01();
        const double t2 = 3.0 * total * rng.uniform01();
        CHECK(std::abs(wasserstein_distance(dirac_ray(x, nu, p, t1),
                                            dirac_ray(x, nu, p, t2), p) -
                       std::abs(t1 - t2)) <= 1e-8);
      }
    }
}

TEST_CASE("antipodal check: the right-angle pair is strictly beaten") {
  const DiscreteMeasure mu(kPlane, {{Point{1, 0}, 0.5}, {Point{0, 1}, 0.5}});
  const auto report = check_antipodal_plan(mu, Point{0, 0}, 2.0);
  CHECK(report.strictly_beaten);
  CHECK(report.reflection_cost == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(report.optimal_cost == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(report.gap == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("antipodal check: point masses are the only zero-gap cases") {
  const auto report =
      check_antipodal_plan(DiscreteMeasure::dirac(kPlane, Point{0.5, 0.5}),
                           Point{-0.25, 0.0}, 2.0);
  CHECK_FALSE(report.strictly_beaten);
  CHECK(report.gap == doctest::Approx(0.0));
}

TEST_CASE("antipodal check: collinear two-atom supports are beaten too") {
  // Reflection reverses the order of the atoms, and anti-monotone pairings
  // lose for p > 1 even on a line: costs 10 versus the optimal 9.
  const DiscreteMeasure mu(kLine, {{Point{1.0}, 0.5}, {Point{2.0}, 0.5}});
  const auto report = check_antipodal_plan(mu, Point{0.0}, 2.0);
  CHECK(report.reflection_cost == doctest::Approx(10.0).epsilon(1e-13));
  CHECK(report.optimal_cost == doctest::Approx(9.0).epsilon(1e-13));
  CHECK(report.strictly_beaten);
  // Brute force confirms on the 2x2 instance.
  CHECK(brute_force_solve(mu, dilate(mu, Point{0.0}, -1.0), 2.0).cost ==
        doctest::Approx(9.0).epsilon(1e-13));
}

TEST_CASE("antipodal gap is positive on random non-degenerate planar instances") {
  Rng rng(97);
  MeasureGenOptions opts;
  opts.min_atoms = 2;
  opts.max_atoms = 4;
  for (int trial = 0; trial < 50; ++trial) {
    const auto mu = random_measure(rng, kPlane, opts);
    const Point x{rng.dyadic01(), rng.dyadic01()};
    CHECK(check_antipodal_plan(mu, x, 2.0).gap > 1e-10);
  }
}

TEST_CASE("barycenter closed forms") {
  CHECK(barycenter(DiscreteMeasure(kPlane, {{Point{0, 0}, 0.5}, {Point{2, 0}, 0.5}})) ==
        Point{1, 0});
  CHECK(barycenter(DiscreteMeasure::dirac(kPlane, Point{0.25, -0.75})) ==
        Point{0.25, -0.75});
  CHECK(barycenter(DiscreteMeasure(kLine, {{Point{0.0}, 0.3}, {Point{1.0}, 0.7}})) ==
        Point{0.7});
}

TEST_CASE("barycenter minimizes the quadratic potential (grid scan oracle)") {
  Rng rng(101);
  const auto mu = random_measure(rng, kLine);
  const Point m = barycenter(mu);
  auto potential2 = [&](double x) {
    double acc = 0.0;
    for (const auto& a : mu.atoms()) {
      const double d = a.point[0] - x;
      acc += a.weight * d * d;
    }
    return acc;
  };
  const double at_mean = potential2(m[0]);
  for (int i = -50; i <= 50; ++i)
    CHECK(at_mean <= potential2(m[0] + i * 0.04) + 1e-15);
}

TEST_CASE("barycenter commutes with translation exactly on dyadic inputs") {
  Rng rng(103);
  for (int trial = 0; trial < 50; ++trial) {
    const auto mu = random_measure(rng, kPlane);
    const Point v{-1.0 + 2.0 * rng.dyadic01(), -1.0 + 2.0 * rng.dyadic01()};
    CHECK(barycenter(translate(mu, v)) == barycenter(mu) + v);
  }
}

TEST_CASE("translation identity: point masses") {
  const auto mu = DiscreteMeasure::dirac(kPlane, Point{0, 0});
  const Point v{0.75, -0.5};
  const auto report = check_translation_identity(mu, mu, v);
  CHECK(report.identity_holds);
  CHECK(report.lhs == doctest::Approx(squared_norm(v)).epsilon(1e-13));
  CHECK(report.rhs == doctest::Approx(squared_norm(v)).epsilon(1e-13));
}

TEST_CASE("translation identity on random instances") {
  Rng rng(107);
  MeasureGenOptions opts;
  opts.max_atoms = 4;
  for (int trial = 0; trial < 60; ++trial) {
    const auto mu = random_measure(rng, kPlane, opts);
    const auto nu = random_measure(rng, kPlane, opts);
    const Point v{-1.0 + 2.0 * rng.dyadic01(), -1.0 + 2.0 * rng.dyadic01()};
    CHECK(check_translation_identity(mu, nu, v).identity_holds);
  }
}

TEST_CASE("translation criterion detects translates") {
  Rng rng(109);
  const auto mu = random_measure(rng, kPlane);
  const Point v{0.5, 0.25};
  const auto report = check_translation_identity(mu, translate(mu, v), v);
  CHECK(report.detects_translate);
  CHECK(report.distance == doctest::Approx(norm(v)).epsilon(1e-10));
}

TEST_CASE("orthogonality identity: the cross instance") {
  const DiscreteMeasure mu(kPlane, {{Point{-1, 0}, 0.5}, {Point{1, 0}, 0.5}});
  const DiscreteMeasure nu(kPlane, {{Point{0, -2}, 0.5}, {Point{0, 2}, 0.5}});
  const AffineSubspace l{Point{0, 0}, {Point{1, 0}}};
  const AffineSubspace m{Point{0, 0}, {Point{0, 1}}};
  const auto report = check_orthogonality(mu, nu, l, m);
  CHECK(report.supports_contained);
  CHECK(report.subspaces_orthogonal);
  CHECK(report.identity_holds);
  CHECK(report.lhs == doctest::Approx(5.0).epsilon(1e-13));
  CHECK(report.rhs == doctest::Approx(5.0).epsilon(1e-13));
  // Every coupling costs 5: the brute-force optimum agrees.
  CHECK(brute_force_solve(mu, nu, 2.0).cost == doctest::Approx(5.0).epsilon(1e-13));
}

TEST_CASE("orthogonality identity fails for a non-dirac measure against itself") {
  const DiscreteMeasure mu(kPlane, {{Point{-1, 0}, 0.5}, {Point{1, 0}, 0.5}});
  const AffineSubspace l{Point{0, 0}, {Point{1, 0}}};
  const auto report = check_orthogonality(mu, mu, l, l);
  CHECK_FALSE(report.identity_holds);
  CHECK(report.lhs == doctest::Approx(0.0));
  CHECK(report.lhs_strictly_below);
}

TEST_CASE("orthogonality identity holds trivially for two point masses") {
  const auto mu = DiscreteMeasure::dirac(kPlane, Point{1, 0});
  const auto nu = DiscreteMeasure::dirac(kPlane, Point{0, 1});
  const AffineSubspace l{Point{1, 0}, {}};
  const AffineSubspace m{Point{0, 1}, {}};
  const auto report = check_orthogonality(mu, nu, l, m);
  CHECK(report.supports_contained);
  CHECK(report.subspaces_orthogonal);  // empty direction sets are orthogonal
  CHECK(report.identity_holds);
}

TEST_CASE("ratio point mixtures and membership") {
  const GroundSpace snow = GroundSpace::powered_euclidean(1, 0.5);
  SUBCASE("two point masses at lambda = 1/2") {
    const auto mu = DiscreteMeasure::dirac(snow, Point{0.0});
    const auto nu = DiscreteMeasure::dirac(snow, Point{1.0});
    const auto eta = ratio_point(mu, nu, 0.5);
    CHECK(eta.mass_at(Point{0.0}) == 0.5);
    CHECK(eta.mass_at(Point{1.0}) == 0.5);
    const auto report = check_ratio_membership(mu, nu, 0.5, eta, 1.0);
    CHECK(report.member);
    CHECK(report.d_mu_nu == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("equal measures give zero distances at every lambda") {
    const DiscreteMeasure mu(snow, {{Point{0.0}, 0.5}, {Point{0.5}, 0.5}});
    for (double lambda : {0.25, 0.5, 0.75}) {
      const auto eta = ratio_point(mu, mu, lambda);
      CHECK(eta == mu);
      const auto report = check_ratio_membership(mu, mu, lambda, eta, 1.0);
      CHECK(report.member);
      CHECK(report.d_mu_nu == 0.0);
    }
  }
  SUBCASE("singleton residual mixtures verified by the solver") {
    const DiscreteMeasure mu(snow, {{Point{0.25}, 0.5}, {Point{0.0}, 0.5}});
    const DiscreteMeasure nu(snow, {{Point{0.25}, 0.5}, {Point{1.0}, 0.5}});
    const auto report =
        check_ratio_membership(mu, nu, 0.25, ratio_point(mu, nu, 0.25), 1.0);
    CHECK(report.member);
    CHECK(report.d_mu_nu == doctest::Approx(0.5).epsilon(1e-13));
  }
  SUBCASE("lambda outside (0,1) is rejected") {
    const auto mu = DiscreteMeasure::dirac(snow, Point{0.0});
    CHECK_THROWS_AS(ratio_point(mu, mu, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ratio_point(mu, mu, 1.0), std::invalid_argument);
  }
}

TEST_CASE("mixtures never overshoot the ratio distances at p = 1 costs") {
  const GroundSpace snow = GroundSpace::powered_euclidean(1, 0.5);
  Rng rng(113);
  MeasureGenOptions opts;
  opts.box_lo = 0.0;
  opts.box_hi = 1.0;
  opts.max_atoms = 4;
  for (int trial = 0; trial < 60; ++trial) {
    const auto mu = random_measure(rng, snow, opts);
    const auto nu = random_measure(rng, snow, opts);
    const double lambda = 0.125 + 0.75 * rng.dyadic01(8);
    const auto eta = ratio_point(mu, nu, lambda);
    const double d = wasserstein_distance(mu, nu, 1.0);
    CHECK(wasserstein_distance(mu, eta, 1.0) <= lambda * d + 1e-9);
    CHECK(wasserstein_distance(eta, nu, 1.0) <= (1.0 - lambda) * d + 1e-9);
  }
}
