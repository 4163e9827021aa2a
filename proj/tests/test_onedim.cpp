#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wlab/onedim.hpp"
#include "wlab/random.hpp"

using namespace wlab;

namespace {
const GroundSpace kLine = GroundSpace::euclidean(1);

DiscreteMeasure on_line(std::vector<WeightedAtom> atoms) {
  return DiscreteMeasure(kLine, std::move(atoms));
}

MeasureGenOptions unit_box() {
  MeasureGenOptions opts;
  opts.box_lo = 0.0;
  opts.box_hi = 1.0;
  return opts;
}
}  // namespace

TEST_CASE("cdf of a point mass is a single step") {
  const auto f = cdf(DiscreteMeasure::dirac(kLine, Point{0.3}));
  CHECK(f(0.0) == 0.0);
  CHECK(f(0.2999) == 0.0);
  CHECK(f(0.3) == 1.0);
  CHECK(f(1.0) == 1.0);
}

TEST_CASE("cdf of the endpoint pair") {
  const auto f = cdf(on_line({{Point{0.0}, 0.5}, {Point{1.0}, 0.5}}));
  CHECK(f(0.0) == 0.5);
  CHECK(f(0.999) == 0.5);
  CHECK(f(1.0) == 1.0);
}

TEST_CASE("cdf levels of a two-atom measure") {
  const auto f = cdf(on_line({{Point{0.2}, 0.3}, {Point{0.9}, 0.7}}));
  CHECK(f(0.1) == 0.0);
  CHECK(f(0.2) == 0.3);
  CHECK(f(0.5) == 0.3);
  CHECK(f(0.9) == 1.0);
}

TEST_CASE("cdf rejects support outside the unit interval" * doctest::skip(false)) {
  CHECK_THROWS_AS(cdf(DiscreteMeasure::dirac(kLine, Point{1.5})), std::invalid_argument);
}

TEST_CASE("quantile of a point-mass cdf keeps the boundary conventions") {
  SUBCASE("interior t") {
    const auto g = quantile(cdf(DiscreteMeasure::dirac(kLine, Point{0.3})));
    CHECK(g(0.0) == 0.3);
    CHECK(g(0.99) == 0.3);
    CHECK(g(1.0) == 1.0);
  }
  SUBCASE("t = 1 gives the constant 1") {
    const auto g = quantile(cdf(DiscreteMeasure::dirac(kLine, Point{1.0})));
    CHECK(g(0.0) == 1.0);
    CHECK(g(0.5) == 1.0);
    CHECK(g(1.0) == 1.0);
  }
}

TEST_CASE("quantile of the endpoint pair steps at one half") {
  const auto g = quantile(cdf(on_line({{Point{0.0}, 0.5}, {Point{1.0}, 0.5}})));
  CHECK(g(0.0) == 0.0);
  CHECK(g(0.49) == 0.0);
  CHECK(g(0.5) == 1.0);
  CHECK(g(1.0) == 1.0);
}

TEST_CASE("quantile swaps the two discretized-identity staircases") {
  // Upper staircase: uniform on {0, 1/4, 1/2, 3/4}. Lower: uniform on
  // {1/4, ..., 1}. They are each other's images and double back exactly.
  const auto upper = cdf(on_line({{Point{0.0}, 0.25},
                                  {Point{0.25}, 0.25},
                                  {Point{0.5}, 0.25},
                                  {Point{0.75}, 0.25}}));
  const auto lower = cdf(on_line({{Point{0.25}, 0.25},
                                  {Point{0.5}, 0.25},
                                  {Point{0.75}, 0.25},
                                  {Point{1.0}, 0.25}}));
  CHECK(quantile(upper) == lower);
  CHECK(quantile(lower) == upper);
  CHECK(quantile(quantile(upper)) == upper);
}

TEST_CASE("quantile is an exact involution on random step cdfs") {
  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = cdf(random_measure(rng, kLine, unit_box()));
    CHECK(quantile(quantile(f)) == f);
  }
}

TEST_CASE("vallender endpoints: unit separation") {
  CHECK(vallender_distance(DiscreteMeasure::dirac(kLine, Point{0.0}),
                           DiscreteMeasure::dirac(kLine, Point{1.0})) == 1.0);
}

TEST_CASE("vallender midpoint versus the endpoint pair is one half") {
  CHECK(vallender_distance(DiscreteMeasure::dirac(kLine, Point{0.5}),
                           on_line({{Point{0.0}, 0.5}, {Point{1.0}, 0.5}})) == 0.5);
}

TEST_CASE("vallender of a measure with itself vanishes") {
  const auto mu = on_line({{Point{0.1}, 0.4}, {Point{0.6}, 0.6}});
  CHECK(vallender_distance(mu, mu) == 0.0);
}

TEST_CASE("vallender against delta_t and its flip integrates to t^2 + (1-t)^2") {
  Rng rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const double t = rng.dyadic01();
    const auto mu = DiscreteMeasure::dirac(kLine, Point{t});
    CHECK(vallender_distance(mu, flip(mu)) ==
          doctest::Approx(t * t + (1 - t) * (1 - t)).epsilon(1e-14));
  }
}

TEST_CASE("vallender agrees with the exact solver") {
  Rng rng(47);
  for (int trial = 0; trial < 200; ++trial) {
    const auto mu = random_measure(rng, kLine, unit_box());
    const auto nu = random_measure(rng, kLine, unit_box());
    CHECK(std::abs(vallender_distance(mu, nu) - wasserstein_distance(mu, nu, 1.0)) <=
          1e-10);
  }
}

TEST_CASE("flip splits interior point masses to the endpoints") {
  const auto image = flip(DiscreteMeasure::dirac(kLine, Point{0.3}));
  REQUIRE(image.size() == 2);
  CHECK(image.mass_at(Point{0.0}) == 0.3);
  CHECK(image.mass_at(Point{1.0}) == 0.7);
}

TEST_CASE("flip of the endpoint pair is the midpoint mass") {
  CHECK(flip(on_line({{Point{0.0}, 0.5}, {Point{1.0}, 0.5}})) ==
        DiscreteMeasure::dirac(kLine, Point{0.5}));
}

TEST_CASE("flip exchanges the two endpoint point masses") {
  // The boundary conventions send delta_0 to delta_1 and back; this is what
  // makes the involution close up at t = 0 and t = 1.
  const auto d0 = DiscreteMeasure::dirac(kLine, Point{0.0});
  const auto d1 = DiscreteMeasure::dirac(kLine, Point{1.0});
  CHECK(flip(d0) == d1);
  CHECK(flip(d1) == d0);
  CHECK(flip(flip(d0)) == d0);
}

TEST_CASE("flip is an exact involution on dyadic measures") {
  Rng rng(53);
  for (int trial = 0; trial < 300; ++trial) {
    const auto mu = random_measure(rng, kLine, unit_box());
    CHECK(flip(flip(mu)) == mu);
  }
}

TEST_CASE("flip preserves W1 distances") {
  Rng rng(59);
  for (int trial = 0; trial < 100; ++trial) {
    const auto mu = random_measure(rng, kLine, unit_box());
    const auto nu = random_measure(rng, kLine, unit_box());
    CHECK(std::abs(wasserstein_distance(flip(mu), flip(nu), 1.0) -
                   wasserstein_distance(mu, nu, 1.0)) <= 1e-10);
  }
}

TEST_CASE("flipped point masses admit no transport map in either direction") {
  // For 0 < s < t < 1 with distinct endpoint weights, every coupling of the
  // two-point images must split one atom: all optimal vertices carry at
  // least three support cells.
  const double s = 0.25, t = 0.625;
  const auto a = flip(DiscreteMeasure::dirac(kLine, Point{s}));
  const auto b = flip(DiscreteMeasure::dirac(kLine, Point{t}));
  for (const auto& plan : brute_force_optimal_vertices(a, b, 1.0))
    CHECK(plan.support(1e-14).size() >= 3);
  for (const auto& plan : brute_force_optimal_vertices(b, a, 1.0))
    CHECK(plan.support(1e-14).size() >= 3);
}

TEST_CASE("snowflake identity: point masses") {
  Rng rng(61);
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    const double s = rng.dyadic01(), t = rng.dyadic01();
    const auto report = snowflake_check(DiscreteMeasure::dirac(kLine, Point{s}),
                                        DiscreteMeasure::dirac(kLine, Point{t}), p);
    CHECK(report.pass);
    CHECK(report.powered_cost == doctest::Approx(std::abs(s - t)).epsilon(1e-12));
  }
}

TEST_CASE("snowflake identity: delta_t against its flip at p = 2") {
  const double t = 0.375;
  const auto mu = DiscreteMeasure::dirac(kLine, Point{t});
  const auto report = snowflake_check(mu, flip(mu), 2.0);
  CHECK(report.pass);
  CHECK(report.powered_cost ==
        doctest::Approx(t * t + (1 - t) * (1 - t)).epsilon(1e-13));
}

TEST_CASE("snowflake identity on random five-atom pairs") {
  Rng rng(67);
  MeasureGenOptions opts = unit_box();
  opts.min_atoms = 5;
  opts.max_atoms = 5;
  for (double p : {1.5, 2.0, 3.0})
    for (int trial = 0; trial < 40; ++trial) {
      const auto mu = random_measure(rng, kLine, opts);
      const auto nu = random_measure(rng, kLine, opts);
      CHECK(snowflake_check(mu, nu, p).pass);
    }
}
