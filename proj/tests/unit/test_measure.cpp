#include "doctest.h"
#include "polyfield/measure.hpp"

#include <cmath>

using namespace polyfield;

TEST_CASE("offset measure basics") {
  const auto leb = OffsetMeasure::lebesgue(2.0);
  CHECK(leb.mass(0, 3) == doctest::Approx(6.0));
  CHECK(leb.density_at(17.0) == doctest::Approx(2.0));

  const auto pl = OffsetMeasure::piecewise_linear_cdf({0, 1, 2}, {0, 1, 3});
  CHECK(pl.density_at(0.5) == doctest::Approx(1.0));
  CHECK(pl.density_at(1.5) == doctest::Approx(2.0));
  CHECK(pl.density_at(2.5) == doctest::Approx(0.0));
  CHECK(pl.mass(0.5, 1.5) == doctest::Approx(1.5));
  CHECK(pl.mass(-5, 5) == doctest::Approx(3.0));
  CHECK(pl.sup_density() == doctest::Approx(2.0));

  const auto dens = OffsetMeasure::density([](double x) { return x; }, 2.0, 0.0, 2.0);
  CHECK(dens.mass(0, 2) == doctest::Approx(2.0));
  CHECK(dens.mass(1, 2) == doctest::Approx(1.5));
}

TEST_CASE("atoms are rejected") {
  CHECK_THROWS_AS(OffsetMeasure::piecewise_linear_cdf({0, 1, 1, 2}, {0, 1, 2, 3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(OffsetMeasure::piecewise_linear_cdf({0, 1, 2}, {0, 2, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(OffsetMeasure::lebesgue(0.0), std::invalid_argument);
}

TEST_CASE("offset sampling matches the measure") {
  Rng g(101);
  const auto pl = OffsetMeasure::piecewise_linear_cdf({0, 1, 2}, {0, 1, 3});
  // mean of the normalized density: (1/3) int x dx on [0,1] + (2/3) int ... = 7/6
  double s = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) s += pl.sample(g, 0, 2);
  CHECK(s / n == doctest::Approx(0.5 / 3 + 2.0 * 1.5 / 3).epsilon(0.01));

  // restricted to [1, 2] the density is uniform
  s = 0.0;
  for (int i = 0; i < n; ++i) s += pl.sample(g, 1, 2);
  CHECK(s / n == doctest::Approx(1.5).epsilon(0.01));

  const auto dens = OffsetMeasure::density([](double x) { return x; }, 2.0, 0.0, 2.0);
  s = 0.0;
  for (int i = 0; i < n; ++i) s += dens.sample(g, 0, 2);
  CHECK(s / n == doctest::Approx(4.0 / 3).epsilon(0.01));
}

TEST_CASE("forward and generalized inverse") {
  const auto pl = OffsetMeasure::piecewise_linear_cdf({0, 1, 2}, {0, 1, 3});
  CHECK(pl.forward(0, 1.5) == doctest::Approx(2.0));
  CHECK(pl.inverse(0, 2.0, 2) == doctest::Approx(1.5));
  for (double x : {0.2, 0.9, 1.1, 1.9})
    CHECK(pl.inverse(0, pl.forward(0, x), 2) == doctest::Approx(x));

  const auto dens = OffsetMeasure::density([](double x) { return x; }, 2.0, 0.0, 2.0);
  for (double x : {0.5, 1.0, 1.7})
    CHECK(dens.inverse(0, dens.forward(0, x), 2) == doctest::Approx(x).epsilon(1e-6));

  const auto leb = OffsetMeasure::lebesgue(2.0);
  CHECK(leb.inverse(1.0, 4.0, 10) == doctest::Approx(3.0));
}

TEST_CASE("hitting mass of convex bodies") {
  const auto homog = ActivityMeasure::homogeneous(1.0);
  // mass of lines hitting a segment is twice its length
  CHECK(homog.hitting_mass(Segment{{0, 0}, {3, 4}}) == doctest::Approx(10.0));
  // and for a full-dimensional body it is the perimeter
  CHECK(homog.hitting_mass(ConvexBody::disk({2, 1}, 1.0)) == doctest::Approx(2 * kPi));
  CHECK(homog.hitting_mass(ConvexBody::rectangle({0, 0}, {1, 1})) == doctest::Approx(4.0));
  CHECK(homog.hitting_mass(ConvexBody::point({5, 5})) == 0.0);

  const auto homog3 = ActivityMeasure::homogeneous(3.0);
  CHECK(homog3.hitting_mass(Segment{{0, 0}, {1, 0}}) == doctest::Approx(6.0));

  const auto rect = ActivityMeasure::rectangular_standard();
  CHECK(rect.hitting_mass(Segment{{0, 0}, {3, 4}}) == doctest::Approx(7.0));
  CHECK(rect.hitting_mass(ConvexBody::rectangle({0, 0}, {1, 1})) == doctest::Approx(2.0));
  CHECK(rect.hitting_mass(ConvexBody::point({0.5, 0.5})) == 0.0);
}

TEST_CASE("general density reproduces the homogeneous mass by quadrature") {
  const auto dens = ActivityMeasure::density([](double, double) { return 1.0; }, 1.0, -1.0, 2.0);
  CHECK(dens.hitting_mass(ConvexBody::rectangle({0, 0}, {1, 1})) == doctest::Approx(4.0).epsilon(1e-5));
  CHECK(dens.hitting_mass(Segment{{0.2, 0.2}, {0.7, 0.6}}) ==
        doctest::Approx(2 * std::hypot(0.5, 0.4)).epsilon(1e-5));
}

TEST_CASE("crossing intensity") {
  CHECK(ActivityMeasure::homogeneous(1.0).birth_intensity({0, 0}) == doctest::Approx(kPi));
  CHECK(ActivityMeasure::homogeneous(2.0).birth_intensity({3, 3}) == doctest::Approx(4 * kPi));
  CHECK(ActivityMeasure::rectangular_standard().birth_intensity({0.3, 0.8}) == doctest::Approx(1.0));

  const auto dens = ActivityMeasure::density([](double, double) { return 1.0; }, 1.0, -3.0, 3.0);
  CHECK(dens.birth_intensity({0.5, 0.5}) == doctest::Approx(kPi).epsilon(1e-4));
}

TEST_CASE("crossing totals over a domain") {
  const auto sq = ConvexDomain::unit_square();
  CHECK(ActivityMeasure::homogeneous(1.0).birth_total(sq) == doctest::Approx(kPi));
  CHECK(ActivityMeasure::rectangular_standard().birth_total(sq) == doctest::Approx(1.0));
  CHECK(ActivityMeasure::rectangular_standard().birth_total(
            ConvexDomain::rectangle({0, 0}, {2, 3})) == doctest::Approx(6.0));

  // non-rectangular domain goes through quadrature
  const auto disk = ConvexDomain::disk({0, 0}, 1.0);
  CHECK(ActivityMeasure::rectangular_standard().birth_total(disk) == doctest::Approx(kPi).epsilon(1e-5));

  const auto pl = OffsetMeasure::piecewise_linear_cdf({0, 1}, {0, 2});
  const auto rect = ActivityMeasure::rectangular(pl, OffsetMeasure::lebesgue(1.0));
  CHECK(rect.birth_total(sq) == doctest::Approx(2.0));
}

TEST_CASE("monte carlo crossing total agrees with the closed form") {
  Rng g(2024);
  const auto sq = ConvexDomain::unit_square();
  const auto dens = ActivityMeasure::density([](double, double) { return 1.0; }, 1.0, -1.0, 2.0);
  const auto est = dens.birth_total_mc(sq, g, 200000);
  CHECK(std::abs(est.value - kPi) < 4 * est.se + 1e-3);
  CHECK(est.se < 0.05);
}

TEST_CASE("hitting samples land on the body") {
  Rng g(5);
  const auto sq = ConvexDomain::unit_square();

  const auto homog = ActivityMeasure::homogeneous(1.0);
  for (int i = 0; i < 200; ++i) {
    const Line l = homog.sample_hitting(g, sq);
    CHECK(sq.chord(l).has_value());
  }

  const auto rect = ActivityMeasure::rectangular_standard();
  int vertical = 0;
  for (int i = 0; i < 2000; ++i) {
    const Line l = rect.sample_hitting(g, sq);
    CHECK(sq.chord(l).has_value());
    CHECK((l.is_vertical() || l.is_horizontal()));
    if (l.is_vertical()) ++vertical;
  }
  CHECK(vertical > 850);
  CHECK(vertical < 1150);
}

TEST_CASE("hitting sample offsets are distributed by support width") {
  // For the invariant measure, the chord midpoint abscissa of vertical-ish
  // lines through the unit square is uniform; check the offset marginal of a
  // 45-degree family instead, which has width sqrt(2) triangle... keep it
  // simple: the offset of sampled lines restricted to near-vertical angles
  // should be close to uniform on the xspan.
  Rng g(17);
  const auto homog = ActivityMeasure::homogeneous(1.0);
  const auto sq = ConvexDomain::unit_square();
  int low = 0, total = 0;
  for (int i = 0; i < 60000; ++i) {
    const Line l = homog.sample_hitting(g, sq);
    if (std::abs(l.phi - kPi / 2) < 0.1) {
      ++total;
      if (l.rho < 0.5) ++low;
    }
  }
  CHECK(total > 1000);
  CHECK(static_cast<double>(low) / total == doctest::Approx(0.5).epsilon(0.06));
}

TEST_CASE("rectangular transform straightens the field") {
  const auto pl = OffsetMeasure::piecewise_linear_cdf({0, 1, 2}, {0, 1, 3});
  const auto m = ActivityMeasure::rectangular(pl, OffsetMeasure::lebesgue(2.0));
  const RectangularTransform t(m, {0, 0}, {2, 1});
  CHECK(t.image_hi().x == doctest::Approx(3.0));
  CHECK(t.image_hi().y == doctest::Approx(2.0));
  const Vec2 p{1.5, 0.25};
  const Vec2 q = t.forward(p);
  CHECK(q.x == doctest::Approx(2.0));
  CHECK(q.y == doctest::Approx(0.5));
  const Vec2 back = t.inverse(q);
  CHECK(back.x == doctest::Approx(p.x));
  CHECK(back.y == doctest::Approx(p.y));
}

TEST_CASE("measure kind guards") {
  const auto rect = ActivityMeasure::rectangular_standard();
  CHECK_THROWS_AS(rect.density_at(Line::vertical(0.0)), std::domain_error);
  CHECK_THROWS_AS(ActivityMeasure::homogeneous(1.0).vertical_offsets(), std::domain_error);
  const auto dens = ActivityMeasure::density([](double, double) { return 1.0; }, 1.0, 0.0, 1.0);
  CHECK_THROWS_AS(dens.birth_total(ConvexDomain::unit_square()), std::domain_error);
}
