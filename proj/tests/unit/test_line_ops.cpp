#include "doctest.h"
#include "polyfield/line_ops.hpp"

#include <cmath>
#include <vector>

using namespace polyfield;

TEST_CASE("field context totals") {
  const FieldContext ctx(ConvexDomain::unit_square(), ActivityMeasure::homogeneous(1.0));
  CHECK(ctx.line_mass() == doctest::Approx(4.0));
  CHECK(ctx.crossing_mass() == doctest::Approx(kPi));
  CHECK(ctx.diameter() == doctest::Approx(std::sqrt(2.0)));

  const FieldContext rect(ConvexDomain::unit_square(), ActivityMeasure::rectangular_standard());
  CHECK(rect.line_mass() == doctest::Approx(2.0));
  CHECK(rect.crossing_mass() == doctest::Approx(1.0));

  Rng g(1);
  const FieldContext dens(ConvexDomain::unit_square(),
                          ActivityMeasure::density([](double, double) { return 1.0; }, 1.0, -1, 2),
                          g, 200000);
  CHECK(dens.crossing_mass() == doctest::Approx(kPi).epsilon(0.02));
  CHECK_THROWS_AS(FieldContext(ConvexDomain::unit_square(),
                               ActivityMeasure::density([](double, double) { return 1.0; }, 1.0, -1, 2)),
                  std::domain_error);
}

TEST_CASE("poisson line counts") {
  Rng g(9);
  const FieldContext ctx(ConvexDomain::unit_square(), ActivityMeasure::homogeneous(1.0));
  double s = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) s += static_cast<double>(sample_poisson_lines(g, ctx).size());
  CHECK(s / n == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("interior birth sites follow the crossing intensity") {
  Rng g(10);
  const FieldContext ctx(ConvexDomain::unit_square(), ActivityMeasure::homogeneous(1.0));
  double count = 0.0;
  int in_left_half = 0, total = 0;
  const int n = 8000;
  for (int i = 0; i < n; ++i) {
    const auto sites = sample_interior_births(g, ctx);
    count += static_cast<double>(sites.size());
    for (const auto& s : sites) {
      CHECK(ctx.domain().contains(s.p));
      CHECK(s.l1.contains(s.p, 1e-7));
      CHECK(s.l2.contains(s.p, 1e-7));
      ++total;
      if (s.p.x < 0.5) ++in_left_half;
    }
  }
  CHECK(count / n == doctest::Approx(kPi).epsilon(0.03));
  // homogeneous intensity: half the sites on each side
  CHECK(static_cast<double>(in_left_half) / total == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("boundary sites sit on the boundary at the sweep entry") {
  Rng g(11);
  const FieldContext ctx(ConvexDomain::unit_square(), ActivityMeasure::rectangular_standard());
  for (int i = 0; i < 300; ++i) {
    for (const auto& s : sample_boundary_births(g, ctx)) {
      CHECK(ctx.domain().body().boundary_dist(s.p) < 1e-9);
      if (s.l.is_vertical()) CHECK(s.p.y == doctest::Approx(1.0));  // swept top to bottom
      if (s.l.is_horizontal()) CHECK(s.p.x == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("segment mass along lines") {
  const auto homog = ActivityMeasure::homogeneous(2.0);
  const Line l = Line::through_points({0, 0}, {1, 1});
  CHECK(segment_line_mass(homog, l, 0.0, 3.0) == doctest::Approx(12.0));

  const auto rect = ActivityMeasure::rectangular_standard();
  const Line diag = Line::through_points({0, 0}, {3, 4});
  const double s1 = diag.coord_of(Vec2{3, 4}) - diag.coord_of(Vec2{0, 0});
  CHECK(segment_line_mass(rect, diag, diag.coord_of(Vec2{0, 0}), diag.coord_of(Vec2{0, 0}) + s1) ==
        doctest::Approx(7.0));
}

TEST_CASE("event clock inversion") {
  const auto homog = ActivityMeasure::homogeneous(2.0);
  const Line l = Line::horizontal(0.0);
  // homogeneous clock runs at rate 2c per unit length
  CHECK(invert_segment_mass(homog, l, 0.0, +1, 2.0, 10.0) == doctest::Approx(0.5));
  CHECK(std::isinf(invert_segment_mass(homog, l, 0.0, +1, 200.0, 10.0)));

  const auto rect = ActivityMeasure::rectangular_standard();
  const Line diag = Line::through_points({0, 0}, {1, 1});
  // unit diagonal direction crosses verticals and horizontals at rate sqrt(2)
  CHECK(invert_segment_mass(rect, diag, 0.0, +1, 1.0, 10.0) == doctest::Approx(1.0 / std::sqrt(2.0)));

  // piecewise measure goes through bisection and matches the forward mass
  const auto pl = ActivityMeasure::rectangular(OffsetMeasure::piecewise_linear_cdf({0, 1, 2}, {0, 1, 3}),
                                               OffsetMeasure::lebesgue(1.0));
  const Line h = Line::horizontal(0.5);
  const double t = invert_segment_mass(pl, h, h.coord_of(Vec2{0, 0.5}), +1, 1.7, 10.0);
  CHECK(segment_line_mass(pl, h, h.coord_of(Vec2{0, 0.5}), h.coord_of(Vec2{0, 0.5}) + t) ==
        doctest::Approx(1.7).epsilon(1e-6));
}

TEST_CASE("update lines pass through the event point and avoid the current direction") {
  Rng g(12);
  const auto homog = ActivityMeasure::homogeneous(1.0);
  const Vec2 p{0.3, 0.4};
  double min_gap = 10.0;
  for (int i = 0; i < 5000; ++i) {
    const Line l = sample_update_line(g, homog, p, {1, 0});
    CHECK(l.contains(p, 1e-9));
    min_gap = std::min(min_gap, std::abs(std::sin(l.phi + 0.0)));
  }
  // the density vanishes where the new line would be parallel to u = (1,0),
  // i.e. phi near 0; the angle marginal should put ~sin(phi) mass there
  CHECK(min_gap < 0.2);

  const auto rect = ActivityMeasure::rectangular_standard();
  int vertical = 0;
  const int n = 20000;
  const Vec2 u = Vec2{1, 2}.normalized();
  for (int i = 0; i < n; ++i) {
    const Line l = sample_update_line(g, rect, p, u);
    CHECK(l.contains(p, 1e-9));
    if (l.is_vertical()) ++vertical;
  }
  // P(vertical) = |u.x| / (|u.x| + |u.y|) = 1/3
  CHECK(static_cast<double>(vertical) / n == doctest::Approx(1.0 / 3).epsilon(0.05));

  // travelling along a vertical line never rediscovers a vertical line
  for (int i = 0; i < 200; ++i) CHECK(sample_update_line(g, rect, p, {0, -1}).is_horizontal());
}

TEST_CASE("update angle marginal matches |sin| weighting") {
  Rng g(13);
  const auto homog = ActivityMeasure::homogeneous(1.0);
  // with u = (1,0): density prop to |sin(phi)| on [0,pi); P(phi < pi/2) = 1/2,
  // E[phi] = pi/2, P(phi < pi/3) = (1-cos(pi/3))/2 = 1/4
  int below = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i)
    if (sample_update_line(g, homog, {0, 0}, {1, 0}).phi < kPi / 3) ++below;
  CHECK(static_cast<double>(below) / n == doctest::Approx(0.25).epsilon(0.04));
}
