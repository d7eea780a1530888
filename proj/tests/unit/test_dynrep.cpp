#include "doctest.h"
#include "polyfield/dynrep.hpp"
#include "polyfield/stats.hpp"

#include <cmath>
#include <vector>

using namespace polyfield;

namespace {

// Proper crossings of the open probe segment by config edges.  Touches at the
// probe endpoints are excluded; everything else a sampled field produces at a
// generic probe is a transversal interior crossing.
int probe_crossings(const PolygonalConfig& c, const Segment& probe) {
  int n = 0;
  for (const auto& e : c.edges()) {
    const auto hit = segment_intersection(probe, e.seg);
    if (hit.kind != SegIntersection::Kind::Point) continue;
    if (dist(hit.p, probe.a) < 1e-9 || dist(hit.p, probe.b) < 1e-9) continue;
    ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("sampled fields are admissible") {
  const struct {
    ConvexDomain d;
    ActivityMeasure m;
    int n;
  } setups[] = {
      {ConvexDomain::unit_square(), ActivityMeasure::homogeneous(1.0), 150},
      {ConvexDomain::unit_square(), ActivityMeasure::rectangular_standard(), 200},
      {ConvexDomain::disk({0.5, 0.5}, 0.5), ActivityMeasure::homogeneous(1.5), 100},
      {ConvexDomain::rectangle({0.0, 0.0}, {2.0, 1.0}), ActivityMeasure::rectangular_standard(), 100},
  };
  int stream = 0;
  for (const auto& s : setups) {
    Rng g(271828, static_cast<std::uint64_t>(++stream));
    const FieldContext ctx(s.d, s.m);
    long particles = 0, updates = 0, collisions = 0;
    for (int i = 0; i < s.n; ++i) {
      const auto r = sample_dynrep(g, ctx);
      particles += r.particles;
      updates += r.updates;
      collisions += r.collisions;
      const auto rep = check_admissible(r.config, s.d);
      if (!rep.ok) {
        CAPTURE(i);
        CAPTURE(rep.violations.size());
        REQUIRE(rep.ok);
      }
      for (const auto& e : r.config.edges()) {
        CHECK(s.d.body().contains(e.seg.a, 1e-7));
        CHECK(s.d.body().contains(e.seg.b, 1e-7));
      }
    }
    // The engine must actually exercise all three event types.
    CHECK(particles > 0);
    CHECK(updates > 0);
    CHECK(collisions > 0);
  }
}

TEST_CASE("same seed reproduces the field, different seeds do not") {
  const FieldContext ctx(ConvexDomain::unit_square(), ActivityMeasure::homogeneous(1.0));
  Rng a(42), b(42), c(43);
  int differing = 0;
  for (int i = 0; i < 20; ++i) {
    const auto ga = sample_polygonal_field(a, ctx);
    const auto gb = sample_polygonal_field(b, ctx);
    const auto gc = sample_polygonal_field(c, ctx);
    CHECK(config_hash(ga) == config_hash(gb));
    if (config_hash(ga) != config_hash(gc)) ++differing;
  }
  CHECK(differing >= 19);
}

TEST_CASE("empty field probability matches the partition function") {
  // P(no edges) = exp(-crossing_mass - line_mass); for the standard
  // rectangular measure on the unit square that is exp(-1-2) = exp(-3).
  const FieldContext ctx(ConvexDomain::unit_square(), ActivityMeasure::rectangular_standard());
  Rng g(7);
  const int n = 30000;
  int empty = 0;
  for (int i = 0; i < n; ++i)
    if (sample_polygonal_field(g, ctx).empty()) ++empty;
  const double p = static_cast<double>(empty) / n;
  const double target = std::exp(-3.0);
  const double se = std::sqrt(target * (1.0 - target) / n);
  CHECK(std::abs(p - target) < 4.5 * se);
}

TEST_CASE("mean total edge length equals the chord integral") {
  Rng g(11);
  const int n = 4000;

  SUBCASE("standard rectangular, unit square") {
    // One unit of vertical-line mass and one of horizontal-line mass, each
    // with unit expected chord length.
    const FieldContext ctx(ConvexDomain::unit_square(), ActivityMeasure::rectangular_standard());
    std::vector<double> len;
    len.reserve(n);
    for (int i = 0; i < n; ++i) len.push_back(sample_polygonal_field(g, ctx).total_length());
    const auto ms = mean_se(len);
    CHECK(std::abs(ms.mean - 2.0) < 4.5 * ms.se);
    CHECK(ms.se < 0.05);
  }

  SUBCASE("homogeneous, unit square") {
    // integral of chord length over all lines = pi * area.
    const FieldContext ctx(ConvexDomain::unit_square(), ActivityMeasure::homogeneous(1.0));
    std::vector<double> len;
    len.reserve(n);
    for (int i = 0; i < n; ++i) len.push_back(sample_polygonal_field(g, ctx).total_length());
    const auto ms = mean_se(len);
    CHECK(std::abs(ms.mean - kPi) < 4.5 * ms.se);
    CHECK(ms.se < 0.06);
  }
}

TEST_CASE("linear sections are poisson") {
  // Crossing counts of a fixed probe segment carry the hitting mass of the
  // probe as their mean, with unit dispersion and the matching void
  // probability.
  const int n = 20000;

  SUBCASE("homogeneous") {
    const FieldContext ctx(ConvexDomain::unit_square(), ActivityMeasure::homogeneous(1.0));
    const Segment probe{{0.25, 0.53}, {0.75, 0.53}};  // hitting mass 2*0.5 = 1
    Rng g(21);
    std::vector<double> counts;
    counts.reserve(n);
    int voids = 0;
    for (int i = 0; i < n; ++i) {
      const int k = probe_crossings(sample_polygonal_field(g, ctx), probe);
      counts.push_back(k);
      if (k == 0) ++voids;
    }
    const auto ms = mean_se(counts);
    CHECK(std::abs(ms.mean - 1.0) < 4.5 * ms.se);
    CHECK(dispersion(counts) == doctest::Approx(1.0).epsilon(0.05));
    const double pv = static_cast<double>(voids) / n;
    const double tv = std::exp(-1.0);
    CHECK(std::abs(pv - tv) < 4.5 * std::sqrt(tv * (1.0 - tv) / n));
  }

  SUBCASE("standard rectangular") {
    const FieldContext ctx(ConvexDomain::unit_square(), ActivityMeasure::rectangular_standard());
    const Segment probe{{0.2, 0.47}, {0.9, 0.47}};  // hitting mass = x-span = 0.7
    Rng g(22);
    std::vector<double> counts;
    counts.reserve(n);
    int voids = 0;
    for (int i = 0; i < n; ++i) {
      const int k = probe_crossings(sample_polygonal_field(g, ctx), probe);
      counts.push_back(k);
      if (k == 0) ++voids;
    }
    const auto ms = mean_se(counts);
    CHECK(std::abs(ms.mean - 0.7) < 4.5 * ms.se);
    CHECK(dispersion(counts) == doctest::Approx(1.0).epsilon(0.06));
    const double pv = static_cast<double>(voids) / n;
    const double tv = std::exp(-0.7);
    CHECK(std::abs(pv - tv) < 4.5 * std::sqrt(tv * (1.0 - tv) / n));
  }
}

TEST_CASE("two point label product decays with twice the hitting mass") {
  // The product of the +-1 labels at x and y is the crossing parity of the
  // segment xy; with poisson sections its mean is exp(-2 * hitting mass).
  const int n = 20000;

  SUBCASE("homogeneous") {
    const FieldContext ctx(ConvexDomain::unit_square(), ActivityMeasure::homogeneous(1.0));
    const Vec2 x{0.3, 0.52}, y{0.7, 0.52};  // hitting mass 0.8
    Rng g(31);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += label_product(sample_polygonal_field(g, ctx), x, y);
    const double est = s / n;
    const double target = std::exp(-1.6);
    const double se = std::sqrt((1.0 - target * target) / n);
    CHECK(std::abs(est - target) < 4.5 * se);
  }

  SUBCASE("standard rectangular, axis separation") {
    const FieldContext ctx(ConvexDomain::unit_square(), ActivityMeasure::rectangular_standard());
    const Vec2 x{0.25, 0.48}, y{0.75, 0.48};  // hitting mass = x-span = 0.5
    Rng g(32);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += label_product(sample_polygonal_field(g, ctx), x, y);
    const double est = s / n;
    const double target = std::exp(-1.0);
    const double se = std::sqrt((1.0 - target * target) / n);
    CHECK(std::abs(est - target) < 4.5 * se);
  }

  SUBCASE("standard rectangular, diagonal separation") {
    const FieldContext ctx(ConvexDomain::unit_square(), ActivityMeasure::rectangular_standard());
    const Vec2 x{0.3, 0.35}, y{0.6, 0.75};  // hitting mass 0.3 + 0.4
    Rng g(33);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += label_product(sample_polygonal_field(g, ctx), x, y);
    const double est = s / n;
    const double target = std::exp(-1.4);
    const double se = std::sqrt((1.0 - target * target) / n);
    CHECK(std::abs(est - target) < 4.5 * se);
  }
}

TEST_CASE("restriction consistency across nested domains") {
  // Clipping a field sampled on the doubled square to the unit square leaves
  // the total edge length law unchanged (two-sample KS within loose bounds).
  const ConvexDomain small = ConvexDomain::unit_square();
  const ConvexDomain big = ConvexDomain::rectangle({-0.5, -0.5}, {1.5, 1.5});
  const FieldContext cs(small, ActivityMeasure::homogeneous(1.0));
  const FieldContext cb(big, ActivityMeasure::homogeneous(1.0));
  Rng g(57);
  const int n = 3000;
  std::vector<double> direct, clipped;
  direct.reserve(n);
  clipped.reserve(n);
  for (int i = 0; i < n; ++i) {
    direct.push_back(sample_polygonal_field(g, cs).total_length());
    clipped.push_back(clip_config(sample_polygonal_field(g, cb), small).total_length());
  }
  CHECK(ks_statistic(direct, clipped) < ks_threshold(0.001, n, n));
}
