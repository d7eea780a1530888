#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "polyfield/convex.hpp"
#include "polyfield/geom.hpp"
#include "polyfield/rng.hpp"

namespace polyfield {

// Atomless measure on the real line, used for the offset distributions of
// axis-parallel line families.  Three representations:
//   - lebesgue(c): density c everywhere (infinite total mass),
//   - density(f, sup, lo, hi): density f supported on [lo, hi] with a known
//     upper bound sup used for rejection sampling,
//   - piecewise_linear_cdf(x, F): cumulative mass F at strictly increasing
//     knots x, interpolated linearly (constant density between knots, zero
//     outside).  Duplicate knots would encode an atom and are rejected.
class OffsetMeasure {
 public:
  enum class Kind { Lebesgue, Density, PiecewiseLinearCdf };

  static OffsetMeasure lebesgue(double scale = 1.0);
  static OffsetMeasure density(std::function<double(double)> f, double sup_density,
                               double lo, double hi);
  static OffsetMeasure piecewise_linear_cdf(std::vector<double> x, std::vector<double> cum);

  Kind kind() const { return kind_; }
  double density_at(double x) const;
  double mass(double a, double b) const;  // measure of [a, b]
  double sup_density() const;

  // Draw from the measure restricted to [a, b]; the restriction must have
  // positive mass.
  double sample(Rng& g, double a, double b) const;

  // Cumulative mass of [origin, x] (x >= origin) and its generalized inverse
  // sup { x : mass(origin, x) <= t }, used to map a rectangular field onto the
  // unit-intensity one.
  double forward(double origin, double x) const { return mass(origin, x); }
  double inverse(double origin, double t, double hint_hi) const;

 private:
  Kind kind_ = Kind::Lebesgue;
  double scale_ = 1.0;
  std::function<double(double)> fn_;
  double sup_ = 1.0, lo_ = 0.0, hi_ = 0.0;
  std::vector<double> knots_, cum_;
};

struct McEstimate {
  double value = 0.0;
  double se = 0.0;
};

// Activity measure M on the space of lines, written against the (phi, rho)
// chart.  Kinds:
//   - homogeneous(c): density c against d(phi) d(rho); c = 1 is the
//     rigid-motion invariant measure,
//   - rectangular(v, h): concentrated on the vertical family (offset measure v
//     on x) and the horizontal family (offset measure h on y),
//   - density(m, sup, rho_lo, rho_hi): general density m(phi, rho) supported
//     on [0, pi) x [rho_lo, rho_hi] with known sup.
// The key derived quantities are the hitting mass M([[K]]) of a convex body K
// and the crossing intensity, i.e. the density of the point process of
// intersections of an M-Poisson line process.
class ActivityMeasure {
 public:
  enum class Kind { Homogeneous, Rectangular, Density };

  static ActivityMeasure homogeneous(double c);
  static ActivityMeasure rectangular_standard();
  static ActivityMeasure rectangular(OffsetMeasure vertical_offsets, OffsetMeasure horizontal_offsets);
  static ActivityMeasure density(std::function<double(double, double)> m, double sup_density,
                                 double rho_lo, double rho_hi);

  Kind kind() const { return kind_; }
  bool is_rectangular() const { return kind_ == Kind::Rectangular; }
  double homogeneous_rate() const;
  const OffsetMeasure& vertical_offsets() const;    // x-offsets of vertical lines
  const OffsetMeasure& horizontal_offsets() const;  // y-offsets of horizontal lines

  // Density in the (phi, rho) chart; undefined for rectangular measures.
  double density_at(const Line& l) const;
  // Upper bound on the (phi, rho) density, for rejection envelopes.
  double density_sup() const;

  double hitting_mass(const ConvexBody& k) const;  // M([[K]])
  double hitting_mass(const Segment& s) const { return hitting_mass(ConvexBody::segment(s.a, s.b)); }

  // Density of the crossing measure at p and its total over a domain.  The
  // total is exact for homogeneous measures, quadrature for rectangular ones,
  // and Monte Carlo (birth_total_mc) for general densities.
  double birth_intensity(Vec2 p) const;
  double birth_total(const ConvexDomain& d) const;
  McEstimate birth_total_mc(const ConvexDomain& d, Rng& g, long pairs = 1000000) const;

  // Draw a line from M restricted to the lines hitting the body.
  Line sample_hitting(Rng& g, const ConvexBody& k) const;
  Line sample_hitting(Rng& g, const ConvexDomain& d) const { return sample_hitting(g, d.body()); }

 private:
  Kind kind_ = Kind::Homogeneous;
  double rate_ = 1.0;
  OffsetMeasure vert_ = OffsetMeasure::lebesgue();
  OffsetMeasure horiz_ = OffsetMeasure::lebesgue();
  std::function<double(double, double)> fn_;
  double sup_ = 1.0, rho_lo_ = 0.0, rho_hi_ = 0.0;
};

// Monotone coordinate change mapping a rectangular field with offset measures
// (v, h) on an axis-parallel rectangle onto the unit-intensity rectangular
// field: x' = v-mass of [x_lo, x], y' = h-mass of [y_lo, y].
class RectangularTransform {
 public:
  RectangularTransform(const ActivityMeasure& m, Vec2 lo, Vec2 hi);

  Vec2 forward(Vec2 p) const;
  Vec2 inverse(Vec2 q) const;
  Vec2 image_lo() const { return {0.0, 0.0}; }
  Vec2 image_hi() const;

 private:
  OffsetMeasure vert_, horiz_;
  Vec2 lo_, hi_;
};

}  // namespace polyfield
