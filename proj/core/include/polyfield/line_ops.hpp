#pragma once

#include <vector>

#include "polyfield/convex.hpp"
#include "polyfield/measure.hpp"
#include "polyfield/rng.hpp"

namespace polyfield {

// A domain paired with an activity measure, plus the two derived totals every
// sampler needs: the mass of lines hitting the domain and the total crossing
// intensity.  Totals are computed once; for general density measures the
// crossing total is a Monte Carlo estimate and needs a generator.
class FieldContext {
 public:
  FieldContext(ConvexDomain domain, ActivityMeasure measure);
  FieldContext(ConvexDomain domain, ActivityMeasure measure, Rng& g, long mc_pairs = 1000000);

  const ConvexDomain& domain() const { return domain_; }
  const ActivityMeasure& measure() const { return measure_; }
  double line_mass() const { return line_mass_; }          // M([[D]])
  double crossing_mass() const { return crossing_mass_; }  // total crossing intensity over D
  double diameter() const { return diameter_; }

 private:
  void init();
  ConvexDomain domain_;
  ActivityMeasure measure_;
  double line_mass_ = 0.0, crossing_mass_ = 0.0, diameter_ = 0.0;
};

// Poisson line process with intensity M restricted to the lines hitting the
// domain.
std::vector<Line> sample_poisson_lines(Rng& g, const FieldContext& ctx);

// Crossing point of two lines, remembered together with its line pair.
struct BirthSite {
  Vec2 p;
  Line l1, l2;
};

// One draw from the crossing measure normalized over the domain.
BirthSite sample_interior_site(Rng& g, const FieldContext& ctx);

// Poisson point process on the domain whose intensity is the crossing measure;
// each point carries the pair of lines that generated it.
std::vector<BirthSite> sample_interior_births(Rng& g, const FieldContext& ctx);

// Entry point of a line into the domain with respect to a sweep direction.
struct BoundarySite {
  Vec2 p;
  Line l;
};
std::vector<BoundarySite> sample_boundary_births(Rng& g, const FieldContext& ctx,
                                                 Vec2 time_dir = {1, 0});

// Mass of lines crossing the subsegment of l between line coordinates s0 and
// s1.
double segment_line_mass(const ActivityMeasure& m, const Line& l, double s0, double s1);

// Smallest arc length t <= cap with M([[l[s0, s0 + dir t]]]) >= target, where
// dir = +1/-1 picks the orientation; infinity when even the capped segment
// carries too little mass.  This inverts the inhomogeneous event clock of a
// particle travelling along l.
double invert_segment_mass(const ActivityMeasure& m, const Line& l, double s0, int dir,
                           double target, double cap);

// New line through p for a particle travelling with unit velocity u: the
// angle density is m(phi, p . n(phi)) |u . n(phi)|, which never reproduces the
// line currently travelled.
Line sample_update_line(Rng& g, const ActivityMeasure& m, Vec2 p, Vec2 u);

}  // namespace polyfield
