#pragma once

#include "polyfield/line_ops.hpp"
#include "polyfield/polyconfig.hpp"

namespace polyfield {

// Kinetic sampler.  The field is generated by a particle system swept across
// the domain in the x direction: lines of the Poisson process enter at their
// boundary entry points, crossing pairs give birth to particle pairs in the
// interior, and each particle travels forward in x, switching to a fresh line
// through its current position at the rate of the measure clock along its
// path.  Two particles meeting annihilate.  The traced trajectories form the
// polygonal field.
//
// Events are ordered by (x, -y), so a chord of an exactly vertical line plays
// out as an instantaneous top-to-bottom cascade; this is what the rectangular
// measures rely on.
struct DynrepResult {
  PolygonalConfig config;
  long particles = 0;
  long updates = 0;
  long collisions = 0;
};

DynrepResult sample_dynrep(Rng& g, const FieldContext& ctx);

inline PolygonalConfig sample_polygonal_field(Rng& g, const FieldContext& ctx) {
  return sample_dynrep(g, ctx).config;
}

}  // namespace polyfield
