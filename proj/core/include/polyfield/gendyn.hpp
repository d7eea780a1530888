#pragma once

#include "polyfield/growth.hpp"
#include "polyfield/line_ops.hpp"
#include "polyfield/polyconfig.hpp"

namespace polyfield {

// Field sampler driven by an arbitrary growth family: lines are born at their
// anchor points, vertex-birth pairs extend away from their anchors, direction
// updates keep extending away from the new line's anchor, and fronts stop at
// mutual crossings and at the domain boundary.  For every valid family this
// draws from the same law as the sweep sampler.
struct GendynResult {
  PolygonalConfig config;
  long fronts = 0;
  long updates = 0;
  long collisions = 0;
};

GendynResult sample_gendyn(Rng& g, const FieldContext& ctx, const GrowthFamily& family);

inline PolygonalConfig sample_polygonal_field(Rng& g, const FieldContext& ctx,
                                              const GrowthFamily& family) {
  return sample_gendyn(g, ctx, family).config;
}

}  // namespace polyfield
