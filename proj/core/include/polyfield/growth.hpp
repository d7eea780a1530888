#pragma once

#include "polyfield/convex.hpp"
#include "polyfield/precedence.hpp"

#include <memory>
#include <vector>

namespace polyfield {

// A growing family of compacts that eventually covers the domain, presented
// through its reveal-time function: D_t = { p : reveal_time(p) <= t }.  Along
// every line the reveal time is lowest at the anchor and increases outward,
// which is what the generalized sampler relies on.
//
// Kinds:
//  - Sweep(u): half-planes advancing in direction u; anchor = entry point.
//  - Disk(c): disks growing around c; anchor = the chord point closest to c.
//  - RectStaged: built from an acyclic axis-parallel probe collection.  The
//    marked points are the anchors of their lines and the crossing points are
//    revealed in a fixed linear extension of the structural order.  Sampling
//    uses an equal-in-law disk growth seeded at the first marked point; the
//    staged schedule answers anchor and ordering queries.
class GrowthFamily {
 public:
  enum class Kind { Sweep, Disk, RectStaged };

  static GrowthFamily sweep(ConvexDomain domain, Vec2 direction);
  static GrowthFamily disk(ConvexDomain domain, Vec2 center);

  Kind kind() const { return kind_; }
  const ConvexDomain& domain() const { return domain_; }

  // Normalized to [0, 1] over the domain closure.
  double reveal_time(Vec2 p) const;
  // Deterministic secondary order for points revealed at the same time.
  double tie_key(Vec2 p) const;
  // First point of the line met by the family; throws std::invalid_argument
  // if the line misses the domain.
  Vec2 anchor(const Line& l) const;
  // Membership test for D_t, for bisection checks.
  bool member(Vec2 p, double t) const { return reveal_time(p) <= t + kGeomTol; }

  // RectStaged only (throws std::logic_error otherwise).
  const ProbeCollection& generators() const;
  const PrecedenceGraph& staged_graph() const;
  // Crossing-vertex ids of the staged graph in reveal order.
  const std::vector<std::size_t>& staged_schedule() const;

  friend GrowthFamily rectangular_growth_family(ConvexDomain domain, ProbeCollection coll);

 private:
  GrowthFamily(Kind k, ConvexDomain d) : kind_(k), domain_(std::move(d)) {}

  Kind kind_;
  ConvexDomain domain_;
  Vec2 dir_{1, 0};          // sweep
  double t0_ = 0, t1_ = 1;  // sweep normalization
  Vec2 center_{0, 0};       // disk growth (also the staged surrogate)
  double rmax_ = 1;

  struct Staged {
    ProbeCollection coll;
    PrecedenceGraph graph;
    std::vector<std::size_t> schedule;
  };
  std::shared_ptr<const Staged> staged_;
};

// Staged growth family for an axis-parallel probe collection: anchors at the
// marked points, crossing points revealed in a linear extension of the
// structural order.  Throws std::invalid_argument naming a cycle when the
// precedence graph is cyclic, and when a line is not axis-parallel or a marked
// point lies outside the domain.
GrowthFamily rectangular_growth_family(ConvexDomain domain, ProbeCollection coll);

}  // namespace polyfield
