#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "polyfield/convex.hpp"
#include "polyfield/geom.hpp"
#include "polyfield/measure.hpp"

namespace polyfield {

// An edge together with the line carrying it.  Keeping the carrier explicit
// avoids re-deriving angles from nearly-degenerate segments.
struct Edge {
  Segment seg;
  Line line;
};

// A finite family of line segments in the plane.  Admissibility with respect
// to a domain (planar graph, interior corners of degree two, boundary contacts
// of degree one) is a separate check, not an invariant of the container:
// samplers assemble configurations edge by edge.
class PolygonalConfig {
 public:
  PolygonalConfig() = default;

  void add(const Segment& s);  // derives the carrier line
  void add(const Segment& s, const Line& l) { edges_.push_back({s, l}); }
  void add(const Edge& e) { edges_.push_back(e); }
  void clear() { edges_.clear(); }

  bool empty() const { return edges_.empty(); }
  std::size_t size() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  std::vector<Edge>& edges() { return edges_; }

  double total_length() const;
  // Sum over edges of the M-mass of lines hitting the edge.  Because M is
  // atomless this is additive under edge subdivision.
  double line_mass(const ActivityMeasure& m) const;

 private:
  std::vector<Edge> edges_;
};

struct Violation {
  enum Kind {
    ZeroLength,
    OffCarrier,       // segment endpoints do not lie on the stored line
    OutsideDomain,
    Crossing,         // two edge interiors cross
    Overlap,          // colinear edges share more than a point
    InteriorDegree,   // interior vertex degree != 2
    StraightVertex,   // interior vertex with colinear incident edges
    BoundaryDegree    // boundary vertex degree != 1
  };
  Kind kind;
  std::size_t e1 = 0, e2 = 0;
  Vec2 where{};
};

struct AdmissibilityReport {
  bool ok = true;
  bool boundary_free = true;  // no vertex on the domain boundary
  std::vector<Violation> violations;
};

AdmissibilityReport check_admissible(const PolygonalConfig& c, const ConvexDomain& d,
                                     double tol = 1e-7);

// Parity labels.  The two-coloring of the plane induced by an admissible
// configuration assigns a point the parity of the number of edges crossed on
// the way to infinity; the product of the labels at x and y is the parity of
// the crossings of the straight segment from x to y, which is well defined
// even when boundary effects make the global coloring ambiguous.
int ray_label(const PolygonalConfig& c, Vec2 x, double angle);
int label_at(const PolygonalConfig& c, Vec2 x);
int label_product(const PolygonalConfig& c, Vec2 x, Vec2 y);

// Per-line symmetric difference of the unions of edges, as a configuration of
// leftover pieces and as a total length.  Edges are matched to a common
// carrier when their (phi, rho) coordinates agree within tol.
PolygonalConfig symmetric_difference(const PolygonalConfig& a, const PolygonalConfig& b,
                                     double tol = 1e-7);
double symmetric_difference_length(const PolygonalConfig& a, const PolygonalConfig& b,
                                   double tol = 1e-7);

PolygonalConfig clip_config(const PolygonalConfig& c, const ConvexDomain& d);

// Repeatedly merge pairs of edges on the same carrier that meet end to end,
// until none remain.  Leaves transversal contacts alone.
void coalesce_colinear(std::vector<Edge>& edges, double tol);

// Order-insensitive hash of the edge set with coordinates quantized to the
// given grain; identical configurations hash equal regardless of edge order
// and orientation.
std::uint64_t config_hash(const PolygonalConfig& c, double quantum = 1e-9);

// CSV round trip: '#'-prefixed metadata lines, a x1,y1,x2,y2 header, one edge
// per row with 12 significant digits.
void write_csv(std::ostream& os, const PolygonalConfig& c,
               const std::vector<std::pair<std::string, std::string>>& meta = {});
void save_csv(const std::string& path, const PolygonalConfig& c,
              const std::vector<std::pair<std::string, std::string>>& meta = {});
PolygonalConfig read_csv(std::istream& is);
PolygonalConfig load_csv(const std::string& path);

}  // namespace polyfield
