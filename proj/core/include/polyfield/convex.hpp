#pragma once

#include <optional>
#include <vector>

#include "polyfield/geom.hpp"
#include "polyfield/rng.hpp"

namespace polyfield {

// Bounded convex body: a point, a segment, a strictly convex polygon (CCW), or
// a disk.  Degenerate bodies are allowed for mass queries; fields are sampled
// on full-dimensional domains only (see ConvexDomain).
class ConvexBody {
 public:
  enum class Kind { Point, Segment, Polygon, Disk };

  static ConvexBody point(Vec2 p);
  static ConvexBody segment(Vec2 a, Vec2 b);
  static ConvexBody polygon(std::vector<Vec2> ccw_vertices);
  static ConvexBody rectangle(Vec2 lo, Vec2 hi);
  static ConvexBody disk(Vec2 center, double radius);

  Kind kind() const { return kind_; }
  bool full_dimensional() const { return kind_ == Kind::Polygon || kind_ == Kind::Disk; }

  double area() const;
  double perimeter() const;  // doubled length for a segment, 0 for a point

  // Extent [lo, hi] of { p.n : p in body } for a unit direction n.
  struct Interval { double lo = 0.0, hi = 0.0; double width() const { return hi - lo; } };
  Interval support(Vec2 n) const;

  bool contains(Vec2 p, double tol = kGeomTol) const;
  double boundary_dist(Vec2 p) const;  // distance to the boundary, full-dim only

  // Chord of a line through the body as an interval of line coordinates
  // (Line::coord_of).  Tangential contact of length <= tol counts as a miss.
  std::optional<Interval> chord(const Line& l, double tol = kGeomTol) const;
  std::optional<Segment> clip(const Segment& s, double tol = kGeomTol) const;

  Interval xspan() const { return support({1, 0}); }
  Interval yspan() const { return support({0, 1}); }
  Vec2 centroid() const;

  const std::vector<Vec2>& vertices() const { return verts_; }
  Vec2 disk_center() const { return center_; }
  double disk_radius() const { return radius_; }

 private:
  Kind kind_ = Kind::Point;
  std::vector<Vec2> verts_;  // Point: 1, Segment: 2, Polygon: >=3 CCW
  Vec2 center_{};
  double radius_ = 0.0;
};

// Full-dimensional convex domain used as a field window.
class ConvexDomain {
 public:
  explicit ConvexDomain(ConvexBody body);
  static ConvexDomain rectangle(Vec2 lo, Vec2 hi) { return ConvexDomain(ConvexBody::rectangle(lo, hi)); }
  static ConvexDomain unit_square() { return rectangle({0, 0}, {1, 1}); }
  static ConvexDomain disk(Vec2 c, double r) { return ConvexDomain(ConvexBody::disk(c, r)); }

  const ConvexBody& body() const { return body_; }
  double area() const { return body_.area(); }
  double perimeter() const { return body_.perimeter(); }
  bool contains(Vec2 p, double tol = kGeomTol) const { return body_.contains(p, tol); }
  bool strictly_inside(Vec2 p, double tol = kGeomTol) const {
    return body_.contains(p, 0.0) && body_.boundary_dist(p) > tol;
  }
  std::optional<ConvexBody::Interval> chord(const Line& l, double tol = kGeomTol) const {
    return body_.chord(l, tol);
  }
  std::optional<Segment> clip(const Segment& s, double tol = kGeomTol) const { return body_.clip(s, tol); }
  ConvexBody::Interval xspan() const { return body_.xspan(); }
  ConvexBody::Interval yspan() const { return body_.yspan(); }
  Vec2 centroid() const { return body_.centroid(); }

  Vec2 sample_point(Rng& g) const;

 private:
  ConvexBody body_;
};

// Entry and exit points of a line crossing the domain with respect to a sweep
// direction; ties on the primary coordinate resolve by the (t, -y)-style
// secondary rule of the sweep.  Tangencies count as a miss.
struct InOut {
  Vec2 in, out;
};
std::optional<InOut> in_out_points(const Line& l, const ConvexDomain& d, Vec2 time_dir = {1, 0});

}  // namespace polyfield
