#pragma once

#include <cmath>
#include <compare>
#include <optional>
#include <stdexcept>

namespace polyfield {

// Global geometric tolerance for coincidence decisions.
inline constexpr double kGeomTol = 1e-9;
inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0, y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
  Vec2 normalized() const {
    const double n = norm();
    return {x / n, y / n};
  }
  Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }
inline bool close(Vec2 a, Vec2 b, double tol = kGeomTol) { return dist(a, b) <= tol; }

// A line in the plane, parametrized by the angle phi in [0,pi) of its unit
// normal n = (sin phi, cos phi) and the signed offset rho, so that the line is
// { p : p.n = rho }.  The Lebesgue measure d(phi) d(rho) on this strip is the
// rigid-motion invariant line measure.
struct Line {
  double phi = 0.0;
  double rho = 0.0;

  Vec2 normal() const { return {std::sin(phi), std::cos(phi)}; }
  Vec2 direction() const { return {std::cos(phi), -std::sin(phi)}; }
  Vec2 foot() const { return normal() * rho; }

  // Point at signed position s along direction() measured from the foot.
  Vec2 at(double s) const { return foot() + direction() * s; }
  double coord_of(Vec2 p) const { return p.dot(direction()); }
  double offset_of(Vec2 p) const { return p.dot(normal()); }
  double signed_dist(Vec2 p) const { return offset_of(p) - rho; }
  bool contains(Vec2 p, double tol = kGeomTol) const { return std::abs(signed_dist(p)) <= tol; }

  bool is_vertical(double tol = kGeomTol) const { return std::abs(phi - kPi / 2) <= tol; }
  bool is_horizontal(double tol = kGeomTol) const { return phi <= tol || phi >= kPi - tol; }

  static Line through(Vec2 p, double phi) {
    Line l;
    l.phi = phi;
    l.rho = p.dot(Vec2{std::sin(phi), std::cos(phi)});
    return l;
  }
  static Line through_points(Vec2 a, Vec2 b) {
    const Vec2 d = (b - a).normalized();
    double phi = std::atan2(-d.y, d.x);  // direction (cos phi, -sin phi)
    if (phi < 0) phi += kPi;
    if (phi >= kPi) phi -= kPi;
    return through(a, phi);
  }
  static Line vertical(double x) { return Line{kPi / 2, x}; }
  static Line horizontal(double y) { return Line{0.0, y}; }

  bool parallel_to(const Line& o, double tol = kGeomTol) const {
    const double d = std::abs(phi - o.phi);
    return d <= tol || d >= kPi - tol;
  }
};

inline std::optional<Vec2> line_intersection(const Line& a, const Line& b) {
  if (a.parallel_to(b)) return std::nullopt;
  const Vec2 na = a.normal(), nb = b.normal();
  const double det = na.x * nb.y - na.y * nb.x;
  return Vec2{(a.rho * nb.y - b.rho * na.y) / det, (na.x * b.rho - nb.x * a.rho) / det};
}

struct Segment {
  Vec2 a, b;
  double length() const { return dist(a, b); }
  Vec2 dir() const { return (b - a).normalized(); }
  Vec2 at(double t) const { return a + (b - a) * t; }  // t in [0,1]
  Vec2 midpoint() const { return at(0.5); }
};

// Segment intersection classification.  Colinear overlap of positive length is
// reported separately from a transversal or endpoint meeting point.
struct SegIntersection {
  enum Kind { None, Point, Overlap } kind = None;
  Vec2 p{};           // meeting point for Kind::Point
  Vec2 q0{}, q1{};    // overlap extent for Kind::Overlap
};

SegIntersection segment_intersection(const Segment& s1, const Segment& s2, double tol = kGeomTol);

// Events ordered by primary time with deterministic refinements.  The sweep
// constructions use (t, -y) so that simultaneous points on a vertical chord
// resolve top to bottom.
struct TimeKey {
  double a = 0.0, b = 0.0, c = 0.0;
  auto operator<=>(const TimeKey&) const = default;
};

}  // namespace polyfield
