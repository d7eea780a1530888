#include "polyfield/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace polyfield {

SegIntersection segment_intersection(const Segment& s1, const Segment& s2, double tol) {
  SegIntersection out;
  const Vec2 d1 = s1.b - s1.a, d2 = s2.b - s2.a;
  const double denom = d1.cross(d2);
  const double len1 = d1.norm(), len2 = d2.norm();
  if (len1 <= tol || len2 <= tol) {
    // Degenerate operand: treat as point-on-segment test.
    const Segment& pt = len1 <= tol ? s1 : s2;
    const Segment& seg = len1 <= tol ? s2 : s1;
    const Vec2 d = seg.b - seg.a;
    const double t = std::clamp((pt.a - seg.a).dot(d) / d.norm2(), 0.0, 1.0);
    if (dist(seg.at(t), pt.a) <= tol) {
      out.kind = SegIntersection::Point;
      out.p = pt.a;
    }
    return out;
  }
  if (std::abs(denom) > tol * len1 * len2) {
    const Vec2 r = s2.a - s1.a;
    const double t = r.cross(d2) / denom;
    const double u = r.cross(d1) / denom;
    const double tt = tol / len1, tu = tol / len2;
    if (t >= -tt && t <= 1 + tt && u >= -tu && u <= 1 + tu) {
      out.kind = SegIntersection::Point;
      out.p = s1.at(std::clamp(t, 0.0, 1.0));
    }
    return out;
  }
  // Parallel.  Colinear if s2.a lies on the line of s1.
  const Vec2 n = d1.perp().normalized();
  if (std::abs((s2.a - s1.a).dot(n)) > tol) return out;
  const Vec2 u = d1.normalized();
  const double a1 = 0.0, b1 = len1;
  double a2 = (s2.a - s1.a).dot(u), b2 = (s2.b - s1.a).dot(u);
  if (a2 > b2) std::swap(a2, b2);
  const double lo = std::max(a1, a2), hi = std::min(b1, b2);
  if (hi < lo - tol) return out;
  if (hi - lo <= tol) {
    out.kind = SegIntersection::Point;
    out.p = s1.a + u * std::clamp((lo + hi) / 2, 0.0, len1);
    return out;
  }
  out.kind = SegIntersection::Overlap;
  out.q0 = s1.a + u * lo;
  out.q1 = s1.a + u * hi;
  return out;
}

ConvexBody ConvexBody::point(Vec2 p) {
  ConvexBody b;
  b.kind_ = Kind::Point;
  b.verts_ = {p};
  return b;
}

ConvexBody ConvexBody::segment(Vec2 a, Vec2 bb) {
  if (dist(a, bb) <= kGeomTol) return point(a);
  ConvexBody b;
  b.kind_ = Kind::Segment;
  b.verts_ = {a, bb};
  return b;
}

ConvexBody ConvexBody::polygon(std::vector<Vec2> v) {
  if (v.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e0 = v[(i + 1) % n] - v[i];
    const Vec2 e1 = v[(i + 2) % n] - v[(i + 1) % n];
    if (e0.cross(e1) <= kGeomTol) throw std::invalid_argument("polygon must be strictly convex and CCW");
  }
  ConvexBody b;
  b.kind_ = Kind::Polygon;
  b.verts_ = std::move(v);
  return b;
}

ConvexBody ConvexBody::rectangle(Vec2 lo, Vec2 hi) {
  if (hi.x - lo.x <= kGeomTol || hi.y - lo.y <= kGeomTol)
    throw std::invalid_argument("rectangle must have positive extents");
  return polygon({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}});
}

ConvexBody ConvexBody::disk(Vec2 center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("disk radius must be positive");
  ConvexBody b;
  b.kind_ = Kind::Disk;
  b.center_ = center;
  b.radius_ = radius;
  return b;
}

double ConvexBody::area() const {
  switch (kind_) {
    case Kind::Point:
    case Kind::Segment:
      return 0.0;
    case Kind::Disk:
      return kPi * radius_ * radius_;
    case Kind::Polygon: {
      double a = 0.0;
      const std::size_t n = verts_.size();
      for (std::size_t i = 0; i < n; ++i) a += verts_[i].cross(verts_[(i + 1) % n]);
      return a / 2;
    }
  }
  return 0.0;
}

double ConvexBody::perimeter() const {
  switch (kind_) {
    case Kind::Point:
      return 0.0;
    case Kind::Segment:
      return 2.0 * dist(verts_[0], verts_[1]);
    case Kind::Disk:
      return 2.0 * kPi * radius_;
    case Kind::Polygon: {
      double p = 0.0;
      const std::size_t n = verts_.size();
      for (std::size_t i = 0; i < n; ++i) p += dist(verts_[i], verts_[(i + 1) % n]);
      return p;
    }
  }
  return 0.0;
}

ConvexBody::Interval ConvexBody::support(Vec2 n) const {
  if (kind_ == Kind::Disk) {
    const double c = center_.dot(n);
    return {c - radius_, c + radius_};
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Vec2& v : verts_) {
    const double s = v.dot(n);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {lo, hi};
}

bool ConvexBody::contains(Vec2 p, double tol) const {
  switch (kind_) {
    case Kind::Point:
      return dist(p, verts_[0]) <= tol;
    case Kind::Segment: {
      const Vec2 d = verts_[1] - verts_[0];
      const double t = std::clamp((p - verts_[0]).dot(d) / d.norm2(), 0.0, 1.0);
      return dist(verts_[0] + d * t, p) <= tol;
    }
    case Kind::Disk:
      return dist(p, center_) <= radius_ + tol;
    case Kind::Polygon: {
      const std::size_t n = verts_.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e = verts_[(i + 1) % n] - verts_[i];
        if (e.cross(p - verts_[i]) < -tol * e.norm()) return false;
      }
      return true;
    }
  }
  return false;
}

double ConvexBody::boundary_dist(Vec2 p) const {
  switch (kind_) {
    case Kind::Disk:
      return std::abs(radius_ - dist(p, center_));
    case Kind::Polygon: {
      double d = std::numeric_limits<double>::infinity();
      const std::size_t n = verts_.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Segment e{verts_[i], verts_[(i + 1) % n]};
        const Vec2 dd = e.b - e.a;
        const double t = std::clamp((p - e.a).dot(dd) / dd.norm2(), 0.0, 1.0);
        d = std::min(d, dist(e.at(t), p));
      }
      return d;
    }
    default:
      throw std::domain_error("boundary_dist requires a full-dimensional body");
  }
}

std::optional<ConvexBody::Interval> ConvexBody::chord(const Line& l, double tol) const {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case Kind::Point: {
      if (!l.contains(verts_[0], tol)) return std::nullopt;
      const double s = l.coord_of(verts_[0]);
      return Interval{s, s};
    }
    case Kind::Segment: {
      // Intersect the line with the segment in the segment's parameter.
      const Vec2 n = l.normal();
      const double f0 = verts_[0].dot(n) - l.rho, f1 = verts_[1].dot(n) - l.rho;
      if (std::abs(f0) <= tol && std::abs(f1) <= tol) {
        const double s0 = l.coord_of(verts_[0]), s1 = l.coord_of(verts_[1]);
        return Interval{std::min(s0, s1), std::max(s0, s1)};
      }
      if ((f0 > tol && f1 > tol) || (f0 < -tol && f1 < -tol)) return std::nullopt;
      const double t = f0 / (f0 - f1);
      const double s = l.coord_of(verts_[0] + (verts_[1] - verts_[0]) * t);
      return Interval{s, s};
    }
    case Kind::Disk: {
      const double d = l.signed_dist(center_);
      const double h2 = radius_ * radius_ - d * d;
      if (h2 <= tol * radius_) return std::nullopt;
      const double h = std::sqrt(h2);
      const double c = l.coord_of(center_);
      if (2 * h <= tol) return std::nullopt;
      return Interval{c - h, c + h};
    }
    case Kind::Polygon: {
      // Clip the full line against each CCW half-plane.
      const Vec2 p0 = l.foot(), dvec = l.direction();
      const std::size_t n = verts_.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = verts_[i], e = verts_[(i + 1) % n] - verts_[i];
        // inside: e x (p - a) >= 0
        const double num = e.cross(p0 - a);
        const double den = e.cross(dvec);
        if (std::abs(den) <= 1e-14 * e.norm()) {
          if (num < 0) return std::nullopt;
          continue;
        }
        const double s = -num / den;
        if (den > 0)
          lo = std::max(lo, s);
        else
          hi = std::min(hi, s);
      }
      if (hi - lo <= tol) return std::nullopt;
      return Interval{lo, hi};
    }
  }
  return std::nullopt;
}

std::optional<Segment> ConvexBody::clip(const Segment& s, double tol) const {
  const Line l = Line::through_points(s.a, s.b);
  auto ch = chord(l, tol);
  if (!ch) return std::nullopt;
  const double sa = l.coord_of(s.a), sb = l.coord_of(s.b);
  const double lo = std::max(std::min(sa, sb), ch->lo);
  const double hi = std::min(std::max(sa, sb), ch->hi);
  if (hi - lo <= tol) return std::nullopt;
  Segment out{l.at(lo), l.at(hi)};
  if (sa > sb) std::swap(out.a, out.b);
  return out;
}

Vec2 ConvexBody::centroid() const {
  if (kind_ == Kind::Disk) return center_;
  Vec2 c{};
  for (const Vec2& v : verts_) c = c + v;
  return c * (1.0 / static_cast<double>(verts_.size()));
}

ConvexDomain::ConvexDomain(ConvexBody body) : body_(std::move(body)) {
  if (!body_.full_dimensional()) throw std::invalid_argument("field domain must have nonempty interior");
}

Vec2 ConvexDomain::sample_point(Rng& g) const {
  const auto xs = xspan(), ys = yspan();
  for (int i = 0; i < 100000; ++i) {
    const Vec2 p{uniform(g, xs.lo, xs.hi), uniform(g, ys.lo, ys.hi)};
    if (contains(p, 0.0)) return p;
  }
  throw std::runtime_error("rejection sampling of a domain point failed");
}

std::optional<InOut> in_out_points(const Line& l, const ConvexDomain& d, Vec2 time_dir) {
  const auto ch = d.chord(l);
  if (!ch) return std::nullopt;
  const Vec2 a = l.at(ch->lo), b = l.at(ch->hi);
  const double ta = a.dot(time_dir), tb = b.dot(time_dir);
  const Vec2 perp = time_dir.perp();  // secondary key -perp.p: larger perp-coordinate first
  const double sa = -a.dot(perp), sb = -b.dot(perp);
  if (ta < tb - kGeomTol || (std::abs(ta - tb) <= kGeomTol && sa < sb)) return InOut{a, b};
  return InOut{b, a};
}

}  // namespace polyfield
