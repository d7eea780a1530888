#include "polyfield/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace polyfield {

namespace {

using Quad = boost::math::quadrature::gauss_kronrod<double, 15>;
constexpr double kQuadTol = 1e-8;
constexpr int kQuadDepth = 12;
constexpr int kRejectionCap = 10000000;

double body_diameter(const ConvexBody& k) {
  switch (k.kind()) {
    case ConvexBody::Kind::Disk:
      return 2.0 * k.disk_radius();
    default: {
      double d = 0.0;
      const auto& v = k.vertices();
      for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, dist(v[i], v[j]));
      return d;
    }
  }
}

// y-interval covered by the chord of the vertical line at x; the line
// coordinate along a vertical line runs downward.
std::optional<ConvexBody::Interval> vertical_chord_yrange(const ConvexBody& k, double x) {
  const auto ch = k.chord(Line::vertical(x));
  if (!ch) return std::nullopt;
  return ConvexBody::Interval{-ch->hi, -ch->lo};
}

}  // namespace

OffsetMeasure OffsetMeasure::lebesgue(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::invalid_argument("offset measure scale must be positive");
  OffsetMeasure m;
  m.kind_ = Kind::Lebesgue;
  m.scale_ = scale;
  return m;
}

OffsetMeasure OffsetMeasure::density(std::function<double(double)> f, double sup_density,
                                     double lo, double hi) {
  if (!f) throw std::invalid_argument("offset density must be callable");
  if (!(sup_density > 0.0) || !(hi > lo))
    throw std::invalid_argument("offset density needs positive sup and nonempty support");
  OffsetMeasure m;
  m.kind_ = Kind::Density;
  m.fn_ = std::move(f);
  m.sup_ = sup_density;
  m.lo_ = lo;
  m.hi_ = hi;
  return m;
}

OffsetMeasure OffsetMeasure::piecewise_linear_cdf(std::vector<double> x, std::vector<double> cum) {
  if (x.size() != cum.size() || x.size() < 2)
    throw std::invalid_argument("piecewise linear cdf needs matching knot and value lists");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1]))
      throw std::invalid_argument("offset measures are atomless: knots must strictly increase");
    if (cum[i] < cum[i - 1]) throw std::invalid_argument("cumulative mass must be nondecreasing");
  }
  OffsetMeasure m;
  m.kind_ = Kind::PiecewiseLinearCdf;
  m.knots_ = std::move(x);
  m.cum_ = std::move(cum);
  m.lo_ = m.knots_.front();
  m.hi_ = m.knots_.back();
  return m;
}

double OffsetMeasure::density_at(double x) const {
  switch (kind_) {
    case Kind::Lebesgue:
      return scale_;
    case Kind::Density:
      return (x < lo_ || x > hi_) ? 0.0 : std::max(0.0, fn_(x));
    case Kind::PiecewiseLinearCdf: {
      if (x < lo_ || x >= hi_) return 0.0;
      const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
      const std::size_t i = static_cast<std::size_t>(it - knots_.begin());
      return (cum_[i] - cum_[i - 1]) / (knots_[i] - knots_[i - 1]);
    }
  }
  return 0.0;
}

double OffsetMeasure::mass(double a, double b) const {
  if (b <= a) return 0.0;
  switch (kind_) {
    case Kind::Lebesgue:
      return scale_ * (b - a);
    case Kind::Density: {
      const double lo = std::max(a, lo_), hi = std::min(b, hi_);
      if (hi <= lo) return 0.0;
      return Quad::integrate([this](double t) { return std::max(0.0, fn_(t)); }, lo, hi,
                             kQuadDepth, kQuadTol);
    }
    case Kind::PiecewiseLinearCdf: {
      const auto eval = [this](double t) {
        if (t <= lo_) return cum_.front();
        if (t >= hi_) return cum_.back();
        const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - knots_.begin());
        const double w = (t - knots_[i - 1]) / (knots_[i] - knots_[i - 1]);
        return cum_[i - 1] + w * (cum_[i] - cum_[i - 1]);
      };
      return eval(b) - eval(a);
    }
  }
  return 0.0;
}

double OffsetMeasure::sup_density() const {
  switch (kind_) {
    case Kind::Lebesgue:
      return scale_;
    case Kind::Density:
      return sup_;
    case Kind::PiecewiseLinearCdf: {
      double s = 0.0;
      for (std::size_t i = 1; i < knots_.size(); ++i)
        s = std::max(s, (cum_[i] - cum_[i - 1]) / (knots_[i] - knots_[i - 1]));
      return s;
    }
  }
  return 0.0;
}

double OffsetMeasure::sample(Rng& g, double a, double b) const {
  if (!(b > a)) throw std::invalid_argument("sampling window must be nonempty");
  switch (kind_) {
    case Kind::Lebesgue:
      return uniform(g, a, b);
    case Kind::Density: {
      const double lo = std::max(a, lo_), hi = std::min(b, hi_);
      if (!(hi > lo)) throw std::invalid_argument("sampling window carries no mass");
      for (int i = 0; i < kRejectionCap; ++i) {
        const double x = uniform(g, lo, hi);
        if (uniform(g) * sup_ < fn_(x)) return x;
      }
      throw std::runtime_error("offset rejection sampling failed; check sup_density");
    }
    case Kind::PiecewiseLinearCdf: {
      const double fa = cum_.front() + mass(lo_, std::max(a, lo_));
      const double fb = cum_.front() + mass(lo_, std::min(b, hi_));
      if (!(fb > fa)) throw std::invalid_argument("sampling window carries no mass");
      const double u = uniform(g, fa, fb);
      const auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
      std::size_t i = static_cast<std::size_t>(it - cum_.begin());
      i = std::clamp<std::size_t>(i, 1, cum_.size() - 1);
      const double w = (u - cum_[i - 1]) / (cum_[i] - cum_[i - 1]);
      return std::clamp(knots_[i - 1] + w * (knots_[i] - knots_[i - 1]), a, b);
    }
  }
  return a;
}

double OffsetMeasure::inverse(double origin, double t, double hint_hi) const {
  if (t < 0) throw std::invalid_argument("mass coordinate must be nonnegative");
  switch (kind_) {
    case Kind::Lebesgue:
      return origin + t / scale_;
    case Kind::PiecewiseLinearCdf: {
      const double target = cum_.front() + mass(lo_, std::max(origin, lo_)) + t;
      if (target >= cum_.back()) return std::max(hint_hi, hi_);
      const auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
      const std::size_t i = static_cast<std::size_t>(it - cum_.begin());
      // sup of the level set: skip any flat stretch ending at cum_[i-1]
      std::size_t j = i;
      while (j < cum_.size() && cum_[j] <= target) ++j;
      const double w = (target - cum_[j - 1]) / (cum_[j] - cum_[j - 1]);
      return knots_[j - 1] + w * (knots_[j] - knots_[j - 1]);
    }
    case Kind::Density: {
      double lo = origin, hi = std::max(hint_hi, origin + 1.0);
      while (mass(origin, hi) < t && hi - origin < 1e12) hi = origin + 2 * (hi - origin);
      for (int i = 0; i < 200 && hi - lo > 1e-12 * (1 + std::abs(hi)); ++i) {
        const double mid = (lo + hi) / 2;
        (mass(origin, mid) <= t ? lo : hi) = mid;
      }
      return (lo + hi) / 2;
    }
  }
  return origin;
}

ActivityMeasure ActivityMeasure::homogeneous(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("activity must be positive");
  ActivityMeasure m;
  m.kind_ = Kind::Homogeneous;
  m.rate_ = c;
  return m;
}

ActivityMeasure ActivityMeasure::rectangular_standard() {
  return rectangular(OffsetMeasure::lebesgue(1.0), OffsetMeasure::lebesgue(1.0));
}

ActivityMeasure ActivityMeasure::rectangular(OffsetMeasure vertical_offsets,
                                             OffsetMeasure horizontal_offsets) {
  ActivityMeasure m;
  m.kind_ = Kind::Rectangular;
  m.vert_ = std::move(vertical_offsets);
  m.horiz_ = std::move(horizontal_offsets);
  return m;
}

ActivityMeasure ActivityMeasure::density(std::function<double(double, double)> m,
                                         double sup_density, double rho_lo, double rho_hi) {
  if (!m) throw std::invalid_argument("line density must be callable");
  if (!(sup_density > 0.0) || !(rho_hi > rho_lo))
    throw std::invalid_argument("line density needs positive sup and a nonempty offset window");
  ActivityMeasure a;
  a.kind_ = Kind::Density;
  a.fn_ = std::move(m);
  a.sup_ = sup_density;
  a.rho_lo_ = rho_lo;
  a.rho_hi_ = rho_hi;
  return a;
}

double ActivityMeasure::homogeneous_rate() const {
  if (kind_ != Kind::Homogeneous) throw std::domain_error("not a homogeneous measure");
  return rate_;
}

const OffsetMeasure& ActivityMeasure::vertical_offsets() const {
  if (kind_ != Kind::Rectangular) throw std::domain_error("not a rectangular measure");
  return vert_;
}

const OffsetMeasure& ActivityMeasure::horizontal_offsets() const {
  if (kind_ != Kind::Rectangular) throw std::domain_error("not a rectangular measure");
  return horiz_;
}

double ActivityMeasure::density_at(const Line& l) const {
  switch (kind_) {
    case Kind::Homogeneous:
      return rate_;
    case Kind::Density: {
      if (l.rho < rho_lo_ || l.rho > rho_hi_) return 0.0;
      return std::max(0.0, fn_(l.phi, l.rho));
    }
    case Kind::Rectangular:
      throw std::domain_error("rectangular measures have no (phi, rho) density");
  }
  return 0.0;
}

double ActivityMeasure::density_sup() const {
  switch (kind_) {
    case Kind::Homogeneous:
      return rate_;
    case Kind::Density:
      return sup_;
    case Kind::Rectangular:
      throw std::domain_error("rectangular measures have no (phi, rho) density");
  }
  return 0.0;
}

double ActivityMeasure::hitting_mass(const ConvexBody& k) const {
  switch (kind_) {
    case Kind::Homogeneous:
      return rate_ * k.perimeter();
    case Kind::Rectangular: {
      const auto xs = k.xspan(), ys = k.yspan();
      return vert_.mass(xs.lo, xs.hi) + horiz_.mass(ys.lo, ys.hi);
    }
    case Kind::Density: {
      const auto inner = [this, &k](double phi) {
        const auto s = k.support(Vec2{std::sin(phi), std::cos(phi)});
        const double lo = std::max(s.lo, rho_lo_), hi = std::min(s.hi, rho_hi_);
        if (hi <= lo) return 0.0;
        return Quad::integrate([this, phi](double rho) { return std::max(0.0, fn_(phi, rho)); },
                               lo, hi, kQuadDepth, kQuadTol);
      };
      return Quad::integrate(inner, 0.0, kPi, kQuadDepth, kQuadTol);
    }
  }
  return 0.0;
}

double ActivityMeasure::birth_intensity(Vec2 p) const {
  switch (kind_) {
    case Kind::Homogeneous:
      return kPi * rate_ * rate_;
    case Kind::Rectangular:
      return vert_.density_at(p.x) * horiz_.density_at(p.y);
    case Kind::Density: {
      const auto at = [this, p](double phi) {
        return density_at(Line::through(p, phi));
      };
      const auto inner = [&at](double phi1) {
        const double m1 = at(phi1);
        if (m1 == 0.0) return 0.0;
        return m1 * Quad::integrate(
                        [&at, phi1](double phi2) { return at(phi2) * std::abs(std::sin(phi1 - phi2)); },
                        0.0, kPi, kQuadDepth, kQuadTol);
      };
      return 0.5 * Quad::integrate(inner, 0.0, kPi, kQuadDepth, kQuadTol);
    }
  }
  return 0.0;
}

double ActivityMeasure::birth_total(const ConvexDomain& d) const {
  switch (kind_) {
    case Kind::Homogeneous:
      return kPi * rate_ * rate_ * d.area();
    case Kind::Rectangular: {
      const auto& body = d.body();
      if (body.kind() == ConvexBody::Kind::Polygon && body.vertices().size() == 4) {
        // Axis-parallel rectangles factor exactly.
        bool axis = true;
        const auto& v = body.vertices();
        for (int i = 0; i < 4; ++i) {
          const Vec2 e = v[(i + 1) % 4] - v[i];
          if (std::abs(e.x) > kGeomTol && std::abs(e.y) > kGeomTol) axis = false;
        }
        if (axis) {
          const auto xs = body.xspan(), ys = body.yspan();
          return vert_.mass(xs.lo, xs.hi) * horiz_.mass(ys.lo, ys.hi);
        }
      }
      const auto xs = body.xspan();
      const auto f = [this, &body](double x) {
        const auto yr = vertical_chord_yrange(body, x);
        if (!yr) return 0.0;
        return vert_.density_at(x) * horiz_.mass(yr->lo, yr->hi);
      };
      return Quad::integrate(f, xs.lo, xs.hi, kQuadDepth, kQuadTol);
    }
    case Kind::Density:
      throw std::domain_error("use birth_total_mc for general line densities");
  }
  return 0.0;
}

McEstimate ActivityMeasure::birth_total_mc(const ConvexDomain& d, Rng& g, long pairs) const {
  const double lambda = hitting_mass(d.body());
  long hits = 0;
  for (long i = 0; i < pairs; ++i) {
    const Line l1 = sample_hitting(g, d);
    const Line l2 = sample_hitting(g, d);
    const auto p = line_intersection(l1, l2);
    if (p && d.contains(*p, 0.0)) ++hits;
  }
  const double n = static_cast<double>(pairs);
  const double phat = static_cast<double>(hits) / n;
  const double scale = 0.5 * lambda * lambda;
  return {scale * phat, scale * std::sqrt(std::max(phat * (1 - phat), 1.0 / n) / n)};
}

Line ActivityMeasure::sample_hitting(Rng& g, const ConvexBody& k) const {
  switch (kind_) {
    case Kind::Homogeneous: {
      const double diam = body_diameter(k);
      if (!(diam > 0.0)) throw std::invalid_argument("body carries no hitting mass");
      for (int i = 0; i < kRejectionCap; ++i) {
        const double phi = uniform(g, 0.0, kPi);
        const auto s = k.support(Vec2{std::sin(phi), std::cos(phi)});
        if (uniform(g) * diam < s.width()) return Line{phi, uniform(g, s.lo, s.hi)};
      }
      throw std::runtime_error("line rejection sampling failed");
    }
    case Kind::Rectangular: {
      const auto xs = k.xspan(), ys = k.yspan();
      const double wv = vert_.mass(xs.lo, xs.hi), wh = horiz_.mass(ys.lo, ys.hi);
      if (!(wv + wh > 0.0)) throw std::invalid_argument("body carries no hitting mass");
      if (uniform(g) * (wv + wh) < wv) return Line::vertical(vert_.sample(g, xs.lo, xs.hi));
      return Line::horizontal(horiz_.sample(g, ys.lo, ys.hi));
    }
    case Kind::Density: {
      for (int i = 0; i < kRejectionCap; ++i) {
        const Line l{uniform(g, 0.0, kPi), uniform(g, rho_lo_, rho_hi_)};
        if (uniform(g) * sup_ >= fn_(l.phi, l.rho)) continue;
        if (k.chord(l)) return l;
      }
      throw std::runtime_error("line rejection sampling failed; check sup_density");
    }
  }
  return {};
}

RectangularTransform::RectangularTransform(const ActivityMeasure& m, Vec2 lo, Vec2 hi)
    : vert_(m.vertical_offsets()), horiz_(m.horizontal_offsets()), lo_(lo), hi_(hi) {
  if (!(hi.x > lo.x) || !(hi.y > lo.y))
    throw std::invalid_argument("transform rectangle must have positive extents");
  if (!(vert_.mass(lo.x, hi.x) > 0.0) || !(horiz_.mass(lo.y, hi.y) > 0.0))
    throw std::invalid_argument("transform rectangle must carry offset mass in both directions");
}

Vec2 RectangularTransform::forward(Vec2 p) const {
  return {vert_.forward(lo_.x, p.x), horiz_.forward(lo_.y, p.y)};
}

Vec2 RectangularTransform::inverse(Vec2 q) const {
  return {vert_.inverse(lo_.x, q.x, hi_.x), horiz_.inverse(lo_.y, q.y, hi_.y)};
}

Vec2 RectangularTransform::image_hi() const { return forward(hi_); }

}  // namespace polyfield
