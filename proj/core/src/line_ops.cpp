#include "polyfield/line_ops.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace polyfield {

namespace {

constexpr int kRejectionCap = 10000000;

double domain_diameter(const ConvexDomain& d) {
  const auto& b = d.body();
  if (b.kind() == ConvexBody::Kind::Disk) return 2.0 * b.disk_radius();
  double diam = 0.0;
  const auto& v = b.vertices();
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) diam = std::max(diam, dist(v[i], v[j]));
  return diam;
}

}  // namespace

FieldContext::FieldContext(ConvexDomain domain, ActivityMeasure measure)
    : domain_(std::move(domain)), measure_(std::move(measure)) {
  if (measure_.kind() == ActivityMeasure::Kind::Density)
    throw std::domain_error(
        "general density measures need a generator to estimate the crossing total");
  crossing_mass_ = measure_.birth_total(domain_);
  init();
}

FieldContext::FieldContext(ConvexDomain domain, ActivityMeasure measure, Rng& g, long mc_pairs)
    : domain_(std::move(domain)), measure_(std::move(measure)) {
  if (measure_.kind() == ActivityMeasure::Kind::Density) {
    Rng sub = g.stream(0x6d63);  // dedicated stream so the estimate is reproducible
    crossing_mass_ = measure_.birth_total_mc(domain_, sub, mc_pairs).value;
  } else {
    crossing_mass_ = measure_.birth_total(domain_);
  }
  init();
}

void FieldContext::init() {
  line_mass_ = measure_.hitting_mass(domain_.body());
  diameter_ = domain_diameter(domain_);
  if (!(line_mass_ > 0.0)) throw std::invalid_argument("domain carries no line mass");
}

std::vector<Line> sample_poisson_lines(Rng& g, const FieldContext& ctx) {
  const long n = poisson(g, ctx.line_mass());
  std::vector<Line> lines;
  lines.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) lines.push_back(ctx.measure().sample_hitting(g, ctx.domain()));
  return lines;
}

BirthSite sample_interior_site(Rng& g, const FieldContext& ctx) {
  for (int attempt = 0; attempt < kRejectionCap; ++attempt) {
    const Line l1 = ctx.measure().sample_hitting(g, ctx.domain());
    const Line l2 = ctx.measure().sample_hitting(g, ctx.domain());
    const auto p = line_intersection(l1, l2);
    if (p && ctx.domain().contains(*p, 0.0)) return {*p, l1, l2};
  }
  throw std::runtime_error("crossing-site rejection sampling failed");
}

std::vector<BirthSite> sample_interior_births(Rng& g, const FieldContext& ctx) {
  const long n = poisson(g, ctx.crossing_mass());
  std::vector<BirthSite> sites;
  sites.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) sites.push_back(sample_interior_site(g, ctx));
  return sites;
}

std::vector<BoundarySite> sample_boundary_births(Rng& g, const FieldContext& ctx, Vec2 time_dir) {
  std::vector<BoundarySite> sites;
  for (const Line& l : sample_poisson_lines(g, ctx)) {
    const auto io = in_out_points(l, ctx.domain(), time_dir);
    if (io) sites.push_back({io->in, l});
  }
  return sites;
}

double segment_line_mass(const ActivityMeasure& m, const Line& l, double s0, double s1) {
  if (s1 < s0) std::swap(s0, s1);
  return m.hitting_mass(Segment{l.at(s0), l.at(s1)});
}

double invert_segment_mass(const ActivityMeasure& m, const Line& l, double s0, int dir,
                           double target, double cap) {
  if (!(target > 0.0)) return 0.0;
  if (!(cap > 0.0)) return std::numeric_limits<double>::infinity();
  const double sgn = dir >= 0 ? 1.0 : -1.0;

  if (m.kind() == ActivityMeasure::Kind::Homogeneous) {
    const double t = target / (2.0 * m.homogeneous_rate());
    return t <= cap ? t : std::numeric_limits<double>::infinity();
  }
  if (m.kind() == ActivityMeasure::Kind::Rectangular &&
      m.vertical_offsets().kind() == OffsetMeasure::Kind::Lebesgue &&
      m.horizontal_offsets().kind() == OffsetMeasure::Kind::Lebesgue) {
    const Vec2 d = l.direction();
    const double rate = m.vertical_offsets().density_at(0) * std::abs(d.x) +
                        m.horizontal_offsets().density_at(0) * std::abs(d.y);
    const double t = target / rate;
    return t <= cap ? t : std::numeric_limits<double>::infinity();
  }

  const auto mass_at = [&](double t) { return segment_line_mass(m, l, s0, s0 + sgn * t); };
  if (mass_at(cap) < target) return std::numeric_limits<double>::infinity();
  double lo = 0.0, hi = cap;
  for (int i = 0; i < 100 && hi - lo > 1e-12 * (1.0 + cap); ++i) {
    const double mid = (lo + hi) / 2;
    (mass_at(mid) < target ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

Line sample_update_line(Rng& g, const ActivityMeasure& m, Vec2 p, Vec2 u) {
  const double delta = std::atan2(u.y, u.x);
  switch (m.kind()) {
    case ActivityMeasure::Kind::Homogeneous: {
      for (int i = 0; i < kRejectionCap; ++i) {
        const double phi = uniform(g, 0.0, kPi);
        if (uniform(g) < std::abs(std::sin(phi + delta))) return Line::through(p, phi);
      }
      break;
    }
    case ActivityMeasure::Kind::Rectangular: {
      const double wv = m.vertical_offsets().density_at(p.x) * std::abs(u.x);
      const double wh = m.horizontal_offsets().density_at(p.y) * std::abs(u.y);
      if (!(wv + wh > 0.0))
        throw std::runtime_error("update event at a point of zero update rate");
      return uniform(g) * (wv + wh) < wv ? Line::vertical(p.x) : Line::horizontal(p.y);
    }
    case ActivityMeasure::Kind::Density: {
      const double sup = m.density_sup();
      for (int i = 0; i < kRejectionCap; ++i) {
        const double phi = uniform(g, 0.0, kPi);
        const double w = m.density_at(Line::through(p, phi)) * std::abs(std::sin(phi + delta));
        if (uniform(g) * sup < w) return Line::through(p, phi);
      }
      break;
    }
  }
  throw std::runtime_error("update direction sampling failed");
}

}  // namespace polyfield
