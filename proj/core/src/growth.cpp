#include "polyfield/growth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace polyfield {

namespace {

double max_dist(const ConvexBody& body, Vec2 c) {
  switch (body.kind()) {
    case ConvexBody::Kind::Disk:
      return dist(body.disk_center(), c) + body.disk_radius();
    default: {
      double r = 0.0;
      for (const auto& v : body.vertices()) r = std::max(r, dist(v, c));
      return r;
    }
  }
}

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

GrowthFamily GrowthFamily::sweep(ConvexDomain domain, Vec2 direction) {
  if (direction.norm() <= kGeomTol)
    throw std::invalid_argument("growth family: zero sweep direction");
  GrowthFamily f(Kind::Sweep, std::move(domain));
  f.dir_ = direction.normalized();
  const auto span = f.domain_.body().support(f.dir_);
  f.t0_ = span.lo;
  f.t1_ = span.hi;
  return f;
}

GrowthFamily GrowthFamily::disk(ConvexDomain domain, Vec2 center) {
  if (!domain.body().contains(center, 1e-9))
    throw std::invalid_argument("growth family: disk center outside the domain");
  GrowthFamily f(Kind::Disk, std::move(domain));
  f.center_ = center;
  f.rmax_ = max_dist(f.domain_.body(), center);
  return f;
}

double GrowthFamily::reveal_time(Vec2 p) const {
  if (kind_ == Kind::Sweep) return (p.dot(dir_) - t0_) / (t1_ - t0_);
  return dist(p, center_) / rmax_;
}

double GrowthFamily::tie_key(Vec2 p) const {
  if (kind_ == Kind::Sweep) return -p.dot(dir_.perp());
  return p.x;
}

Vec2 GrowthFamily::anchor(const Line& l) const {
  if (kind_ == Kind::RectStaged) {
    for (const auto& pr : staged_->coll.items())
      if (std::min(std::abs(pr.line.phi - l.phi), kPi - std::abs(pr.line.phi - l.phi)) < 1e-9 &&
          std::abs(pr.line.signed_dist(l.foot())) < 1e-9)
        return pr.x;
  }
  const auto ch = domain_.body().chord(l);
  if (!ch) throw std::invalid_argument("growth family: line misses the domain");
  if (kind_ == Kind::Sweep) {
    const auto io = in_out_points(l, domain_, dir_);
    return io->in;
  }
  return l.at(clamp(l.coord_of(center_), ch->lo, ch->hi));
}

const ProbeCollection& GrowthFamily::generators() const {
  if (!staged_) throw std::logic_error("growth family: not staged");
  return staged_->coll;
}

const PrecedenceGraph& GrowthFamily::staged_graph() const {
  if (!staged_) throw std::logic_error("growth family: not staged");
  return staged_->graph;
}

const std::vector<std::size_t>& GrowthFamily::staged_schedule() const {
  if (!staged_) throw std::logic_error("growth family: not staged");
  return staged_->schedule;
}

GrowthFamily rectangular_growth_family(ConvexDomain domain, ProbeCollection coll) {
  if (coll.size() == 0) throw std::invalid_argument("staged growth: empty probe collection");
  for (const auto& pr : coll.items()) {
    if (!pr.line.is_vertical() && !pr.line.is_horizontal())
      throw std::invalid_argument("staged growth: line is not axis-parallel");
    if (!domain.body().contains(pr.x, kGeomTol))
      throw std::invalid_argument("staged growth: marked point outside the domain");
  }
  auto graph = build_precedence_graph(coll);
  const auto order = topological_order(graph);
  if (!order) {
    const auto cyc = find_cycle(graph);
    std::ostringstream msg;
    msg << "staged growth: precedence cycle";
    for (std::size_t v : cyc) {
      if (v < graph.generators)
        msg << " x" << v + 1;
      else
        msg << " y(" << graph.crossing_of[v - graph.generators].first + 1 << ","
            << graph.crossing_of[v - graph.generators].second + 1 << ")";
    }
    throw std::invalid_argument(msg.str());
  }

  GrowthFamily f(GrowthFamily::Kind::RectStaged, std::move(domain));
  f.center_ = coll[0].x;
  f.rmax_ = max_dist(f.domain_.body(), f.center_);
  std::vector<std::size_t> schedule;
  for (std::size_t v : *order)
    if (v >= graph.generators) schedule.push_back(v);
  f.staged_ = std::make_shared<const GrowthFamily::Staged>(
      GrowthFamily::Staged{std::move(coll), std::move(graph), std::move(schedule)});
  return f;
}

}  // namespace polyfield
