#include "polyfield/polyconfig.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace polyfield {

namespace {

// Spatial hash for endpoint clustering.
struct PointBuckets {
  double cell;
  std::map<std::pair<long long, long long>, std::vector<std::size_t>> buckets;

  explicit PointBuckets(double c) : cell(c) {}
  static long long q(double v, double c) { return static_cast<long long>(std::floor(v / c)); }
  void insert(Vec2 p, std::size_t id) { buckets[{q(p.x, cell), q(p.y, cell)}].push_back(id); }
  template <typename F>
  void for_near(Vec2 p, F&& f) const {
    const long long cx = q(p.x, cell), cy = q(p.y, cell);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        const auto it = buckets.find({cx + dx, cy + dy});
        if (it == buckets.end()) continue;
        for (std::size_t id : it->second) f(id);
      }
  }
};

struct LineKey {
  double phi, rho;
};

LineKey canonical_key(const Line& l, double tol) {
  double phi = l.phi, rho = l.rho;
  while (phi >= kPi) phi -= kPi, rho = -rho;
  while (phi < 0) phi += kPi, rho = -rho;
  if (phi >= kPi - tol) {
    phi -= kPi;
    rho = -rho;
  }
  return {phi, rho};
}

}  // namespace

void PolygonalConfig::add(const Segment& s) {
  if (s.length() <= kGeomTol) throw std::invalid_argument("cannot add a zero-length edge");
  edges_.push_back({s, Line::through_points(s.a, s.b)});
}

double PolygonalConfig::total_length() const {
  double t = 0.0;
  for (const Edge& e : edges_) t += e.seg.length();
  return t;
}

double PolygonalConfig::line_mass(const ActivityMeasure& m) const {
  double t = 0.0;
  for (const Edge& e : edges_) t += m.hitting_mass(e.seg);
  return t;
}

AdmissibilityReport check_admissible(const PolygonalConfig& c, const ConvexDomain& d, double tol) {
  AdmissibilityReport rep;
  const auto& es = c.edges();
  const auto flag = [&rep](Violation v) {
    rep.ok = false;
    rep.violations.push_back(v);
  };

  for (std::size_t i = 0; i < es.size(); ++i) {
    const Edge& e = es[i];
    if (e.seg.length() <= tol) {
      flag({Violation::ZeroLength, i, i, e.seg.a});
      continue;
    }
    if (std::abs(e.line.signed_dist(e.seg.a)) > tol || std::abs(e.line.signed_dist(e.seg.b)) > tol)
      flag({Violation::OffCarrier, i, i, e.seg.a});
    if (!d.contains(e.seg.a, tol) || !d.contains(e.seg.b, tol))
      flag({Violation::OutsideDomain, i, i, d.contains(e.seg.a, tol) ? e.seg.b : e.seg.a});
  }

  // Pairwise contacts: anything that is not a shared endpoint is a violation.
  for (std::size_t i = 0; i < es.size(); ++i) {
    for (std::size_t j = i + 1; j < es.size(); ++j) {
      const auto r = segment_intersection(es[i].seg, es[j].seg, tol);
      if (r.kind == SegIntersection::Overlap) {
        if (dist(r.q0, r.q1) > tol) flag({Violation::Overlap, i, j, r.q0});
        continue;
      }
      if (r.kind == SegIntersection::Point) {
        const bool end_i = dist(r.p, es[i].seg.a) <= tol || dist(r.p, es[i].seg.b) <= tol;
        const bool end_j = dist(r.p, es[j].seg.a) <= tol || dist(r.p, es[j].seg.b) <= tol;
        if (!(end_i && end_j)) flag({Violation::Crossing, i, j, r.p});
      }
    }
  }

  // Vertex degrees.  Endpoint k of edge k/2 is stored under id 2*edge + k.
  PointBuckets buckets(std::max(tol, 1e-12));
  std::vector<Vec2> pts;
  pts.reserve(2 * es.size());
  for (std::size_t i = 0; i < es.size(); ++i) {
    pts.push_back(es[i].seg.a);
    pts.push_back(es[i].seg.b);
  }
  for (std::size_t i = 0; i < pts.size(); ++i) buckets.insert(pts[i], i);

  std::vector<char> seen(pts.size(), 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (seen[i]) continue;
    std::vector<std::size_t> cluster;
    buckets.for_near(pts[i], [&](std::size_t j) {
      if (!seen[j] && dist(pts[i], pts[j]) <= tol) cluster.push_back(j);
    });
    for (std::size_t j : cluster) seen[j] = 1;

    const Vec2 v = pts[i];
    const bool on_boundary = d.body().boundary_dist(v) <= tol;
    if (on_boundary) {
      rep.boundary_free = false;
      if (cluster.size() != 1)
        flag({Violation::BoundaryDegree, cluster[0] / 2, cluster.back() / 2, v});
      continue;
    }
    if (cluster.size() != 2) {
      flag({Violation::InteriorDegree, cluster[0] / 2, cluster.back() / 2, v});
      continue;
    }
    const auto away = [&](std::size_t id) {
      const Edge& e = es[id / 2];
      const Vec2 other = (id % 2 == 0) ? e.seg.b : e.seg.a;
      return (other - v).normalized();
    };
    const Vec2 d1 = away(cluster[0]), d2 = away(cluster[1]);
    if (std::abs(d1.cross(d2)) <= 1e-7)
      flag({Violation::StraightVertex, cluster[0] / 2, cluster[1] / 2, v});
  }

  return rep;
}

namespace {

// Parity of proper crossings of the probe segment, ignoring contacts within
// skip of the probe's own endpoints.
int crossing_parity(const PolygonalConfig& c, const Segment& probe, double skip) {
  int n = 0;
  for (const Edge& e : c.edges()) {
    const auto r = segment_intersection(probe, e.seg);
    if (r.kind != SegIntersection::Point) continue;
    if (dist(r.p, probe.a) <= skip || dist(r.p, probe.b) <= skip) continue;
    ++n;
  }
  return n;
}

bool ray_is_clean(const PolygonalConfig& c, const Segment& probe, double tol) {
  for (const Edge& e : c.edges()) {
    const auto r = segment_intersection(probe, e.seg);
    if (r.kind == SegIntersection::Overlap) return false;
    if (r.kind == SegIntersection::Point &&
        (dist(r.p, e.seg.a) <= tol || dist(r.p, e.seg.b) <= tol))
      return false;
  }
  return true;
}

}  // namespace

int ray_label(const PolygonalConfig& c, Vec2 x, double angle) {
  double reach = 1.0;
  for (const Edge& e : c.edges())
    reach = std::max({reach, dist(x, e.seg.a), dist(x, e.seg.b)});
  for (int k = 0; k < 64; ++k) {
    const double a = angle + 0.013717 * k;
    const Segment probe{x, x + Vec2{std::cos(a), std::sin(a)} * (2 * reach)};
    if (!ray_is_clean(c, probe, kGeomTol)) continue;
    return crossing_parity(c, probe, kGeomTol) % 2 == 0 ? 1 : -1;
  }
  throw std::runtime_error("no clean labeling ray found");
}

int label_at(const PolygonalConfig& c, Vec2 x) {
  // fixed slightly irrational direction so axis-parallel edges never align
  return ray_label(c, x, 0.564189583547756);
}

int label_product(const PolygonalConfig& c, Vec2 x, Vec2 y) {
  return crossing_parity(c, Segment{x, y}, kGeomTol) % 2 == 0 ? 1 : -1;
}

namespace {

struct LineGroup {
  Line rep;
  std::vector<std::pair<double, double>> a, b;  // intervals in rep coordinates
};

std::vector<LineGroup> group_by_line(const PolygonalConfig& ca, const PolygonalConfig& cb,
                                     double tol) {
  struct Item {
    LineKey key;
    const Edge* e;
    bool from_a;
  };
  std::vector<Item> items;
  for (const Edge& e : ca.edges()) items.push_back({canonical_key(e.line, tol), &e, true});
  for (const Edge& e : cb.edges()) items.push_back({canonical_key(e.line, tol), &e, false});
  std::sort(items.begin(), items.end(), [](const Item& l, const Item& r) {
    return l.key.phi != r.key.phi ? l.key.phi < r.key.phi : l.key.rho < r.key.rho;
  });

  std::vector<LineGroup> groups;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const bool fresh = groups.empty() || std::abs(items[i].key.phi - items[i - 1].key.phi) > tol ||
                       std::abs(items[i].key.rho - items[i - 1].key.rho) > tol;
    if (fresh) groups.push_back({Line{items[i].key.phi, items[i].key.rho}, {}, {}});
    LineGroup& g = groups.back();
    double s0 = g.rep.coord_of(items[i].e->seg.a), s1 = g.rep.coord_of(items[i].e->seg.b);
    if (s0 > s1) std::swap(s0, s1);
    (items[i].from_a ? g.a : g.b).push_back({s0, s1});
  }
  return groups;
}

std::vector<std::pair<double, double>> interval_union(std::vector<std::pair<double, double>> v,
                                                      double tol) {
  std::sort(v.begin(), v.end());
  std::vector<std::pair<double, double>> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.first <= out.back().second + tol)
      out.back().second = std::max(out.back().second, iv.second);
    else
      out.push_back(iv);
  }
  return out;
}

}  // namespace

PolygonalConfig symmetric_difference(const PolygonalConfig& a, const PolygonalConfig& b,
                                     double tol) {
  PolygonalConfig diff;
  for (LineGroup& g : group_by_line(a, b, tol)) {
    const auto ua = interval_union(std::move(g.a), tol);
    const auto ub = interval_union(std::move(g.b), tol);
    // sweep the merged endpoint list and keep stretches covered exactly once
    std::vector<double> cuts;
    for (const auto& iv : ua) cuts.push_back(iv.first), cuts.push_back(iv.second);
    for (const auto& iv : ub) cuts.push_back(iv.first), cuts.push_back(iv.second);
    std::sort(cuts.begin(), cuts.end());
    const auto covered = [](const std::vector<std::pair<double, double>>& u, double s) {
      for (const auto& iv : u)
        if (s >= iv.first && s <= iv.second) return true;
      return false;
    };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double lo = cuts[i], hi = cuts[i + 1];
      if (hi - lo <= tol) continue;
      const double mid = (lo + hi) / 2;
      if (covered(ua, mid) != covered(ub, mid))
        diff.add(Segment{g.rep.at(lo), g.rep.at(hi)}, g.rep);
    }
  }
  return diff;
}

double symmetric_difference_length(const PolygonalConfig& a, const PolygonalConfig& b, double tol) {
  return symmetric_difference(a, b, tol).total_length();
}

PolygonalConfig clip_config(const PolygonalConfig& c, const ConvexDomain& d) {
  PolygonalConfig out;
  for (const Edge& e : c.edges()) {
    const auto s = d.clip(e.seg);
    if (s) out.add(*s, e.line);
  }
  return out;
}

void coalesce_colinear(std::vector<Edge>& edges, double tol) {
  const auto carrier_close = [&](const Line& p, const Line& q) {
    return std::abs(p.phi - q.phi) <= tol && std::abs(p.rho - q.rho) <= tol;
  };
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < edges.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < edges.size() && !merged; ++j) {
        if (!carrier_close(edges[i].line, edges[j].line)) continue;
        for (const Vec2 pi : {edges[i].seg.a, edges[i].seg.b}) {
          for (const Vec2 pj : {edges[j].seg.a, edges[j].seg.b}) {
            if (dist(pi, pj) > tol) continue;
            const Vec2 qi = dist(pi, edges[i].seg.a) <= tol ? edges[i].seg.b : edges[i].seg.a;
            const Vec2 qj = dist(pj, edges[j].seg.a) <= tol ? edges[j].seg.b : edges[j].seg.a;
            // End-to-end, not one nested inside the other.
            const double want = edges[i].seg.length() + edges[j].seg.length();
            if (std::abs(dist(qi, qj) - want) > 2 * tol) continue;
            edges[i].seg = {qi, qj};
            edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(j));
            merged = true;
            break;
          }
          if (merged) break;
        }
      }
    }
  }
}

std::uint64_t config_hash(const PolygonalConfig& c, double quantum) {
  using Q = std::array<long long, 4>;
  std::vector<Q> rows;
  rows.reserve(c.size());
  for (const Edge& e : c.edges()) {
    const auto q = [quantum](double v) { return static_cast<long long>(std::llround(v / quantum)); };
    Q r{q(e.seg.a.x), q(e.seg.a.y), q(e.seg.b.x), q(e.seg.b.y)};
    if (std::tie(r[2], r[3]) < std::tie(r[0], r[1])) {
      std::swap(r[0], r[2]);
      std::swap(r[1], r[3]);
    }
    rows.push_back(r);
  }
  std::sort(rows.begin(), rows.end());
  std::uint64_t h = 14695981039346656037ull;
  const auto mix = [&h](unsigned char byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  for (const Q& r : rows)
    for (long long v : r)
      for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(static_cast<unsigned long long>(v) >> (8 * i)));
  return h;
}

void write_csv(std::ostream& os, const PolygonalConfig& c,
               const std::vector<std::pair<std::string, std::string>>& meta) {
  for (const auto& [k, v] : meta) os << "# " << k << ' ' << v << '\n';
  os << "x1,y1,x2,y2\n";
  char buf[160];
  for (const Edge& e : c.edges()) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", e.seg.a.x, e.seg.a.y, e.seg.b.x,
                  e.seg.b.y);
    os << buf;
  }
}

void save_csv(const std::string& path, const PolygonalConfig& c,
              const std::vector<std::pair<std::string, std::string>>& meta) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(os, c, meta);
}

PolygonalConfig read_csv(std::istream& is) {
  PolygonalConfig c;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("x1", 0) == 0) continue;
    double x1, y1, x2, y2;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &x1, &y1, &x2, &y2) != 4)
      throw std::runtime_error("malformed edge row: " + line);
    c.add(Segment{{x1, y1}, {x2, y2}});
  }
  return c;
}

PolygonalConfig load_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_csv(is);
}

}  // namespace polyfield
