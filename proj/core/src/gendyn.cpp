#include "polyfield/gendyn.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace polyfield {

namespace {

struct Front {
  Line line;
  Vec2 pos;
  double s = 0.0;  // line coordinate of pos
  int dir = +1;    // travel orientation along line.direction()
  long version = 0;
  bool alive = true;
};

enum class Ev { Birth, Collision, Update, Exit };

struct Event {
  TimeKey key;
  Ev kind;
  std::size_t a = 0, b = 0;
  long va = 0, vb = 0;
  Vec2 p{};
  std::size_t birth = 0;  // index into the birth schedule
};

struct Later {
  bool operator()(const Event& l, const Event& r) const { return r.key < l.key; }
};

struct LineBirth {
  Line l;
  Vec2 anchor;
};

struct Engine {
  Rng& g;
  const FieldContext& ctx;
  const GrowthFamily& fam;
  std::vector<Front> ps;
  std::priority_queue<Event, std::vector<Event>, Later> queue;
  std::vector<LineBirth> joints;  // interior anchors where a line split in two
  GendynResult out;

  Engine(Rng& gen, const FieldContext& c, const GrowthFamily& f) : g(gen), ctx(c), fam(f) {}

  TimeKey key_at(Vec2 p, Ev kind) const {
    return {fam.reveal_time(p), fam.tie_key(p), static_cast<double>(static_cast<int>(kind))};
  }

  // Fronts always point away from their line's anchor, so they move outward in
  // reveal time.  Ties (birth exactly at the anchor) default to +1.
  int away_dir(const Line& l, Vec2 from) const {
    const double sa = l.coord_of(fam.anchor(l));
    return l.coord_of(from) >= sa - kGeomTol ? +1 : -1;
  }

  double exit_coord(const Front& p) const {
    const auto ch = ctx.domain().chord(p.line, 0.0);
    if (!ch) throw std::runtime_error("live front left the domain");
    return p.dir > 0 ? ch->hi : ch->lo;
  }

  void schedule_motion(std::size_t i) {
    Front& p = ps[i];
    const double send = exit_coord(p);
    const double cap = p.dir > 0 ? send - p.s : p.s - send;
    if (cap > kGeomTol) {
      const double t = invert_segment_mass(ctx.measure(), p.line, p.s, p.dir, exponential(g), cap);
      if (std::isfinite(t) && t < cap) {
        const Vec2 at = p.line.at(p.s + p.dir * t);
        queue.push({key_at(at, Ev::Update), Ev::Update, i, i, p.version, p.version, at});
      }
    }
    const Vec2 at = p.line.at(send);
    queue.push({key_at(at, Ev::Exit), Ev::Exit, i, i, p.version, p.version, at});
  }

  void schedule_collisions(std::size_t i) {
    const Front& pi = ps[i];
    for (std::size_t j = 0; j < ps.size(); ++j) {
      if (j == i || !ps[j].alive) continue;
      const Front& pj = ps[j];
      const auto q = line_intersection(pi.line, pj.line);
      if (!q) continue;
      const double di = pi.dir * (pi.line.coord_of(*q) - pi.s);
      const double dj = pj.dir * (pj.line.coord_of(*q) - pj.s);
      if (di <= kGeomTol || dj <= kGeomTol) continue;
      if (!ctx.domain().contains(*q, 0.0) || ctx.domain().body().boundary_dist(*q) <= kGeomTol)
        continue;
      queue.push({key_at(*q, Ev::Collision), Ev::Collision, i, j, pi.version, pj.version, *q});
    }
  }

  std::size_t spawn(const Line& l, Vec2 at, int dir) {
    Front p;
    p.line = l;
    p.pos = at;
    p.s = l.coord_of(at);
    p.dir = dir;
    ps.push_back(p);
    ++out.fronts;
    const std::size_t id = ps.size() - 1;
    schedule_motion(id);
    schedule_collisions(id);
    return id;
  }

  void emit(Front& p, Vec2 to) {
    if (dist(p.pos, to) > kGeomTol) out.config.add(Segment{p.pos, to}, p.line);
    p.pos = to;
    p.s = p.line.coord_of(to);
  }

  // The two fronts of a line born at an interior anchor each drew their first
  // edge from the anchor outward.  Rejoin those pieces so the anchor does not
  // survive as a straight degree-two vertex.
  void heal_joints() {
    auto& edges = out.config.edges();
    for (const auto& j : joints) {
      std::size_t found[2] = {0, 0};
      int n = 0;
      for (std::size_t i = 0; i < edges.size() && n < 2; ++i) {
        if (std::abs(edges[i].line.phi - j.l.phi) > 1e-12 ||
            std::abs(edges[i].line.rho - j.l.rho) > 1e-12)
          continue;
        if (dist(edges[i].seg.a, j.anchor) <= kGeomTol ||
            dist(edges[i].seg.b, j.anchor) <= kGeomTol)
          found[n++] = i;
      }
      if (n != 2) continue;
      const auto far = [&](const Edge& e) {
        return dist(e.seg.a, j.anchor) <= kGeomTol ? e.seg.b : e.seg.a;
      };
      edges[found[0]].seg = {far(edges[found[0]]), far(edges[found[1]])};
      edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(found[1]));
    }
  }

  void run(const std::vector<BirthSite>& interior, const std::vector<LineBirth>& lines) {
    for (std::size_t k = 0; k < interior.size(); ++k)
      queue.push({key_at(interior[k].p, Ev::Birth), Ev::Birth, 0, 0, 0, 0, interior[k].p, k});
    for (std::size_t k = 0; k < lines.size(); ++k)
      queue.push({key_at(lines[k].anchor, Ev::Birth), Ev::Birth, 0, 0, 0, 0, lines[k].anchor,
                  interior.size() + k});

    while (!queue.empty()) {
      const Event ev = queue.top();
      queue.pop();
      switch (ev.kind) {
        case Ev::Birth: {
          if (ev.birth < interior.size()) {
            const BirthSite& site = interior[ev.birth];
            spawn(site.l1, site.p, away_dir(site.l1, site.p));
            spawn(site.l2, site.p, away_dir(site.l2, site.p));
          } else {
            // A whole line enters at its anchor: two fronts head for the
            // opposite chord ends.  When the anchor sits at a chord end the
            // inward-less front exits on the spot without drawing anything.
            const LineBirth& site = lines[ev.birth - interior.size()];
            const auto ch = ctx.domain().chord(site.l, 0.0);
            const double sa = site.l.coord_of(site.anchor);
            if (ch && sa - ch->lo > kGeomTol && ch->hi - sa > kGeomTol)
              joints.push_back(site);
            spawn(site.l, site.anchor, +1);
            spawn(site.l, site.anchor, -1);
          }
          break;
        }
        case Ev::Update: {
          Front& p = ps[ev.a];
          if (!p.alive || p.version != ev.va) break;
          emit(p, ev.p);
          p.line = sample_update_line(g, ctx.measure(), ev.p, p.line.direction() * p.dir);
          p.s = p.line.coord_of(ev.p);
          p.dir = away_dir(p.line, ev.p);
          ++p.version;
          ++out.updates;
          schedule_motion(ev.a);
          schedule_collisions(ev.a);
          break;
        }
        case Ev::Collision: {
          Front& pa = ps[ev.a];
          Front& pb = ps[ev.b];
          if (!pa.alive || !pb.alive || pa.version != ev.va || pb.version != ev.vb) break;
          emit(pa, ev.p);
          emit(pb, ev.p);
          pa.alive = pb.alive = false;
          ++out.collisions;
          break;
        }
        case Ev::Exit: {
          Front& p = ps[ev.a];
          if (!p.alive || p.version != ev.va) break;
          emit(p, ev.p);
          p.alive = false;
          break;
        }
      }
    }
  }
};

bool same_domain(const ConvexDomain& a, const ConvexDomain& b) {
  for (int k = 0; k < 4; ++k) {
    const double ang = k * (kPi / 4.0);
    const Vec2 u{std::cos(ang), std::sin(ang)};
    const auto sa = a.body().support(u), sb = b.body().support(u);
    if (std::abs(sa.lo - sb.lo) > 1e-9 || std::abs(sa.hi - sb.hi) > 1e-9) return false;
  }
  return true;
}

}  // namespace

GendynResult sample_gendyn(Rng& g, const FieldContext& ctx, const GrowthFamily& family) {
  if (!same_domain(ctx.domain(), family.domain()))
    throw std::invalid_argument("growth family was built over a different domain");
  const auto interior = sample_interior_births(g, ctx);
  std::vector<LineBirth> lines;
  for (const Line& l : sample_poisson_lines(g, ctx)) {
    if (!ctx.domain().chord(l)) continue;  // tangent draws carry no chord to grow on
    lines.push_back({l, family.anchor(l)});
  }
  Engine engine(g, ctx, family);
  engine.run(interior, lines);
  engine.heal_joints();
  return std::move(engine.out);
}

}  // namespace polyfield
