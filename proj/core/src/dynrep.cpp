#include "polyfield/dynrep.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace polyfield {

namespace {

struct Particle {
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

TimeKey key_at(Vec2 p, Ev kind) {
  return {p.x, -p.y, static_cast<double>(static_cast<int>(kind))};
}

int forward_dir(const Line& l) { return l.direction().x >= 0.0 ? +1 : -1; }

struct Engine {
  Rng& g;
  const FieldContext& ctx;
  std::vector<Particle> ps;
  std::priority_queue<Event, std::vector<Event>, Later> queue;
  DynrepResult out;

  Engine(Rng& gen, const FieldContext& c) : g(gen), ctx(c) {}

  double exit_coord(const Particle& p) const {
    const auto ch = ctx.domain().chord(p.line, 0.0);
    if (!ch) throw std::runtime_error("live particle left the domain");
    return p.dir > 0 ? ch->hi : ch->lo;
  }

  void schedule_motion(std::size_t i) {
    Particle& p = ps[i];
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
    const Particle& pi = ps[i];
    for (std::size_t j = 0; j < ps.size(); ++j) {
      if (j == i || !ps[j].alive) continue;
      const Particle& pj = ps[j];
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

  std::size_t spawn(const Line& l, Vec2 at) {
    Particle p;
    p.line = l;
    p.pos = at;
    p.s = l.coord_of(at);
    p.dir = forward_dir(l);
    ps.push_back(p);
    ++out.particles;
    const std::size_t id = ps.size() - 1;
    schedule_motion(id);
    schedule_collisions(id);
    return id;
  }

  void emit(Particle& p, Vec2 to) {
    if (dist(p.pos, to) > kGeomTol) out.config.add(Segment{p.pos, to}, p.line);
    p.pos = to;
    p.s = p.line.coord_of(to);
  }

  void run(const std::vector<BirthSite>& interior, const std::vector<BoundarySite>& boundary) {
    for (std::size_t k = 0; k < interior.size(); ++k)
      queue.push({key_at(interior[k].p, Ev::Birth), Ev::Birth, 0, 0, 0, 0, interior[k].p, k});
    for (std::size_t k = 0; k < boundary.size(); ++k)
      queue.push({key_at(boundary[k].p, Ev::Birth), Ev::Birth, 0, 0, 0, 0, boundary[k].p,
                  interior.size() + k});

    while (!queue.empty()) {
      const Event ev = queue.top();
      queue.pop();
      switch (ev.kind) {
        case Ev::Birth: {
          if (ev.birth < interior.size()) {
            const BirthSite& site = interior[ev.birth];
            spawn(site.l1, site.p);
            spawn(site.l2, site.p);
          } else {
            const BoundarySite& site = boundary[ev.birth - interior.size()];
            spawn(site.l, site.p);
          }
          break;
        }
        case Ev::Update: {
          Particle& p = ps[ev.a];
          if (!p.alive || p.version != ev.va) break;
          emit(p, ev.p);
          p.line = sample_update_line(g, ctx.measure(), ev.p, p.line.direction() * p.dir);
          p.s = p.line.coord_of(ev.p);
          p.dir = forward_dir(p.line);
          ++p.version;
          ++out.updates;
          schedule_motion(ev.a);
          schedule_collisions(ev.a);
          break;
        }
        case Ev::Collision: {
          Particle& pa = ps[ev.a];
          Particle& pb = ps[ev.b];
          if (!pa.alive || !pb.alive || pa.version != ev.va || pb.version != ev.vb) break;
          emit(pa, ev.p);
          emit(pb, ev.p);
          pa.alive = pb.alive = false;
          ++out.collisions;
          break;
        }
        case Ev::Exit: {
          Particle& p = ps[ev.a];
          if (!p.alive || p.version != ev.va) break;
          emit(p, ev.p);
          p.alive = false;
          break;
        }
      }
    }
  }
};

}  // namespace

DynrepResult sample_dynrep(Rng& g, const FieldContext& ctx) {
  const auto interior = sample_interior_births(g, ctx);
  const auto boundary = sample_boundary_births(g, ctx, {1, 0});
  Engine engine(g, ctx);
  engine.run(interior, boundary);
  return std::move(engine.out);
}

}  // namespace polyfield
