#include "polyfield/dloop.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <utility>

namespace polyfield {

namespace {

constexpr double kJoinTol = 1e-9;

bool same_carrier(const Line& p, const Line& q) {
  return std::abs(p.phi - q.phi) <= 1e-9 && std::abs(p.rho - q.rho) <= 1e-9;
}

int away_dir(const GrowthFamily& fam, const Line& l, Vec2 from) {
  const double sa = l.coord_of(fam.anchor(l));
  return l.coord_of(from) >= sa - kGeomTol ? +1 : -1;
}

// ---------------------------------------------------------------------------
// Disagreement walk.  Events are processed in reveal-time order; static arcs
// act as obstacles and conveyors, creation fronts mirror the field engines.

struct Walk {
  enum class Ev { Hit = 1, Revive = 2, Update = 3, Exit = 4 };

  struct Event {
    TimeKey key;
    Ev kind;
    int f = -1, f2 = -1;  // fronts
    int arc = -1;
    long vf = 0, vf2 = 0;
    Vec2 p{};
    int branch = -1;
  };
  struct Later {
    bool operator()(const Event& l, const Event& r) const { return r.key < l.key; }
  };

  struct WArc {
    Line line;
    Vec2 a, b;
    int next = -1, partner = -1;
    bool exits = false;
    bool alive = true;
  };
  struct Front {
    Line line;
    Vec2 pos;
    double s = 0.0;
    int dir = +1;
    long version = 0;
    bool alive = true;
    int branch = 0;
    std::size_t stint = 0;
  };
  struct Branch {
    std::vector<Subpath> stints;
    bool done = false;
  };

  Rng& g;
  const FieldContext& ctx;
  const GrowthFamily& fam;
  std::vector<WArc> arcs;
  std::vector<Front> fronts;
  Branch branches[2];
  int nbranches = 0;
  bool closed_cut = false;
  std::priority_queue<Event, std::vector<Event>, Later> queue;
  DisagreementLoop loop;

  Walk(Rng& gen, const FieldContext& c, const GrowthFamily& f, const Trajectories& traj)
      : g(gen), ctx(c), fam(f) {
    arcs.reserve(traj.arcs.size());
    for (const Arc& a : traj.arcs) arcs.push_back({a.line, a.a, a.b, a.next, a.partner, a.exits});
  }

  TimeKey key_at(Vec2 p, Ev kind) const {
    return {fam.reveal_time(p), fam.tie_key(p), static_cast<double>(static_cast<int>(kind))};
  }

  double arc_span(const WArc& k) const { return dist(k.a, k.b); }

  bool arc_covers(const WArc& k, Vec2 q) const {
    if (!k.alive) return false;
    const double sa = k.line.coord_of(k.a), sb = k.line.coord_of(k.b);
    const double sq = k.line.coord_of(q);
    return (sq - sa) * (sq - sb) < -kGeomTol;  // strictly between
  }

  // --- creation fronts ----------------------------------------------------

  int start_front(int branch, const Line& l, Vec2 at, int dir) {
    Front p;
    p.line = l;
    p.pos = at;
    p.s = l.coord_of(at);
    p.dir = dir;
    p.branch = branch;
    p.stint = branches[branch].stints.size();
    branches[branch].stints.push_back({Phase::Creation, branch, {}});
    fronts.push_back(p);
    const int id = static_cast<int>(fronts.size()) - 1;
    schedule_motion(id);
    schedule_obstacles(id);
    schedule_front_hits(id);
    return id;
  }

  void emit(Front& p, Vec2 to) {
    if (dist(p.pos, to) > kGeomTol) {
      branches[p.branch].stints[p.stint].pieces.push_back({{p.pos, to}, p.line});
      loop.created_mass += ctx.measure().hitting_mass(Segment{p.pos, to});
    }
    p.pos = to;
    p.s = p.line.coord_of(to);
  }

  void schedule_motion(int fi) {
    Front& p = fronts[static_cast<std::size_t>(fi)];
    const auto ch = ctx.domain().chord(p.line, 0.0);
    if (!ch) throw std::runtime_error("disagreement front left the domain");
    const double send = p.dir > 0 ? ch->hi : ch->lo;
    const double cap = p.dir > 0 ? send - p.s : p.s - send;
    if (cap > kGeomTol) {
      const double t = invert_segment_mass(ctx.measure(), p.line, p.s, p.dir, exponential(g), cap);
      if (std::isfinite(t) && t < cap) {
        const Vec2 at = p.line.at(p.s + p.dir * t);
        queue.push({key_at(at, Ev::Update), Ev::Update, fi, -1, -1, p.version, 0, at});
      }
    }
    const Vec2 at = p.line.at(send);
    queue.push({key_at(at, Ev::Exit), Ev::Exit, fi, -1, -1, p.version, 0, at});
  }

  void schedule_obstacles(int fi) {
    const Front& p = fronts[static_cast<std::size_t>(fi)];
    for (std::size_t k = 0; k < arcs.size(); ++k) {
      if (!arcs[k].alive) continue;
      const auto q = line_intersection(p.line, arcs[k].line);
      if (!q) continue;
      if (p.dir * (p.line.coord_of(*q) - p.s) <= kGeomTol) continue;
      if (!arc_covers(arcs[k], *q)) continue;
      queue.push({key_at(*q, Ev::Hit), Ev::Hit, fi, -1, static_cast<int>(k), p.version, 0, *q});
    }
  }

  void schedule_front_hits(int fi) {
    const Front& p = fronts[static_cast<std::size_t>(fi)];
    for (std::size_t j = 0; j < fronts.size(); ++j) {
      if (static_cast<int>(j) == fi || !fronts[j].alive) continue;
      const Front& o = fronts[j];
      const auto q = line_intersection(p.line, o.line);
      if (!q) continue;
      if (p.dir * (p.line.coord_of(*q) - p.s) <= kGeomTol) continue;
      if (o.dir * (o.line.coord_of(*q) - o.s) <= kGeomTol) continue;
      if (!ctx.domain().contains(*q, 0.0) ||
          ctx.domain().body().boundary_dist(*q) <= kGeomTol)
        continue;
      queue.push({key_at(*q, Ev::Hit), Ev::Hit, fi, static_cast<int>(j), -1, p.version,
                  o.version, *q});
    }
  }

  // --- annihilation -------------------------------------------------------

  // Erase the forward chain of `k` starting at `from`; ends either chopped at
  // the boundary or with a pending revival of the collision partner.
  void ghost_chain(int branch, int k, Vec2 from) {
    Subpath sub{Phase::Annihilation, branch, {}};
    int cur = k;
    Vec2 at = from;
    while (cur >= 0) {
      WArc& w = arcs[static_cast<std::size_t>(cur)];
      const int nxt = w.next;
      const int partner = w.partner;
      const bool exits = w.exits;
      const Vec2 end = w.b;
      if (dist(at, end) > kGeomTol) {
        sub.pieces.push_back({{at, end}, w.line});
        loop.annihilated_mass += ctx.measure().hitting_mass(Segment{at, end});
      }
      if (cur == k && dist(at, w.a) > kGeomTol) {
        w.b = at;  // keep the untouched past of the particle
        w.next = -1;
        w.partner = -1;
        w.exits = false;
        if (arc_span(w) <= kGeomTol) w.alive = false;
      } else {
        w.alive = false;
      }
      if (nxt >= 0) {
        cur = nxt;
        at = arcs[static_cast<std::size_t>(cur)].a;
        continue;
      }
      if (exits) {
        branches[branch].done = true;
      } else if (partner >= 0) {
        queue.push({key_at(end, Ev::Revive), Ev::Revive, -1, -1, partner, 0, 0, end, branch});
      } else {
        throw std::runtime_error("trajectory chain without a death record");
      }
      break;
    }
    branches[branch].stints.push_back(std::move(sub));
  }

  // --- event loop ---------------------------------------------------------

  void run() {
    while (!queue.empty()) {
      const Event ev = queue.top();
      queue.pop();
      switch (ev.kind) {
        case Ev::Update: {
          Front& p = fronts[static_cast<std::size_t>(ev.f)];
          if (!p.alive || p.version != ev.vf) break;
          emit(p, ev.p);
          p.line = sample_update_line(g, ctx.measure(), ev.p, p.line.direction() * p.dir);
          p.s = p.line.coord_of(ev.p);
          p.dir = away_dir(fam, p.line, ev.p);
          ++p.version;
          schedule_motion(ev.f);
          schedule_obstacles(ev.f);
          schedule_front_hits(ev.f);
          break;
        }
        case Ev::Exit: {
          Front& p = fronts[static_cast<std::size_t>(ev.f)];
          if (!p.alive || p.version != ev.vf) break;
          emit(p, ev.p);
          p.alive = false;
          branches[p.branch].done = true;
          break;
        }
        case Ev::Hit: {
          if (ev.f2 >= 0) {  // two creation fronts: the loop closes here
            Front& pa = fronts[static_cast<std::size_t>(ev.f)];
            Front& pb = fronts[static_cast<std::size_t>(ev.f2)];
            if (!pa.alive || !pb.alive || pa.version != ev.vf || pb.version != ev.vf2) break;
            emit(pa, ev.p);
            emit(pb, ev.p);
            pa.alive = pb.alive = false;
            branches[pa.branch].done = branches[pb.branch].done = true;
            closed_cut = true;
            break;
          }
          Front& p = fronts[static_cast<std::size_t>(ev.f)];
          if (!p.alive || p.version != ev.vf) break;
          if (!arc_covers(arcs[static_cast<std::size_t>(ev.arc)], ev.p)) break;
          emit(p, ev.p);  // the front and the old particle die together here
          p.alive = false;
          ghost_chain(p.branch, ev.arc, ev.p);
          break;
        }
        case Ev::Revive: {
          if (branches[ev.branch].done) break;
          WArc& k = arcs[static_cast<std::size_t>(ev.arc)];
          if (!k.alive || dist(k.b, ev.p) > kJoinTol) {
            // The partner was erased by the other branch: two annihilation
            // subpaths meet here and the loop closes.
            branches[ev.branch].done = true;
            closed_cut = true;
            break;
          }
          k.partner = -1;  // survives its old collision and keeps extending
          start_front(ev.branch, k.line, ev.p, away_dir(fam, k.line, ev.p));
          break;
        }
      }
    }
  }

  // --- wrap-up ------------------------------------------------------------

  ApplyResult finish(std::shared_ptr<const FieldContext> ctx_ptr,
                     std::shared_ptr<const GrowthFamily> fam_ptr) {
    std::vector<Edge> edges;
    for (const WArc& w : arcs)
      if (w.alive && arc_span(w) > kGeomTol) edges.push_back({{w.a, w.b}, w.line});
    for (int b = 0; b < nbranches; ++b)
      for (Subpath& s : branches[b].stints) {
        if (s.phase == Phase::Creation)
          for (const Edge& e : s.pieces) edges.push_back(e);
        if (!s.pieces.empty()) loop.subpaths.push_back(std::move(s));
      }
    coalesce_colinear(edges, kJoinTol);
    PolygonalConfig cfg;
    for (const Edge& e : edges) cfg.add(e);
    loop.closure = closed_cut ? LoopClosure::Closed : LoopClosure::Chopped;
    return {ChainState(std::move(ctx_ptr), std::move(fam_ptr), std::move(cfg)), std::move(loop)};
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Trajectory recovery.

Trajectories build_trajectories(const PolygonalConfig& c, const ConvexDomain& d,
                                const GrowthFamily& family, double tol) {
  Trajectories out;
  struct End {
    Vec2 p;
    int arc;
    bool head;  // forward end of its arc
  };
  std::vector<End> ends;

  for (const Edge& e : c.edges()) {
    const Line& l = e.line;
    double s1 = l.coord_of(e.seg.a), s2 = l.coord_of(e.seg.b);
    if (s1 > s2) std::swap(s1, s2);
    const Vec2 anchor = family.anchor(l);
    const double sa = l.coord_of(anchor);
    if (sa > s1 + tol && sa < s2 - tol) {
      const int minus = static_cast<int>(out.arcs.size());
      out.arcs.push_back({l, anchor, l.at(s1)});
      out.arcs.push_back({l, anchor, l.at(s2)});
      out.registry.push_back({BirthRecord::Kind::LineAnchor, anchor, l, minus, minus + 1});
      ends.push_back({l.at(s1), minus, true});
      ends.push_back({l.at(s2), minus + 1, true});
      continue;
    }
    const bool near_lo = std::abs(s1 - sa) <= std::abs(s2 - sa);
    const Vec2 pn = l.at(near_lo ? s1 : s2), pf = l.at(near_lo ? s2 : s1);
    const int id = static_cast<int>(out.arcs.size());
    out.arcs.push_back({l, pn, pf});
    ends.push_back({pf, id, true});
    if (dist(pn, anchor) <= tol)
      out.registry.push_back({BirthRecord::Kind::LineAnchor, anchor, l, id, -1});
    else
      ends.push_back({pn, id, false});
  }

  // Cluster endpoints and classify the vertices.
  std::vector<bool> used(ends.size(), false);
  for (std::size_t i = 0; i < ends.size(); ++i) {
    if (used[i]) continue;
    std::vector<std::size_t> cl{i};
    used[i] = true;
    for (std::size_t j = i + 1; j < ends.size(); ++j)
      if (!used[j] && dist(ends[i].p, ends[j].p) <= tol) {
        cl.push_back(j);
        used[j] = true;
      }
    std::vector<std::size_t> tails, heads;
    for (std::size_t j : cl) (ends[j].head ? heads : tails).push_back(j);

    const bool near_boundary = d.body().boundary_dist(ends[i].p) <= tol;
    if (near_boundary && tails.empty() && heads.size() == 1) {
      out.arcs[static_cast<std::size_t>(ends[heads[0]].arc)].exits = true;
      continue;
    }
    if (tails.size() == 2 && heads.empty()) {
      out.registry.push_back({BirthRecord::Kind::Vertex, ends[i].p, Line{}, ends[tails[0]].arc,
                              ends[tails[1]].arc});
    } else if (tails.empty() && heads.size() == 2) {
      out.arcs[static_cast<std::size_t>(ends[heads[0]].arc)].partner = ends[heads[1]].arc;
      out.arcs[static_cast<std::size_t>(ends[heads[1]].arc)].partner = ends[heads[0]].arc;
    } else if (tails.size() == 1 && heads.size() == 1) {
      if (ends[heads[0]].arc == ends[tails[0]].arc)
        throw std::invalid_argument("trajectory structure: degenerate update");
      out.arcs[static_cast<std::size_t>(ends[heads[0]].arc)].next = ends[tails[0]].arc;
    } else {
      throw std::invalid_argument(near_boundary ? "trajectory structure: bad boundary vertex"
                                                : "trajectory structure: bad interior vertex");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

PolygonalConfig DisagreementLoop::as_config() const {
  PolygonalConfig c;
  for (const Subpath& s : subpaths)
    for (const Edge& e : s.pieces) c.add(e);
  return c;
}

ChainState::ChainState(std::shared_ptr<const FieldContext> ctx,
                       std::shared_ptr<const GrowthFamily> family, PolygonalConfig initial)
    : ctx_(std::move(ctx)), family_(std::move(family)), config_(std::move(initial)) {
  traj_ = build_trajectories(config_, ctx_->domain(), *family_);
}

ChainState::ChainState(const FieldContext& ctx, const GrowthFamily& family,
                       PolygonalConfig initial)
    : ChainState(std::make_shared<const FieldContext>(ctx),
                 std::make_shared<const GrowthFamily>(family), std::move(initial)) {}

ApplyResult apply_birth(const ChainState& state, const BirthSite& site, Rng& g) {
  Walk w(g, state.ctx(), state.family(), state.trajectories());
  w.nbranches = 2;
  w.start_front(0, site.l1, site.p, away_dir(state.family(), site.l1, site.p));
  w.start_front(1, site.l2, site.p, away_dir(state.family(), site.l2, site.p));
  w.run();
  return w.finish(state.ctx_ptr(), state.family_ptr());
}

ApplyResult apply_line_birth(const ChainState& state, const Line& l, Rng& g) {
  const auto ch = state.ctx().domain().chord(l);
  if (!ch) throw std::invalid_argument("line birth: line misses the domain");
  Walk w(g, state.ctx(), state.family(), state.trajectories());
  const Vec2 anchor = state.family().anchor(l);
  const double sa = l.coord_of(anchor);
  if (ch->hi - sa > kGeomTol) w.start_front(w.nbranches++, l, anchor, +1);
  if (sa - ch->lo > kGeomTol) w.start_front(w.nbranches++, l, anchor, -1);
  w.run();
  return w.finish(state.ctx_ptr(), state.family_ptr());
}

ApplyResult apply_death(const ChainState& state, std::size_t record, Rng& g) {
  if (record >= state.registry_size())
    throw std::invalid_argument("death move: no such registry record");
  const BirthRecord& rec = state.trajectories().registry[record];
  Walk w(g, state.ctx(), state.family(), state.trajectories());
  if (rec.arc1 >= 0) {
    w.nbranches++;
    w.ghost_chain(0, rec.arc1, w.arcs[static_cast<std::size_t>(rec.arc1)].a);
  }
  if (rec.arc2 >= 0) {
    w.nbranches++;
    w.ghost_chain(1, rec.arc2, w.arcs[static_cast<std::size_t>(rec.arc2)].a);
  }
  w.run();
  return w.finish(state.ctx_ptr(), state.family_ptr());
}

StepInfo mcmc_step(ChainState& state, double beta, Rng& g) {
  const FieldContext& ctx = state.ctx();
  const double bv = ctx.crossing_mass();
  const double bl = ctx.line_mass();
  const double dtot = static_cast<double>(state.registry_size());
  const double total = bv + bl + dtot;

  StepInfo info;
  info.ds = exponential(g) / total;
  const double u = uniform(g) * total;

  ApplyResult prop = [&]() {
    if (u < bv) {
      info.was_birth = true;
      return apply_birth(state, sample_interior_site(g, ctx), g);
    }
    if (u < bv + bl) {
      info.was_birth = true;
      for (;;) {
        const Line l = ctx.measure().sample_hitting(g, ctx.domain());
        if (ctx.domain().chord(l)) return apply_line_birth(state, l, g);
      }
    }
    return apply_death(state, uniform_index(g, state.registry_size()), g);
  }();
  info.closure = prop.loop.closure;

  const double dl = prop.state.config().line_mass(ctx.measure()) -
                    state.config().line_mass(ctx.measure());
  const double p = std::exp(-(beta - 1.0) * dl);
  info.accepted = p >= 1.0 || bernoulli(g, p);
  if (info.accepted) state = std::move(prop.state);
  return info;
}

std::vector<ChainSample> run_chain(ChainState state, double beta, double s_max, double thin,
                                   Rng& g) {
  if (s_max > 0.0 && !(thin > 0.0))
    throw std::invalid_argument("run_chain: thinning interval must be positive");
  std::vector<ChainSample> out;
  out.push_back({0.0, state.config()});
  if (!(s_max > 0.0)) return out;
  double s = 0.0, next = thin;
  while (next <= s_max + 1e-12) {
    PolygonalConfig snapshot = state.config();
    const StepInfo info = mcmc_step(state, beta, g);
    const double s_new = s + info.ds;
    while (next <= s_max + 1e-12 && next < s_new) {
      out.push_back({next, snapshot});
      next += thin;
    }
    s = s_new;
  }
  return out;
}

}  // namespace polyfield
