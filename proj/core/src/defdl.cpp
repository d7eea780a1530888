#include "polyfield/defdl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>

namespace polyfield {

namespace {

constexpr double kJoinTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool carrier_match(const Line& p, const Line& q, double tol = 1e-9) {
  return std::abs(p.phi - q.phi) <= tol && std::abs(p.rho - q.rho) <= tol;
}

double seg_dist(const Segment& s, Vec2 v) {
  const Vec2 ab = s.b - s.a;
  const double l2 = ab.norm2();
  const double t = l2 > 0 ? std::clamp((v - s.a).dot(ab) / l2, 0.0, 1.0) : 0.0;
  return dist(s.a + ab * t, v);
}

// ---------------------------------------------------------------------------
// Graph view of the configuration: per-edge line coordinates plus the
// neighbouring edge across each interior endpoint.  Admissibility makes every
// interior endpoint pair up with exactly one other.

struct GEdge {
  Line line;
  Segment seg;    // original endpoints, kept bitwise for untouched edges
  double lo, hi;  // endpoint line coordinates, lo < hi
  Vec2 plo, phi;  // the endpoint at lo resp. hi
  int nbr_lo = -1, nbr_hi = -1;
};

std::vector<GEdge> edge_graph(const PolygonalConfig& c, double tol) {
  std::vector<GEdge> ge;
  ge.reserve(c.size());
  for (const Edge& e : c.edges()) {
    GEdge w;
    w.line = e.line;
    w.seg = e.seg;
    const double sa = e.line.coord_of(e.seg.a), sb = e.line.coord_of(e.seg.b);
    if (sa <= sb) {
      w.lo = sa; w.hi = sb; w.plo = e.seg.a; w.phi = e.seg.b;
    } else {
      w.lo = sb; w.hi = sa; w.plo = e.seg.b; w.phi = e.seg.a;
    }
    ge.push_back(w);
  }
  for (std::size_t i = 0; i < ge.size(); ++i) {
    for (int si = 0; si < 2; ++si) {
      const Vec2 pi = si == 0 ? ge[i].plo : ge[i].phi;
      for (std::size_t j = i + 1; j < ge.size(); ++j) {
        for (int sj = 0; sj < 2; ++sj) {
          const Vec2 pj = sj == 0 ? ge[j].plo : ge[j].phi;
          if (dist(pi, pj) > tol) continue;
          int& ni = si == 0 ? ge[i].nbr_lo : ge[i].nbr_hi;
          int& nj = sj == 0 ? ge[j].nbr_lo : ge[j].nbr_hi;
          if (ni != -1 || nj != -1)
            throw std::logic_error("defective walk: interior vertex of degree > 2");
          ni = static_cast<int>(j);
          nj = static_cast<int>(i);
        }
      }
    }
  }
  return ge;
}

// ---------------------------------------------------------------------------
// The walk.  Both branches advance on one unit-speed clock; every event
// carries the owning tip's version so that anything scheduled before a turn,
// a phase switch, or a death is dropped when it pops.

struct DefWalk {
  enum class Ev { Cut = 1, Self = 2, Collide = 3, Vertex = 4, Update = 5, Exit = 6 };

  struct Event {
    double u = 0.0;
    Ev kind = Ev::Exit;
    int br = 0;
    long v = -1, v2 = -1;   // owner version; second version for tip-tip meets
    Vec2 p{};
    double u_other = -1.0;  // Cut: the other branch's passage time at p
    int edge = -1;          // Collide: edge hit; Vertex: edge being erased
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.u != b.u) return a.u > b.u;
      return static_cast<int>(a.kind) > static_cast<int>(b.kind);
    }
  };

  struct Piece {
    Phase phase = Phase::Creation;
    Line line;
    int edge = -1;  // annihilation: the graph edge erased
    Vec2 p, q;      // from p (at u0) to q (at u1); |q - p| = u1 - u0
    double u0 = 0.0, u1 = 0.0;
  };

  struct Tip {
    Phase phase = Phase::Creation;
    Line line;
    Vec2 pos{};
    double s = 0.0;  // line coordinate of pos
    int dir = +1;    // sign along line.direction()
    double u = 0.0;  // clock at pos; pos is also the current piece's start
    int edge = -1;   // annihilation: the graph edge being erased
    long version = 0;
    bool alive = false;
  };

  enum class End { Closed, Chopped, Failed };

  Rng& g;
  const FieldContext& ctx;
  const DecisionRule& rule;
  std::vector<GEdge> ge;
  Tip tip[2];
  std::vector<Piece> log[2];
  std::priority_queue<Event, std::vector<Event>, Later> queue;
  End endkind = End::Chopped;
  double chop_u[2] = {kInf, kInf};
  bool done = false;

  DefWalk(Rng& gen, const FieldContext& c, const DecisionRule& r, std::vector<GEdge> graph)
      : g(gen), ctx(c), rule(r), ge(std::move(graph)) {}

  Vec2 virtual_pos(const Tip& t, double u) const { return t.line.at(t.s + t.dir * (u - t.u)); }

  void emit(int br, Vec2 q, double u1) {
    Tip& t = tip[br];
    if (dist(t.pos, q) > kGeomTol) {
      Piece pc;
      pc.phase = t.phase;
      pc.line = t.line;
      pc.edge = t.phase == Phase::Annihilation ? t.edge : -1;
      pc.p = t.pos;
      pc.q = q;
      pc.u0 = t.u;
      pc.u1 = u1;
      log[br].push_back(pc);
    }
  }

  void die(int br, double now) {
    tip[br].alive = false;
    ++tip[br].version;
    if (!tip[0].alive && !tip[1].alive)
      done = true;
    else
      refresh_other(br, now);
  }

  int turn(int br, Vec2 at, Vec2 incoming, const Line& next) {
    std::vector<Edge> path;
    path.reserve(log[br].size());
    for (const Piece& pc : log[br]) path.push_back({{pc.p, pc.q}, pc.line});
    const int d = rule(path, at, incoming, next);
    if (d != 1 && d != -1) throw std::invalid_argument("decision rule must return +1 or -1");
    return d;
  }

  // Is the edge material at coordinate c still present at time u?  Erasures
  // take effect when the eraser passes, so this is a race against both the
  // finished cuts and the other branch's moving one.
  bool material_at(int j, double c, double u) const {
    for (int b = 0; b < 2; ++b) {
      for (const Piece& pc : log[b]) {
        if (pc.phase != Phase::Annihilation || pc.edge != j) continue;
        const double c0 = ge[j].line.coord_of(pc.p), c1 = ge[j].line.coord_of(pc.q);
        if (c < std::min(c0, c1) - kJoinTol || c > std::max(c0, c1) + kJoinTol) continue;
        if (pc.u0 + std::abs(c - c0) <= u + kGeomTol) return false;
      }
      const Tip& t = tip[b];
      if (t.alive && t.phase == Phase::Annihilation && t.edge == j) {
        const double cv = t.s + t.dir * (u - t.u);
        if (c >= std::min(t.s, cv) - kJoinTol && c <= std::max(t.s, cv) + kJoinTol) return false;
      }
    }
    return true;
  }

  // Passage time of the other branch's erasure through v, if it erased there
  // by time u.  Used when an eraser reaches a vertex: meeting erased ground
  // of the same phase closes the loop.
  std::optional<double> other_erased_at(int ob, Vec2 v, double u) const {
    for (const Piece& pc : log[ob]) {
      if (pc.phase != Phase::Annihilation) continue;
      if (seg_dist({pc.p, pc.q}, v) > kJoinTol) continue;
      const double w = pc.u0 + dist(pc.p, v);
      if (w <= u + kGeomTol) return w;
    }
    const Tip& t = tip[ob];
    if (t.alive && t.phase == Phase::Annihilation) {
      const Vec2 now = virtual_pos(t, u);
      if (seg_dist({t.pos, now}, v) <= kJoinTol) {
        const double w = t.u + dist(t.pos, v);
        if (w <= u + kGeomTol) return w;
      }
    }
    return std::nullopt;
  }

  // A version bump freezes the previous piece, so the other branch's pending
  // meets against it died with the old version; refresh them.
  void refresh_other(int br, double now) {
    const int ob = 1 - br;
    if (!tip[ob].alive) return;
    if (tip[ob].phase == Phase::Creation)
      cre_cuts(ob, now);
    else
      ann_cuts(ob, now);
  }

  void spawn_creation(int br, const Line& l, Vec2 at, int dir, double u) {
    Tip& t = tip[br];
    t.phase = Phase::Creation;
    t.line = l;
    t.pos = at;
    t.s = l.coord_of(at);
    t.dir = dir;
    t.u = u;
    t.edge = -1;
    t.alive = true;
    ++t.version;
    sched_creation(br);
    refresh_other(br, u);
  }

  void spawn_annihilation(int br, int edge, Vec2 at, int dir, double u) {
    Tip& t = tip[br];
    t.phase = Phase::Annihilation;
    t.line = ge[edge].line;
    t.pos = at;
    t.s = t.line.coord_of(at);
    t.dir = dir;
    t.u = u;
    t.edge = edge;
    t.alive = true;
    ++t.version;
    sched_annihilation(br);
    refresh_other(br, u);
  }

  void sched_creation(int br) {
    Tip& t = tip[br];
    const int ob = 1 - br;
    const auto ch = ctx.domain().chord(t.line);
    if (!ch) {  // grazing update line: nothing to draw
      die(br, t.u);
      return;
    }
    const double cap_s = t.dir > 0 ? ch->hi : ch->lo;
    const double capd = std::max((cap_s - t.s) * t.dir, 0.0);
    {
      Event e{t.u + capd, Ev::Exit, br, t.version, -1, t.line.at(cap_s)};
      queue.push(e);
    }
    const double step = invert_segment_mass(ctx.measure(), t.line, t.s, t.dir, exponential(g), capd);
    if (step < capd - kGeomTol) {
      Event e{t.u + step, Ev::Update, br, t.version, -1, t.line.at(t.s + t.dir * step)};
      queue.push(e);
    }
    // configuration obstacles; presence is re-checked when they pop
    for (std::size_t j = 0; j < ge.size(); ++j) {
      const auto q = line_intersection(t.line, ge[j].line);
      if (!q) continue;
      const double d = (t.line.coord_of(*q) - t.s) * t.dir;
      if (d <= kGeomTol || d >= capd + kGeomTol) continue;
      const double cj = ge[j].line.coord_of(*q);
      if (cj < ge[j].lo - kJoinTol || cj > ge[j].hi + kJoinTol) continue;
      Event e{t.u + d, Ev::Collide, br, t.version, -1, *q};
      e.edge = static_cast<int>(j);
      queue.push(e);
    }
    // own path: a hit fails the update
    for (const Piece& pc : log[br]) {
      const auto q = line_intersection(t.line, pc.line);
      if (!q) continue;
      if (seg_dist({pc.p, pc.q}, *q) > kJoinTol) continue;
      const double d = (t.line.coord_of(*q) - t.s) * t.dir;
      if (d <= kGeomTol || d >= capd + kGeomTol) continue;
      Event e{t.u + d, Ev::Self, br, t.version, -1, *q};
      queue.push(e);
    }
    cre_cuts(br, t.u);
  }

  // Same-phase meets of a creating tip: the other branch's drawn creation
  // pieces (a hit closes the loop at the tip's arrival) and its live ray
  // (the meet materializes at the later arrival).  `now` is the clock of the
  // event that triggered the scheduling; a refresh can run long after the
  // tip's own last event, so anything the tip already passed is stale and was
  // covered by an earlier scheduling round.
  void cre_cuts(int br, double now) {
    Tip& t = tip[br];
    const int ob = 1 - br;
    for (const Piece& pc : log[ob]) {
      if (pc.phase != Phase::Creation) continue;
      const auto q = line_intersection(t.line, pc.line);
      if (!q) continue;
      if (seg_dist({pc.p, pc.q}, *q) > kJoinTol) continue;
      const double d = (t.line.coord_of(*q) - t.s) * t.dir;
      if (d <= kGeomTol || t.u + d < now - kGeomTol) continue;
      Event e{t.u + d, Ev::Cut, br, t.version, -1, *q};
      e.u_other = pc.u0 + dist(pc.p, *q);
      queue.push(e);
    }
    if (tip[ob].alive && tip[ob].phase == Phase::Creation) {
      const auto q = line_intersection(t.line, tip[ob].line);
      if (q) {
        const double dm = (t.line.coord_of(*q) - t.s) * t.dir;
        const double dd = (tip[ob].line.coord_of(*q) - tip[ob].s) * tip[ob].dir;
        if (dm > kGeomTol && dd > kGeomTol) {
          const double am = t.u + dm, ao = tip[ob].u + dd;
          if (std::max(am, ao) < now - kGeomTol) return;
          Event e{std::max(am, ao), Ev::Cut, am >= ao ? br : ob,
                  am >= ao ? t.version : tip[ob].version,
                  am >= ao ? tip[ob].version : t.version, *q};
          e.u_other = std::min(am, ao);
          queue.push(e);
        }
      }
    }
  }

  void sched_annihilation(int br) {
    Tip& t = tip[br];
    const int ob = 1 - br;
    const GEdge& E = ge[t.edge];
    const double end_s = t.dir > 0 ? E.hi : E.lo;
    const double dend = std::max((end_s - t.s) * t.dir, 0.0);
    {
      Event e{t.u + dend, Ev::Vertex, br, t.version, -1, t.dir > 0 ? E.phi : E.plo};
      e.edge = t.edge;
      queue.push(e);
    }
    ann_cuts(br, t.u);
  }

  // Same-phase meets of an eraser: the other eraser approaching on the same
  // edge (they meet mid-gap; erasers separating from a shared death germ
  // never do) and the other branch's finished cuts there.  Both checks use
  // the tip's virtual position at `now`, not its position at its last event:
  // a refresh must not rediscover ground the eraser has already moved past.
  void ann_cuts(int br, double now) {
    Tip& t = tip[br];
    const int ob = 1 - br;
    const GEdge& E = ge[t.edge];
    const Tip& o = tip[ob];
    const double cs = t.s + t.dir * (now - t.u);
    if (o.alive && o.phase == Phase::Annihilation && o.edge == t.edge && o.dir != t.dir &&
        (o.s + o.dir * (now - o.u) - cs) * t.dir > kGeomTol) {
      const double tau = (o.s - t.s + t.dir * t.u - o.dir * o.u) / (t.dir - o.dir);
      if (tau >= now - kGeomTol) {
        const double c = t.s + t.dir * (tau - t.u);
        Event e{tau, Ev::Cut, br, t.version, o.version, E.line.at(c)};
        e.u_other = tau;
        queue.push(e);
      }
    }
    for (const Piece& pc : log[ob]) {
      if (pc.phase != Phase::Annihilation || pc.edge != t.edge) continue;
      const double c0 = E.line.coord_of(pc.p), c1 = E.line.coord_of(pc.q);
      const double m = std::min(c0, c1), M = std::max(c0, c1);
      double first;
      if (t.dir > 0) {
        if (M < cs - kJoinTol) continue;
        first = std::max(m, cs);
      } else {
        if (m > cs + kJoinTol) continue;
        first = std::min(M, cs);
      }
      const double d = std::max((first - t.s) * t.dir, 0.0);
      Event e{t.u + d, Ev::Cut, br, t.version, -1, E.line.at(first)};
      e.u_other = pc.u0 + std::abs(first - c0);
      queue.push(e);
    }
  }

  void close_at(const Event& e) {
    const int ob = 1 - e.br;
    emit(e.br, e.p, e.u);
    if (tip[ob].alive) emit(ob, virtual_pos(tip[ob], e.u), e.u);
    chop_u[e.br] = e.u;
    chop_u[ob] = e.u_other;
    endkind = End::Closed;
    done = true;
  }

  void run() {
    if (!tip[0].alive && !tip[1].alive) done = true;
    while (!done) {
      if (queue.empty()) throw std::logic_error("defective walk stalled");
      const Event e = queue.top();
      queue.pop();
      Tip& t = tip[e.br];
      if (e.v != t.version || !t.alive) continue;
      if (e.v2 >= 0 && e.v2 != tip[1 - e.br].version) continue;
      switch (e.kind) {
        case Ev::Cut:
          close_at(e);
          break;
        case Ev::Self:
          endkind = End::Failed;
          done = true;
          break;
        case Ev::Collide: {
          if (!material_at(e.edge, ge[e.edge].line.coord_of(e.p), e.u)) break;  // erased gap
          emit(e.br, e.p, e.u);
          const Vec2 inc = t.line.direction() * t.dir;
          const int choice = turn(e.br, e.p, inc, ge[e.edge].line);
          spawn_annihilation(e.br, e.edge, e.p, choice, e.u);
          break;
        }
        case Ev::Vertex: {
          emit(e.br, e.p, e.u);
          // same-phase ground meets the other branch's erasure: closed
          if (const auto w = other_erased_at(1 - e.br, e.p, e.u)) {
            Event cut = e;
            cut.kind = Ev::Cut;
            cut.u_other = *w;
            close_at(cut);
            break;
          }
          const GEdge& E = ge[e.edge];
          const int nbr = t.dir > 0 ? E.nbr_hi : E.nbr_lo;
          if (nbr < 0) {  // erased into the boundary
            t.pos = e.p;
            t.u = e.u;
            die(e.br, e.u);
            break;
          }
          const GEdge& K = ge[nbr];
          const Vec2 inc = t.line.direction() * t.dir;
          const int choice = turn(e.br, e.p, inc, K.line);
          const double ck = K.line.coord_of(e.p);
          const int into = std::abs(ck - K.lo) < std::abs(ck - K.hi) ? +1 : -1;
          if (choice == into)
            spawn_annihilation(e.br, nbr, e.p, choice, e.u);
          else
            spawn_creation(e.br, K.line, e.p, choice, e.u);
          break;
        }
        case Ev::Update: {
          emit(e.br, e.p, e.u);
          const Vec2 inc = t.line.direction() * t.dir;
          const Line nl = sample_update_line(g, ctx.measure(), e.p, inc);
          const int choice = turn(e.br, e.p, inc, nl);
          spawn_creation(e.br, nl, e.p, choice, e.u);
          break;
        }
        case Ev::Exit: {
          emit(e.br, e.p, e.u);
          t.pos = e.p;
          t.u = e.u;
          die(e.br, e.u);
          break;
        }
      }
    }
  }

  void chop(int br, double cu) {
    auto& L = log[br];
    std::size_t n = 0;
    for (; n < L.size(); ++n) {
      if (L[n].u1 <= cu + kGeomTol) continue;
      if (L[n].u0 >= cu - kGeomTol) break;
      const Vec2 d = (L[n].q - L[n].p).normalized();
      L[n].q = L[n].p + d * (cu - L[n].u0);
      L[n].u1 = cu;
      if (dist(L[n].p, L[n].q) > kGeomTol) ++n;
      break;
    }
    L.resize(n);
  }

  DisagreementLoop loop() {
    DisagreementLoop out;
    out.closure = endkind == End::Closed ? LoopClosure::Closed : LoopClosure::Chopped;
    for (int b = 0; b < 2; ++b) {
      if (chop_u[b] < kInf) chop(b, chop_u[b]);
      Subpath* cur = nullptr;
      for (const Piece& pc : log[b]) {
        if (!cur || cur->phase != pc.phase) {
          out.subpaths.push_back({pc.phase, b, {}});
          cur = &out.subpaths.back();
        }
        cur->pieces.push_back({{pc.p, pc.q}, pc.line});
        const double m = ctx.measure().hitting_mass(Segment{pc.p, pc.q});
        (pc.phase == Phase::Creation ? out.created_mass : out.annihilated_mass) += m;
      }
    }
    return out;
  }

  // Old edges minus the erased intervals, plus the created pieces; the logs
  // must be chopped first (loop() does that).
  PolygonalConfig assemble() const {
    PolygonalConfig cfg;
    for (std::size_t j = 0; j < ge.size(); ++j) {
      std::vector<std::pair<double, double>> cuts;
      for (int b = 0; b < 2; ++b) {
        for (const Piece& pc : log[b]) {
          if (pc.phase != Phase::Annihilation || pc.edge != static_cast<int>(j)) continue;
          const double c0 = ge[j].line.coord_of(pc.p), c1 = ge[j].line.coord_of(pc.q);
          cuts.emplace_back(std::min(c0, c1), std::max(c0, c1));
        }
      }
      if (cuts.empty()) {
        cfg.add(ge[j].seg, ge[j].line);
        continue;
      }
      std::sort(cuts.begin(), cuts.end());
      const auto point_at = [&](double c) {
        if (std::abs(c - ge[j].lo) <= kGeomTol) return ge[j].plo;
        if (std::abs(c - ge[j].hi) <= kGeomTol) return ge[j].phi;
        return ge[j].line.at(c);
      };
      double at = ge[j].lo;
      for (const auto& [a, b] : cuts) {
        if (a - at > kGeomTol) cfg.add(Segment{point_at(at), point_at(a)}, ge[j].line);
        at = std::max(at, b);
      }
      if (ge[j].hi - at > kGeomTol) cfg.add(Segment{point_at(at), point_at(ge[j].hi)}, ge[j].line);
    }
    for (int b = 0; b < 2; ++b)
      for (const Piece& pc : log[b])
        if (pc.phase == Phase::Creation) cfg.add(Segment{pc.p, pc.q}, pc.line);
    coalesce_colinear(cfg.edges(), kJoinTol);
    return cfg;
  }
};

}  // namespace

DecisionRule away_from_anchor_rule(std::shared_ptr<const GrowthFamily> family) {
  return [family = std::move(family)](const std::vector<Edge>&, Vec2 at, Vec2, const Line& next) {
    return next.coord_of(at) >= next.coord_of(family->anchor(next)) - kGeomTol ? +1 : -1;
  };
}

DecisionRule edec_vertical_rule(double x_ref) {
  return [x_ref](const std::vector<Edge>&, Vec2 at, Vec2, const Line& next) {
    const Vec2 d = next.direction();
    if (std::abs(d.x) >= std::abs(d.y)) {
      const int away = at.x >= x_ref - kGeomTol ? +1 : -1;  // rightwards on the line itself
      return d.x > 0 ? away : -away;
    }
    return d.y > 0 ? +1 : -1;  // upwards
  };
}

DefResult def_apply(const ChainState& state, const DefGerm& germ, DefMode mode,
                    const DecisionRule& rule, Rng& g, double beta) {
  const FieldContext& ctx = state.ctx();
  if (!germ.line.contains(germ.point, 1e-7))
    throw std::domain_error("def_apply: germ point is off the germ line");
  if (!ctx.domain().contains(germ.point, 1e-7))
    throw std::domain_error("def_apply: germ point is outside the domain");
  const auto ch = ctx.domain().chord(germ.line);
  if (!ch) throw std::domain_error("def_apply: germ line misses the domain");

  DefWalk w(g, ctx, rule, edge_graph(state.config(), kJoinTol));

  if (mode == DefMode::Birth) {
    for (const GEdge& e : w.ge) {
      if (carrier_match(e.line, germ.line))
        throw std::domain_error("def_apply: germ line extends an edge of the configuration");
      if (seg_dist(e.seg, germ.point) <= kJoinTol)
        throw std::domain_error("def_apply: birth germ lies on the configuration");
    }
    const double s0 = germ.line.coord_of(germ.point);
    if (ch->hi - s0 > kGeomTol) w.spawn_creation(0, germ.line, germ.point, +1, 0.0);
    if (s0 - ch->lo > kGeomTol) w.spawn_creation(1, germ.line, germ.point, -1, 0.0);
  } else {
    int home = -1;
    for (std::size_t j = 0; j < w.ge.size(); ++j) {
      if (carrier_match(w.ge[j].line, germ.line) && seg_dist(w.ge[j].seg, germ.point) <= kJoinTol) {
        home = static_cast<int>(j);
        break;
      }
    }
    if (home < 0)
      throw std::domain_error("def_apply: death germ does not lie on an edge of its line");
    const double s0 = w.ge[home].line.coord_of(germ.point);
    if (w.ge[home].hi - s0 > kGeomTol) w.spawn_annihilation(0, home, germ.point, +1, 0.0);
    if (s0 - w.ge[home].lo > kGeomTol) w.spawn_annihilation(1, home, germ.point, -1, 0.0);
  }

  w.run();

  if (w.endkind == DefWalk::End::Failed) {
    DisagreementLoop failed;
    failed.closure = LoopClosure::Failed;
    return {DefOutcome::Failed, state, std::move(failed)};
  }

  DisagreementLoop loop = w.loop();
  PolygonalConfig cfg = w.assemble();
  // Chopping an overshoot can invalidate ground the other branch already
  // passed through; such proposals are discarded as failures.
  if (!check_admissible(cfg, ctx.domain()).ok) {
    DisagreementLoop failed;
    failed.closure = LoopClosure::Failed;
    return {DefOutcome::Failed, state, std::move(failed)};
  }

  const double dl =
      cfg.line_mass(ctx.measure()) - state.config().line_mass(ctx.measure());
  const double p = std::exp(-(beta - 1.0) * dl);
  if (!(p >= 1.0 || bernoulli(g, p))) return {DefOutcome::Rejected, state, std::move(loop)};

  ChainState next(state.ctx_ptr(), state.family_ptr(), std::move(cfg));
  return {DefOutcome::Ok, std::move(next), std::move(loop)};
}

DefProtocol away_from_anchor_protocol(const FieldContext& ctx,
                                      std::shared_ptr<const GrowthFamily> family) {
  DefProtocol p;
  p.rule = away_from_anchor_rule(family);
  p.carried = [](const Line&) { return true; };
  p.germ_of = [family](const Line& l) { return family->anchor(l); };
  const ActivityMeasure m = ctx.measure();
  const ConvexDomain d = ctx.domain();
  p.sample_line = [m, d](Rng& g) {
    for (;;) {
      const Line l = m.sample_hitting(g, d);
      if (d.chord(l)) return l;
    }
  };
  p.birth_rate = ctx.line_mass();
  return p;
}

DefProtocol edec_vertical_protocol(const FieldContext& ctx) {
  if (!ctx.measure().is_rectangular())
    throw std::invalid_argument("edec_vertical_protocol: rectangular measures only");
  DefProtocol p;
  const ConvexDomain d = ctx.domain();
  p.rule = edec_vertical_rule(d.centroid().x);
  p.carried = [](const Line& l) { return l.is_vertical(1e-9); };
  p.germ_of = [d](const Line& l) {
    const auto ch = d.chord(l);
    if (!ch) throw std::invalid_argument("edec germ: line misses the domain");
    return l.at(ch->lo);  // direction points down, so the low coordinate is the top
  };
  const OffsetMeasure vo = ctx.measure().vertical_offsets();
  const auto xs = d.xspan();
  p.sample_line = [vo, xs](Rng& g) { return Line::vertical(vo.sample(g, xs.lo, xs.hi)); };
  p.birth_rate = vo.mass(xs.lo, xs.hi);
  return p;
}

std::vector<DefGerm> death_candidates(const ChainState& state, const DefProtocol& proto,
                                      double tol) {
  std::vector<DefGerm> out;
  std::vector<Line> seen;
  for (const Edge& e : state.config().edges()) {
    bool dup = false;
    for (const Line& l : seen)
      if (carrier_match(l, e.line, tol)) {
        dup = true;
        break;
      }
    if (dup) continue;
    seen.push_back(e.line);
    if (!proto.carried(e.line)) continue;
    const Vec2 p = proto.germ_of(e.line);
    for (const Edge& f : state.config().edges()) {
      if (!carrier_match(f.line, e.line, tol)) continue;
      if (seg_dist(f.seg, p) <= tol) {
        out.push_back({e.line, p});
        break;
      }
    }
  }
  return out;
}

DefStepInfo def_mcmc_step(ChainState& state, const DefProtocol& proto, double beta, Rng& g) {
  const auto cands = death_candidates(state, proto);
  const double btot = proto.birth_rate;
  const double total = btot + static_cast<double>(cands.size());
  if (!(total > 0)) throw std::invalid_argument("def_mcmc_step: no events possible");
  DefStepInfo info;
  info.ds = exponential(g) / total;
  const double u = uniform(g) * total;
  DefGerm germ;
  DefMode mode;
  if (u < btot) {
    info.was_birth = true;
    mode = DefMode::Birth;
    germ.line = proto.sample_line(g);
    germ.point = proto.germ_of(germ.line);
    // measure-zero coincidences with the configuration: skip, not fault
    for (const Edge& e : state.config().edges()) {
      if (carrier_match(e.line, germ.line) || seg_dist(e.seg, germ.point) <= kJoinTol) {
        info.outcome = DefOutcome::Failed;
        return info;
      }
    }
  } else {
    mode = DefMode::Death;
    germ = cands[uniform_index(g, cands.size())];
  }
  DefResult r = def_apply(state, germ, mode, proto.rule, g, beta);
  info.outcome = r.outcome;
  if (r.outcome == DefOutcome::Ok) {
    info.changed = !r.loop.subpaths.empty();
    state = std::move(r.state);
  }
  return info;
}

std::vector<ChainSample> run_def_chain(ChainState state, const DefProtocol& proto, double beta,
                                       double s_max, double thin, Rng& g) {
  if (s_max > 0.0 && !(thin > 0.0))
    throw std::invalid_argument("run_def_chain: thinning interval must be positive");
  std::vector<ChainSample> out;
  out.push_back({0.0, state.config()});
  if (!(s_max > 0.0)) return out;
  double s = 0.0, next = thin;
  while (next <= s_max + 1e-12) {
    PolygonalConfig snapshot = state.config();
    const DefStepInfo info = def_mcmc_step(state, proto, beta, g);
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
