#include "polyfield/precedence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace polyfield {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = static_cast<std::size_t>(-1);

bool same_line(const Line& a, const Line& b) {
  double d = std::abs(a.phi - b.phi);
  const bool wrapped = kPi - d < d;
  if (std::min(d, kPi - d) > 1e-9) return false;
  // Normals flip sign across the phi wrap, and so does rho.
  return std::abs(wrapped ? a.rho + b.rho : a.rho - b.rho) < 1e-9;
}

// Positions of all pairwise crossings, indexed by unordered line pair.
struct Arrangement {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<Vec2> points;

  static Arrangement of(const std::vector<Probe>& items) {
    Arrangement a;
    for (std::size_t i = 0; i < items.size(); ++i)
      for (std::size_t j = i + 1; j < items.size(); ++j)
        if (auto y = line_intersection(items[i].line, items[j].line)) {
          a.pairs.emplace_back(i, j);
          a.points.push_back(*y);
        }
    return a;
  }
};

void validate(const std::vector<Probe>& items, double min_sep) {
  for (std::size_t i = 0; i < items.size(); ++i)
    for (std::size_t j = i + 1; j < items.size(); ++j)
      if (same_line(items[i].line, items[j].line))
        throw std::invalid_argument("probe collection: duplicate line");
  for (std::size_t i = 0; i < items.size(); ++i)
    for (std::size_t j = 0; j < items.size(); ++j)
      if (i != j && std::abs(items[j].line.signed_dist(items[i].x)) < min_sep)
        throw std::invalid_argument("probe collection: marked point on a foreign line");
  const auto arr = Arrangement::of(items);
  for (std::size_t a = 0; a < arr.points.size(); ++a) {
    for (std::size_t b = a + 1; b < arr.points.size(); ++b)
      if (dist(arr.points[a], arr.points[b]) < min_sep)
        throw std::invalid_argument("probe collection: coincident crossing points");
    for (const auto& p : items)
      if (dist(arr.points[a], p.x) < min_sep)
        throw std::invalid_argument("probe collection: crossing at a marked point");
  }
}

}  // namespace

ProbeCollection::ProbeCollection(std::vector<Probe> items, double min_sep)
    : items_(std::move(items)), min_sep_(min_sep) {
  if (items_.empty()) throw std::invalid_argument("probe collection: empty");
  for (auto& p : items_) {
    if (std::abs(p.line.signed_dist(p.x)) > 1e-6)
      throw std::invalid_argument("probe collection: marked point off its line");
    p.x = p.line.at(p.line.coord_of(p.x));
  }
  validate(items_, min_sep_);
}

ProbeCollection ProbeCollection::sub(const std::vector<std::size_t>& idx) const {
  std::vector<Probe> picked;
  picked.reserve(idx.size());
  for (std::size_t i : idx) picked.push_back(items_.at(i));
  return ProbeCollection(std::move(picked), min_sep_);
}

ProbeCollection random_probe_collection(Rng& g, int k, Vec2 lo, Vec2 hi, double min_sep) {
  if (k < 1) throw std::invalid_argument("random_probe_collection: k < 1");
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<Probe> items;
    items.reserve(k);
    for (int i = 0; i < k; ++i) {
      const Vec2 x{uniform(g, lo.x, hi.x), uniform(g, lo.y, hi.y)};
      items.push_back({Line::through(x, uniform(g, 0.0, kPi)), x});
    }
    try {
      return ProbeCollection(std::move(items), min_sep);
    } catch (const std::invalid_argument&) {
    }
  }
  throw std::runtime_error("random_probe_collection: could not reach general position");
}

PrecedenceGraph build_precedence_graph(const ProbeCollection& coll, bool augmented) {
  const auto& items = coll.items();
  const std::size_t k = items.size();
  PrecedenceGraph g;
  g.generators = k;
  g.augmented = augmented;
  for (const auto& p : items) g.points.push_back(p.x);
  const auto arr = Arrangement::of(items);
  for (std::size_t c = 0; c < arr.pairs.size(); ++c) {
    g.crossing_of.push_back(arr.pairs[c]);
    g.points.push_back(arr.points[c]);
  }
  g.adj.resize(g.points.size());

  g.line_vertices.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto& lv = g.line_vertices[i];
    lv.push_back(i);
    for (std::size_t c = 0; c < arr.pairs.size(); ++c)
      if (arr.pairs[c].first == i || arr.pairs[c].second == i) lv.push_back(k + c);
    std::sort(lv.begin(), lv.end(), [&](std::size_t a, std::size_t b) {
      return items[i].line.coord_of(g.points[a]) < items[i].line.coord_of(g.points[b]);
    });
    const auto at = std::find(lv.begin(), lv.end(), i) - lv.begin();
    for (std::size_t t = at; t + 1 < lv.size(); ++t) g.adj[lv[t]].push_back(lv[t + 1]);
    for (std::size_t t = at; t > 0; --t) g.adj[lv[t]].push_back(lv[t - 1]);
  }

  if (augmented) {
    for (std::size_t c = 0; c < arr.pairs.size(); ++c) {
      const auto [i, j] = arr.pairs[c];
      const Vec2 y = arr.points[c];
      const Vec2 ui = (items[i].x - y).normalized();
      const Vec2 uj = (items[j].x - y).normalized();
      const double det = ui.cross(uj);
      for (std::size_t m = 0; m < k; ++m) {
        if (m == i || m == j) continue;
        const Vec2 d = items[m].x - y;
        // d = a*ui + b*uj; the trap quadrant is a < 0, b < 0.
        const double a = d.cross(uj) / det;
        const double b = ui.cross(d) / det;
        if (a < 0.0 && b < 0.0) g.adj[k + c].push_back(m);
      }
    }
  }
  return g;
}

std::optional<std::vector<std::size_t>> topological_order(const PrecedenceGraph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<std::size_t> indeg(n, 0), order;
  for (const auto& out : g.adj)
    for (std::size_t v : out) ++indeg[v];
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push_back(v);
  while (!ready.empty()) {
    const std::size_t v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (std::size_t w : g.adj[v])
      if (--indeg[w] == 0) ready.push_back(w);
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

bool is_acyclic(const PrecedenceGraph& g) { return topological_order(g).has_value(); }

std::vector<std::size_t> find_cycle(const PrecedenceGraph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<int> color(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> cycle;

  auto dfs = [&](auto&& self, std::size_t v) -> bool {
    color[v] = 1;
    stack.push_back(v);
    for (std::size_t w : g.adj[v]) {
      if (color[w] == 1) {
        const auto at = std::find(stack.begin(), stack.end(), w);
        cycle.assign(at, stack.end());
        return true;
      }
      if (color[w] == 0 && self(self, w)) return true;
    }
    stack.pop_back();
    color[v] = 2;
    return false;
  };
  for (std::size_t v = 0; v < n; ++v)
    if (color[v] == 0 && dfs(dfs, v)) return cycle;
  return {};
}

namespace {

// One line's growing edge in the incremental construction: a coordinate
// interval around the marked point whose ends are loose until a crossing is
// attached to them.
struct Grown {
  double lo, hi;
  bool loose_lo = true, loose_hi = true;
};

}  // namespace

long count_configs(const ProbeCollection& coll) {
  const auto g = build_precedence_graph(coll, false);
  const auto order = topological_order(g);
  if (!order) return brute_force_count(coll);

  // Acyclic: run the incremental construction, attaching structurally minimal
  // crossings to loose ends; it always completes and yields the unique
  // admissible configuration.
  const auto& items = coll.items();
  const std::size_t k = items.size();
  std::vector<std::size_t> rank(g.vertex_count());
  for (std::size_t t = 0; t < order->size(); ++t) rank[(*order)[t]] = t;

  std::vector<Grown> grown;
  for (std::size_t i = 0; i < k; ++i) {
    const double s = items[i].line.coord_of(items[i].x);
    grown.push_back({s, s});
  }
  const std::size_t ncross = g.crossing_of.size();
  std::vector<bool> added(ncross, false);

  auto side_ok = [&](std::size_t line, double s) {
    const Grown& gr = grown[line];
    if (s > gr.hi) return gr.loose_hi;
    if (s < gr.lo) return gr.loose_lo;
    return false;  // already inside the grown edge
  };
  for (;;) {
    std::size_t best = kNone;
    for (std::size_t c = 0; c < ncross; ++c) {
      if (added[c]) continue;
      const auto [i, j] = g.crossing_of[c];
      const Vec2 y = g.points[k + c];
      if (!side_ok(i, items[i].line.coord_of(y))) continue;
      if (!side_ok(j, items[j].line.coord_of(y))) continue;
      if (best == kNone || rank[k + c] < rank[k + best]) best = c;
    }
    if (best == kNone) break;
    added[best] = true;
    const auto [i, j] = g.crossing_of[best];
    const Vec2 y = g.points[k + best];
    for (std::size_t line : {i, j}) {
      const double s = items[line].line.coord_of(y);
      Grown& gr = grown[line];
      if (s > gr.hi) {
        gr.hi = s;
        gr.loose_hi = false;
      } else {
        gr.lo = s;
        gr.loose_lo = false;
      }
    }
  }
  return 1;
}

long brute_force_count(const ProbeCollection& coll) {
  const std::size_t k = coll.size();
  if (k > 7) throw std::invalid_argument("brute_force_count: more than 7 probes");
  const auto& items = coll.items();
  const auto arr = Arrangement::of(items);

  // Per line: crossings sorted by coordinate, plus the marked point's coord.
  struct OnLine {
    std::vector<std::pair<double, std::size_t>> cross;  // (coord, pair id)
    double sx;
  };
  std::vector<OnLine> lines(k);
  for (std::size_t i = 0; i < k; ++i) lines[i].sx = items[i].line.coord_of(items[i].x);
  for (std::size_t c = 0; c < arr.pairs.size(); ++c) {
    const auto [i, j] = arr.pairs[c];
    lines[i].cross.emplace_back(items[i].line.coord_of(arr.points[c]), c);
    lines[j].cross.emplace_back(items[j].line.coord_of(arr.points[c]), c);
  }
  for (auto& ln : lines) std::sort(ln.cross.begin(), ln.cross.end());

  // Edge choice per line: endpoint coords and which crossings they sit on.
  struct Choice {
    double lo, hi;
    std::size_t lo_id, hi_id;  // pair ids or kNone for infinity
  };
  std::vector<std::vector<Choice>> choices(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::pair<double, std::size_t>> lefts{{-kInf, kNone}}, rights;
    for (const auto& [s, id] : lines[i].cross)
      (s < lines[i].sx ? lefts : rights).emplace_back(s, id);
    rights.emplace_back(kInf, kNone);
    for (const auto& [lo, lid] : lefts)
      for (const auto& [hi, hid] : rights) choices[i].push_back({lo, hi, lid, hid});
  }

  enum Cls { Out, End, Int };
  auto classify = [&](const Choice& ch, double s, std::size_t id) {
    if (id == ch.lo_id || id == ch.hi_id) return End;
    return (s > ch.lo && s < ch.hi) ? Int : Out;
  };

  // Crossings between each line pair, for the pairwise compatibility check.
  std::vector<std::vector<std::vector<std::tuple<std::size_t, double, double>>>> pairx(
      k, std::vector<std::vector<std::tuple<std::size_t, double, double>>>(k));
  for (std::size_t c = 0; c < arr.pairs.size(); ++c) {
    const auto [i, j] = arr.pairs[c];
    const double si = items[i].line.coord_of(arr.points[c]);
    const double sj = items[j].line.coord_of(arr.points[c]);
    pairx[i][j].emplace_back(c, si, sj);
    pairx[j][i].emplace_back(c, sj, si);
  }

  long count = 0;
  std::vector<std::size_t> pick(k, 0);
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == k) {
      ++count;
      return;
    }
    for (std::size_t t = 0; t < choices[i].size(); ++t) {
      pick[i] = t;
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) {
        for (const auto& [c, si, sj] : pairx[i][j]) {
          const Cls ci = classify(choices[i][t], si, c);
          const Cls cj = classify(choices[j][pick[j]], sj, c);
          const bool valid = (ci == End && cj == End) || (ci == Out && cj == Out) ||
                             (ci == Out && cj == Int) || (ci == Int && cj == Out);
          if (!valid) {
            ok = false;
            break;
          }
        }
      }
      if (ok) self(self, i + 1);
    }
  };
  rec(rec, 0);
  return count;
}

}  // namespace polyfield
