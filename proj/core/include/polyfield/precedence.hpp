#pragma once

#include "polyfield/geom.hpp"
#include "polyfield/rng.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace polyfield {

// A probe is a line together with a marked point on it.  Collections of
// probes drive the configuration-counting combinatorics: each line must carry
// exactly one edge through its marked point, and the number of admissible ways
// to do that is what count_configs computes.
struct Probe {
  Line line;
  Vec2 x;
};

// Validated list of probes in general position: pairwise distinct lines, each
// marked point off every other line, and all pairwise crossing points distinct
// from each other and from the marked points.  Marked points are snapped onto
// their carrier lines on construction.
class ProbeCollection {
 public:
  explicit ProbeCollection(std::vector<Probe> items, double min_sep = 10 * kGeomTol);

  std::size_t size() const { return items_.size(); }
  const Probe& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<Probe>& items() const { return items_; }
  double min_sep() const { return min_sep_; }

  // Sub-collection by index list (indices must be distinct and in range).
  ProbeCollection sub(const std::vector<std::size_t>& idx) const;

 private:
  std::vector<Probe> items_;
  double min_sep_;
};

// Uniformly random collection inside an axis box, rejected until it is in
// general position with the requested minimum separation.
ProbeCollection random_probe_collection(Rng& g, int k, Vec2 lo, Vec2 hi,
                                        double min_sep = 10 * kGeomTol);

// Directed graph recording which points of the probe arrangement must be
// revealed before which: vertices are the marked points (first k ids) and the
// pairwise crossing points; along every line, edges run between consecutive
// vertices away from the marked point.  The augmented variant adds an edge
// from a crossing point to every marked point lying strictly inside the
// quadrant of the crossing that sees neither of the two marked points.
struct PrecedenceGraph {
  std::size_t generators = 0;                     // marked-point vertices are ids [0, generators)
  std::vector<Vec2> points;                       // position per vertex id
  std::vector<std::pair<std::size_t, std::size_t>> crossing_of;  // line pair per crossing vertex
  std::vector<std::vector<std::size_t>> adj;      // directed edges
  std::vector<std::vector<std::size_t>> line_vertices;  // per line, vertex ids sorted by line coord
  bool augmented = false;

  std::size_t vertex_count() const { return points.size(); }
};

PrecedenceGraph build_precedence_graph(const ProbeCollection& coll, bool augmented = false);

bool is_acyclic(const PrecedenceGraph& g);

// Topological order of vertex ids, or nullopt if the graph has a cycle.
std::optional<std::vector<std::size_t>> topological_order(const PrecedenceGraph& g);

// Some directed cycle (vertex ids, first repeated last not included); empty if acyclic.
std::vector<std::size_t> find_cycle(const PrecedenceGraph& g);

// Number of admissible configurations with one edge per line through its
// marked point.  Acyclic collections are resolved by the incremental
// construction (always 1); cyclic ones fall back to brute_force_count.
long count_configs(const ProbeCollection& coll);

// Exact enumeration over all per-line edge choices with endpoints among the
// crossing points or at infinity; guarded to k <= 7.
long brute_force_count(const ProbeCollection& coll);

}  // namespace polyfield
