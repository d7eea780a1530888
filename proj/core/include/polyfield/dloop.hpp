#pragma once

#include <memory>
#include <vector>

#include "polyfield/growth.hpp"
#include "polyfield/line_ops.hpp"
#include "polyfield/polyconfig.hpp"

namespace polyfield {

// Trajectory structure of an admissible configuration under a growth family.
// Edges are cut into arcs oriented away from their carrier's anchor; arcs are
// chained across direction-update vertices and paired at collision vertices.
// The structure is recovered from the bare geometry, so it is consistent with
// the configuration by construction.
struct Arc {
  Line line;
  Vec2 a, b;         // a = anchor-side end, b = forward end
  int next = -1;     // continuation after a direction update at b
  int partner = -1;  // arc met in a collision at b
  bool exits = false;  // b lies on the domain boundary
};

struct BirthRecord {
  enum class Kind { Vertex, LineAnchor };
  Kind kind;
  Vec2 point;  // crossing point, or the line's anchor
  Line line;   // meaningful for LineAnchor only
  int arc1 = -1, arc2 = -1;
};

struct Trajectories {
  std::vector<Arc> arcs;
  std::vector<BirthRecord> registry;
};

// Throws std::invalid_argument when the configuration cannot be decomposed
// into forward trajectories (it is then not a lawful field realization for
// this family).
Trajectories build_trajectories(const PolygonalConfig& c, const ConvexDomain& d,
                                const GrowthFamily& family, double tol = 1e-9);

enum class Phase { Creation, Annihilation };

struct Subpath {
  Phase phase;
  int branch = 0;
  std::vector<Edge> pieces;
};

enum class LoopClosure { Closed, Chopped, Failed };

// Symmetric difference between a configuration and its update after inserting
// or removing one birth record: alternating creation and annihilation
// subpaths per branch, closed by a same-phase meeting or chopped at the
// boundary.
struct DisagreementLoop {
  std::vector<Subpath> subpaths;
  LoopClosure closure = LoopClosure::Chopped;
  double created_mass = 0.0;      // M-mass of lines hitting created pieces
  double annihilated_mass = 0.0;  // same for erased pieces
  double delta_mass() const { return created_mass - annihilated_mass; }
  PolygonalConfig as_config() const;
};

// Configuration plus its trajectory structure; the registry of birth records
// is what death moves draw from.  Copies share the context and family.
class ChainState {
 public:
  ChainState(std::shared_ptr<const FieldContext> ctx, std::shared_ptr<const GrowthFamily> family,
             PolygonalConfig initial = {});
  ChainState(const FieldContext& ctx, const GrowthFamily& family, PolygonalConfig initial = {});

  const PolygonalConfig& config() const { return config_; }
  const Trajectories& trajectories() const { return traj_; }
  const FieldContext& ctx() const { return *ctx_; }
  const GrowthFamily& family() const { return *family_; }
  std::shared_ptr<const FieldContext> ctx_ptr() const { return ctx_; }
  std::shared_ptr<const GrowthFamily> family_ptr() const { return family_; }
  std::size_t registry_size() const { return traj_.registry.size(); }

 private:
  std::shared_ptr<const FieldContext> ctx_;
  std::shared_ptr<const GrowthFamily> family_;
  PolygonalConfig config_;
  Trajectories traj_;
};

struct ApplyResult {
  ChainState state;
  DisagreementLoop loop;
};

// Insert a vertex birth at the site: the two new particles trace creation
// branches, killed old trajectories are erased forward and their collision
// partners revived, until the loop closes or every branch is chopped.
ApplyResult apply_birth(const ChainState& state, const BirthSite& site, Rng& g);

// Insert a whole line, born at its anchor and extending both ways.
ApplyResult apply_line_birth(const ChainState& state, const Line& l, Rng& g);

// Remove the given registry record; its trajectories are erased forward with
// the same revival rules.
ApplyResult apply_death(const ChainState& state, std::size_t record, Rng& g);

struct StepInfo {
  double ds = 0.0;     // exponential holding time of this event
  bool was_birth = false;
  bool accepted = false;
  LoopClosure closure = LoopClosure::Chopped;
};

// One birth-or-death event of the continuous-time chain: births arrive at
// rate crossing_mass + line_mass (vertex and line proposals in proportion),
// deaths at rate one per registry record; the proposal is accepted with
// probability min(1, exp(-(beta - 1) (L(new) - L(old)))) where L is the
// M-mass of the configuration's edges.
StepInfo mcmc_step(ChainState& state, double beta, Rng& g);

struct ChainSample {
  double s = 0.0;
  PolygonalConfig config;
};

// Simulate to s_max, recording the state at s = 0, thin, 2 thin, ...
// Requires thin > 0 unless s_max == 0.
std::vector<ChainSample> run_chain(ChainState state, double beta, double s_max, double thin,
                                   Rng& g);

}  // namespace polyfield
