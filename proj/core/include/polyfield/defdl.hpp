#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "polyfield/dloop.hpp"

namespace polyfield {

// Direction choice at a turning point of a defective disagreement loop: the
// branch path built so far (drawn and erased pieces in travel order), the
// turning point, the unit arrival direction, and the line turned onto; the
// result is +1 or -1 along next.direction().  A rule may consult the path but
// never the surrounding configuration, which is what makes a loop and its
// phase-switched reversal take identical turns.
using DecisionRule =
    std::function<int(const std::vector<Edge>& path, Vec2 at, Vec2 incoming, const Line& next)>;

// Turn away from the family's anchor of the line turned onto.  With this rule
// the walk reproduces the generalized kinetic line dynamics in law.
DecisionRule away_from_anchor_rule(std::shared_ptr<const GrowthFamily> family);

// Mostly-horizontal turns move away from the vertical reference line
// x = x_ref (rightwards when the turning point lies on it), mostly-vertical
// turns move upwards.  On rectangular fields, branches started at the top of
// a vertical chord stay below their starting height and never fail.
DecisionRule edec_vertical_rule(double x_ref);

struct DefGerm {
  Line line;
  Vec2 point;
};

enum class DefMode { Birth, Death };
enum class DefOutcome { Ok, Failed, Rejected };

struct DefResult {
  DefOutcome outcome = DefOutcome::Failed;
  ChainState state;       // updated on Ok, the input state otherwise
  DisagreementLoop loop;  // empty on Failed, the discarded proposal on Rejected
};

// Grow (Birth) or erase (Death) along the germ line starting at the germ
// point.  Both branches advance with unit speed on a shared clock: creation
// tips draw direction updates from the crossing kernel and turn by the rule,
// hitting an edge switches them to erasing it in the rule's direction, and an
// eraser reaching a vertex either keeps erasing or turns back into creation,
// again by the rule.  The walk ends at the first same-phase meeting of the
// two branches (the later-built overshoot is discarded) or when both branches
// reach the boundary.  A branch meeting its own path first makes the update
// fail with the state unchanged.  A beta test on the mass difference may
// reject an otherwise successful update.
//
// Preconditions (std::domain_error): the germ point lies on the germ line
// inside the domain; for Birth it lies on no edge and the line extends no
// edge; for Death it lies on an edge carried by the line.
DefResult def_apply(const ChainState& state, const DefGerm& germ, DefMode mode,
                    const DecisionRule& rule, Rng& g, double beta = 1.0);

// A choice of germ-carrying lines closing the walk into a chain: births draw
// carried lines from M and start at their germ points, deaths erase from the
// germ point of a carried line whose germ currently lies on one of its edges.
struct DefProtocol {
  DecisionRule rule;
  std::function<bool(const Line&)> carried;
  std::function<Vec2(const Line&)> germ_of;  // defined for carried lines hitting the domain
  std::function<Line(Rng&)> sample_line;     // M restricted to carried lines hitting the domain
  double birth_rate = 0.0;                   // M-mass of that restriction
};

// Every line is carried and germinates at its family anchor.
DefProtocol away_from_anchor_protocol(const FieldContext& ctx,
                                      std::shared_ptr<const GrowthFamily> family);

// Vertical lines only, germinating at the top of their chord, with turns
// driven by the reference line through the domain centroid.  Requires a
// rectangular measure (throws std::invalid_argument).
DefProtocol edec_vertical_protocol(const FieldContext& ctx);

// Carriers of the configuration whose germ lies on one of their own edges;
// these are the deaths available to the chain, at unit rate each.
std::vector<DefGerm> death_candidates(const ChainState& state, const DefProtocol& proto,
                                      double tol = 1e-9);

struct DefStepInfo {
  double ds = 0.0;
  bool was_birth = false;
  DefOutcome outcome = DefOutcome::Failed;
  bool changed = false;  // Ok and the loop is nonempty
};

// One event of the continuous-time chain: births at the protocol's rate,
// deaths at rate one per candidate.  Failed proposals leave the state
// untouched, as do beta rejections.
DefStepInfo def_mcmc_step(ChainState& state, const DefProtocol& proto, double beta, Rng& g);

// Simulate to s_max, recording the state at s = 0, thin, 2 thin, ...
// Requires thin > 0 unless s_max == 0.
std::vector<ChainSample> run_def_chain(ChainState state, const DefProtocol& proto, double beta,
                                       double s_max, double thin, Rng& g);

}  // namespace polyfield
