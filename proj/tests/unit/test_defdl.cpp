#include "doctest.h"

#include "polyfield/defdl.hpp"
#include "polyfield/dloop.hpp"
#include "polyfield/dynrep.hpp"
#include "polyfield/stats.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

using namespace polyfield;

namespace {

struct Setup {
  std::shared_ptr<const FieldContext> ctx;
  std::shared_ptr<const GrowthFamily> fam;
  DefProtocol proto;
};

Setup square_setup() {
  auto ctx = std::make_shared<const FieldContext>(ConvexDomain::unit_square(),
                                                  ActivityMeasure::rectangular_standard());
  auto fam = std::make_shared<const GrowthFamily>(GrowthFamily::sweep(ctx->domain(), {1, 0}));
  auto proto = away_from_anchor_protocol(*ctx, fam);
  return {std::move(ctx), std::move(fam), std::move(proto)};
}

Line diagonal_line() { return Line::through_points({0.2, 0.0}, {0.7, 1.0}); }

DefGerm mid_chord_germ(const FieldContext& ctx, const Line& l) {
  const auto ch = ctx.domain().chord(l);
  return {l, l.at(0.5 * (ch->lo + ch->hi))};
}

}  // namespace

TEST_CASE("a defective birth on the empty field draws pure creation branches") {
  const auto su = square_setup();
  const DefGerm germ = mid_chord_germ(*su.ctx, diagonal_line());
  for (int seed = 0; seed < 25; ++seed) {
    Rng g(300 + seed);
    const DefResult r = def_apply(ChainState(su.ctx, su.fam), germ, DefMode::Birth, su.proto.rule, g);
    CAPTURE(seed);
    REQUIRE(r.outcome == DefOutcome::Ok);
    REQUIRE(!r.loop.subpaths.empty());
    for (const Subpath& sp : r.loop.subpaths) {
      CHECK(sp.phase == Phase::Creation);
      CHECK((sp.branch == 0 || sp.branch == 1));
    }
    CHECK(r.loop.created_mass > 0.0);
    CHECK(r.loop.annihilated_mass == 0.0);
    // the loop is exactly the symmetric difference against the empty field
    CHECK(symmetric_difference_length(r.state.config(), r.loop.as_config()) < 1e-9);
    CHECK(check_admissible(r.state.config(), su.ctx->domain()).ok);
  }
}

TEST_CASE("a defective birth and its reversing death cancel exactly") {
  const auto su = square_setup();
  const DefGerm germ = mid_chord_germ(*su.ctx, diagonal_line());
  int closed = 0, chopped = 0;
  for (int seed = 0; seed < 60; ++seed) {
    Rng g(900 + seed);
    CAPTURE(seed);
    const DefResult f = def_apply(ChainState(su.ctx, su.fam), germ, DefMode::Birth, su.proto.rule, g);
    REQUIRE(f.outcome == DefOutcome::Ok);
    (f.loop.closure == LoopClosure::Closed ? closed : chopped)++;

    // the death walk retraces the forward trace: the rule sees the same
    // decisions, so the loop is identical with the phases flipped
    const DefResult r = def_apply(f.state, germ, DefMode::Death, su.proto.rule, g);
    REQUIRE(r.outcome == DefOutcome::Ok);
    CHECK(r.state.config().empty());
    CHECK(r.loop.closure == f.loop.closure);
    CHECK(r.loop.created_mass == 0.0);
    CHECK(r.loop.annihilated_mass == doctest::Approx(f.loop.created_mass).epsilon(1e-9));
    CHECK(symmetric_difference_length(f.state.config(), r.loop.as_config()) < 1e-9);
  }
  CHECK(closed > 0);
  CHECK(chopped > 0);
}

TEST_CASE("defective single births follow the line birth law") {
  const auto su = square_setup();
  const Line l = diagonal_line();
  const DefGerm germ{l, su.proto.germ_of(l)};

  std::vector<double> via_def, via_birth;
  Rng gd(4100);
  for (int i = 0; i < 400; ++i) {
    const DefResult r = def_apply(ChainState(su.ctx, su.fam), germ, DefMode::Birth, su.proto.rule, gd);
    REQUIRE(r.outcome == DefOutcome::Ok);
    via_def.push_back(r.state.config().total_length());
  }
  Rng gb(4200);
  for (int i = 0; i < 400; ++i) {
    const ApplyResult r = apply_line_birth(ChainState(su.ctx, su.fam), l, gb);
    via_birth.push_back(r.state.config().total_length());
  }
  CHECK(ks_statistic(via_def, via_birth) <
        ks_threshold(0.001, via_def.size(), via_birth.size()));
}

TEST_CASE("a death germ erases its chord deterministically") {
  const auto su = square_setup();
  const Line l = Line::horizontal(0.4);
  PolygonalConfig one;
  one.add({{0.0, 0.4}, {1.0, 0.4}}, l);
  const ChainState start(su.ctx, su.fam, one);

  CHECK(death_candidates(start, su.proto).size() == 1);
  CHECK(death_candidates(ChainState(su.ctx, su.fam), su.proto).empty());

  Rng g(5000);
  const DefResult r =
      def_apply(start, {l, {0.5, 0.4}}, DefMode::Death, su.proto.rule, g);
  REQUIRE(r.outcome == DefOutcome::Ok);
  CHECK(r.state.config().empty());
  CHECK(r.loop.closure == LoopClosure::Chopped);
  for (const Subpath& sp : r.loop.subpaths) CHECK(sp.phase == Phase::Annihilation);
  CHECK(r.loop.annihilated_mass ==
        doctest::Approx(su.ctx->measure().hitting_mass(Segment{{0.0, 0.4}, {1.0, 0.4}})));
}

TEST_CASE("hostile decision rules fail without corrupting the state") {
  const auto su = square_setup();
  // always turn left: creation branches curl until they hit their own trace
  const DecisionRule left = [](const std::vector<Edge>&, Vec2, Vec2 incoming, const Line& next) {
    return incoming.cross(next.direction()) > 0 ? +1 : -1;
  };
  int failed = 0, ok = 0;
  Rng g(6100);
  for (int i = 0; i < 40; ++i) {
    const ChainState start(su.ctx, su.fam, sample_dynrep(g, *su.ctx).config);
    const Line l = su.proto.sample_line(g);
    const DefResult r = def_apply(start, {l, su.proto.germ_of(l)}, DefMode::Birth, left, g);
    if (r.outcome == DefOutcome::Failed) {
      ++failed;
      CHECK(r.loop.closure == LoopClosure::Failed);
      CHECK(config_hash(r.state.config()) == config_hash(start.config()));
    } else if (r.outcome == DefOutcome::Ok) {
      ++ok;
      CHECK(check_admissible(r.state.config(), su.ctx->domain()).ok);
    }
  }
  CHECK(failed > 0);
  CHECK(ok > 0);
}

TEST_CASE("defective chains preserve the kinetic sampler law") {
  const auto su = square_setup();

  Rng gd(7000);
  std::vector<double> direct;
  for (int i = 0; i < 1200; ++i)
    direct.push_back(sample_polygonal_field(gd, *su.ctx).total_length());

  // stationary start, fixed horizon: the end law must match the start law
  const auto ends = [&](const DefProtocol& proto, unsigned seed, bool expect_no_failure) {
    Rng g(seed);
    std::vector<double> out;
    for (int i = 0; i < 350; ++i) {
      ChainState st(su.ctx, su.fam, sample_dynrep(g, *su.ctx).config);
      double s = 0.0;
      while (s < 2.0) {
        const DefStepInfo inf = def_mcmc_step(st, proto, 1.0, g);
        if (expect_no_failure) CHECK(inf.outcome != DefOutcome::Failed);
        s += inf.ds;
      }
      out.push_back(st.config().total_length());
    }
    return out;
  };

  SUBCASE("anchor seeded updates") {
    const auto lens = ends(su.proto, 7300, false);
    CHECK(ks_statistic(lens, direct) < ks_threshold(0.001, lens.size(), direct.size()));
  }
  SUBCASE("top of chord seeded updates") {
    // single branched on rectangular fields, so no walk may fail
    const auto lens = ends(edec_vertical_protocol(*su.ctx), 7400, true);
    CHECK(ks_statistic(lens, direct) < ks_threshold(0.001, lens.size(), direct.size()));
  }
}

TEST_CASE("defective sampling schedule and rate guards") {
  const auto su = square_setup();
  Rng g(8200);
  const PolygonalConfig start = sample_polygonal_field(g, *su.ctx);

  const auto frozen =
      run_def_chain(ChainState(su.ctx, su.fam, start), su.proto, 1.0, 0.0, 0.0, g);
  REQUIRE(frozen.size() == 1);
  CHECK(frozen[0].s == 0.0);
  CHECK(config_hash(frozen[0].config) == config_hash(start));

  CHECK_THROWS_AS(run_def_chain(ChainState(su.ctx, su.fam, start), su.proto, 1.0, 5.0, 0.0, g),
                  std::invalid_argument);

  const auto grid =
      run_def_chain(ChainState(su.ctx, su.fam, start), su.proto, 1.0, 3.5, 1.5, g);
  REQUIRE(grid.size() == 3);
  CHECK(grid[0].s == 0.0);
  CHECK(grid[1].s == doctest::Approx(1.5));
  CHECK(grid[2].s == doctest::Approx(3.0));

  DefProtocol idle = su.proto;
  idle.carried = [](const Line&) { return false; };
  idle.birth_rate = 0.0;
  ChainState empty(su.ctx, su.fam);
  CHECK_THROWS_AS(def_mcmc_step(empty, idle, 1.0, g), std::invalid_argument);
}

TEST_CASE("malformed defective germs are rejected") {
  const auto su = square_setup();
  Rng g(8600);
  const DefGerm germ = mid_chord_germ(*su.ctx, diagonal_line());
  const DefResult f = def_apply(ChainState(su.ctx, su.fam), germ, DefMode::Birth, su.proto.rule, g);
  REQUIRE(f.outcome == DefOutcome::Ok);
  const Edge some = f.state.config().edges().front();
  const Vec2 mid = (some.seg.a + some.seg.b) * 0.5;

  // off its line, outside the domain
  CHECK_THROWS_AS(def_apply(f.state, {Line::vertical(0.3), {0.5, 0.5}}, DefMode::Birth,
                            su.proto.rule, g),
                  std::domain_error);
  CHECK_THROWS_AS(def_apply(f.state, {Line::vertical(0.5), {0.5, 1.5}}, DefMode::Birth,
                            su.proto.rule, g),
                  std::domain_error);
  // birth germs must not touch existing material or share its carriers
  CHECK_THROWS_AS(def_apply(f.state, {some.line, mid}, DefMode::Birth, su.proto.rule, g),
                  std::domain_error);
  CHECK_THROWS_AS(def_apply(f.state, {germ.line, germ.line.at(0.99 * germ.line.coord_of(germ.point))},
                            DefMode::Birth, su.proto.rule, g),
                  std::domain_error);
  // death germs must sit on drawn material
  const auto ch = su.ctx->domain().chord(germ.line);
  bool found_gap = false;
  for (double c = ch->lo + 1e-3; c < ch->hi; c += 0.01) {
    const Vec2 p = germ.line.at(c);
    bool on_edge = false;
    for (const Edge& e : f.state.config().edges()) {
      const Vec2 a = e.seg.a, b = e.seg.b;
      const Vec2 d = b - a;
      const double t = std::clamp((p - a).dot(d) / d.dot(d), 0.0, 1.0);
      if (dist(a + d * t, p) <= 1e-9) on_edge = true;
    }
    if (!on_edge) {
      found_gap = true;
      CHECK_THROWS_AS(def_apply(f.state, {germ.line, p}, DefMode::Death, su.proto.rule, g),
                      std::domain_error);
      break;
    }
  }
  CHECK(found_gap);
}

TEST_CASE("cold defective proposals are rejected with the state intact") {
  const auto su = square_setup();
  const DefGerm germ = mid_chord_germ(*su.ctx, diagonal_line());
  int rejected = 0;
  for (int seed = 0; seed < 20; ++seed) {
    Rng g(9300 + seed);
    const ChainState empty(su.ctx, su.fam);
    const DefResult r = def_apply(empty, germ, DefMode::Birth, su.proto.rule, g, 5.0);
    if (r.outcome == DefOutcome::Rejected) {
      ++rejected;
      CHECK(r.state.config().empty());
      CHECK(!r.loop.subpaths.empty());  // the proposal is reported even when refused
    }
  }
  CHECK(rejected >= 15);
}
