#include <catch2/catch_amalgamated.hpp>

#include "morstone/lmodel.hpp"

using namespace morstone;
using namespace morstone::lmodel;
using morass::MorassPrefix;
using morass::SplitRule;
using morass::build_prefix;

TEST_CASE("stage schedules follow the minimal recurrences", "[lmodel]") {
  const MorassPrefix p = build_prefix(14, SplitRule::Doubling);
  const StagePlan plain = plan_stages(p, 4, Variant::Plain);
  CHECK(plain.alpha == std::vector<int>{0, 1, 3, 6, 10});
  const StagePlan calg = plan_stages(p, 4, Variant::CAlgebra);
  CHECK(calg.alpha == std::vector<int>{0, 2, 5, 9, 14});
  for (int n = 0; n < 4; ++n) {
    CHECK(plain.fresh_sets[n].size() == static_cast<std::size_t>(n + 1));
    CHECK(calg.fresh_sets[n].size() == static_cast<std::size_t>(n + 1));
  }
  CHECK(calg.extra_fresh.size() == 4);
}

TEST_CASE("stage schedule demands enough levels", "[lmodel]") {
  const MorassPrefix p = build_prefix(3, SplitRule::Doubling);
  CHECK_THROWS_AS(plan_stages(p, 4, Variant::Plain), PreconditionError);
}

TEST_CASE("stage fresh sets avoid every reachable point", "[lmodel]") {
  const MorassPrefix p = build_prefix(10, SplitRule::Doubling);
  const StagePlan plan = plan_stages(p, 4, Variant::Plain);
  for (int n = 0; n < 4; ++n) {
    for (int beta = 0; beta <= plan.alpha[n]; ++beta) {
      const auto covered = morass::coverage(p, beta, plan.alpha[n + 1]);
      for (int v : plan.fresh_sets[n]) CHECK_FALSE(covered.contains(v));
    }
  }
}

TEST_CASE("theory checker accepts the empty model", "[lmodel]") {
  GenModel m;
  CHECK(check_theory(m, Variant::Plain).pass());
  CHECK(check_theory(m, Variant::CAlgebra).pass());
}

TEST_CASE("theory checker names the contradiction clause", "[lmodel]") {
  GenModel m;
  m.universe = 2;
  m.leq.insert({0, 1});
  m.dis.insert({0, 1});
  const TheoryReport r = check_theory(m, Variant::Plain);
  REQUIRE_FALSE(r.pass());
  bool found = false;
  for (const auto& issue : r.issues)
    if (issue.clause == "leq-dis-contradictory") found = true;
  CHECK(found);
}

TEST_CASE("theory checker flags dis-free points sharing a block",
          "[lmodel]") {
  GenModel m;
  m.universe = 2;
  m.block = {{0, 0}, {1, 0}};
  const TheoryReport r = check_theory(m, Variant::CAlgebra);
  REQUIRE_FALSE(r.pass());
  CHECK(r.issues.front().clause == "block-dis");
  m.dis.insert({0, 1});
  CHECK(check_theory(m, Variant::CAlgebra).pass());
}

TEST_CASE("theory checker enforces order axioms", "[lmodel]") {
  GenModel m;
  m.universe = 3;
  m.leq = {{0, 1}, {1, 2}};  // missing (0,2)
  CHECK_FALSE(check_theory(m, Variant::Plain).pass());
  m.leq.insert({0, 2});
  CHECK(check_theory(m, Variant::Plain).pass());
  m.leq.insert({2, 0});
  CHECK_FALSE(check_theory(m, Variant::Plain).pass());
}

TEST_CASE("identity maps embed a model into itself", "[lmodel]") {
  GenModel m;
  m.universe = 3;
  m.leq = {{0, 1}};
  m.dis = {{1, 2}};
  std::vector<int> id{0, 1, 2};
  CHECK(embed_check(m, m, id));
}

TEST_CASE("embeddings reflect as well as preserve", "[lmodel]") {
  GenModel src, dst;
  src.universe = 2;
  dst.universe = 3;
  dst.dis = {{0, 2}};
  // src misses the pair that its image carries
  CHECK_FALSE(embed_check(src, dst, {0, 2}));
  src.dis = {{0, 1}};
  CHECK(embed_check(src, dst, {0, 2}));
  // and a preserved pair must land in dst
  GenModel poor;
  poor.universe = 3;
  CHECK_FALSE(embed_check(src, poor, {0, 2}));
}

TEST_CASE("singleton first stage adds no relations", "[lmodel]") {
  const MorassPrefix p = build_prefix(2, SplitRule::Doubling);
  const auto run = run_construction(p, {1}, Variant::Plain);
  CHECK(run.levels.back().leq.empty());
  CHECK(run.levels.back().dis.empty());
}

TEST_CASE("bit zero makes the stage set pairwise disjoint", "[lmodel]") {
  const MorassPrefix p = build_prefix(6, SplitRule::Doubling);
  const auto run = run_construction(p, {0, 0, 0}, Variant::Plain);
  const auto& A2 = run.plan.fresh_sets[2];
  REQUIRE(A2.size() == 3);
  const GenModel& top = run.levels.back();
  for (std::size_t i = 0; i < A2.size(); ++i)
    for (std::size_t j = i + 1; j < A2.size(); ++j)
      CHECK(top.has_dis(A2[i], A2[j]));
}

TEST_CASE("bit one makes the stage set a chain", "[lmodel]") {
  const MorassPrefix p = build_prefix(6, SplitRule::Doubling);
  const auto run = run_construction(p, {1, 1, 1}, Variant::Plain);
  const auto& A2 = run.plan.fresh_sets[2];
  const GenModel& top = run.levels.back();
  for (std::size_t i = 0; i < A2.size(); ++i)
    for (std::size_t j = i + 1; j < A2.size(); ++j)
      CHECK(top.has_leq(A2[i], A2[j]));
}

TEST_CASE("every one-step map embeds along a plain run", "[lmodel]") {
  for (SplitRule rule : {SplitRule::Doubling, SplitRule::Linear}) {
    const MorassPrefix p = build_prefix(10, rule);
    const auto run = run_construction(p, {1, 0, 1, 0}, Variant::Plain);
    for (std::size_t lvl = 0; lvl + 1 < run.levels.size(); ++lvl)
      for (const auto& m : morass::maps_between(p, static_cast<int>(lvl),
                                                static_cast<int>(lvl) + 1))
        CHECK(embed_check(run.levels[lvl], run.levels[lvl + 1], m.func));
  }
}

TEST_CASE("c-variant runs satisfy the richer theory", "[lmodel]") {
  const MorassPrefix p = build_prefix(9, SplitRule::Linear);
  const auto run = run_construction(p, {1, 0, 1}, Variant::CAlgebra);
  for (std::size_t lvl = 0; lvl < run.levels.size(); ++lvl) {
    INFO("level " << lvl);
    const TheoryReport tr = check_theory(run.levels[lvl], Variant::CAlgebra);
    for (const auto& issue : tr.issues)
      INFO(issue.clause << ": " << issue.detail);
    CHECK(tr.pass());
  }
}

TEST_CASE("the extra c-variant point is disjoint from everything reachable",
          "[lmodel]") {
  const MorassPrefix p = build_prefix(9, SplitRule::Linear);
  const auto run = run_construction(p, {0, 1}, Variant::CAlgebra);
  for (int n = 0; n < 2; ++n) {
    const int a = run.plan.extra_fresh[n];
    const int top_level = run.plan.alpha[n + 1];
    const GenModel& m = run.levels[top_level];
    for (int beta = 0; beta <= run.plan.alpha[n]; ++beta)
      for (const auto& f : morass::maps_between(p, beta, top_level))
        for (int v : f.func) CHECK(m.has_dis(a, v));
    // and it sits alone in its block at that level
    int mates = 0;
    for (const auto& [pt, b] : m.block)
      if (b == m.block.at(a)) ++mates;
    CHECK(mates == 1);
  }
}

TEST_CASE(
    "stage points stay unrelated to reachable points beyond the stage "
    "impositions",
    "[lmodel]") {
  const MorassPrefix p = build_prefix(10, SplitRule::Doubling);
  const auto run = run_construction(p, {1, 1, 1}, Variant::Plain);
  for (int n = 0; n < 3; ++n) {
    const auto& A = run.plan.fresh_sets[n];
    const int lvl = run.plan.alpha[n + 1];
    const GenModel& m = run.levels[lvl];
    std::set<int> covered;
    for (const auto& f : morass::maps_between(p, run.plan.alpha[n], lvl))
      covered.insert(f.func.begin(), f.func.end());
    for (int a : A)
      for (int u : covered) {
        CHECK_FALSE(m.has_leq(a, u));
        CHECK_FALSE(m.has_leq(u, a));
        CHECK_FALSE(m.has_dis(a, u));
      }
  }
}

TEST_CASE("c-variant stage points come from distinct one-step orbits",
          "[lmodel]") {
  // With the doubling rule the naive least fresh points collide: the third
  // fresh point between levels 5 and 9 is the one-step image of the first
  // (191 = h_6(63)), so block coherence would force the pair disjoint
  // against a stage chain. The planner skips orbit-mates.
  const MorassPrefix p = build_prefix(9, SplitRule::Doubling);
  const StagePlan plan = plan_stages(p, 3, Variant::CAlgebra);
  CHECK(plan.fresh_sets[2] == std::vector<int>{63, 127, 255});
  CHECK(plan.extra_fresh[2] == 511);
  CHECK(p.steps[6].h[63] == 191);
  for (int bit2 : {0, 1}) {
    const auto run = run_construction(p, {1, bit2, 1}, Variant::CAlgebra);
    CHECK(check_theory(run.levels.back(), Variant::CAlgebra).pass());
  }
}

TEST_CASE("construction is deterministic", "[lmodel]") {
  const MorassPrefix p = build_prefix(10, SplitRule::Doubling);
  const auto a = run_construction(p, {1, 0, 1, 1}, Variant::Plain);
  const auto b = run_construction(p, {1, 0, 1, 1}, Variant::Plain);
  REQUIRE(a.levels.size() == b.levels.size());
  for (std::size_t i = 0; i < a.levels.size(); ++i)
    CHECK(a.levels[i] == b.levels[i]);
}

TEST_CASE("doctored inputs trigger a construction failure with the pair",
          "[lmodel]") {
  const MorassPrefix p = build_prefix(6, SplitRule::Doubling);
  auto run = run_construction(p, {1, 1}, Variant::Plain);
  // contradict the level-3 model inside the level-2 restriction
  auto levels = run.levels;
  levels.resize(4);  // keep 0..3
  levels[2].dis.insert({0, 1});
  levels[3].leq.insert({0, 1});
  StagePlan plan = plan_stages(p, 3, Variant::Plain);
  bool threw = false;
  try {
    extend_stage(p, levels, plan, 2, 0);
  } catch (const ConstructionFailure& e) {
    threw = true;
    CHECK((e.offending == std::pair<int, int>{0, 1} ||
           e.offending == std::pair<int, int>{1, 0}));
  }
  CHECK(threw);
}

TEST_CASE("limit projection agrees with the constructed top model",
          "[lmodel]") {
  for (SplitRule rule : {SplitRule::Doubling, SplitRule::Linear}) {
    const MorassPrefix p = build_prefix(10, rule);
    const auto run = run_construction(p, {1, 0, 1, 0}, Variant::Plain);
    const LimitResult lr = limit_model(p, run);
    CHECK(lr.certificate.agrees_with_top);
    CHECK(lr.limit == run.levels.back());
  }
}

TEST_CASE("single-stage limits equal the stage model", "[lmodel]") {
  const MorassPrefix p = build_prefix(2, SplitRule::Doubling);
  const auto run = run_construction(p, {0}, Variant::Plain);
  const LimitResult lr = limit_model(p, run);
  CHECK(lr.limit == run.levels.back());
  CHECK(lr.certificate.agrees_with_top);
}

TEST_CASE("limits record pairs reached by several routes", "[lmodel]") {
  // the linear rule shares identity segments between maps, so projected
  // pairs arrive repeatedly
  const MorassPrefix p = build_prefix(10, SplitRule::Linear);
  const auto run = run_construction(p, {1, 0, 1}, Variant::Plain);
  const LimitResult lr = limit_model(p, run);
  CHECK(lr.certificate.agrees_with_top);
  CHECK(lr.certificate.multi_route_pairs > 0);
}

TEST_CASE("limit detects conflicting projections", "[lmodel]") {
  const MorassPrefix p = build_prefix(6, SplitRule::Doubling);
  auto run = run_construction(p, {0, 0}, Variant::Plain);
  // doctor two lower levels so their identity projections disagree on (0,1)
  run.levels[1].leq.insert({0, 1});
  run.levels[2].dis.insert({0, 1});
  CHECK_THROWS_AS(limit_model(p, run), IllDefinedLimit);
}
