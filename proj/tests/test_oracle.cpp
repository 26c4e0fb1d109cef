#include <gtest/gtest.h>

#include <deque>
#include <unordered_set>

#include "planbench/sim.hpp"
#include "support.hpp"

using namespace planbench;
using namespace testing_support;

namespace {

GoalSpec goal_of(GoalExpr e) {
  GoalSpec g;
  g.predicate = std::move(e);
  return g;
}

// Plain breadth-first search over scenes keyed by canonical JSON, trying every
// invocation; returns the length of a shortest plan.
std::optional<int> shortest_length(const Scene& start, const GoalSpec& goal, int max_depth) {
  std::deque<std::pair<Scene, int>> frontier = {{start, 0}};
  std::unordered_set<std::string> seen = {canonical_json(start)};
  const auto invs = all_invocations(start);
  while (!frontier.empty()) {
    auto [scene, depth] = frontier.front();
    frontier.pop_front();
    if (goal_satisfied(scene, goal)) return depth;
    if (depth == max_depth) continue;
    for (const auto& inv : invs) {
      if (!precondition(scene, inv)) continue;
      Scene next = effect(scene, inv);
      if (seen.insert(canonical_json(next)).second) frontier.emplace_back(std::move(next), depth + 1);
    }
  }
  return std::nullopt;
}

Episode plain(const std::string& task, std::uint64_t seed) {
  Episode ep = generate_episode(task, seed);
  ep.disturbances.clear();
  ep.noise.clear();
  return ep;
}

}  // namespace

TEST(Oracle, SatisfiedGoalGivesEmptyTerminatedPlan) {
  const Scene s({table_fixture(), block(Color::red), at(bowl(Color::red), 1, 1)},
                {in("block_red", "bowl_red"), on("bowl_red", "table")});
  const auto plan = oracle_solve(s, goal_of(GoalExpr::in("block_red", "bowl_red")));
  ASSERT_TRUE(plan);
  EXPECT_TRUE(plan->steps.empty());
  EXPECT_TRUE(plan->terminated);
}

TEST(Oracle, ThreeBlocksIntoMatchingBowlsTakesSixSteps) {
  std::vector<ObjectDescriptor> objs = {table_fixture()};
  std::vector<Relation> rel;
  std::vector<GoalExpr> parts;
  int x = 0;
  for (Color c : {Color::red, Color::green, Color::blue}) {
    objs.push_back(at(block(c), x++, 1));
    objs.push_back(at(bowl(c), x++, 3));
    rel.push_back(on(objs[objs.size() - 2].id, "table"));
    rel.push_back(on(objs.back().id, "table"));
    parts.push_back(GoalExpr::in(objs[objs.size() - 2].id, objs.back().id));
  }
  const Scene s(objs, rel);
  const GoalSpec g = goal_of(GoalExpr::conj(parts));
  int mandatory = 0;
  for (const auto& p : parts) mandatory += goal_expr_holds(p, s) ? 0 : 2;
  const auto plan = oracle_solve(s, g);
  ASSERT_TRUE(plan);
  EXPECT_EQ(static_cast<int>(plan->steps.size()), mandatory);
  EXPECT_EQ(mandatory, 6);
}

TEST(Oracle, HiddenTargetStartsByOpeningDrawer) {
  const Scene s({table_fixture(), block(Color::red), at(drawer(Color::blue), 1, 1), at(bowl(Color::green), 3, 1)},
                {in("block_red", "drawer_blue"), on("drawer_blue", "table"), on("bowl_green", "table")});
  const auto plan = oracle_solve(s, goal_of(GoalExpr::in("block_red", "bowl_green")));
  ASSERT_TRUE(plan);
  ASSERT_FALSE(plan->steps.empty());
  EXPECT_EQ(format_invocation(plan->steps.front(), s.table()), "open blue drawer");
  EXPECT_EQ(plan->steps.size(), 3U);
}

TEST(Oracle, UnsolvableWithinDepth) {
  const Scene s({table_fixture(), at(block(Color::red), 1, 1), at(bowl(Color::red), 3, 1)},
                {on("block_red", "table"), on("bowl_red", "table")});
  EXPECT_FALSE(oracle_solve(s, goal_of(GoalExpr::in("block_red", "bowl_red")), 1));
  EXPECT_FALSE(oracle_solve(s, goal_of(GoalExpr::in("bowl_red", "block_red"))));
}

TEST(Oracle, LengthsMatchIndependentSearch) {
  for (const std::string task : {"bb_block_in_bowl", "bb_matching", "bb_stack", "bb_one_bowl", "fb_find_hidden",
                                 "letters_alpha", "letters_vowels"}) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const Episode ep = plain(task, seed);
      const auto plan = oracle_solve(ep.scene, ep.goal);
      ASSERT_TRUE(plan) << task << " " << seed;
      const auto expected = shortest_length(ep.scene, ep.goal, static_cast<int>(plan->steps.size()));
      ASSERT_TRUE(expected) << task << " " << seed;
      EXPECT_EQ(static_cast<int>(plan->steps.size()), *expected) << task << " " << seed;
    }
  }
}

TEST(Oracle, PlansAreValidStepByStep) {
  for (const auto& t : task_registry()) {
    const Episode ep = plain(t.id, 9);
    const auto plan = oracle_solve(ep.scene, ep.goal);
    ASSERT_TRUE(plan) << t.id;
    Scene s = ep.scene;
    for (const auto& step : plan->steps) {
      ASSERT_TRUE(precondition(s, step)) << t.id;
      s = effect(s, step);
    }
  }
}

TEST(Oracle, MemoAgreesAlongThePlan) {
  for (const auto& t : task_registry()) {
    const Episode ep = plain(t.id, 5);
    OracleMemo memo;
    const auto plan = memo.solve(ep.scene, ep.goal);
    ASSERT_TRUE(plan);
    EXPECT_EQ(*plan, *oracle_solve(ep.scene, ep.goal)) << t.id;
    Scene s = ep.scene;
    for (std::size_t k = 0; k < plan->steps.size(); ++k) {
      s = effect(s, plan->steps[k]);
      const auto rest = memo.solve(s, ep.goal);
      ASSERT_TRUE(rest);
      EXPECT_EQ(*rest, *oracle_solve(s, ep.goal)) << t.id << " step " << k;
    }
  }
}

TEST(Oracle, HandoverPlanEndsWithWait) {
  const Episode ep = plain("fb_handover", 0);
  const auto plan = oracle_solve(ep.scene, ep.goal);
  ASSERT_TRUE(plan);
  ASSERT_EQ(plan->steps.size(), 2U);
  EXPECT_EQ(plan->steps.front().skill, SkillName::pick_up);
  EXPECT_EQ(plan->steps.back().skill, SkillName::wait);
}
