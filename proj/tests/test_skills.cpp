#include <gtest/gtest.h>

#include "planbench/error.hpp"
#include "support.hpp"

using namespace planbench;
using namespace testing_support;

namespace {

Scene basic() {
  return Scene({table_fixture(), at(block(Color::red), 1, 1), at(bowl(Color::red), 3, 1)},
               {on("block_red", "table"), on("bowl_red", "table")});
}

}  // namespace

TEST(Registry, SixSkills) {
  EXPECT_EQ(skill_registry().size(), 6U);
  EXPECT_EQ(skill_template(SkillName::place).arity, 2);
  EXPECT_EQ(skill_template(SkillName::wait).arity, 0);
}

TEST(Precondition, PickVisibleBlock) {
  EXPECT_TRUE(precondition(basic(), make_invocation(SkillName::pick_up, {"block_red"})).ok);
}

TEST(Precondition, PickHiddenBlockIsNotVisible) {
  const Scene s({table_fixture(), at(block(Color::red), 1, 1), at(drawer(Color::blue), 3, 1)},
                {in("block_red", "drawer_blue"), on("drawer_blue", "table")});
  const auto r = precondition(s, make_invocation(SkillName::pick_up, {"block_red"}));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.reason, PreconditionReason::not_visible);
}

TEST(Precondition, PlaceWithEmptyHand) {
  const auto r = precondition(basic(), make_invocation(SkillName::place, {"block_red", "bowl_red"}));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.reason, PreconditionReason::nothing_held);
}

TEST(Precondition, PickCoveredObjectIsNotClear) {
  const Scene s({table_fixture(), at(object("plate_blue", Category::misc, Color::blue, "plate"), 1, 1),
                 object("apple_red", Category::misc, Color::red, "apple")},
                {on("plate_blue", "table"), on("apple_red", "plate_blue")});
  const auto r = precondition(s, make_invocation(SkillName::pick_up, {"plate_blue"}));
  EXPECT_EQ(r.reason, PreconditionReason::not_clear);
}

TEST(Precondition, UnknownObjectThrows) {
  EXPECT_THROW(precondition(basic(), make_invocation(SkillName::pick_up, {"block_blue"})), Error);
}

TEST(Effect, WaitIsIdentity) { EXPECT_EQ(effect(basic(), make_invocation(SkillName::wait)), basic()); }

TEST(Effect, PickThenPlaceInBowl) {
  Scene s = effect(basic(), make_invocation(SkillName::pick_up, {"block_red"}));
  s = effect(s, make_invocation(SkillName::place, {"block_red", "bowl_red"}));
  const auto rel = s.relations();
  EXPECT_NE(std::find(rel.begin(), rel.end(), in("block_red", "bowl_red")), rel.end());
  EXPECT_FALSE(s.held());
}

TEST(Effect, PourMovesContentsAndKeepsCup) {
  const auto cup = object("cup_green", Category::bowl, Color::green, "cup");
  Scene s({table_fixture(), block(Color::red), block(Color::blue), cup, at(bowl(Color::white), 3, 1)},
          {in("block_red", "cup_green"), in("block_blue", "cup_green"), on("bowl_white", "table")}, {},
          std::string("cup_green"));
  s = effect(s, make_invocation(SkillName::pour, {"cup_green", "bowl_white"}));
  const auto rel = s.relations();
  EXPECT_NE(std::find(rel.begin(), rel.end(), in("block_red", "bowl_white")), rel.end());
  EXPECT_NE(std::find(rel.begin(), rel.end(), in("block_blue", "bowl_white")), rel.end());
  EXPECT_EQ(s.held(), "cup_green");
}

TEST(Effect, FailingPreconditionThrows) {
  EXPECT_THROW(effect(basic(), make_invocation(SkillName::place, {"block_red", "bowl_red"})), Error);
}

TEST(Property, EffectsPreserveInvariants) {
  Rng rng(21);
  int applied = 0;
  for (int n = 0; n < 300; ++n) {
    const Scene s = random_scene(rng);
    for (const auto& inv : all_invocations(s)) {
      if (!precondition(s, inv)) continue;
      const Scene next = effect(s, inv);
      EXPECT_TRUE(validate(next.table(), next.state()).empty());
      ++applied;
    }
  }
  EXPECT_GT(applied, 1000);
}

TEST(Property, PickThenPlaceBackIsIdentity) {
  Rng rng(22);
  int checked = 0;
  for (int n = 0; n < 200; ++n) {
    const Scene s = random_scene(rng);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& id = s.object(i).id;
      const auto sup = s.support(i);
      if (!sup || !precondition(s, make_invocation(SkillName::pick_up, {id}))) continue;
      if ((sup->kind == RelationKind::in) != s.table().is_receptacle(sup->parent)) continue;
      const Scene held = effect(s, make_invocation(SkillName::pick_up, {id}));
      const Scene back = effect(held, make_invocation(SkillName::place, {id, s.object(sup->parent).id}));
      EXPECT_EQ(back, s);
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Property, HiddenObjectsCannotBePicked) {
  Rng rng(23);
  for (int n = 0; n < 300; ++n) {
    const Scene s = random_scene(rng);
    const auto visible = visible_objects(s);
    for (const auto& d : s.objects()) {
      if (std::find(visible.begin(), visible.end(), d.id) != visible.end()) continue;
      EXPECT_FALSE(precondition(s, make_invocation(SkillName::pick_up, {d.id})).ok);
    }
  }
}

TEST(Bind, RoundTripsThroughActions) {
  const Scene s = basic();
  const auto inv = make_invocation(SkillName::place, {"block_red", "bowl_red"});
  EXPECT_EQ(unbind(s.table(), bind(s.table(), inv)), inv);
  EXPECT_THROW(bind(s.table(), make_invocation(SkillName::place, {"block_red"})), Error);
}
