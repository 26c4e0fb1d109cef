#include <gtest/gtest.h>

#include <fstream>

#include "planbench/plan_language.hpp"
#include "support.hpp"

using namespace planbench;
using namespace testing_support;

namespace {

std::vector<ObjectDescriptor> vocab() {
  return {table_fixture(), block(Color::red), block(Color::blue), bowl(Color::red),
          object("container_blue", Category::container, Color::blue), object("cup_green", Category::bowl,
                                                                              Color::green, "cup"),
          letter('C')};
}

SkillInvocation step_of(const StepParse& p) {
  EXPECT_TRUE(std::holds_alternative<SkillInvocation>(p));
  return std::get<SkillInvocation>(p);
}

}  // namespace

TEST(ParseStep, PickUpBlueContainer) {
  const auto v = vocab();
  EXPECT_EQ(step_of(parse_step("pick up blue container", v)),
            make_invocation(SkillName::pick_up, {"container_blue"}));
}

TEST(ParseStep, DoneIsTermination) {
  const auto v = vocab();
  EXPECT_TRUE(std::holds_alternative<DoneToken>(parse_step("done", v)));
  EXPECT_TRUE(std::holds_alternative<DoneToken>(parse_step("Done.", v)));
}

TEST(ParseStep, WipeTableIsStructureError) {
  const auto v = vocab();
  const auto p = parse_step("wipe the table", v);
  ASSERT_TRUE(std::holds_alternative<StructureError>(p));
  EXPECT_EQ(std::get<StructureError>(p).reason, "no matching skill");
}

TEST(ParseStep, ToleratesCaseArticlesAndPunctuation) {
  const auto v = vocab();
  EXPECT_EQ(step_of(parse_step("  Place the Red Block in the red bowl. ", v)),
            make_invocation(SkillName::place, {"block_red", "bowl_red"}));
  EXPECT_EQ(step_of(parse_step("pour green cup into red bowl", v)),
            make_invocation(SkillName::pour, {"cup_green", "bowl_red"}));
}

TEST(ParsePlan, NumberedPlanWithDone) {
  const auto v = vocab();
  const auto out = parse_plan("Plan:\n1. pick up red block\n2. place red block in red bowl\n3. done", v);
  ASSERT_TRUE(std::holds_alternative<Plan>(out));
  const Plan& plan = std::get<Plan>(out);
  EXPECT_EQ(plan.steps.size(), 2U);
  EXPECT_TRUE(plan.terminated);
}

TEST(ParsePlan, ProseBeforeListGivesSamePlan) {
  const auto v = vocab();
  const auto bare = parse_plan("Plan:\n1. pick up red block\n2. place red block in red bowl\n3. done", v);
  const auto prose = parse_plan(
      "I see a red block and a red bowl on the table.\nHere is what I will do.\n"
      "1. pick up red block\n2. place red block in red bowl\n3. done",
      v);
  EXPECT_EQ(bare, prose);
}

TEST(ParsePlan, ProseOnlyIsEmpty) {
  const auto v = vocab();
  EXPECT_TRUE(std::holds_alternative<EmptyResponse>(parse_plan("I cannot see any objects.", v)));
  EXPECT_TRUE(std::holds_alternative<EmptyResponse>(parse_plan("", v)));
}

TEST(ParsePlan, StructureErrorCarriesOffendingLine) {
  const auto v = vocab();
  const auto out = parse_plan("Plan:\n1. pick up red block\n2. wipe the table\n3. done", v);
  ASSERT_TRUE(std::holds_alternative<StructureError>(out));
  EXPECT_EQ(std::get<StructureError>(out).line, "2. wipe the table");
}

TEST(ParsePlan, StopsAtFirstDone) {
  const auto v = vocab();
  const auto out = parse_plan("1. wait\n2. done\n3. wipe the table", v);
  ASSERT_TRUE(std::holds_alternative<Plan>(out));
  EXPECT_EQ(std::get<Plan>(out).steps.size(), 1U);
}

TEST(Resolve, UniqueColorMatch) {
  const auto v = vocab();
  const auto r = resolve_object("the red block", v);
  EXPECT_EQ(r.status, ObjectResolution::Status::resolved);
  EXPECT_EQ(r.id, "block_red");
}

TEST(Resolve, BareNounWithTwoBlocksIsAmbiguous) {
  const auto v = vocab();
  const auto r = resolve_object("block", v);
  EXPECT_EQ(r.status, ObjectResolution::Status::ambiguous);
  EXPECT_EQ(r.candidates, 2U);
}

TEST(Resolve, LetterByGlyph) {
  const auto v = vocab();
  const auto r = resolve_object("letter C", v);
  EXPECT_EQ(r.status, ObjectResolution::Status::resolved);
  EXPECT_EQ(r.id, "letter_c");
}

TEST(Resolve, UnknownPhrase) {
  const auto v = vocab();
  EXPECT_EQ(resolve_object("purple elephant", v).status, ObjectResolution::Status::unresolved);
}

TEST(Format, CanonicalTexts) {
  const auto v = vocab();
  EXPECT_EQ(format_invocation(make_invocation(SkillName::pick_up, {"block_red"}), v), "pick up red block");
  EXPECT_EQ(format_invocation(make_invocation(SkillName::wait), v), "wait");
  EXPECT_EQ(format_invocation(make_invocation(SkillName::pour, {"cup_green", "bowl_red"}), v),
            "pour green cup into red bowl");
  EXPECT_EQ(format_invocation(make_invocation(SkillName::place, {"block_red", "block_blue"}), v),
            "place red block on blue block");
}

TEST(Inventory, ParsesObjectsLine) {
  const auto inv = parse_inventory("Objects: red block, blue bowl\nPlan:\n1. done");
  ASSERT_TRUE(inv);
  EXPECT_EQ(*inv, (std::vector<std::string>{"red block", "blue bowl"}));
  EXPECT_FALSE(parse_inventory("Plan:\n1. done"));
}

TEST(Property, RoundTripOverGeneratedScenes) {
  Rng rng(31);
  int checked = 0;
  for (int n = 0; n < 200; ++n) {
    const Scene s = random_scene(rng);
    for (const auto& inv : all_invocations(s)) {
      if (inv.skill != SkillName::wait && !precondition(s, inv)) continue;
      const auto p = parse_step(format_invocation(inv, s.table()), s.objects());
      ASSERT_TRUE(std::holds_alternative<SkillInvocation>(p)) << format_invocation(inv, s.table());
      EXPECT_EQ(std::get<SkillInvocation>(p), inv);
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(Property, ParsePlanIsTotalOnRandomBytes) {
  Rng rng(32);
  const auto v = vocab();
  const std::string alphabet = "pick up place in on red blue block bowl done wait\n1. - * Plan: \t\r";
  for (int n = 0; n < 3000; ++n) {
    std::string bytes;
    const int len = rng.next_int(0, 200);
    for (int k = 0; k < len; ++k) {
      bytes.push_back(n % 2 ? static_cast<char>(rng.next_below(256)) : alphabet[rng.next_below(alphabet.size())]);
    }
    const auto first = parse_plan(bytes, v);
    EXPECT_EQ(first, parse_plan(bytes, v));
  }
}

TEST(Corpus, NoStructureErrors) {
  std::ifstream in(PLANBENCH_DATA_DIR "/plan_corpus.json");
  ASSERT_TRUE(in);
  const json corpus = json::parse(in);
  int steps = 0;
  for (const auto& scene : corpus.at("scenes")) {
    std::vector<ObjectDescriptor> v;
    for (const auto& d : scene.at("vocabulary")) v.push_back(descriptor_from_json(d));
    auto expected_inv = [](const json& e) {
      return make_invocation(*parse_skill_name(e.at("skill").get<std::string>()),
                             e.at("args").get<std::vector<std::string>>());
    };
    for (const auto& entry : scene.at("steps")) {
      const auto p = parse_step(entry.at("text").get<std::string>(), v);
      ASSERT_TRUE(std::holds_alternative<SkillInvocation>(p)) << entry.at("text");
      EXPECT_EQ(std::get<SkillInvocation>(p), expected_inv(entry.at("expected")));
      ++steps;
    }
    for (const auto& entry : scene.at("plans")) {
      const auto out = parse_plan(entry.at("text").get<std::string>(), v);
      ASSERT_TRUE(std::holds_alternative<Plan>(out)) << entry.at("text");
      const Plan& plan = std::get<Plan>(out);
      const auto& expected = entry.at("expected").at("steps");
      ASSERT_EQ(plan.steps.size(), expected.size());
      for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_EQ(plan.steps[k], expected_inv(expected[k]));
      EXPECT_EQ(plan.terminated, entry.at("expected").at("terminated").get<bool>());
    }
  }
  EXPECT_GT(steps, 300);
}
