#pragma once

#include <optional>
#include <string>
#include <vector>

#include "planbench/oracle.hpp"
#include "planbench/rng.hpp"
#include "planbench/scene.hpp"
#include "planbench/skills.hpp"
#include "planbench/tasks.hpp"

namespace testing_support {

using namespace planbench;

inline ObjectDescriptor object(std::string id, Category category, Color color, std::string noun = "") {
  ObjectDescriptor d;
  d.id = std::move(id);
  d.category = category;
  d.color = color;
  d.noun = std::move(noun);
  return d;
}

inline ObjectDescriptor block(Color c) { return object(std::string("block_") + to_string(c), Category::block, c); }
inline ObjectDescriptor bowl(Color c) { return object(std::string("bowl_") + to_string(c), Category::bowl, c); }
inline ObjectDescriptor drawer(Color c) {
  return object(std::string("drawer_") + to_string(c), Category::container, c, "drawer");
}
inline ObjectDescriptor table_fixture() { return object("table", Category::fixture, Color::brown, "table"); }
inline ObjectDescriptor letter(char glyph) {
  ObjectDescriptor d = object(std::string("letter_") + static_cast<char>(glyph - 'A' + 'a'), Category::letter,
                              Color::white);
  d.glyph = glyph;
  return d;
}
inline ObjectDescriptor at(ObjectDescriptor d, int x, int y) {
  d.cell = Cell{x, y};
  return d;
}

inline Relation on(std::string a, std::string b) { return {RelationKind::on, std::move(a), std::move(b)}; }
inline Relation in(std::string a, std::string b) { return {RelationKind::in, std::move(a), std::move(b)}; }

/// Scene reached by a random walk of valid skills from a generated episode.
inline Scene random_scene(Rng& rng, int max_moves = 6) {
  const auto& registry = task_registry();
  const auto& task = registry[rng.next_below(registry.size())];
  Scene scene = generate_episode(task.id, rng.next_below(1000)).scene;
  const auto actions = candidate_actions(scene.table());
  const int moves = rng.next_int(0, max_moves);
  for (int m = 0; m < moves; ++m) {
    const auto visible = visibility_mask(scene.table(), scene.state());
    std::vector<Action> valid;
    for (const auto& a : actions) {
      if (check_precondition(scene.table(), scene.state(), visible, a)) valid.push_back(a);
    }
    if (valid.empty()) break;
    scene = scene.with_state(apply_effect(scene.table(), scene.state(), rng.pick(valid)));
  }
  return scene;
}

/// Every invocation of every skill over the objects of the scene, valid or not.
inline std::vector<SkillInvocation> all_invocations(const Scene& scene) {
  std::vector<SkillInvocation> out = {make_invocation(SkillName::wait)};
  for (const auto& a : scene.objects()) {
    out.push_back(make_invocation(SkillName::pick_up, {a.id}));
    out.push_back(make_invocation(SkillName::open, {a.id}));
    out.push_back(make_invocation(SkillName::close, {a.id}));
    for (const auto& b : scene.objects()) {
      out.push_back(make_invocation(SkillName::place, {a.id, b.id}));
      out.push_back(make_invocation(SkillName::pour, {a.id, b.id}));
    }
  }
  return out;
}

}  // namespace testing_support
