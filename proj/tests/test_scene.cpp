#include <gtest/gtest.h>

#include <functional>
#include <set>

#include "planbench/error.hpp"
#include "planbench/observe.hpp"
#include "planbench/render.hpp"
#include "support.hpp"

using namespace planbench;
using namespace testing_support;

namespace {

Scene drawer_scene(bool open) {
  return Scene({table_fixture(), at(block(Color::red), 1, 1), at(drawer(Color::blue), 3, 1)},
               {in("block_red", "drawer_blue"), on("drawer_blue", "table")}, {{"drawer_blue", open}});
}

Scene blocks_and_bowls() {
  return Scene({table_fixture(), at(block(Color::red), 1, 1), at(bowl(Color::blue), 3, 1)},
               {on("block_red", "table"), on("bowl_blue", "table")});
}

// Independent visibility: walk the relation list upwards looking for a closed container.
std::set<std::string> hidden_by_relations(const Scene& scene) {
  std::map<std::string, Relation> parent;
  for (const auto& r : scene.relations()) parent[r.a] = r;
  const auto open = scene.container_open();
  std::set<std::string> hidden;
  for (const auto& d : scene.objects()) {
    std::string cur = d.id;
    for (std::size_t guard = 0; guard <= scene.size() && parent.count(cur); ++guard) {
      const Relation& r = parent[cur];
      if (r.kind == RelationKind::in && open.count(r.b) && !open.at(r.b)) {
        hidden.insert(d.id);
        break;
      }
      cur = r.b;
    }
  }
  return hidden;
}

}  // namespace

TEST(Visibility, ClosedDrawerHidesBlock) {
  const auto v = visible_objects(drawer_scene(false));
  EXPECT_EQ(std::count(v.begin(), v.end(), "block_red"), 0);
}

TEST(Visibility, OpenDrawerShowsBlock) {
  const auto v = visible_objects(drawer_scene(true));
  EXPECT_EQ(std::count(v.begin(), v.end(), "block_red"), 1);
}

TEST(Visibility, EmptySceneIsEmpty) { EXPECT_TRUE(visible_objects(Scene(std::vector<ObjectDescriptor>{}, std::vector<Relation>{})).empty()); }

TEST(Visibility, NeverShowsTransitivelyContainedObjects) {
  Rng rng(11);
  for (int n = 0; n < 400; ++n) {
    const Scene s = random_scene(rng, 8);
    const auto hidden = hidden_by_relations(s);
    const auto visible = visible_objects(s);
    for (const auto& id : visible) EXPECT_EQ(hidden.count(id), 0U) << id;
    EXPECT_EQ(visible.size() + hidden.size(), s.size());
  }
}

TEST(Scene, RejectsSupportCycle) {
  EXPECT_THROW(Scene({block(Color::red), block(Color::blue)},
                     {on("block_red", "block_blue"), on("block_blue", "block_red")}),
               Error);
}

TEST(Scene, RejectsInOnNonReceptacle) {
  EXPECT_THROW(Scene({block(Color::red), block(Color::blue)}, {in("block_red", "block_blue")}), Error);
}

TEST(Scene, RandomWalksStayAcyclicAndValid) {
  Rng rng(5);
  for (int n = 0; n < 300; ++n) {
    const Scene s = random_scene(rng, 12);
    EXPECT_TRUE(validate(s.table(), s.state()).empty());
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_FALSE(is_supported_by(s.state(), i, i));
  }
}

TEST(Scene, JsonRoundTrip) {
  Rng rng(8);
  for (int n = 0; n < 100; ++n) {
    const Scene s = random_scene(rng);
    EXPECT_EQ(scene_from_json(to_json(s)), s);
    EXPECT_EQ(canonical_json(scene_from_json(json::parse(canonical_json(s)))), canonical_json(s));
  }
}

TEST(RenderText, ListsObjectsInIdOrder) {
  const std::string text = render_text(blocks_and_bowls());
  const auto red = text.find("red block");
  const auto blue = text.find("blue bowl");
  ASSERT_NE(red, std::string::npos);
  ASSERT_NE(blue, std::string::npos);
  EXPECT_LT(red, blue);
}

TEST(RenderText, Deterministic) { EXPECT_EQ(render_text(blocks_and_bowls()), render_text(blocks_and_bowls())); }

TEST(RenderText, MarksHeldBlock) {
  const Scene s({table_fixture(), at(block(Color::red), 1, 1)}, {}, {}, std::string("block_red"));
  EXPECT_NE(render_text(s).find("red block (medium): in gripper"), std::string::npos);
}

TEST(RenderImage, DeterministicBytes) {
  EXPECT_EQ(render_image(blocks_and_bowls(), RenderStyle::camera),
            render_image(blocks_and_bowls(), RenderStyle::camera));
}

TEST(RenderImage, HiddenBlockHasNoPixels) {
  const Scene s = drawer_scene(false);
  for (const auto& e : layout(s)) EXPECT_NE(e.id, "block_red");
  const RgbImage img = decode_png(render_image(s, RenderStyle::camera));
  const auto red = palette_rgb(Color::red, RenderStyle::camera);
  int count = 0;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) count += img.at(x, y) == red;
  }
  EXPECT_EQ(count, 0);

  const RgbImage shown = decode_png(render_image(drawer_scene(true), RenderStyle::camera));
  int shown_count = 0;
  for (int y = 0; y < shown.height; ++y) {
    for (int x = 0; x < shown.width; ++x) shown_count += shown.at(x, y) == red;
  }
  EXPECT_GT(shown_count, 0);
}

TEST(RenderImage, StylesDifferButShareLayout) {
  const Scene s({table_fixture(), at(block(Color::red), 1, 1), at(block(Color::green), 5, 3),
                 at(bowl(Color::blue), 3, 1)},
                {on("block_red", "table"), on("block_green", "table"), on("bowl_blue", "table")});
  const auto camera = render_image(s, RenderStyle::camera);
  const auto sketch = render_image(s, RenderStyle::goal_sketch);
  EXPECT_NE(camera, sketch);
  const RgbImage a = decode_png(camera);
  const RgbImage b = decode_png(sketch);
  for (const auto& e : layout(s)) {
    const auto& d = s.object(s.table().index_of(e.id));
    if (d.category != Category::block) continue;
    const int cx = (e.x0 + e.x1) / 2;
    const int cy = (e.y0 + e.y1) / 2;
    EXPECT_EQ(a.at(cx, cy), palette_rgb(d.color, RenderStyle::camera)) << e.id;
    EXPECT_EQ(b.at(cx, cy), palette_rgb(d.color, RenderStyle::goal_sketch)) << e.id;
  }
}

TEST(RenderImage, PngRoundTrip) {
  const RgbImage img = rasterize(blocks_and_bowls(), RenderStyle::camera);
  EXPECT_EQ(decode_png(encode_png(img)), img);
  EXPECT_EQ(img.width, kImageSize);
}

TEST(Observe, PureAndDigestStable) {
  Rng rng(3);
  for (int n = 0; n < 20; ++n) {
    const Scene s = random_scene(rng);
    const Observation a = observe(s, true);
    const Observation b = observe(s, true);
    EXPECT_EQ(a.text, b.text);
    EXPECT_EQ(a.image, b.image);
    EXPECT_EQ(a.digest(), b.digest());
  }
}

TEST(SceneDiff, IdentityIsEmpty) { EXPECT_TRUE(scene_diff(blocks_and_bowls(), blocks_and_bowls()).empty()); }

TEST(SceneDiff, MoveBlockIntoBowlGivesTwoEntries) {
  const Scene a = blocks_and_bowls();
  const Scene b({table_fixture(), at(block(Color::red), 1, 1), at(bowl(Color::blue), 3, 1)},
                {in("block_red", "bowl_blue"), on("bowl_blue", "table")});
  const auto d = scene_diff(a, b);
  ASSERT_EQ(d.size(), 2U);
  std::set<SceneChange::Kind> kinds = {d[0].kind, d[1].kind};
  EXPECT_TRUE(kinds.count(SceneChange::Kind::relation_removed));
  EXPECT_TRUE(kinds.count(SceneChange::Kind::relation_added));
}

TEST(SceneDiff, OpeningDrawerIsOneFlagChange) {
  const auto d = scene_diff(drawer_scene(false), drawer_scene(true));
  ASSERT_EQ(d.size(), 1U);
  EXPECT_EQ(d[0].kind, SceneChange::Kind::container_flag);
}

TEST(SceneDiff, MismatchedObjectsThrow) {
  EXPECT_THROW(scene_diff(blocks_and_bowls(), drawer_scene(true)), Error);
}
