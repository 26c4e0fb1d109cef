#include "planbench/observe.hpp"

#include <sstream>

#include "planbench/digest.hpp"
#include "planbench/render.hpp"

namespace planbench {

const char* to_string(RenderStyle s) { return s == RenderStyle::camera ? "camera" : "goal-sketch"; }

std::optional<RenderStyle> parse_render_style(std::string_view text) {
  if (text == "camera") return RenderStyle::camera;
  if (text == "goal-sketch" || text == "goal_sketch") return RenderStyle::goal_sketch;
  return std::nullopt;
}

std::string Observation::digest() const {
  std::string material = text;
  if (image) {
    material += '\n';
    material += sha256_hex(std::span<const std::uint8_t>(*image));
  }
  return sha256_hex(material);
}

std::string render_text(const Scene& scene) {
  const ObjectTable& table = scene.table();
  const SceneState& state = scene.state();
  const auto visible = visibility_mask(table, state);

  std::ostringstream out;
  out << "Visible objects:";
  bool first = true;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!visible[i]) continue;
    out << (first ? " " : ", ") << table.phrase(i);
    first = false;
  }
  if (first) out << " none";
  out << '\n';

  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!visible[i]) continue;
    const ObjectDescriptor& d = table[i];
    out << "- " << table.phrase(i) << " (" << to_string(d.size) << "): ";
    const auto support = state.support_of(i);
    if (state.held == i) {
      out << "in gripper";
    } else if (support && table.table_surface() == support->parent && d.cell) {
      out << "on table at column " << d.cell->x << ", row " << d.cell->y;
    } else if (support) {
      out << to_string(support->kind) << ' ' << table.phrase(support->parent);
    } else if (d.cell) {
      out << "at column " << d.cell->x << ", row " << d.cell->y;
    } else {
      out << "fixture";
    }
    if (table.is_container(i)) out << "; " << (state.is_open(i) ? "open" : "closed");
    out << '\n';
  }
  return out.str();
}

Observation observe(const Scene& scene, bool with_image, RenderStyle style) {
  Observation obs;
  const auto visible = visibility_mask(scene.table(), scene.state());
  for (std::size_t i = 0; i < scene.size(); ++i) {
    if (visible[i]) obs.visible.push_back(scene.object(i));
  }
  for (const auto& r : scene.relations()) {
    const auto a = scene.table().find(r.a);
    const auto b = scene.table().find(r.b);
    if (visible[*a] && visible[*b]) obs.visible_relations.push_back(r);
  }
  obs.held = scene.held();
  obs.text = render_text(scene);
  if (with_image) obs.image = render_image(scene, style);
  return obs;
}

}  // namespace planbench
