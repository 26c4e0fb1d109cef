#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "planbench/scene.hpp"

namespace planbench {

enum class RenderStyle : std::uint8_t { camera, goal_sketch };

const char* to_string(RenderStyle s);
std::optional<RenderStyle> parse_render_style(std::string_view text);

/// What the agent sees at one step (x_t).
struct Observation {
  std::vector<ObjectDescriptor> visible;  // id order
  std::vector<Relation> visible_relations;
  std::optional<std::string> held;
  std::string text;
  std::optional<std::vector<std::uint8_t>> image;  // PNG bytes

  /// SHA-256 over the text and, when present, the image bytes.
  std::string digest() const;
};

/// Deterministic scene description: one "Visible objects:" inventory line,
/// then one line per visible object in id order.
std::string render_text(const Scene& scene);

Observation observe(const Scene& scene, bool with_image = false,
                    RenderStyle style = RenderStyle::camera);

}  // namespace planbench
