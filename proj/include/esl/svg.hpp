#pragma once

#include <optional>
#include <string>
#include <vector>

#include "esl/model.hpp"

namespace esl {

struct RenderLayer {
    Simplicial model;
    std::optional<int> label;  // matches data labels for colouring
};

/// SVG 1.1 drawing of 2-D simplicials over an optional scatter of `data`.
/// Vertices are dots, 2-vertex simplices lines, larger simplices translucent
/// polygons with every vertex pair joined. One colour per layer.
/// Throws InvalidInput for anything but 2-D input.
std::string render_svg(const std::vector<RenderLayer>& layers, const std::optional<Dataset>& data = std::nullopt,
                       int size_px = 600);

}  // namespace esl
