#ifndef TAP_RENDER_HPP
#define TAP_RENDER_HPP

#include <string>
#include <vector>

#include "tap/core.hpp"

namespace tap {

// Stable fill color for a box id, shared by every view.
std::string box_color(int id);

// The initial pile, as a flat elevation (2D) or isometric projection (3D).
std::string render_pile_svg(const ProblemInstance& inst);

// Packing sequence: frame 0 shows the empty target container(s), frame t
// shows the first t steps placed. Returns steps.size() + 1 SVG documents.
std::vector<std::string> render_solution_svg(const ProblemInstance& inst,
                                             const std::vector<PlacedBox>& steps);

}  // namespace tap

#endif
