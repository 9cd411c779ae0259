#include <doctest.h>

#include <string>

#include "helpers.hpp"
#include "tap/render.hpp"
#include "tap/solvers.hpp"

using namespace tap;

namespace {

int count_of(const std::string& hay, const std::string& needle) {
  int n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size()))
    ++n;
  return n;
}

std::string box_rect(double x, double y, double w, double h, int id) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<rect class=\"box\" x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" "
                "height=\"%.2f\" fill=\"%s\" stroke=\"#333333\" "
                "stroke-width=\"1\"/>",
                x, y, w, h, box_color(id).c_str());
  return buf;
}

}  // namespace

TEST_CASE("box colors are stable and well formed") {
  CHECK(box_color(0) == box_color(0));
  CHECK(box_color(0) != box_color(1));
  CHECK(box_color(7).size() == 7);
  CHECK(box_color(7)[0] == '#');
}

TEST_CASE("the fixture pile renders at pinned coordinates") {
  const std::string svg = render_pile_svg(test::f1());

  // 4-wide pile, 3 cells tall: 24 px per cell inside a 16 px margin.
  CHECK(svg.find("viewBox=\"0 0 128.00 104.00\"") != std::string::npos);
  CHECK(count_of(svg, "class=\"container\"") == 1);
  CHECK(svg.find("width=\"96.00\" height=\"72.00\"") != std::string::npos);

  CHECK(count_of(svg, "class=\"box\"") == 3);
  CHECK(svg.find(box_rect(16, 40, 48, 48, 0)) != std::string::npos);
  CHECK(svg.find(box_rect(64, 64, 48, 24, 1)) != std::string::npos);
  CHECK(svg.find(box_rect(64, 16, 48, 48, 2)) != std::string::npos);
  CHECK(count_of(svg, "<text") == 3);

  CHECK(render_pile_svg(test::f1()) == svg);
}

TEST_CASE("solution frames accumulate one box at a time") {
  const ProblemInstance inst = test::f1();
  const Solution sol = solve_greedy(inst, Strategy::kLb);
  REQUIRE(sol.steps.size() == 3);

  const auto frames = render_solution_svg(inst, sol.steps);
  REQUIRE(frames.size() == 4);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    CHECK(count_of(frames[t], "class=\"box\"") == static_cast<int>(t));
    CHECK(count_of(frames[t], "class=\"container\"") == 1);
    // 5-wide target container.
    CHECK(frames[t].find("width=\"120.00\"") != std::string::npos);
  }

  const auto again = render_solution_svg(inst, sol.steps);
  REQUIRE(again.size() == frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t)
    CHECK(again[t] == frames[t]);
}

TEST_CASE("second container draws as its own band") {
  ProblemInstance inst;
  inst.dims_mode = 2;
  inst.init_width = 4;
  inst.target_width = 5;
  inst.container_count = 2;
  inst.boxes = {{0, {2, 1, 1}, 1}};
  inst.initial_placements = {{0, 0, 0, 0, 0, 0}};

  const std::vector<PlacedBox> steps = {{0, 0, 0, 0, 0, 1}};
  const auto frames = render_solution_svg(inst, steps);
  REQUIRE(frames.size() == 2);
  CHECK(count_of(frames[1], "class=\"container\"") == 2);
  // Bands are 5 cells plus a 2 cell gap apart, so container 1 starts at
  // cell 7: x = 16 + 7 * 24.
  CHECK(frames[1].find(box_rect(184, 64, 48, 24, 0)) != std::string::npos);
}

TEST_CASE("three dimensional piles project to polygons") {
  ProblemInstance inst;
  inst.dims_mode = 3;
  inst.init_width = 3;
  inst.init_depth = 3;
  inst.target_width = 3;
  inst.target_depth = 3;
  inst.boxes = {{0, {1, 1, 1}, 0}};
  inst.initial_placements = {{0, 0, 0, 0, 0, 0}};

  const std::string svg = render_pile_svg(inst);
  CHECK(svg.find("<rect class=\"box\"") == std::string::npos);
  CHECK(count_of(svg, "<polygon class=\"container\"") == 1);
  CHECK(count_of(svg, "<polygon class=\"box\"") == 3);

  const auto frames = render_solution_svg(inst, {{0, 0, 1, 0, 1, 0}});
  REQUIRE(frames.size() == 2);
  CHECK(count_of(frames[0], "<polygon class=\"box\"") == 0);
  CHECK(count_of(frames[1], "<polygon class=\"box\"") == 3);
  CHECK(render_pile_svg(inst) == svg);
}
