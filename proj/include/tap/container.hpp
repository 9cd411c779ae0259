#ifndef TAP_CONTAINER_HPP
#define TAP_CONTAINER_HPP

#include <Eigen/Dense>
#include <vector>

#include "tap/core.hpp"

namespace tap {

// Column heights of an open-topped container. W x D grid; D == 1 in 2D mode.
struct HeightMap {
  Eigen::ArrayXXi h;

  HeightMap() = default;
  HeightMap(int width, int depth) : h(Eigen::ArrayXXi::Zero(width, depth)) {}

  int width() const { return static_cast<int>(h.rows()); }
  int depth() const { return static_cast<int>(h.cols()); }
  int max_height() const { return h.size() ? h.maxCoeff() : 0; }
  bool operator==(const HeightMap& o) const { return (h == o.h).all(); }
};

// Resting height of a box footprint dropped at (x, z): the max column height
// under it. Pure; bounds violations are contract errors.
int drop(const HeightMap& hm, int x, int z, const Extents& e);

// New map with the footprint raised to the box top.
HeightMap place(const HeightMap& hm, int x, int z, const Extents& e);

// Maximal empty cuboid above the skyline, clipped at ceiling Hc.
// In 2D (depth 1) it is a rectangle with z = 0, d = 1.
struct EmptyRect {
  int x = 0;
  int z = 0;
  int y = 0;
  int w = 0;
  int d = 0;
  int h = 0;
  long long volume() const { return static_cast<long long>(w) * d * h; }
  bool operator==(const EmptyRect&) const = default;
};

// All maximal empty spaces between the skyline and ceiling Hc, sorted by
// min-corner (x, z, y), then footprint (w, d); distinct maximal spaces can
// share a min-corner but never a corner and footprint both. Hc must be
// >= max height.
std::vector<EmptyRect> compute_ems(const HeightMap& hm, int ceiling);

enum class HeightMode { kRaw, kZeroMin, kGradient };

HeightMode height_mode_from_string(const std::string& s);
std::string to_string(HeightMode m);

// Flattened network view of the map. Raw: column heights. ZeroMin: heights
// minus the minimum. Gradient: first differences with zero in the first
// row/column; 3D emits the two axis-difference grids stacked, so its length
// is 2*W*D (W entries in 2D).
Eigen::VectorXd represent(const HeightMap& hm, HeightMode mode);

}  // namespace tap

#endif
