#ifndef TAP_CORE_HPP
#define TAP_CORE_HPP

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace tap {

// Error taxonomy. The CLI maps each to a distinct exit code.
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FeasibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Oriented extents of a box. Depth stays 1 in 2D mode so the same grid
// arithmetic covers both modes.
struct Extents {
  int w = 1;
  int h = 1;
  int d = 1;

  int max_extent() const { return w > h ? (w > d ? w : d) : (h > d ? h : d); }
  long long volume() const {
    return static_cast<long long>(w) * h * d;
  }
  bool operator==(const Extents&) const = default;
};

// Orientations are axis permutations of (w,h,d). In 2D there are two, in 3D
// six. The first two 3D entries keep h vertical (rotations about the vertical
// axis); a box moved in one of them only needs its top face free. The other
// four tip the box over and additionally need a free side.
int orientation_count(int dims_mode);
Extents oriented(const Extents& e, int orientation, int dims_mode);
int inverse_orientation(int orientation, int dims_mode);
bool orientation_needs_side(int orientation, int dims_mode);

// Index c with oriented(e, c) == oriented(oriented(e, inner), outer).
int compose_orientations(int outer, int inner, int dims_mode);

struct BoxSpec {
  int id = 0;
  Extents dims;      // as the box lies in the initial pile
  int target_idx = 0;
};

struct OrientedState {
  int box_id = 0;
  int orientation = 0;
  Extents dims;  // already oriented
  bool operator==(const OrientedState&) const = default;
};

// Min-corner grid placement. y is vertical; z is 0 in 2D mode.
struct PlacedBox {
  int box_id = 0;
  int orientation = 0;
  int x = 0;
  int y = 0;
  int z = 0;
  int container_idx = 0;
  bool operator==(const PlacedBox&) const = default;
};

struct ProblemInstance {
  int dims_mode = 2;  // 2 or 3
  int init_width = 7;
  int init_depth = 1;    // 1 in 2D
  int target_width = 5;
  int target_depth = 1;  // 1 in 2D
  int container_count = 1;
  std::vector<BoxSpec> boxes;
  std::vector<PlacedBox> initial_placements;

  const BoxSpec& box(int id) const;
};

// Extents of a placement after applying its orientation to the box's dims.
Extents placed_extents(const ProblemInstance& inst, const PlacedBox& pb);

struct ContainerTotals {
  long long a_packed = 0;
  long long a_rect = 0;
  long long a_proj = 0;
  int n_stable = 0;
  int n_packed = 0;
};

struct RewardBreakdown {
  double c = 0.0;
  double p = 0.0;
  double s = 0.0;
  double r = 0.0;
  long long a_packed = 0;
  long long a_rect = 0;
  long long a_proj = 0;
  int n_stable = 0;
  int n_packed = 0;
  bool vacuous = false;  // nothing packed; ratios defined as 1
  std::vector<ContainerTotals> per_container;
};

struct Solution {
  std::vector<PlacedBox> steps;
  RewardBreakdown reward;
};

// Half-open interval overlap [a0,a1) vs [b0,b1). Degenerate input is a
// contract violation, not a "no overlap" answer.
bool overlap_interval(int a0, int a1, int b0, int b1);

// Axis-aligned overlap of two placed boxes (all axes).
bool boxes_overlap(const PlacedBox& a, const Extents& ea, const PlacedBox& b,
                   const Extents& eb);

// Structural checks. Returns human-readable violations; empty means valid.
std::vector<std::string> validate_instance(const ProblemInstance& inst);

}  // namespace tap

#endif
