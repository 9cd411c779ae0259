#ifndef TAP_PRECEDENCE_HPP
#define TAP_PRECEDENCE_HPP

#include <Eigen/Dense>
#include <set>
#include <string>
#include <vector>

#include "tap/core.hpp"

namespace tap {

// Accessibility constraints of one box in the initial pile. A box id in a set
// means that box currently prevents the access; a box's own id models a
// container wall (left/right side flush with the boundary) and can never be
// removed.
struct BlockerSets {
  std::set<int> tb;   // boxes in the upward shadow
  std::set<int> lab;  // boxes (or wall) against the left side
  std::set<int> rab;  // boxes (or wall) against the right side
};

struct PrecedenceGraph {
  int dims_mode = 2;
  std::vector<int> box_ids;      // in instance order
  std::vector<Extents> dims;     // as-lying dims, same order
  std::vector<BlockerSets> blockers;
  std::set<int> packed;

  int index_of(int box_id) const;
  const BlockerSets& sets(int box_id) const;
  bool is_packed(int box_id) const { return packed.count(box_id) > 0; }
};

// Build the graph from the pile. Top blocking uses the full upward shadow;
// side blocking looks at the one-column slab against each x-face at or above
// the box's bottom. If one side of a box is completely free the other side's
// set is dropped: a single free side is enough for any rotation, so only the
// cheaper side constrains.
PrecedenceGraph extract_precedence(const ProblemInstance& inst);

// Movable states right now: identity-preserving orientations need an empty
// live top set; tipping orientations additionally need one empty live side
// set. Sorted by (box_id, orientation).
std::vector<OrientedState> valid_states(const PrecedenceGraph& g);

// Valid orientations of a single unpacked box under the same rules.
std::vector<int> valid_orientations(const PrecedenceGraph& g, int box_id);

// Marks the box packed and erases its id from every other box's sets.
// Self-loops (walls) survive. Precondition: the box is unpacked and has at
// least one valid state.
PrecedenceGraph remove_box(const PrecedenceGraph& g, int box_id);

// Network view of the graph: one column per oriented state, rows are the
// tb/lab/rab bit blocks of size `capacity` each (bit j = box in slot j).
// Packed boxes contribute all-zero columns and are flagged. Slot j is the
// j-th box in instance order; slots past the box count are dummies.
struct DynamicEncoding {
  int capacity = 0;
  int states_per_box = 2;
  Eigen::MatrixXd bits;             // (3*capacity) x (states_per_box*capacity)
  std::vector<std::uint8_t> packed; // per state
  std::vector<std::uint8_t> dummy;  // per state
};

DynamicEncoding encode_dynamic(const PrecedenceGraph& g, int capacity);

// Edge list dump for debugging.
std::string to_dot(const PrecedenceGraph& g);

}  // namespace tap

#endif
