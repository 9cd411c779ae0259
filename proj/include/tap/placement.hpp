#ifndef TAP_PLACEMENT_HPP
#define TAP_PLACEMENT_HPP

#include <vector>

#include "tap/container.hpp"
#include "tap/reward.hpp"

namespace tap {

// Target-side packing state across all containers of one instance.
struct PackState {
  int width = 5;
  int depth = 1;
  std::vector<HeightMap> maps;
  std::vector<std::vector<ResolvedBox>> placed;

  PackState() = default;
  PackState(int w, int d, int containers)
      : width(w), depth(d),
        maps(static_cast<std::size_t>(containers), HeightMap(w, d)),
        placed(static_cast<std::size_t>(containers)) {}
};

struct Candidate {
  int x = 0;
  int z = 0;
  int y = 0;
  bool operator==(const Candidate&) const = default;
};

enum class Strategy { kLb, kMul, kMacs };

Strategy strategy_from_string(const std::string& s);
std::string to_string(Strategy s);

// Bottom-left corners of each empty space the footprint fits in; resting
// heights come from drop on the real map, which may undercut a space whose
// bottom is propped up by a column outside the footprint. Deduplicated,
// sorted by (x, z). The ceiling must clear the skyline.
std::vector<Candidate> candidates_lb(const HeightMap& hm, const Extents& e,
                                     int ceiling);

// All bottom corners of each empty space (left/right in 2D, four in 3D).
std::vector<Candidate> candidates_mul(const HeightMap& hm, const Extents& e,
                                      int ceiling);

// Volume of the largest single empty space under the ceiling.
long long accessible_convex_space(const HeightMap& hm, int ceiling);

// Largest plus the sum over all empty spaces (the tie measure).
struct AcsScore {
  long long largest = 0;
  long long total = 0;
};
AcsScore acs_score(const HeightMap& hm, int ceiling);

// Best placement for the oriented box in its container under the strategy.
// LB and MUL score candidates by the hypothetical aggregate reward; MACS
// scores the MUL corner set by the accessible convex space left afterwards,
// under a ceiling fixed before placement (max height + the largest oriented
// extent still unpacked) so candidates compete in the same window. Ties pick
// lower y, then x, then z. Throws FeasibilityError when nothing fits.
Candidate select_placement(Strategy strategy, const PackState& state,
                           int container_idx, int box_id, const Extents& e,
                           int max_remaining_extent);

// State after committing a placement.
PackState apply_placement(const PackState& state, int container_idx,
                          int box_id, int orientation, const Extents& e,
                          const Candidate& c);

}  // namespace tap

#endif
