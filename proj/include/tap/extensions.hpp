#ifndef TAP_EXTENSIONS_HPP
#define TAP_EXTENSIONS_HPP

#include "tap/policy.hpp"

namespace tap {

struct BoxPriority {
  int removal_count = 0;
  bool side_accessible = false;
};

// Accessibility of an unpacked box: how many live top blockers must leave
// first, and whether a side is already clear (so a tipped removal could take
// it out sooner). Orders the rolling window.
BoxPriority priority(const ProblemInstance& inst, const PrecedenceGraph& g,
                     int box_id);

// Policy solving for any instance size. When the box count exceeds the model
// capacity, a rolling window of the most accessible boxes is decoded instead:
// the window refills after every placement, window states blocked by boxes
// outside the window stay masked, and the emitted solution still replays on
// the full precedence graph. With m <= capacity this is exactly the plain
// argmax rollout.
Solution rolling_solve(const PolicyConfig& cfg, const PolicyParams& params,
                       const ProblemInstance& inst, Strategy strategy);

// Multi-container solving: the same rollout with one height embedding per
// container; every box lands in the container its spec assigns.
Solution solve_multi(const PolicyConfig& cfg, const PolicyParams& params,
                     const ProblemInstance& inst, Strategy strategy);

}  // namespace tap

#endif
