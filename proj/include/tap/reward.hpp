#ifndef TAP_REWARD_HPP
#define TAP_REWARD_HPP

#include <vector>

#include "tap/core.hpp"

namespace tap {

// A box with its oriented extents resolved, as tracked by packing state.
struct ResolvedBox {
  PlacedBox pb;
  Extents e;
};

// True when the box rests on the floor or its base center lies strictly
// inside the support region formed by the unit cells where boxes directly
// below touch its bottom face. 2D reduces to the strict interior of the
// closed support span. A box with y > 0 and no support at all is an invalid
// state, not an unstable one.
bool is_stable(const ResolvedBox& b, const std::vector<ResolvedBox>& placed);

// Per-container packing totals; width/depth describe the target container.
ContainerTotals container_totals(const std::vector<ResolvedBox>& placed,
                                 int width, int depth);

// Compactness + pyramidality + stability, averaged. Multi-container inputs
// aggregate the raw totals across containers before forming each ratio.
// Nothing packed at all gives the vacuous breakdown (all ratios 1, flagged).
RewardBreakdown reward(const std::vector<std::vector<ResolvedBox>>& containers,
                       int width, int depth);

// Single-container convenience.
RewardBreakdown reward(const std::vector<ResolvedBox>& placed, int width,
                       int depth);

double compactness(const RewardBreakdown& b);
double pyramidality(const RewardBreakdown& b);
double stability(const RewardBreakdown& b);

}  // namespace tap

#endif
