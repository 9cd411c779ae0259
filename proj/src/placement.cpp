#include "tap/placement.hpp"

#include <algorithm>

namespace tap {

Strategy strategy_from_string(const std::string& s) {
  if (s == "lb") return Strategy::kLb;
  if (s == "mul") return Strategy::kMul;
  if (s == "macs") return Strategy::kMacs;
  throw ValidationError("unknown placement strategy: " + s);
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kLb: return "lb";
    case Strategy::kMul: return "mul";
    case Strategy::kMacs: return "macs";
  }
  throw ContractError("bad strategy");
}

namespace {

std::vector<Candidate> finalize(std::vector<Candidate> cands,
                                const HeightMap& hm, const Extents& e) {
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) {
              return std::tie(a.x, a.z) < std::tie(b.x, b.z);
            });
  cands.erase(std::unique(cands.begin(), cands.end(),
                          [](const Candidate& a, const Candidate& b) {
                            return a.x == b.x && a.z == b.z;
                          }),
              cands.end());
  for (auto& c : cands) c.y = drop(hm, c.x, c.z, e);
  return cands;
}

}  // namespace

std::vector<Candidate> candidates_lb(const HeightMap& hm, const Extents& e,
                                     int ceiling) {
  std::vector<Candidate> out;
  for (const auto& r : compute_ems(hm, ceiling))
    if (e.w <= r.w && e.d <= r.d) out.push_back({r.x, r.z, 0});
  return finalize(std::move(out), hm, e);
}

std::vector<Candidate> candidates_mul(const HeightMap& hm, const Extents& e,
                                      int ceiling) {
  std::vector<Candidate> out;
  for (const auto& r : compute_ems(hm, ceiling)) {
    if (e.w > r.w || e.d > r.d) continue;
    for (int x : {r.x, r.x + r.w - e.w})
      for (int z : {r.z, r.z + r.d - e.d}) out.push_back({x, z, 0});
  }
  return finalize(std::move(out), hm, e);
}

long long accessible_convex_space(const HeightMap& hm, int ceiling) {
  return acs_score(hm, ceiling).largest;
}

AcsScore acs_score(const HeightMap& hm, int ceiling) {
  AcsScore s;
  for (const auto& r : compute_ems(hm, ceiling)) {
    s.largest = std::max(s.largest, r.volume());
    s.total += r.volume();
  }
  return s;
}

Candidate select_placement(Strategy strategy, const PackState& state,
                           int container_idx, int box_id, const Extents& e,
                           int max_remaining_extent) {
  if (container_idx < 0 ||
      container_idx >= static_cast<int>(state.maps.size()))
    throw ContractError("container index out of range");
  const HeightMap& hm = state.maps[static_cast<std::size_t>(container_idx)];
  const int slack = std::max(max_remaining_extent, e.max_extent());
  const int ceiling = hm.max_height() + slack;

  const auto cands = strategy == Strategy::kLb
                         ? candidates_lb(hm, e, ceiling)
                         : candidates_mul(hm, e, ceiling);
  if (cands.empty())
    throw FeasibilityError("no feasible placement for box " +
                           std::to_string(box_id));

  struct Scored {
    Candidate c;
    AcsScore acs;
    double r;
  };
  std::vector<Scored> scored;
  scored.reserve(cands.size());
  for (const auto& c : cands) {
    if (strategy == Strategy::kMacs) {
      const HeightMap after = place(hm, c.x, c.z, e);
      scored.push_back({c, acs_score(after, ceiling), 0.0});
    } else {
      auto placed = state.placed;
      placed[static_cast<std::size_t>(container_idx)].push_back(
          ResolvedBox{PlacedBox{box_id, 0, c.x, c.y, c.z, container_idx}, e});
      scored.push_back(
          {c, AcsScore{}, reward(placed, state.width, state.depth).r});
    }
  }
  std::sort(scored.begin(), scored.end(), [&](const Scored& a, const Scored& b) {
    if (strategy == Strategy::kMacs) {
      if (a.acs.largest != b.acs.largest) return a.acs.largest > b.acs.largest;
      if (a.acs.total != b.acs.total) return a.acs.total > b.acs.total;
    } else if (a.r != b.r) {
      return a.r > b.r;
    }
    return std::tie(a.c.y, a.c.x, a.c.z) < std::tie(b.c.y, b.c.x, b.c.z);
  });
  return scored.front().c;
}

PackState apply_placement(const PackState& state, int container_idx,
                          int box_id, int orientation, const Extents& e,
                          const Candidate& c) {
  PackState out = state;
  auto& hm = out.maps[static_cast<std::size_t>(container_idx)];
  const int y = drop(hm, c.x, c.z, e);
  if (y != c.y) throw ContractError("candidate height out of date");
  hm = place(hm, c.x, c.z, e);
  out.placed[static_cast<std::size_t>(container_idx)].push_back(ResolvedBox{
      PlacedBox{box_id, orientation, c.x, y, c.z, container_idx}, e});
  return out;
}

}  // namespace tap
