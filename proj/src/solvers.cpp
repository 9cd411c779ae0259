#include "tap/solvers.hpp"

#include <algorithm>
#include <map>

namespace tap {

namespace {

std::map<int, int> initial_orientations(const ProblemInstance& inst) {
  std::map<int, int> out;
  for (const auto& pb : inst.initial_placements) out[pb.box_id] = pb.orientation;
  return out;
}

}  // namespace

int max_remaining_extent(const ProblemInstance& inst,
                         const PrecedenceGraph& g) {
  int m = 1;
  for (std::size_t i = 0; i < g.box_ids.size(); ++i)
    if (!g.is_packed(g.box_ids[i])) m = std::max(m, g.dims[i].max_extent());
  (void)inst;
  return m;
}

std::vector<OrientedState> placeable_states(const ProblemInstance& inst,
                                            const PrecedenceGraph& g) {
  std::vector<OrientedState> out;
  for (const auto& s : valid_states(g))
    if (s.dims.w <= inst.target_width && s.dims.d <= inst.target_depth)
      out.push_back(s);
  return out;
}

PackEnv::PackEnv(const ProblemInstance& inst_)
    : inst(&inst_),
      g(extract_precedence(inst_)),
      state(inst_.target_width, inst_.target_depth, inst_.container_count),
      init_orient(initial_orientations(inst_)) {}

void PackEnv::commit(const OrientedState& s, Strategy strategy) {
  const int ci = inst->box(s.box_id).target_idx;
  const Candidate c = select_placement(strategy, state, ci, s.box_id, s.dims,
                                       max_remaining_extent(*inst, g));
  const int stored_orientation = compose_orientations(
      s.orientation, init_orient.at(s.box_id), inst->dims_mode);
  state = apply_placement(state, ci, s.box_id, stored_orientation, s.dims, c);
  steps.push_back(PlacedBox{s.box_id, stored_orientation, c.x, c.y, c.z, ci});
  g = remove_box(g, s.box_id);
}

Solution PackEnv::finish() const {
  Solution sol;
  sol.steps = steps;
  sol.reward = reward(state.placed, inst->target_width, inst->target_depth);
  return sol;
}

Solution solve_random(const ProblemInstance& inst, Strategy strategy,
                      Rng& rng) {
  PackEnv env(inst);
  for (std::size_t step = 0; step < inst.boxes.size(); ++step) {
    const auto vs = placeable_states(inst, env.g);
    if (vs.empty())
      throw FeasibilityError("no movable box fits the target container");
    const int pick = rng.uniform_int(0, static_cast<int>(vs.size()) - 1);
    env.commit(vs[static_cast<std::size_t>(pick)], strategy);
  }
  return env.finish();
}

Solution solve_greedy(const ProblemInstance& inst, Strategy strategy) {
  PackEnv env(inst);
  for (std::size_t step = 0; step < inst.boxes.size(); ++step) {
    const auto vs = placeable_states(inst, env.g);
    if (vs.empty())
      throw FeasibilityError("no movable box fits the target container");
    bool have = false;
    OrientedState best{};
    double best_r = 0.0;
    for (const auto& s : vs) {  // sorted by (box id, orientation)
      const int ci = env.inst->box(s.box_id).target_idx;
      const Candidate c =
          select_placement(strategy, env.state, ci, s.box_id, s.dims,
                           max_remaining_extent(*env.inst, env.g));
      auto placed = env.state.placed;
      placed[static_cast<std::size_t>(ci)].push_back(ResolvedBox{
          PlacedBox{s.box_id, 0, c.x, c.y, c.z, ci}, s.dims});
      const double r =
          reward(placed, env.inst->target_width, env.inst->target_depth).r;
      if (!have || r > best_r) {
        have = true;
        best = s;
        best_r = r;
      }
    }
    env.commit(best, strategy);
  }
  return env.finish();
}

namespace {

void exhaust(PackEnv& env, Strategy strategy, Solution& best, bool& have) {
  if (env.g.packed.size() == env.inst->boxes.size()) {
    Solution sol;
    sol.steps = env.steps;
    sol.reward =
        reward(env.state.placed, env.inst->target_width, env.inst->target_depth);
    if (!have || sol.reward.r > best.reward.r) {
      best = std::move(sol);
      have = true;
    }
    return;
  }
  const auto vs = placeable_states(*env.inst, env.g);
  for (const auto& s : vs) {
    PackEnv next = env;
    next.commit(s, strategy);
    exhaust(next, strategy, best, have);
  }
}

}  // namespace

Solution solve_exhaustive(const ProblemInstance& inst, Strategy strategy,
                          int max_boxes) {
  if (static_cast<int>(inst.boxes.size()) > max_boxes)
    throw CapacityError("exhaustive solver capped at " +
                        std::to_string(max_boxes) + " boxes");
  PackEnv env(inst);
  Solution best;
  bool have = false;
  exhaust(env, strategy, best, have);
  if (!have) throw FeasibilityError("no complete packing found");
  return best;
}

std::vector<std::string> validate_solution(
    const ProblemInstance& inst, const std::vector<PlacedBox>& steps) {
  std::vector<std::string> out;
  PrecedenceGraph g = extract_precedence(inst);
  PackState state(inst.target_width, inst.target_depth, inst.container_count);
  const auto init_orient = initial_orientations(inst);

  for (const auto& pb : steps) {
    bool known = false;
    for (const auto& b : inst.boxes) known = known || b.id == pb.box_id;
    if (!known) {
      out.push_back("unknown box: " + std::to_string(pb.box_id));
      return out;
    }
    if (g.is_packed(pb.box_id)) {
      out.push_back("box packed twice: " + std::to_string(pb.box_id));
      return out;
    }
    if (pb.orientation < 0 ||
        pb.orientation >= orientation_count(inst.dims_mode)) {
      out.push_back("bad orientation: " + std::to_string(pb.box_id));
      return out;
    }
    if (pb.container_idx != inst.box(pb.box_id).target_idx) {
      out.push_back("wrong container: " + std::to_string(pb.box_id));
      return out;
    }
    const int rel = compose_orientations(
        pb.orientation,
        inverse_orientation(init_orient.at(pb.box_id), inst.dims_mode),
        inst.dims_mode);
    const auto valid = valid_orientations(g, pb.box_id);
    if (std::find(valid.begin(), valid.end(), rel) == valid.end()) {
      out.push_back("state not movable: " + std::to_string(pb.box_id));
      return out;
    }
    const Extents e = placed_extents(inst, pb);
    if (pb.x < 0 || pb.z < 0 || pb.x + e.w > inst.target_width ||
        pb.z + e.d > inst.target_depth) {
      out.push_back("placement out of bounds: " + std::to_string(pb.box_id));
      return out;
    }
    const auto& hm = state.maps[static_cast<std::size_t>(pb.container_idx)];
    if (drop(hm, pb.x, pb.z, e) != pb.y) {
      out.push_back("not drop-consistent: " + std::to_string(pb.box_id));
      return out;
    }
    state = apply_placement(state, pb.container_idx, pb.box_id, pb.orientation,
                            e, Candidate{pb.x, pb.z, pb.y});
    g = remove_box(g, pb.box_id);
  }
  for (const auto& b : inst.boxes)
    if (!g.is_packed(b.id))
      out.push_back("missing box: " + std::to_string(b.id));
  return out;
}

RewardBreakdown replay_solution(const ProblemInstance& inst,
                                const std::vector<PlacedBox>& steps) {
  const auto violations = validate_solution(inst, steps);
  if (!violations.empty())
    throw ValidationError("solution does not replay: " + violations.front());
  PackState state(inst.target_width, inst.target_depth, inst.container_count);
  for (const auto& pb : steps) {
    const Extents e = placed_extents(inst, pb);
    state = apply_placement(state, pb.container_idx, pb.box_id, pb.orientation,
                            e, Candidate{pb.x, pb.z, pb.y});
  }
  return reward(state.placed, inst.target_width, inst.target_depth);
}

}  // namespace tap
