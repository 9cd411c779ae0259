#include "tap/extensions.hpp"

#include <algorithm>

namespace tap {

BoxPriority priority(const ProblemInstance& inst, const PrecedenceGraph& g,
                     int box_id) {
  (void)inst;
  if (g.is_packed(box_id)) throw ContractError("priority of a packed box");
  const BlockerSets& bs = g.sets(box_id);
  BoxPriority out;
  for (int b : bs.tb)
    if (!g.is_packed(b)) ++out.removal_count;
  auto live_empty = [&](const std::set<int>& ids) {
    for (int b : ids)
      if (!g.is_packed(b)) return false;
    return true;
  };
  out.side_accessible = live_empty(bs.lab) || live_empty(bs.rab);
  return out;
}

namespace {

bool priority_before(const BoxPriority& a, int id_a, const BoxPriority& b,
                     int id_b) {
  if (a.removal_count != b.removal_count)
    return a.removal_count < b.removal_count;
  if (a.side_accessible != b.side_accessible) return a.side_accessible;
  return id_a < id_b;
}

// Best unpacked box outside the window, or -1.
int best_outsider(const ProblemInstance& inst, const PrecedenceGraph& g,
                  const std::vector<int>& window) {
  int best = -1;
  BoxPriority best_p;
  for (int id : g.box_ids) {
    if (g.is_packed(id)) continue;
    if (std::find(window.begin(), window.end(), id) != window.end()) continue;
    const BoxPriority p = priority(inst, g, id);
    if (best < 0 || priority_before(p, id, best_p, best)) {
      best = id;
      best_p = p;
    }
  }
  return best;
}

Eigen::MatrixXf window_features(const PolicyConfig& cfg,
                                const ProblemInstance& inst,
                                const std::vector<int>& window) {
  Eigen::MatrixXf f =
      Eigen::MatrixXf::Zero(cfg.static_features(), cfg.slots());
  const int spb = cfg.states_per_box();
  const float w = static_cast<float>(cfg.target_width);
  for (std::size_t i = 0; i < window.size(); ++i) {
    const BoxSpec& b = inst.box(window[i]);
    for (int o = 0; o < spb; ++o) {
      const int col = static_cast<int>(i) * spb + o;
      const Extents e = oriented(b.dims, o, cfg.dims_mode);
      f(0, col) = static_cast<float>(e.w) / w;
      f(1, col) = static_cast<float>(e.h) / w;
      if (cfg.dims_mode == 3) f(2, col) = static_cast<float>(e.d) / w;
      if (cfg.containers > 1) f(cfg.dims_mode + b.target_idx, col) = 1.0f;
    }
  }
  return f;
}

Eigen::MatrixXd window_bits(const PolicyConfig& cfg,
                            const PrecedenceGraph& g,
                            const std::vector<int>& window) {
  Eigen::MatrixXd bits =
      Eigen::MatrixXd::Zero(3 * cfg.capacity, cfg.slots());
  const int spb = cfg.states_per_box();
  auto window_index = [&](int id) {
    const auto it = std::find(window.begin(), window.end(), id);
    return it == window.end() ? -1
                              : static_cast<int>(it - window.begin());
  };
  for (std::size_t i = 0; i < window.size(); ++i) {
    const BlockerSets& bs = g.sets(window[i]);
    auto fill = [&](const std::set<int>& ids, int row0) {
      for (int b : ids) {
        if (g.is_packed(b)) continue;
        const int wi = window_index(b);
        if (wi < 0) continue;  // outside the window: enforced via the mask
        for (int o = 0; o < spb; ++o)
          bits(row0 + wi, static_cast<int>(i) * spb + o) = 1.0;
      }
    };
    fill(bs.tb, 0);
    fill(bs.lab, cfg.capacity);
    fill(bs.rab, 2 * cfg.capacity);
  }
  return bits;
}

}  // namespace

Solution rolling_solve(const PolicyConfig& raw, const PolicyParams& params,
                       const ProblemInstance& inst, Strategy strategy) {
  const PolicyConfig cfg = raw.normalized();
  if (inst.dims_mode != cfg.dims_mode)
    throw ValidationError("instance dimensionality does not match the model");
  if (inst.container_count != cfg.containers)
    throw ValidationError("container count does not match the model");

  const int m = static_cast<int>(inst.boxes.size());
  if (m <= cfg.capacity) {
    PolicyNet<float> net(cfg, params, nullptr);
    return rollout(net, inst, strategy, RolloutMode::kArgmax, nullptr)
        .solution;
  }

  // The frozen-mask ablations are plain-rollout protocols; under a rolling
  // window the bits always track the live window, so only the all-zero
  // ablation survives here.
  PolicyConfig run_cfg = cfg;
  if (run_cfg.dynamic_mode == DynamicMode::kInit)
    run_cfg.dynamic_mode = DynamicMode::kDyn;
  PolicyNet<float> net(run_cfg, params, nullptr);

  PackEnv env(inst);
  const int spb = cfg.states_per_box();

  std::vector<int> window;
  while (static_cast<int>(window.size()) < cfg.capacity) {
    const int add = best_outsider(inst, env.g, window);
    if (add < 0) break;
    window.push_back(add);
  }
  std::sort(window.begin(), window.end());

  for (int packed = 0; packed < m; ++packed) {
    auto states = placeable_states(inst, env.g);
    if (states.empty())
      throw FeasibilityError("no movable box fits the target container");

    auto window_index = [&](int id) {
      const auto it = std::find(window.begin(), window.end(), id);
      return it == window.end() ? -1
                                : static_cast<int>(it - window.begin());
    };

    std::vector<std::uint8_t> point(static_cast<std::size_t>(cfg.slots()), 0);
    bool any = false;
    for (const auto& s : states) {
      const int wi = window_index(s.box_id);
      if (wi < 0) continue;
      point[static_cast<std::size_t>(wi * spb + s.orientation)] = 1;
      any = true;
    }
    if (!any) {
      // Every placeable box sits outside the window: swap the best placeable
      // box in for the worst window member so progress is guaranteed.
      std::sort(states.begin(), states.end(),
                [](const OrientedState& a, const OrientedState& b) {
                  return a.box_id < b.box_id;
                });
      window.back() = states.front().box_id;
      std::sort(window.begin(), window.end());
      --packed;
      continue;
    }

    std::vector<std::uint8_t> attend(static_cast<std::size_t>(cfg.slots()), 0);
    for (int s = 0; s < cfg.slots(); ++s)
      if (s / spb < static_cast<int>(window.size()))
        attend[static_cast<std::size_t>(s)] = 1;

    net.set_static(window_features(cfg, inst, window));
    std::vector<Eigen::VectorXd> heights;
    for (int c = 0; c < cfg.containers; ++c)
      heights.push_back(represent(
          env.state.maps[static_cast<std::size_t>(c)], cfg.height_mode));

    const auto so = net.step(window_bits(cfg, env.g, window), heights, attend,
                             point);

    std::vector<std::uint8_t> viable = point;
    int committed = -1;
    while (committed < 0) {
      bool left = false;
      for (auto b : viable) left = left || b != 0;
      if (!left)
        throw FeasibilityError("no window state admits a placement");
      const int slot = argmax_slot(so.probs.cast<double>(), viable);
      const int wi = slot / spb;
      const int o = slot % spb;
      const int id = window[static_cast<std::size_t>(wi)];
      const Extents dims =
          oriented(inst.box(id).dims, o, cfg.dims_mode);
      try {
        env.commit(OrientedState{id, o, dims}, strategy);
        committed = id;
      } catch (const FeasibilityError&) {
        viable[static_cast<std::size_t>(slot)] = 0;
      }
    }

    window.erase(std::find(window.begin(), window.end(), committed));
    const int add = best_outsider(inst, env.g, window);
    if (add >= 0) {
      window.push_back(add);
      std::sort(window.begin(), window.end());
    }
  }

  return env.finish();
}

Solution solve_multi(const PolicyConfig& cfg, const PolicyParams& params,
                     const ProblemInstance& inst, Strategy strategy) {
  if (inst.container_count < 2)
    throw ContractError("solve_multi wants at least two containers");
  for (const auto& b : inst.boxes)
    if (b.target_idx < 0 || b.target_idx >= inst.container_count)
      throw ValidationError("box without a valid target container: " +
                            std::to_string(b.id));
  return rolling_solve(cfg, params, inst, strategy);
}

}  // namespace tap
