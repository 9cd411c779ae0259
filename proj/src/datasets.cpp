#include "tap/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "tap/container.hpp"
#include "tap/json_io.hpp"
#include "tap/precedence.hpp"
#include "tap/solvers.hpp"

namespace tap {

GenConfig GenConfig::normalized() const {
  GenConfig c = *this;
  if (c.init_depth == 0) c.init_depth = c.dims_mode == 2 ? 1 : c.init_width;
  if (c.target_depth == 0)
    c.target_depth = c.dims_mode == 2 ? 1 : c.target_width;
  return c;
}

double clamped_round_gauss_mean(double mean, double sd, int lo, int hi) {
  if (lo > hi || sd <= 0.0) throw ContractError("bad size distribution");
  auto cdf = [&](double x) {
    return 0.5 * (1.0 + std::erf((x - mean) / (sd * std::sqrt(2.0))));
  };
  double e = 0.0;
  for (int k = lo; k <= hi; ++k) {
    const double a = k == lo ? 0.0 : cdf(k - 0.5);
    const double b = k == hi ? 1.0 : cdf(k + 0.5);
    e += k * (b - a);
  }
  return e;
}

int sample_dim(Rng& rng, const GenConfig& cfg) {
  const double x = rng.normal(cfg.size_mean, cfg.size_sd);
  const int k = static_cast<int>(std::llround(x));
  return std::clamp(k, cfg.size_min, cfg.size_max);
}

namespace {

// Side accessibility of a box footprint in the pile at insertion time: one
// adjacent x-face slab must exist (not a wall) and be clear from the box's
// bottom upward.
bool side_accessible(const HeightMap& hm, int x, int z, int y,
                     const Extents& e) {
  auto column_clear = [&](int cx) {
    for (int cz = z; cz < z + e.d; ++cz)
      if (hm.h(cx, cz) > y) return false;
    return true;
  };
  if (x >= 1 && column_clear(x - 1)) return true;
  if (x + e.w <= hm.width() - 1 && column_clear(x + e.w)) return true;
  return false;
}

ProblemInstance instance_shell(const GenConfig& cfg) {
  ProblemInstance inst;
  inst.dims_mode = cfg.dims_mode;
  inst.init_width = cfg.init_width;
  inst.init_depth = cfg.init_depth;
  inst.target_width = cfg.target_width;
  inst.target_depth = cfg.target_depth;
  inst.container_count = cfg.containers;
  return inst;
}

ProblemInstance gen_rand_instance(const GenConfig& cfg, Rng& rng) {
  ProblemInstance inst = instance_shell(cfg);
  std::vector<Extents> sampled;
  for (int i = 0; i < cfg.n; ++i) {
    Extents e;
    e.w = sample_dim(rng, cfg);
    e.h = sample_dim(rng, cfg);
    e.d = cfg.dims_mode == 3 ? sample_dim(rng, cfg) : 1;
    sampled.push_back(e);
  }

  if (cfg.spread) {
    // Flat layout with one-column gaps everywhere: the precedence graph has
    // no edges, which reduces the task to classical packing.
    int need = 1;
    for (const auto& e : sampled) need += e.w + 1;
    inst.init_width = std::max(cfg.init_width, need);
    inst.init_depth = std::max(cfg.init_depth, cfg.dims_mode == 3 ? cfg.size_max + 2 : 1);
    int x = 1;
    for (int i = 0; i < cfg.n; ++i) {
      inst.boxes.push_back(BoxSpec{i, sampled[static_cast<std::size_t>(i)],
                                   cfg.containers > 1
                                       ? rng.uniform_int(0, cfg.containers - 1)
                                       : 0});
      inst.initial_placements.push_back(PlacedBox{i, 0, x, 0, 0, 0});
      x += sampled[static_cast<std::size_t>(i)].w + 1;
    }
    return inst;
  }

  for (int i = 0; i < cfg.n; ++i) {
    const int o = rng.uniform_int(0, orientation_count(cfg.dims_mode) - 1);
    Extents lying = oriented(sampled[static_cast<std::size_t>(i)], o, cfg.dims_mode);
    // An orientation too wide for the pile is re-rolled as identity.
    if (lying.w > cfg.init_width || lying.d > cfg.init_depth)
      lying = sampled[static_cast<std::size_t>(i)];
    inst.boxes.push_back(
        BoxSpec{i, lying,
                cfg.containers > 1 ? rng.uniform_int(0, cfg.containers - 1) : 0});
  }

  std::vector<int> order(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(order);

  HeightMap hm(cfg.init_width, cfg.init_depth);
  inst.initial_placements.resize(static_cast<std::size_t>(cfg.n));
  for (int id : order) {
    const Extents& e = inst.boxes[static_cast<std::size_t>(id)].dims;
    const int x = rng.uniform_int(0, cfg.init_width - e.w);
    const int z = rng.uniform_int(0, cfg.init_depth - e.d);
    const int y = drop(hm, x, z, e);
    hm = place(hm, x, z, e);
    inst.initial_placements[static_cast<std::size_t>(id)] =
        PlacedBox{id, 0, x, y, z, 0};
  }
  return inst;
}

}  // namespace

std::vector<Block> guillotine_split(int width, int depth, int height, int n,
                                    Rng& rng) {
  if (n < 1 || static_cast<long long>(width) * depth * height < n)
    throw ContractError("block cannot be split into n boxes");
  std::vector<Block> blocks{Block{0, 0, 0, Extents{width, height, depth}}};
  while (static_cast<int>(blocks.size()) < n) {
    std::vector<double> weights;
    for (const auto& b : blocks)
      weights.push_back(b.e.max_extent() >= 2
                            ? static_cast<double>(b.e.volume())
                            : 0.0);
    bool splittable = false;
    for (double w : weights) splittable = splittable || w > 0.0;
    if (!splittable)
      throw FeasibilityError("guillotine ran out of splittable blocks");
    const int bi = rng.weighted(weights);
    Block b = blocks[static_cast<std::size_t>(bi)];

    // Axis weights: the extent being cut, zero when too short to cut.
    const std::array<int, 3> ext{b.e.w, b.e.h, b.e.d};
    std::vector<double> aw(3);
    for (int a = 0; a < 3; ++a)
      aw[static_cast<std::size_t>(a)] =
          ext[static_cast<std::size_t>(a)] >= 2
              ? static_cast<double>(ext[static_cast<std::size_t>(a)])
              : 0.0;
    const int axis = rng.weighted(aw);
    const int e = ext[static_cast<std::size_t>(axis)];

    std::vector<double> cw;
    for (int c = 1; c < e; ++c)
      cw.push_back(std::abs(c - e / 2.0));
    const int cut = 1 + rng.weighted(cw);

    Block lo = b, hi = b;
    switch (axis) {
      case 0:
        lo.e.w = cut;
        hi.e.w = e - cut;
        hi.x += cut;
        break;
      case 1:
        lo.e.h = cut;
        hi.e.h = e - cut;
        hi.y += cut;
        break;
      default:
        lo.e.d = cut;
        hi.e.d = e - cut;
        hi.z += cut;
        break;
    }
    blocks[static_cast<std::size_t>(bi)] = lo;
    blocks.push_back(hi);
  }
  return blocks;
}

namespace {

DatasetItem gen_ppsg_item(const GenConfig& cfg, Rng& rng) {
  const double e_dim =
      clamped_round_gauss_mean(cfg.size_mean, cfg.size_sd, cfg.size_min,
                               cfg.size_max);
  const double e_vol = cfg.dims_mode == 2 ? e_dim * e_dim : e_dim * e_dim * e_dim;
  const long long floor_area =
      static_cast<long long>(cfg.target_width) * cfg.target_depth;
  const int h_base = static_cast<int>(
      std::llround(cfg.n * e_vol / static_cast<double>(floor_area)));

  for (int attempt = 0; attempt < 64; ++attempt) {
    const int jitter = rng.uniform_int(-1, 1);
    int height = h_base + jitter;
    const int h_min = static_cast<int>((cfg.n + floor_area - 1) / floor_area);
    height = std::max(height, h_min);

    std::vector<Block> blocks;
    try {
      blocks = guillotine_split(cfg.target_width, cfg.target_depth, height,
                                cfg.n, rng);
    } catch (const FeasibilityError&) {
      continue;
    }

    ProblemInstance inst = instance_shell(cfg);
    for (int i = 0; i < cfg.n; ++i)
      inst.boxes.push_back(BoxSpec{i, blocks[static_cast<std::size_t>(i)].e, 0});

    // Extraction: repeatedly take a uniformly random box whose upward shadow
    // in the remaining perfect packing is clear.
    std::vector<int> remaining(static_cast<std::size_t>(cfg.n));
    for (int i = 0; i < cfg.n; ++i) remaining[static_cast<std::size_t>(i)] = i;
    std::vector<int> extraction;
    while (!remaining.empty()) {
      std::vector<int> free;
      for (int i : remaining) {
        const Block& o = blocks[static_cast<std::size_t>(i)];
        bool blocked = false;
        for (int j : remaining) {
          if (j == i) continue;
          const Block& r = blocks[static_cast<std::size_t>(j)];
          if (r.y >= o.y + o.e.h &&
              overlap_interval(r.x, r.x + r.e.w, o.x, o.x + o.e.w) &&
              overlap_interval(r.z, r.z + r.e.d, o.z, o.z + o.e.d))
            blocked = true;
        }
        if (!blocked) free.push_back(i);
      }
      const int pick = free[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(free.size()) - 1))];
      extraction.push_back(pick);
      remaining.erase(std::find(remaining.begin(), remaining.end(), pick));
    }

    // Pile up in extraction order. A box inserted under a tipping replay
    // orientation needs one side slab clear right now; boxes inserted later
    // are replayed earlier, so clear-now means clear-at-replay.
    HeightMap hm(cfg.init_width, cfg.init_depth);
    inst.initial_placements.resize(static_cast<std::size_t>(cfg.n));
    std::vector<PlacedBox> witness(static_cast<std::size_t>(cfg.n));
    bool ok = true;
    for (int id : extraction) {
      const Extents cpps = inst.boxes[static_cast<std::size_t>(id)].dims;
      bool inserted = false;
      for (int trial = 0; trial < 50 && !inserted; ++trial) {
        const int o =
            rng.uniform_int(0, orientation_count(cfg.dims_mode) - 1);
        const Extents lying = oriented(cpps, o, cfg.dims_mode);
        if (lying.w > cfg.init_width || lying.d > cfg.init_depth) continue;
        int replay = -1;
        for (int r = 0; r < orientation_count(cfg.dims_mode); ++r) {
          if (oriented(lying, r, cfg.dims_mode) == cpps) {
            replay = r;
            break;
          }
        }
        const int x = rng.uniform_int(0, cfg.init_width - lying.w);
        const int z = rng.uniform_int(0, cfg.init_depth - lying.d);
        const int y = drop(hm, x, z, lying);
        if (orientation_needs_side(replay, cfg.dims_mode) &&
            !side_accessible(hm, x, z, y, lying))
          continue;
        hm = place(hm, x, z, lying);
        inst.boxes[static_cast<std::size_t>(id)].dims = lying;
        inst.initial_placements[static_cast<std::size_t>(id)] =
            PlacedBox{id, 0, x, y, z, 0};
        const Block& blk = blocks[static_cast<std::size_t>(id)];
        witness[static_cast<std::size_t>(id)] =
            PlacedBox{id, replay, blk.x, blk.y, blk.z, 0};
        inserted = true;
      }
      if (!inserted) {
        // Unrotated fallback: the box goes in exactly as cut.
        if (cpps.w > cfg.init_width || cpps.d > cfg.init_depth) {
          ok = false;
          break;
        }
        const int x = rng.uniform_int(0, cfg.init_width - cpps.w);
        const int z = rng.uniform_int(0, cfg.init_depth - cpps.d);
        const int y = drop(hm, x, z, cpps);
        hm = place(hm, x, z, cpps);
        inst.initial_placements[static_cast<std::size_t>(id)] =
            PlacedBox{id, 0, x, y, z, 0};
        const Block& blk = blocks[static_cast<std::size_t>(id)];
        witness[static_cast<std::size_t>(id)] =
            PlacedBox{id, 0, blk.x, blk.y, blk.z, 0};
      }
    }
    if (!ok) continue;

    // Witness steps run in reverse extraction order.
    DatasetItem item;
    item.instance = std::move(inst);
    for (auto it = extraction.rbegin(); it != extraction.rend(); ++it)
      item.witness.push_back(witness[static_cast<std::size_t>(*it)]);

    // Reversibility gate: the witness must replay to a perfect fill.
    try {
      const RewardBreakdown r =
          replay_solution(item.instance, item.witness);
      if (r.r == 1.0 && r.c == 1.0 && r.p == 1.0 && r.s == 1.0) return item;
    } catch (const ValidationError&) {
    }
  }
  throw FeasibilityError("ppsg generation did not converge");
}

}  // namespace

DatasetItem gen_instance(const GenConfig& raw_cfg, int index) {
  const GenConfig cfg = raw_cfg.normalized();
  if (cfg.n < 1 || cfg.count < 0 || cfg.init_width < 1 ||
      cfg.target_width < 1 || cfg.containers < 1)
    throw ValidationError("bad generator config");
  if (cfg.size_min < 1 || cfg.size_max < cfg.size_min)
    throw ValidationError("bad size range");
  Rng rng = derived_rng(cfg.seed, static_cast<std::uint64_t>(index));
  if (cfg.mode == "rand") {
    if (cfg.size_max > cfg.init_width ||
        (cfg.dims_mode == 3 && cfg.size_max > cfg.init_depth))
      throw ValidationError("boxes may exceed the pile footprint");
    DatasetItem item;
    item.instance = gen_rand_instance(cfg, rng);
    return item;
  }
  if (cfg.mode == "ppsg") {
    if (cfg.containers != 1)
      throw ValidationError("ppsg generates single-container instances");
    if (cfg.spread) throw ValidationError("ppsg has no spread layout");
    if (cfg.init_width < cfg.target_width ||
        cfg.init_depth < cfg.target_depth)
      throw ValidationError("ppsg pile must cover the target footprint");
    return gen_ppsg_item(cfg, rng);
  }
  throw ValidationError("unknown generator mode: " + cfg.mode);
}

std::string item_filename(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d.json", index);
  return buf;
}

namespace {

Json config_to_json(const GenConfig& cfg) {
  return Json{{"mode", cfg.mode},
              {"dims_mode", cfg.dims_mode},
              {"n", cfg.n},
              {"count", cfg.count},
              {"seed", cfg.seed},
              {"init_width", cfg.init_width},
              {"init_depth", cfg.init_depth},
              {"target_width", cfg.target_width},
              {"target_depth", cfg.target_depth},
              {"containers", cfg.containers},
              {"size_mean", cfg.size_mean},
              {"size_sd", cfg.size_sd},
              {"size_min", cfg.size_min},
              {"size_max", cfg.size_max},
              {"spread", cfg.spread}};
}

GenConfig config_from_json(const Json& j) {
  GenConfig cfg;
  cfg.mode = j.at("mode").get<std::string>();
  cfg.dims_mode = j.at("dims_mode").get<int>();
  cfg.n = j.at("n").get<int>();
  cfg.count = j.at("count").get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.init_width = j.at("init_width").get<int>();
  cfg.init_depth = j.at("init_depth").get<int>();
  cfg.target_width = j.at("target_width").get<int>();
  cfg.target_depth = j.at("target_depth").get<int>();
  cfg.containers = j.at("containers").get<int>();
  cfg.size_mean = j.at("size_mean").get<double>();
  cfg.size_sd = j.at("size_sd").get<double>();
  cfg.size_min = j.at("size_min").get<int>();
  cfg.size_max = j.at("size_max").get<int>();
  cfg.spread = j.at("spread").get<bool>();
  return cfg;
}

}  // namespace

DatasetManifest write_items(const GenConfig& raw_cfg,
                            const std::vector<DatasetItem>& items,
                            const std::string& dir) {
  GenConfig cfg = raw_cfg.normalized();
  cfg.count = static_cast<int>(items.size());
  std::uint64_t checksum = 0xcbf29ce484222325ULL;
  for (int i = 0; i < cfg.count; ++i) {
    const DatasetItem& item = items[static_cast<std::size_t>(i)];
    Json j = to_json(item.instance);
    if (!item.witness.empty()) {
      Json steps = Json::array();
      for (const auto& pb : item.witness) steps.push_back(to_json(pb));
      j["witness"] = Json{{"steps", steps}};
    }
    const std::string text = dump_canonical(j);
    checksum = fnv1a64(text, checksum);
    write_file_atomic(dir + "/" + item_filename(i), text);
  }
  DatasetManifest m;
  m.config = cfg;
  m.checksum = hex64(checksum);
  Json mj{{"format", "tap-dataset/1"},
          {"config", config_to_json(cfg)},
          {"checksum", m.checksum}};
  save_json(dir + "/manifest.json", mj);
  return m;
}

DatasetManifest write_dataset(const GenConfig& raw_cfg, const std::string& dir) {
  const GenConfig cfg = raw_cfg.normalized();
  std::vector<DatasetItem> items;
  items.reserve(static_cast<std::size_t>(cfg.count));
  for (int i = 0; i < cfg.count; ++i) items.push_back(gen_instance(cfg, i));
  return write_items(cfg, items, dir);
}

Dataset load_dataset(const std::string& dir) {
  const Json mj = load_json(dir + "/manifest.json");
  if (mj.value("format", "") != "tap-dataset/1")
    throw ValidationError("malformed manifest: " + dir);
  Dataset ds;
  ds.config = config_from_json(mj.at("config"));
  ds.checksum = mj.at("checksum").get<std::string>();
  std::uint64_t checksum = 0xcbf29ce484222325ULL;
  for (int i = 0; i < ds.config.count; ++i) {
    const std::string path = dir + "/" + item_filename(i);
    const std::string text = read_file(path);
    checksum = fnv1a64(text, checksum);
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError("malformed json: " + path);
    DatasetItem item;
    item.instance = instance_from_json(j);
    if (j.contains("witness"))
      for (const auto& pj : j["witness"].at("steps"))
        item.witness.push_back(placed_box_from_json(pj));
    ds.items.push_back(std::move(item));
  }
  if (hex64(checksum) != ds.checksum)
    throw ValidationError("dataset checksum mismatch: " + dir);
  return ds;
}

}  // namespace tap
