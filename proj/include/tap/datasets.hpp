#ifndef TAP_DATASETS_HPP
#define TAP_DATASETS_HPP

#include <optional>
#include <string>
#include <vector>

#include "tap/core.hpp"
#include "tap/rng.hpp"

namespace tap {

struct GenConfig {
  std::string mode = "rand";  // "rand" | "ppsg"
  int dims_mode = 2;
  int n = 10;
  int count = 1;
  std::uint64_t seed = 0;
  int init_width = 7;
  int init_depth = 0;  // 0: 1 in 2D, init_width in 3D
  int target_width = 5;
  int target_depth = 0;  // 0: 1 in 2D, target_width in 3D
  int containers = 1;
  double size_mean = 3.0;
  double size_sd = 1.5;
  int size_min = 1;
  int size_max = 5;
  bool spread = false;  // lay the pile out flat with gaps: no precedence

  GenConfig normalized() const;
};

struct DatasetItem {
  ProblemInstance instance;
  std::vector<PlacedBox> witness;  // perfect-packing steps (ppsg only)
};

// Mean of round(N(mean,sd)) clamped to [lo, hi]; closed form via erf. This is
// the sizing model's analytic expectation, used both by the generator (pile
// height budget) and by tests as an independent check.
double clamped_round_gauss_mean(double mean, double sd, int lo, int hi);

int sample_dim(Rng& rng, const GenConfig& cfg);

// One instance under the master seed; index selects an independent stream so
// items can be generated in any order or in parallel.
DatasetItem gen_instance(const GenConfig& cfg, int index);

// Guillotine partition of a W x D x H block into n boxes (D = 1 in 2D).
// Block choice is proportional to volume, the cut axis to the extent being
// cut, and the cut position to its distance from the block center.
struct Block {
  int x = 0, y = 0, z = 0;
  Extents e;
};
std::vector<Block> guillotine_split(int width, int depth, int height, int n,
                                    Rng& rng);

struct DatasetManifest {
  GenConfig config;
  std::string checksum;
};

// Generates cfg.count instances into dir (manifest.json + 000000.json ...).
// Deterministic for a given config; the manifest checksum covers every
// instance file byte.
DatasetManifest write_dataset(const GenConfig& cfg, const std::string& dir);

// Writes an existing item list as a dataset directory. cfg is echoed into
// the manifest with its count replaced by items.size().
DatasetManifest write_items(const GenConfig& cfg,
                            const std::vector<DatasetItem>& items,
                            const std::string& dir);

struct Dataset {
  GenConfig config;
  std::string checksum;
  std::vector<DatasetItem> items;
};

Dataset load_dataset(const std::string& dir);

// Item filename inside a dataset directory ("000042.json").
std::string item_filename(int index);

}  // namespace tap

#endif
