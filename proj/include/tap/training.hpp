#ifndef TAP_TRAINING_HPP
#define TAP_TRAINING_HPP

#include <string>
#include <utility>
#include <vector>

#include "tap/datasets.hpp"
#include "tap/policy.hpp"

namespace tap {

struct TrainConfig {
  PolicyConfig policy;
  Strategy strategy = Strategy::kLb;
  std::string train_dataset;
  std::string eval_dataset;
  int epochs = 5;
  int batch_size = 128;
  double lr = 1e-4;
  double grad_clip = 2.0;
  double entropy_coef = 0.0;
  std::string baseline = "critic";  // "critic" | "ema" | "greedy"
  double ema_beta = 0.9;
  std::uint64_t seed = 0;
  std::string out_dir;
  int train_limit = 0;  // instances per epoch; 0 = whole set
  int eval_limit = 0;   // instances per evaluation; 0 = whole set
};

Json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const Json& j);

struct EvalMetrics {
  double c = 0.0, p = 0.0, s = 0.0, r = 0.0;
  double seconds = 0.0;
  int count = 0;
};

struct EpochRow {
  int epoch = 0;
  double train_r = 0.0;
  EvalMetrics eval;
};

struct TrainResult {
  std::string best_checkpoint;
  std::string last_checkpoint;
  std::string curve_csv;
  double best_eval_r = 0.0;
  std::vector<EpochRow> curve;
};

// REINFORCE with a learned critic baseline (or an exponential moving average
// when cfg.baseline is "ema"). Sample-mode rollouts, one combined gradient
// step per batch with global-norm clipping, argmax evaluation per epoch.
// Writes best.json, last.json, and curve.csv under cfg.out_dir.
TrainResult train(const TrainConfig& cfg);

// Deterministic argmax evaluation of a policy over a dataset.
EvalMetrics evaluate_policy(const PolicyConfig& cfg, const PolicyParams& params,
                            const std::vector<DatasetItem>& items,
                            Strategy strategy, int limit = 0);

// Baseline evaluation ("greedy" or "random") over the same items.
EvalMetrics evaluate_baseline(const std::string& method,
                              const std::vector<DatasetItem>& items,
                              Strategy strategy, std::uint64_t seed,
                              int limit = 0);

// One CSV table, one row per labeled result. The time column is emitted only
// when timing is requested so seeded reruns stay byte-identical.
std::string metrics_csv(
    const std::vector<std::pair<std::string, EvalMetrics>>& rows, bool timing);

}  // namespace tap

#endif
