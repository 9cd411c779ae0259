#include "tap/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "tap/solvers.hpp"

namespace tap {

Json to_json(const TrainConfig& cfg) {
  return Json{{"policy", to_json(cfg.policy)},
              {"strategy", to_string(cfg.strategy)},
              {"train_dataset", cfg.train_dataset},
              {"eval_dataset", cfg.eval_dataset},
              {"epochs", cfg.epochs},
              {"batch_size", cfg.batch_size},
              {"lr", cfg.lr},
              {"grad_clip", cfg.grad_clip},
              {"entropy_coef", cfg.entropy_coef},
              {"baseline", cfg.baseline},
              {"ema_beta", cfg.ema_beta},
              {"seed", cfg.seed},
              {"out_dir", cfg.out_dir},
              {"train_limit", cfg.train_limit},
              {"eval_limit", cfg.eval_limit}};
}

TrainConfig train_config_from_json(const Json& j) {
  TrainConfig cfg;
  cfg.policy = policy_config_from_json(j.at("policy"));
  cfg.strategy = strategy_from_string(j.value("strategy", "lb"));
  cfg.train_dataset = j.at("train_dataset").get<std::string>();
  cfg.eval_dataset = j.at("eval_dataset").get<std::string>();
  cfg.epochs = j.value("epochs", 5);
  cfg.batch_size = j.value("batch_size", 128);
  cfg.lr = j.value("lr", 1e-4);
  cfg.grad_clip = j.value("grad_clip", 2.0);
  cfg.entropy_coef = j.value("entropy_coef", 0.0);
  cfg.baseline = j.value("baseline", "critic");
  cfg.ema_beta = j.value("ema_beta", 0.9);
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.out_dir = j.at("out_dir").get<std::string>();
  cfg.train_limit = j.value("train_limit", 0);
  cfg.eval_limit = j.value("eval_limit", 0);
  return cfg;
}

namespace {

struct Adam {
  PolicyParams m, v;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int t = 0;

  void init(const PolicyConfig& cfg, double lr_) {
    m.allocate(cfg);
    v.allocate(cfg);
    lr = lr_;
  }

  void step(PolicyParams& p, const PolicyParams& g) {
    ++t;
    const float b1 = static_cast<float>(beta1);
    const float b2 = static_cast<float>(beta2);
    const float c1 = static_cast<float>(1.0 / (1.0 - std::pow(beta1, t)));
    const float c2 = static_cast<float>(1.0 / (1.0 - std::pow(beta2, t)));
    const float a = static_cast<float>(lr);
    const float e = static_cast<float>(eps);
    auto pf = p.fields();
    auto gf = g.fields();
    auto mf = m.fields();
    auto vf = v.fields();
    for (std::size_t i = 0; i < pf.size(); ++i) {
      auto& pm = *pf[i];
      const auto& gm = *gf[i];
      auto& mm = *mf[i];
      auto& vm = *vf[i];
      mm = b1 * mm + (1.0f - b1) * gm;
      vm = (b2 * vm.array() + (1.0f - b2) * gm.array().square()).matrix();
      pm.array() -=
          a * (mm.array() * c1) / ((vm.array() * c2).sqrt() + e);
    }
  }
};

double grad_norm(const PolicyParams& g) {
  double total = 0.0;
  g.for_each([&](const char*, const Eigen::MatrixXf& m) {
    total += static_cast<double>(m.cast<double>().squaredNorm());
  });
  return std::sqrt(total);
}

void scale_grads(PolicyParams& g, double s) {
  const float fs = static_cast<float>(s);
  g.for_each([&](const char*, Eigen::MatrixXf& m) { m *= fs; });
}

void zero_grads(PolicyParams& g) {
  g.for_each([&](const char*, Eigen::MatrixXf& m) { m.setZero(); });
}

void check_compat(const PolicyConfig& cfg, const std::vector<DatasetItem>& items,
                  const std::string& label) {
  for (const auto& item : items) {
    const ProblemInstance& inst = item.instance;
    if (inst.dims_mode != cfg.dims_mode)
      throw ValidationError(label + ": instance dimensionality mismatch");
    if (inst.container_count != cfg.containers)
      throw ValidationError(label + ": container count mismatch");
    if (static_cast<int>(inst.boxes.size()) > cfg.capacity)
      throw ValidationError(label + ": instance exceeds policy capacity");
  }
}

std::string format_row(double c, double p, double s, double r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f", c, p, s, r);
  return buf;
}

}  // namespace

EvalMetrics evaluate_policy(const PolicyConfig& raw, const PolicyParams& params,
                            const std::vector<DatasetItem>& items,
                            Strategy strategy, int limit) {
  const PolicyConfig cfg = raw.normalized();
  const int n = limit > 0
                    ? std::min<int>(limit, static_cast<int>(items.size()))
                    : static_cast<int>(items.size());
  EvalMetrics out;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < n; ++i) {
    PolicyNet<float> net(cfg, params, nullptr);
    const auto res = rollout(net, items[static_cast<std::size_t>(i)].instance,
                             strategy, RolloutMode::kArgmax, nullptr);
    out.c += res.solution.reward.c;
    out.p += res.solution.reward.p;
    out.s += res.solution.reward.s;
    out.r += res.solution.reward.r;
  }
  const auto t1 = std::chrono::steady_clock::now();
  out.seconds = std::chrono::duration<double>(t1 - t0).count();
  out.count = n;
  if (n > 0) {
    out.c /= n;
    out.p /= n;
    out.s /= n;
    out.r /= n;
  }
  return out;
}

EvalMetrics evaluate_baseline(const std::string& method,
                              const std::vector<DatasetItem>& items,
                              Strategy strategy, std::uint64_t seed,
                              int limit) {
  if (method != "greedy" && method != "random")
    throw ValidationError("unknown baseline method: " + method);
  const int n = limit > 0
                    ? std::min<int>(limit, static_cast<int>(items.size()))
                    : static_cast<int>(items.size());
  EvalMetrics out;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < n; ++i) {
    const ProblemInstance& inst = items[static_cast<std::size_t>(i)].instance;
    Solution sol;
    if (method == "greedy") {
      sol = solve_greedy(inst, strategy);
    } else {
      Rng rng = derived_rng(seed, static_cast<std::uint64_t>(i));
      sol = solve_random(inst, strategy, rng);
    }
    out.c += sol.reward.c;
    out.p += sol.reward.p;
    out.s += sol.reward.s;
    out.r += sol.reward.r;
  }
  const auto t1 = std::chrono::steady_clock::now();
  out.seconds = std::chrono::duration<double>(t1 - t0).count();
  out.count = n;
  if (n > 0) {
    out.c /= n;
    out.p /= n;
    out.s /= n;
    out.r /= n;
  }
  return out;
}

std::string metrics_csv(
    const std::vector<std::pair<std::string, EvalMetrics>>& rows,
    bool timing) {
  std::string out = timing ? "method,C,P,S,R,t\n" : "method,C,P,S,R\n";
  for (const auto& [label, m] : rows) {
    out += label + "," + format_row(m.c, m.p, m.s, m.r);
    if (timing) {
      char buf[32];
      std::snprintf(buf, sizeof buf, ",%.6f",
                    m.count > 0 ? m.seconds / m.count : 0.0);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

TrainResult train(const TrainConfig& raw) {
  TrainConfig cfg = raw;
  cfg.policy = cfg.policy.normalized();
  if (cfg.epochs < 1 || cfg.batch_size < 1 || cfg.lr <= 0.0 ||
      cfg.grad_clip <= 0.0)
    throw ContractError("bad training configuration");
  if (cfg.baseline != "critic" && cfg.baseline != "ema" &&
      cfg.baseline != "greedy")
    throw ContractError("unknown baseline: " + cfg.baseline);
  if (cfg.out_dir.empty()) throw ContractError("training needs an out_dir");

  const Dataset train_set = load_dataset(cfg.train_dataset);
  const Dataset eval_set = load_dataset(cfg.eval_dataset);
  check_compat(cfg.policy, train_set.items, "train dataset");
  check_compat(cfg.policy, eval_set.items, "eval dataset");
  if (train_set.items.empty()) throw ValidationError("empty train dataset");

  Rng init_rng = derived_rng(cfg.seed, 1);
  PolicyParams params = init_params(cfg.policy, init_rng);
  PolicyParams grads;
  grads.allocate(cfg.policy);
  Adam adam;
  adam.init(cfg.policy, cfg.lr);
  Rng sample_rng = derived_rng(cfg.seed, 2);

  double ema = 0.0;
  bool ema_ready = false;

  TrainResult result;
  result.best_checkpoint = cfg.out_dir + "/best.json";
  result.last_checkpoint = cfg.out_dir + "/last.json";
  result.curve_csv = cfg.out_dir + "/curve.csv";
  bool have_best = false;

  const int per_epoch =
      cfg.train_limit > 0
          ? std::min<int>(cfg.train_limit,
                          static_cast<int>(train_set.items.size()))
          : static_cast<int>(train_set.items.size());

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<int> order(train_set.items.size());
    for (std::size_t i = 0; i < order.size(); ++i)
      order[i] = static_cast<int>(i);
    Rng shuffle_rng = derived_rng(cfg.seed, 100 + static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(order);
    order.resize(static_cast<std::size_t>(per_epoch));

    double epoch_reward = 0.0;
    int done = 0;
    while (done < per_epoch) {
      const int bs = std::min(cfg.batch_size, per_epoch - done);
      zero_grads(grads);
      double batch_reward = 0.0;
      for (int k = 0; k < bs; ++k) {
        const int idx = order[static_cast<std::size_t>(done + k)];
        const ProblemInstance& inst =
            train_set.items[static_cast<std::size_t>(idx)].instance;
        PolicyNet<float> net(cfg.policy, params, &grads);
        const auto res = rollout(net, inst, cfg.strategy, RolloutMode::kSample,
                                 &sample_rng);
        const double r = res.solution.reward.r;
        batch_reward += r;

        auto& tape = net.tape();
        int sum_logp = -1;
        int sum_ent = -1;
        for (const auto& st : res.steps) {
          sum_logp = sum_logp < 0 ? st.logp : tape.add(sum_logp, st.logp);
          sum_ent = sum_ent < 0 ? st.entropy : tape.add(sum_ent, st.entropy);
        }
        double baseline_value;
        if (cfg.baseline == "critic") {
          baseline_value = res.critic;
        } else if (cfg.baseline == "greedy") {
          // self-critic: the same parameters decoded greedily, no gradient
          PolicyNet<float> ref(cfg.policy, params, nullptr);
          const auto ref_res =
              rollout(ref, inst, cfg.strategy, RolloutMode::kArgmax, nullptr);
          baseline_value = ref_res.solution.reward.r;
        } else {
          baseline_value = ema_ready ? ema : 0.0;
        }
        const double adv = r - baseline_value;

        int loss = tape.scale(sum_logp, static_cast<float>(-adv));
        if (cfg.entropy_coef != 0.0)
          loss = tape.add(
              loss, tape.scale(sum_ent, static_cast<float>(-cfg.entropy_coef)));
        if (cfg.baseline == "critic") {
          const int diff = tape.sub(res.critic_node,
                                    tape.scalar(static_cast<float>(r)));
          loss = tape.add(loss, tape.hadamard(diff, diff));
        }

        const float lv = tape.value(loss)(0, 0);
        if (!std::isfinite(lv)) {
          Json diag{{"epoch", epoch},
                    {"batch_start", done},
                    {"instance_index", idx},
                    {"reward", r},
                    {"critic", res.critic},
                    {"loss", static_cast<double>(lv)}};
          save_json(cfg.out_dir + "/diagnostic.json", diag);
          throw ContractError("non-finite loss at epoch " +
                              std::to_string(epoch) + ", instance " +
                              std::to_string(idx));
        }
        tape.backward(loss);
      }

      scale_grads(grads, 1.0 / bs);
      const double norm = grad_norm(grads);
      if (norm > cfg.grad_clip) scale_grads(grads, cfg.grad_clip / norm);
      adam.step(params, grads);

      const double mean_r = batch_reward / bs;
      if (cfg.baseline == "ema") {
        ema = ema_ready ? cfg.ema_beta * ema + (1.0 - cfg.ema_beta) * mean_r
                        : mean_r;
        ema_ready = true;
      }
      epoch_reward += batch_reward;
      done += bs;
    }

    EpochRow row;
    row.epoch = epoch;
    row.train_r = epoch_reward / per_epoch;
    row.eval = evaluate_policy(cfg.policy, params, eval_set.items,
                               cfg.strategy, cfg.eval_limit);
    result.curve.push_back(row);

    save_checkpoint(result.last_checkpoint, cfg.policy, params);
    if (!have_best || row.eval.r > result.best_eval_r) {
      result.best_eval_r = row.eval.r;
      save_checkpoint(result.best_checkpoint, cfg.policy, params);
      have_best = true;
    }

    std::string csv = "epoch,train_r,eval_c,eval_p,eval_s,eval_r\n";
    for (const auto& er : result.curve) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%d,%.6f,%s\n", er.epoch, er.train_r,
                    format_row(er.eval.c, er.eval.p, er.eval.s, er.eval.r)
                        .c_str());
      csv += buf;
    }
    write_file_atomic(result.curve_csv, csv);
  }

  return result;
}

}  // namespace tap
