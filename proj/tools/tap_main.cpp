#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "tap/datasets.hpp"
#include "tap/extensions.hpp"
#include "tap/json_io.hpp"
#include "tap/render.hpp"
#include "tap/solvers.hpp"
#include "tap/training.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitCapacity = 4;
constexpr int kExitIo = 5;
constexpr int kExitInfeasible = 6;

std::string reward_line(const tap::RewardBreakdown& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "C=%.6f P=%.6f S=%.6f R=%.6f", r.c, r.p,
                r.s, r.r);
  return buf;
}

std::string frame_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%03zu.svg", i);
  return buf;
}

struct GenArgs {
  tap::GenConfig cfg;
  std::string out;
};

int run_gen(const GenArgs& a) {
  const auto manifest = tap::write_dataset(a.cfg, a.out);
  std::cout << "wrote " << manifest.config.count << " instances to " << a.out
            << " checksum " << manifest.checksum << "\n";
  return 0;
}

struct SolveArgs {
  std::string instance;
  std::string method;
  std::string placement = "lb";
  std::string model;
  std::string out;
  std::string render_dir;
  std::uint64_t seed = 0;
  bool rolling = false;
};

int run_solve(const SolveArgs& a) {
  const tap::ProblemInstance inst = tap::load_instance(a.instance);
  const tap::Strategy strategy = tap::strategy_from_string(a.placement);

  tap::Solution sol;
  if (a.method == "random") {
    tap::Rng rng = tap::derived_rng(a.seed, 0);
    sol = tap::solve_random(inst, strategy, rng);
  } else if (a.method == "greedy") {
    sol = tap::solve_greedy(inst, strategy);
  } else if (a.method == "exhaustive") {
    sol = tap::solve_exhaustive(inst, strategy);
  } else if (a.method == "net") {
    if (a.model.empty())
      throw tap::ValidationError("--method net needs --model");
    auto [cfg, params] = tap::load_checkpoint(a.model);
    if (static_cast<int>(inst.boxes.size()) > cfg.capacity)
      std::cerr << "rolling mode engaged: " << inst.boxes.size()
                << " boxes exceed model capacity " << cfg.capacity << "\n";
    else if (a.rolling)
      std::cerr << "rolling mode requested; instance fits capacity, plain "
                   "rollout used\n";
    if (inst.container_count >= 2)
      sol = tap::solve_multi(cfg, params, inst, strategy);
    else
      sol = tap::rolling_solve(cfg, params, inst, strategy);
  } else {
    throw tap::ValidationError("unknown method: " + a.method);
  }

  const auto violations = tap::validate_solution(inst, sol.steps);
  if (!violations.empty())
    throw tap::ContractError("solver emitted an invalid solution: " +
                             violations.front());

  if (!a.out.empty()) tap::save_solution(a.out, sol);
  if (!a.render_dir.empty()) {
    tap::write_file_atomic(a.render_dir + "/pile.svg",
                           tap::render_pile_svg(inst));
    const auto frames = tap::render_solution_svg(inst, sol.steps);
    for (std::size_t i = 0; i < frames.size(); ++i)
      tap::write_file_atomic(a.render_dir + "/" + frame_name(i), frames[i]);
  }
  std::cout << reward_line(sol.reward) << "\n";
  return 0;
}

struct EvalArgs {
  std::string dataset;
  std::string method;
  std::string placement = "lb";
  std::string model;
  std::string out;
  std::uint64_t seed = 0;
  bool timing = false;
  int limit = 0;
};

int run_eval(const EvalArgs& a) {
  const tap::Dataset ds = tap::load_dataset(a.dataset);
  tap::EvalMetrics metrics;
  if (a.method == "net") {
    if (a.model.empty())
      throw tap::ValidationError("--method net needs --model");
    auto [cfg, params] = tap::load_checkpoint(a.model);
    metrics = tap::evaluate_policy(cfg, params, ds.items,
                                   tap::strategy_from_string(a.placement),
                                   a.limit);
  } else {
    metrics = tap::evaluate_baseline(a.method, ds.items,
                                     tap::strategy_from_string(a.placement),
                                     a.seed, a.limit);
  }
  const std::string csv = tap::metrics_csv({{a.method, metrics}}, a.timing);
  if (a.out.empty())
    std::cout << csv;
  else
    tap::write_file_atomic(a.out, csv);
  return 0;
}

int run_train(const std::string& config_path) {
  const tap::TrainConfig cfg =
      tap::train_config_from_json(tap::load_json(config_path));
  const tap::TrainResult result = tap::train(cfg);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", result.best_eval_r);
  std::cout << "best checkpoint " << result.best_checkpoint << " eval_r "
            << buf << "\n";
  std::cout << "curve " << result.curve_csv << "\n";
  return 0;
}

struct RenderArgs {
  std::string instance;
  std::string solution;
  std::string out;
};

int run_render(const RenderArgs& a) {
  const tap::ProblemInstance inst = tap::load_instance(a.instance);
  tap::write_file_atomic(a.out + "/pile.svg", tap::render_pile_svg(inst));
  if (!a.solution.empty()) {
    const tap::Solution sol = tap::load_solution(a.solution);
    tap::replay_solution(inst, sol.steps);
    const auto frames = tap::render_solution_svg(inst, sol.steps);
    for (std::size_t i = 0; i < frames.size(); ++i)
      tap::write_file_atomic(a.out + "/" + frame_name(i), frames[i]);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("TAP_THREADS"))
    Eigen::setNbThreads(std::max(1, std::atoi(threads)));
  else
    Eigen::setNbThreads(1);

  CLI::App app{"transport-and-pack: generate, solve, train, evaluate, render"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* cgen = app.add_subcommand("gen", "generate a dataset");
  cgen->add_option("--mode", gen.cfg.mode, "rand or ppsg");
  cgen->add_option("--dims", gen.cfg.dims_mode, "2 or 3")
      ->check(CLI::IsMember({2, 3}));
  cgen->add_option("--n", gen.cfg.n, "boxes per instance");
  cgen->add_option("--count", gen.cfg.count, "instances");
  cgen->add_option("--seed", gen.cfg.seed, "master seed");
  cgen->add_option("--init-width", gen.cfg.init_width, "pile width");
  cgen->add_option("--init-depth", gen.cfg.init_depth, "pile depth (3D)");
  cgen->add_option("--target-width", gen.cfg.target_width, "container width");
  cgen->add_option("--target-depth", gen.cfg.target_depth,
                   "container depth (3D)");
  cgen->add_option("--containers", gen.cfg.containers, "target containers");
  cgen->add_option("--size-mean", gen.cfg.size_mean, "box size mean");
  cgen->add_option("--size-sd", gen.cfg.size_sd, "box size deviation");
  cgen->add_option("--size-min", gen.cfg.size_min, "minimum extent");
  cgen->add_option("--size-max", gen.cfg.size_max, "maximum extent");
  cgen->add_flag("--spread", gen.cfg.spread,
                 "lay boxes out flat with gaps (no precedence)");
  cgen->add_option("--out", gen.out, "output directory")->required();

  SolveArgs solve;
  auto* csolve = app.add_subcommand("solve", "solve one instance");
  csolve->add_option("--instance", solve.instance, "instance json")
      ->required();
  csolve->add_option("--method", solve.method,
                     "random, greedy, exhaustive, or net")
      ->required();
  csolve->add_option("--placement", solve.placement, "lb, mul, or macs");
  csolve->add_option("--model", solve.model, "checkpoint for --method net");
  csolve->add_option("--seed", solve.seed, "seed for --method random");
  csolve->add_option("--out", solve.out, "solution json path");
  csolve->add_option("--render", solve.render_dir,
                     "also write SVG frames to this directory");
  csolve->add_flag("--rolling", solve.rolling,
                   "force rolling mode (auto when boxes exceed capacity)");

  EvalArgs eval;
  auto* ceval = app.add_subcommand("eval", "evaluate over a dataset");
  ceval->add_option("--dataset", eval.dataset, "dataset directory")
      ->required();
  ceval->add_option("--method", eval.method, "net, greedy, or random")
      ->required();
  ceval->add_option("--placement", eval.placement, "lb, mul, or macs");
  ceval->add_option("--model", eval.model, "checkpoint for --method net");
  ceval->add_option("--seed", eval.seed, "seed for --method random");
  ceval->add_option("--out", eval.out, "metrics csv path (stdout if absent)");
  ceval->add_flag("--timing", eval.timing, "append a mean seconds column");
  ceval->add_option("--limit", eval.limit, "evaluate only the first N");

  std::string train_config;
  auto* ctrain = app.add_subcommand("train", "train a policy");
  ctrain->add_option("--config", train_config, "training config json")
      ->required();

  RenderArgs render;
  auto* crender = app.add_subcommand("render", "render SVG views");
  crender->add_option("--instance", render.instance, "instance json")
      ->required();
  crender->add_option("--solution", render.solution,
                      "solution json (adds packing frames)");
  crender->add_option("--out", render.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (cgen->parsed()) return run_gen(gen);
    if (csolve->parsed()) return run_solve(solve);
    if (ceval->parsed()) return run_eval(eval);
    if (ctrain->parsed()) return run_train(train_config);
    if (crender->parsed()) return run_render(render);
  } catch (const tap::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const tap::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const tap::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const tap::FeasibilityError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
