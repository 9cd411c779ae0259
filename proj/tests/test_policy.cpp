#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "tap/datasets.hpp"
#include "tap/policy.hpp"

using namespace tap;

namespace {

PolicyConfig small_cfg() {
  PolicyConfig cfg;
  cfg.dims_mode = 2;
  cfg.capacity = 4;
  cfg.target_width = 5;
  cfg.d_static = 8;
  cfg.d_dynamic = 8;
  cfg.d_height = 8;
  cfg.hidden = 16;
  cfg.d_attention = 16;
  cfg.d_pointer = 16;
  cfg.d_critic = 8;
  return cfg;
}

struct StepInputs {
  Eigen::MatrixXd bits;
  std::vector<Eigen::VectorXd> heights;
  std::vector<std::uint8_t> attend;
  std::vector<std::uint8_t> point;
};

StepInputs first_step(const ProblemInstance& inst, const PolicyConfig& cfg) {
  PackEnv env(inst);
  StepInputs in;
  const DynamicEncoding enc = encode_dynamic(env.g, cfg.capacity);
  in.bits = enc.bits;
  for (const auto& hm : env.state.maps)
    in.heights.push_back(represent(hm, cfg.height_mode));
  const int spb = cfg.states_per_box();
  const int m = static_cast<int>(inst.boxes.size());
  in.attend.assign(static_cast<std::size_t>(cfg.slots()), 0);
  for (int s = 0; s < cfg.slots(); ++s)
    if (s / spb < m) in.attend[static_cast<std::size_t>(s)] = 1;
  in.point.assign(static_cast<std::size_t>(cfg.slots()), 0);
  for (const auto& s : placeable_states(inst, env.g))
    in.point[static_cast<std::size_t>(state_slot(env.g, cfg, s))] = 1;
  return in;
}

// Two boxes spread on the floor with a gap on each open side: every blocker
// set minimizes away, so the dynamic bits are all zero.
ProblemInstance twins() {
  ProblemInstance inst;
  inst.dims_mode = 2;
  inst.init_width = 7;
  inst.target_width = 5;
  inst.boxes = {{0, {2, 1, 1}, 0}, {1, {2, 1, 1}, 0}};
  inst.initial_placements = {{0, 0, 0, 0, 0, 0}, {1, 0, 3, 0, 0, 0}};
  return inst;
}

double teacher_loss_value(const PolicyConfig& cfg,
                          const PolicyParamsT<double>& p,
                          const ProblemInstance& inst,
                          const std::vector<int>& forced, double adv) {
  PolicyNet<double> net(cfg, p, nullptr);
  const auto out = rollout<double>(net, inst, Strategy::kLb,
                                   RolloutMode::kTeacher, nullptr, &forced);
  double sum_logp = 0.0;
  for (const auto& s : out.steps)
    sum_logp += net.tape().value(s.logp)(0, 0);
  const double diff = out.critic - out.solution.reward.r;
  return -adv * sum_logp + diff * diff;
}

PolicyParamsT<double> teacher_loss_grads(const PolicyConfig& cfg,
                                         const PolicyParamsT<double>& p,
                                         const ProblemInstance& inst,
                                         const std::vector<int>& forced,
                                         double adv, bool critic_term) {
  PolicyParamsT<double> grads;
  grads.allocate(cfg);
  PolicyNet<double> net(cfg, p, &grads);
  const auto out = rollout<double>(net, inst, Strategy::kLb,
                                   RolloutMode::kTeacher, nullptr, &forced);
  auto& t = net.tape();
  int sum = out.steps[0].logp;
  for (std::size_t i = 1; i < out.steps.size(); ++i)
    sum = t.add(sum, out.steps[i].logp);
  int loss = t.scale(sum, -adv);
  if (critic_term) {
    const int diff =
        t.sub(out.critic_node, t.scalar(out.solution.reward.r));
    loss = t.add(loss, t.hadamard(diff, diff));
  }
  t.backward(loss);
  return grads;
}

}  // namespace

TEST_CASE("first step on the fixture points only at the free states") {
  const ProblemInstance inst = test::f1();
  const PolicyConfig cfg = small_cfg();
  Rng rng(1);
  const PolicyParams params = init_params(cfg, rng);
  PolicyNet<float> net(cfg, params, nullptr);
  net.set_static(static_features<float>(cfg, inst));

  const StepInputs in = first_step(inst, cfg);
  CHECK(in.point == std::vector<std::uint8_t>{1, 0, 0, 0, 1, 0, 0, 0});

  const auto out = net.step(in.bits, in.heights, in.attend, in.point);
  REQUIRE(out.probs.rows() == 1);
  REQUIRE(out.probs.cols() == cfg.slots());
  CHECK(out.probs(0, 0) > 0.0f);
  CHECK(out.probs(0, 4) > 0.0f);
  CHECK(out.probs(0, 0) + out.probs(0, 4) ==
        doctest::Approx(1.0).epsilon(1e-6));
  for (int j : {1, 2, 3, 5, 6, 7}) CHECK(out.probs(0, j) == 0.0f);
}

TEST_CASE("a lone free state takes the whole distribution") {
  // Two stacked squares between flush walls: only the top box moves, and
  // only unrotated since neither side is free.
  ProblemInstance inst;
  inst.dims_mode = 2;
  inst.init_width = 2;
  inst.target_width = 5;
  inst.boxes = {{0, {2, 2, 1}, 0}, {1, {2, 2, 1}, 0}};
  inst.initial_placements = {{0, 0, 0, 0, 0, 0}, {1, 0, 0, 2, 0, 0}};

  const PolicyConfig cfg = small_cfg();
  Rng rng(2);
  const PolicyParams params = init_params(cfg, rng);
  PolicyNet<float> net(cfg, params, nullptr);
  net.set_static(static_features<float>(cfg, inst));

  const StepInputs in = first_step(inst, cfg);
  CHECK(in.point == std::vector<std::uint8_t>{0, 0, 1, 0, 0, 0, 0, 0});
  const auto out = net.step(in.bits, in.heights, in.attend, in.point);
  CHECK(out.probs(0, 2) == 1.0f);
  const auto picked = net.pick(out, in.point, 2);
  CHECK(net.tape().value(picked.logp)(0, 0) == 0.0f);
}

TEST_CASE("dummy slot contents cannot leak into real probabilities") {
  const ProblemInstance inst = test::f1();
  const PolicyConfig cfg = small_cfg();
  Rng rng(3);
  const PolicyParams params = init_params(cfg, rng);
  const StepInputs in = first_step(inst, cfg);

  PolicyNet<float> a(cfg, params, nullptr);
  a.set_static(static_features<float>(cfg, inst));
  const auto pa = a.step(in.bits, in.heights, in.attend, in.point);

  Eigen::MatrixXd noisy = in.bits;
  noisy.col(6).setConstant(1.0);
  noisy.col(7).setConstant(1.0);
  PolicyNet<float> b(cfg, params, nullptr);
  b.set_static(static_features<float>(cfg, inst));
  const auto pb = b.step(noisy, in.heights, in.attend, in.point);

  CHECK((pa.probs.array() == pb.probs.array()).all());
}

TEST_CASE("identical free boxes get identical slot probabilities") {
  const ProblemInstance inst = twins();
  const PolicyConfig cfg = small_cfg();
  Rng rng(4);
  const PolicyParams params = init_params(cfg, rng);
  PolicyNet<float> net(cfg, params, nullptr);
  net.set_static(static_features<float>(cfg, inst));

  const StepInputs in = first_step(inst, cfg);
  CHECK(in.bits.cwiseAbs().sum() == 0.0);
  CHECK(in.point == std::vector<std::uint8_t>{1, 1, 1, 1, 0, 0, 0, 0});
  const auto out = net.step(in.bits, in.heights, in.attend, in.point);
  CHECK(out.probs(0, 0) == out.probs(0, 2));
  CHECK(out.probs(0, 1) == out.probs(0, 3));
}

TEST_CASE("critic ignores box order when the bits carry nothing") {
  ProblemInstance fwd;
  fwd.dims_mode = 2;
  fwd.init_width = 9;
  fwd.target_width = 5;
  fwd.boxes = {{0, {2, 1, 1}, 0}, {1, {1, 2, 1}, 0}, {2, {3, 1, 1}, 0}};
  fwd.initial_placements = {
      {0, 0, 0, 0, 0, 0}, {1, 0, 3, 0, 0, 0}, {2, 0, 5, 0, 0, 0}};

  ProblemInstance rev = fwd;
  rev.boxes = {fwd.boxes[2], fwd.boxes[1], fwd.boxes[0]};
  rev.initial_placements = {fwd.initial_placements[2],
                            fwd.initial_placements[1],
                            fwd.initial_placements[0]};

  const PolicyConfig cfg = small_cfg();
  Rng rng(5);
  const PolicyParams params = init_params(cfg, rng);

  const StepInputs fin = first_step(fwd, cfg);
  const StepInputs rin = first_step(rev, cfg);
  CHECK(fin.bits.cwiseAbs().sum() == 0.0);
  CHECK(rin.bits.cwiseAbs().sum() == 0.0);

  PolicyNet<float> fnet(cfg, params, nullptr);
  fnet.set_static(static_features<float>(cfg, fwd));
  const auto fout = fnet.step(fin.bits, fin.heights, fin.attend, fin.point);
  PolicyNet<float> rnet(cfg, params, nullptr);
  rnet.set_static(static_features<float>(cfg, rev));
  const auto rout = rnet.step(rin.bits, rin.heights, rin.attend, rin.point);

  CHECK(std::abs(fnet.critic_value() - rnet.critic_value()) < 1e-5);
  // Box 0 sits at slots 0,1 forwards and slots 4,5 reversed.
  CHECK(std::abs(fout.probs(0, 0) - rout.probs(0, 4)) < 1e-5f);
  CHECK(std::abs(fout.probs(0, 1) - rout.probs(0, 5)) < 1e-5f);
  CHECK(std::abs(fout.probs(0, 4) - rout.probs(0, 0)) < 1e-5f);
}

TEST_CASE("checkpoints survive a save load save cycle untouched") {
  test::TempDir dir("ckpt");
  const PolicyConfig cfg = small_cfg();
  Rng rng(6);
  const PolicyParams params = init_params(cfg, rng);

  const std::string p1 = dir.file("a.json");
  const std::string p2 = dir.file("b.json");
  save_checkpoint(p1, cfg, params);
  const auto [lcfg, lparams] = load_checkpoint(p1);

  CHECK(lcfg.dims_mode == cfg.dims_mode);
  CHECK(lcfg.capacity == cfg.capacity);
  CHECK(lcfg.target_width == cfg.target_width);
  CHECK(lcfg.hidden == cfg.hidden);
  CHECK(lcfg.height_mode == cfg.height_mode);
  CHECK(lcfg.dynamic_mode == cfg.dynamic_mode);
  CHECK(lcfg.decoder_input == cfg.decoder_input);

  const auto fa = params.fields();
  const auto fb = lparams.fields();
  REQUIRE(fa.size() == fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i) {
    REQUIRE(fa[i]->rows() == fb[i]->rows());
    REQUIRE(fa[i]->cols() == fb[i]->cols());
    CHECK((fa[i]->array() == fb[i]->array()).all());
  }

  save_checkpoint(p2, lcfg, lparams);
  std::ifstream s1(p1, std::ios::binary);
  std::ifstream s2(p2, std::ios::binary);
  std::stringstream b1, b2;
  b1 << s1.rdbuf();
  b2 << s2.rdbuf();
  CHECK(b1.str() == b2.str());
  CHECK(!b1.str().empty());

  CHECK_THROWS_AS(load_checkpoint(dir.file("missing.json")), IoError);
}

TEST_CASE("rollout rejects mismatched instances") {
  const ProblemInstance inst = test::f1();
  Rng rng(7);

  SUBCASE("too many boxes") {
    PolicyConfig cfg = small_cfg();
    cfg.capacity = 2;
    const PolicyParams params = init_params(cfg, rng);
    PolicyNet<float> net(cfg, params, nullptr);
    Rng sample(1);
    CHECK_THROWS_AS(rollout<float>(net, inst, Strategy::kLb,
                                   RolloutMode::kSample, &sample),
                    CapacityError);
  }
  SUBCASE("wrong dimensionality") {
    PolicyConfig cfg = small_cfg();
    cfg.dims_mode = 3;
    const PolicyParams params = init_params(cfg, rng);
    PolicyNet<float> net(cfg, params, nullptr);
    Rng sample(1);
    CHECK_THROWS_AS(rollout<float>(net, inst, Strategy::kLb,
                                   RolloutMode::kSample, &sample),
                    ValidationError);
  }
  SUBCASE("wrong container count") {
    PolicyConfig cfg = small_cfg();
    cfg.containers = 2;
    const PolicyParams params = init_params(cfg, rng);
    PolicyNet<float> net(cfg, params, nullptr);
    Rng sample(1);
    CHECK_THROWS_AS(rollout<float>(net, inst, Strategy::kLb,
                                   RolloutMode::kSample, &sample),
                    ValidationError);
  }
  SUBCASE("sampling needs an rng") {
    const PolicyConfig cfg = small_cfg();
    const PolicyParams params = init_params(cfg, rng);
    PolicyNet<float> net(cfg, params, nullptr);
    CHECK_THROWS_AS(rollout<float>(net, inst, Strategy::kLb,
                                   RolloutMode::kSample, nullptr),
                    ContractError);
  }
  SUBCASE("teacher forcing a masked slot") {
    const PolicyConfig cfg = small_cfg();
    const PolicyParams params = init_params(cfg, rng);
    PolicyNet<float> net(cfg, params, nullptr);
    const std::vector<int> forced = {2, 4, 0};
    CHECK_THROWS_AS(rollout<float>(net, inst, Strategy::kLb,
                                   RolloutMode::kTeacher, nullptr, &forced),
                    ContractError);
  }
  SUBCASE("all states masked") {
    const PolicyConfig cfg = small_cfg();
    const PolicyParams params = init_params(cfg, rng);
    PolicyNet<float> net(cfg, params, nullptr);
    net.set_static(static_features<float>(cfg, inst));
    const StepInputs in = first_step(inst, cfg);
    const std::vector<std::uint8_t> none(in.point.size(), 0);
    CHECK_THROWS_AS(net.step(in.bits, in.heights, in.attend, none),
                    FeasibilityError);
  }
}

TEST_CASE("argmax rollouts repeat themselves") {
  const PolicyConfig cfg = small_cfg();
  Rng rng(8);
  const PolicyParams params = init_params(cfg, rng);
  const ProblemInstance inst = test::f1();

  PolicyNet<float> a(cfg, params, nullptr);
  const auto ra =
      rollout<float>(a, inst, Strategy::kLb, RolloutMode::kArgmax, nullptr);
  PolicyNet<float> b(cfg, params, nullptr);
  const auto rb =
      rollout<float>(b, inst, Strategy::kLb, RolloutMode::kArgmax, nullptr);

  CHECK(ra.chosen == rb.chosen);
  CHECK(ra.solution.steps == rb.solution.steps);
  CHECK(ra.critic == rb.critic);
  CHECK(validate_solution(inst, ra.solution.steps).empty());
}

TEST_CASE("sampled rollouts never pick a masked slot") {
  PolicyConfig cfg = small_cfg();
  cfg.capacity = 6;
  Rng rng(9);
  const PolicyParams params = init_params(cfg, rng);

  GenConfig gen;
  gen.n = 5;
  gen.seed = 40;

  int rollouts = 0;
  for (int i = 0; i < 150; ++i) {
    const ProblemInstance inst = gen_instance(gen, i).instance;
    for (std::uint64_t rep = 0; rep < 2; ++rep) {
      Rng sample(derived_rng(900, static_cast<std::uint64_t>(i) * 2 + rep));
      PolicyNet<float> net(cfg, params, nullptr);
      const auto out = rollout<float>(net, inst, Strategy::kLb,
                                      RolloutMode::kSample, &sample);
      REQUIRE(out.chosen.size() == inst.boxes.size());
      for (std::size_t t = 0; t < out.chosen.size(); ++t)
        REQUIRE(out.steps[t].mask[static_cast<std::size_t>(
                    out.chosen[t])] == 1);
      REQUIRE(validate_solution(inst, out.solution.steps).empty());
      ++rollouts;
    }
  }
  CHECK(rollouts == 300);
}

TEST_CASE("an untrained net samples close to the uniform baseline") {
  PolicyConfig cfg = small_cfg();
  cfg.capacity = 6;
  Rng rng(10);
  const PolicyParams params = init_params(cfg, rng);

  GenConfig gen;
  gen.n = 5;
  gen.seed = 41;

  double net_sum = 0.0;
  double rand_sum = 0.0;
  const int count = 200;
  for (int i = 0; i < count; ++i) {
    const ProblemInstance inst = gen_instance(gen, i).instance;
    Rng sample = derived_rng(901, static_cast<std::uint64_t>(i));
    PolicyNet<float> net(cfg, params, nullptr);
    const auto out = rollout<float>(net, inst, Strategy::kLb,
                                    RolloutMode::kSample, &sample);
    net_sum += out.solution.reward.r;
    Rng uni = derived_rng(902, static_cast<std::uint64_t>(i));
    rand_sum += solve_random(inst, Strategy::kLb, uni).reward.r;
  }
  CHECK(std::abs(net_sum / count - rand_sum / count) < 0.05);
}

TEST_CASE("tape gradients match finite differences through the net") {
  PolicyConfig cfg = small_cfg();
  const ProblemInstance inst = test::f1();
  const std::vector<int> forced = {4, 2, 1};
  const double adv = 0.7;

  Rng rng(11);
  const PolicyParamsT<double> params = init_params(cfg, rng).cast<double>();
  const PolicyParamsT<double> grads =
      teacher_loss_grads(cfg, params, inst, forced, adv, true);

  const double eps = 1e-6;
  double worst = 0.0;
  auto gfields = grads.fields();
  auto pfields = params.fields();
  for (std::size_t f = 0; f < pfields.size(); ++f) {
    const Eigen::Index n = pfields[f]->size();
    for (Eigen::Index k : {Eigen::Index(0), n / 2, n - 1}) {
      PolicyParamsT<double> hi = params;
      PolicyParamsT<double> lo = params;
      hi.fields()[f]->data()[k] += eps;
      lo.fields()[f]->data()[k] -= eps;
      const double fd = (teacher_loss_value(cfg, hi, inst, forced, adv) -
                         teacher_loss_value(cfg, lo, inst, forced, adv)) /
                        (2.0 * eps);
      const double an = gfields[f]->data()[k];
      const double scale = std::max({1.0, std::abs(fd), std::abs(an)});
      worst = std::max(worst, std::abs(fd - an) / scale);
    }
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("actor loss leaves the critic untouched") {
  PolicyConfig cfg = small_cfg();
  const ProblemInstance inst = test::f1();
  const std::vector<int> forced = {4, 2, 1};

  Rng rng(12);
  const PolicyParamsT<double> params = init_params(cfg, rng).cast<double>();
  const PolicyParamsT<double> grads =
      teacher_loss_grads(cfg, params, inst, forced, 0.7, false);

  CHECK(grads.wv1.cwiseAbs().maxCoeff() == 0.0);
  CHECK(grads.bv1.cwiseAbs().maxCoeff() == 0.0);
  CHECK(grads.wv2.cwiseAbs().maxCoeff() == 0.0);
  CHECK(grads.bv2.cwiseAbs().maxCoeff() == 0.0);
  CHECK(grads.wa.cwiseAbs().maxCoeff() > 0.0);
  CHECK(grads.vp.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("slot helpers walk the distribution correctly") {
  Eigen::RowVectorXd probs(4);
  probs << 0.25, 0.0, 0.75, 0.0;
  const std::vector<std::uint8_t> mask = {1, 0, 1, 0};

  SUBCASE("argmax with ties toward the lower slot") {
    CHECK(argmax_slot(probs, mask) == 2);
    Eigen::RowVectorXd tied(3);
    tied << 0.4, 0.4, 0.2;
    CHECK(argmax_slot(tied, {1, 1, 1}) == 0);
    CHECK_THROWS_AS(argmax_slot(probs, std::vector<std::uint8_t>(4, 0)),
                    ContractError);
  }
  SUBCASE("sampling follows the cumulative weights") {
    Rng rng(13);
    int low = 0;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) {
      const int s = sample_slot(probs, mask, rng);
      REQUIRE((s == 0 || s == 2));
      if (s == 0) ++low;
    }
    CHECK(std::abs(low / static_cast<double>(draws) - 0.25) < 0.02);
    CHECK_THROWS_AS(sample_slot(probs, std::vector<std::uint8_t>(4, 0), rng),
                    ContractError);
  }
}

TEST_CASE("static features normalize dims by the target width") {
  const ProblemInstance inst = test::f1();
  const PolicyConfig cfg = small_cfg();
  const auto f = static_features<float>(cfg, inst);
  REQUIRE(f.rows() == 2);
  REQUIRE(f.cols() == 8);
  CHECK(f(0, 0) == doctest::Approx(2.0 / 5.0));
  CHECK(f(1, 0) == doctest::Approx(2.0 / 5.0));
  CHECK(f(0, 3) == doctest::Approx(1.0 / 5.0));
  CHECK(f(1, 3) == doctest::Approx(2.0 / 5.0));
  CHECK(f(0, 6) == 0.0f);
  CHECK(f(1, 7) == 0.0f);
}
