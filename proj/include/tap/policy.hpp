#ifndef TAP_POLICY_HPP
#define TAP_POLICY_HPP

#include <string>
#include <utility>
#include <vector>

#include "tap/autodiff.hpp"
#include "tap/container.hpp"
#include "tap/json_io.hpp"
#include "tap/precedence.hpp"
#include "tap/solvers.hpp"

namespace tap {

// Dynamic-state ablations: live blocker masks each step, masks frozen at the
// first step, or all-zero masks.
enum class DynamicMode { kDyn, kInit, kNone };
DynamicMode dynamic_mode_from_string(const std::string& s);
std::string to_string(DynamicMode m);

// Decoder-input ablations: previous selection embedding, height-map
// embedding, or both.
enum class DecoderInput { kBoth, kShape, kHeight };
DecoderInput decoder_input_from_string(const std::string& s);
std::string to_string(DecoderInput d);

enum class RolloutMode { kSample, kArgmax, kTeacher };

struct PolicyConfig {
  int dims_mode = 2;
  int capacity = 10;
  int target_width = 5;
  int target_depth = 0;  // 0: 1 in 2D, target_width in 3D
  int containers = 1;
  int d_static = 64;
  int d_dynamic = 64;
  int d_height = 64;
  int hidden = 128;
  int d_attention = 128;
  int d_pointer = 128;
  int d_critic = 64;
  HeightMode height_mode = HeightMode::kGradient;
  DynamicMode dynamic_mode = DynamicMode::kDyn;
  DecoderInput decoder_input = DecoderInput::kBoth;

  PolicyConfig normalized() const;
  int states_per_box() const { return orientation_count(dims_mode); }
  int slots() const { return states_per_box() * capacity; }
  int static_features() const {
    return dims_mode + (containers > 1 ? containers : 0);
  }
  int height_len() const;
  int decoder_in() const;
  int encode_dim() const { return d_static + d_dynamic; }
};

Json to_json(const PolicyConfig& cfg);
PolicyConfig policy_config_from_json(const Json& j);

// Every learnable tensor. Shapes are fixed by a PolicyConfig; for_each
// visits fields in a fixed order so initialization, Adam state, and
// checkpoints all agree.
template <typename S>
struct PolicyParamsT {
  using M = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

  M ws, bs;                              // static embedding
  M wd1, bd1, wd2, bd2;                  // dynamic embedding convs
  M wh, bh;                              // height-map embedding
  M start;                               // first-step selection embedding
  M wz, uz, bz, wr, ur, br, wn, un, bn;  // recurrent cell
  M wa, va;                              // attention
  M wp, vp;                              // pointer
  M wv1, bv1, wv2, bv2;                  // critic

  template <typename F>
  void for_each(F&& f) {
    f("ws", ws); f("bs", bs);
    f("wd1", wd1); f("bd1", bd1); f("wd2", wd2); f("bd2", bd2);
    f("wh", wh); f("bh", bh);
    f("start", start);
    f("wz", wz); f("uz", uz); f("bz", bz);
    f("wr", wr); f("ur", ur); f("br", br);
    f("wn", wn); f("un", un); f("bn", bn);
    f("wa", wa); f("va", va);
    f("wp", wp); f("vp", vp);
    f("wv1", wv1); f("bv1", bv1); f("wv2", wv2); f("bv2", bv2);
  }

  template <typename F>
  void for_each(F&& f) const {
    const_cast<PolicyParamsT*>(this)->for_each(
        [&](const char* name, M& m) { f(name, static_cast<const M&>(m)); });
  }

  // Allocates every tensor at its configured shape, zero-filled.
  void allocate(const PolicyConfig& cfg);

  template <typename T>
  PolicyParamsT<T> cast() const {
    PolicyParamsT<T> out;
    auto src = fields();
    auto dst = out.fields();
    for (std::size_t i = 0; i < src.size(); ++i)
      *dst[i] = src[i]->template cast<T>();
    return out;
  }

  std::vector<M*> fields() {
    std::vector<M*> out;
    for_each([&](const char*, M& m) { out.push_back(&m); });
    return out;
  }
  std::vector<const M*> fields() const {
    std::vector<const M*> out;
    for_each([&](const char*, const M& m) { out.push_back(&m); });
    return out;
  }
};

using PolicyParams = PolicyParamsT<float>;

// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights, zero biases.
PolicyParams init_params(const PolicyConfig& cfg, Rng& rng);

void save_checkpoint(const std::string& path, const PolicyConfig& cfg,
                     const PolicyParams& params);
std::pair<PolicyConfig, PolicyParams> load_checkpoint(const std::string& path);

// One forward episode of the network on a tape. set_static fixes the
// per-slot features; step() runs encoder + one decoder step and returns the
// pointer distribution; pick() commits a choice and returns the nodes the
// training loss needs. grads may be null for inference.
template <typename S>
class PolicyNet {
 public:
  using M = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  using Mask = std::vector<std::uint8_t>;

  PolicyNet(const PolicyConfig& cfg, const PolicyParamsT<S>& params,
            PolicyParamsT<S>* grads);

  void set_static(const M& features);

  struct StepOut {
    int scores = -1;  // pointer logits node, 1 x slots
    M probs;          // masked softmax of the logits, 1 x slots
  };
  StepOut step(const Eigen::MatrixXd& bits,
               const std::vector<Eigen::VectorXd>& heights,
               const Mask& attend, const Mask& point);

  struct Picked {
    int logp = -1;
    int entropy = -1;
  };
  Picked pick(const StepOut& out, const Mask& point, int slot);

  // Critic value over the first step's encoder outputs (real slots only).
  int critic_node();
  double critic_value();

  Tape<S>& tape() { return tape_; }
  const PolicyConfig& config() const { return cfg_; }

 private:
  struct Ids {
    int ws, bs, wd1, bd1, wd2, bd2, wh, bh, start;
    int wz, uz, bz, wr, ur, br, wn, un, bn;
    int wa, va, wp, vp, wv1, bv1, wv2, bv2;
  };

  PolicyConfig cfg_;
  Tape<S> tape_;
  Ids p_;
  int es_ = -1;
  int e_ = -1;
  int e0_ = -1;
  Mask e0_real_;
  Eigen::MatrixXd init_bits_;
  bool have_init_bits_ = false;
  int hidden_ = -1;
  int prev_ = -1;
  int critic_ = -1;

  void encode(const Eigen::MatrixXd& bits, const Mask& attend);
  int gru(int x);
};

template <typename S>
struct RolloutStep {
  int slot = -1;
  std::vector<std::uint8_t> mask;
  int logp = -1;
  int entropy = -1;
};

template <typename S>
struct RolloutResult {
  Solution solution;
  std::vector<RolloutStep<S>> steps;
  std::vector<int> chosen;
  int critic_node = -1;
  double critic = 0.0;
};

// Per-slot static features of an instance under a config (dims normalized by
// the target width, container one-hot when k > 1; dummy columns zero).
template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> static_features(
    const PolicyConfig& cfg, const ProblemInstance& inst);

// Full episode on an instance whose box count fits the capacity. rng is
// required for kSample; forced supplies the slot sequence for kTeacher.
template <typename S>
RolloutResult<S> rollout(PolicyNet<S>& net, const ProblemInstance& inst,
                         Strategy strategy, RolloutMode mode, Rng* rng,
                         const std::vector<int>* forced = nullptr);

// Slot index of an oriented state within a precedence graph's box order.
int state_slot(const PrecedenceGraph& g, const PolicyConfig& cfg,
               const OrientedState& s);

// Choice helpers shared by rollout and the rolling solver: sample walks the
// cumulative distribution, argmax takes the highest probability with the
// lowest slot winning ties.
int sample_slot(const Eigen::RowVectorXd& probs,
                const std::vector<std::uint8_t>& mask, Rng& rng);
int argmax_slot(const Eigen::RowVectorXd& probs,
                const std::vector<std::uint8_t>& mask);

}  // namespace tap

#endif
