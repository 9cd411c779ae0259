#include "tap/policy.hpp"

#include <algorithm>
#include <cmath>

namespace tap {

DynamicMode dynamic_mode_from_string(const std::string& s) {
  if (s == "dyn") return DynamicMode::kDyn;
  if (s == "init") return DynamicMode::kInit;
  if (s == "none") return DynamicMode::kNone;
  throw ValidationError("unknown dynamic mode: " + s);
}

std::string to_string(DynamicMode m) {
  switch (m) {
    case DynamicMode::kDyn: return "dyn";
    case DynamicMode::kInit: return "init";
    default: return "none";
  }
}

DecoderInput decoder_input_from_string(const std::string& s) {
  if (s == "both") return DecoderInput::kBoth;
  if (s == "shape") return DecoderInput::kShape;
  if (s == "height") return DecoderInput::kHeight;
  throw ValidationError("unknown decoder input: " + s);
}

std::string to_string(DecoderInput d) {
  switch (d) {
    case DecoderInput::kBoth: return "both";
    case DecoderInput::kShape: return "shape";
    default: return "height";
  }
}

PolicyConfig PolicyConfig::normalized() const {
  PolicyConfig c = *this;
  if (c.target_depth == 0)
    c.target_depth = c.dims_mode == 2 ? 1 : c.target_width;
  return c;
}

int PolicyConfig::height_len() const {
  const PolicyConfig c = normalized();
  return static_cast<int>(
      represent(HeightMap(c.target_width, c.target_depth), c.height_mode)
          .size());
}

int PolicyConfig::decoder_in() const {
  int n = 0;
  if (decoder_input != DecoderInput::kHeight) n += d_static;
  if (decoder_input != DecoderInput::kShape) n += containers * d_height;
  return n;
}

Json to_json(const PolicyConfig& cfg) {
  const PolicyConfig c = cfg.normalized();
  return Json{{"dims_mode", c.dims_mode},
              {"capacity", c.capacity},
              {"target_width", c.target_width},
              {"target_depth", c.target_depth},
              {"containers", c.containers},
              {"d_static", c.d_static},
              {"d_dynamic", c.d_dynamic},
              {"d_height", c.d_height},
              {"hidden", c.hidden},
              {"d_attention", c.d_attention},
              {"d_pointer", c.d_pointer},
              {"d_critic", c.d_critic},
              {"height_mode", to_string(c.height_mode)},
              {"dynamic_mode", to_string(c.dynamic_mode)},
              {"decoder_input", to_string(c.decoder_input)}};
}

PolicyConfig policy_config_from_json(const Json& j) {
  PolicyConfig c;
  c.dims_mode = j.value("dims_mode", c.dims_mode);
  c.capacity = j.value("capacity", c.capacity);
  c.target_width = j.value("target_width", c.target_width);
  c.target_depth = j.value("target_depth", c.target_depth);
  c.containers = j.value("containers", c.containers);
  c.d_static = j.value("d_static", c.d_static);
  c.d_dynamic = j.value("d_dynamic", c.d_dynamic);
  c.d_height = j.value("d_height", c.d_height);
  c.hidden = j.value("hidden", c.hidden);
  c.d_attention = j.value("d_attention", c.d_attention);
  c.d_pointer = j.value("d_pointer", c.d_pointer);
  c.d_critic = j.value("d_critic", c.d_critic);
  c.height_mode =
      height_mode_from_string(j.value("height_mode", to_string(c.height_mode)));
  c.dynamic_mode = dynamic_mode_from_string(
      j.value("dynamic_mode", to_string(c.dynamic_mode)));
  c.decoder_input = decoder_input_from_string(
      j.value("decoder_input", to_string(c.decoder_input)));
  return c;
}

template <typename S>
void PolicyParamsT<S>::allocate(const PolicyConfig& raw) {
  const PolicyConfig cfg = raw.normalized();
  if (cfg.capacity < 1 || cfg.d_static < 1 || cfg.d_dynamic < 1 ||
      cfg.d_height < 1 || cfg.hidden < 1 || cfg.d_attention < 1 ||
      cfg.d_pointer < 1 || cfg.d_critic < 1)
    throw ContractError("bad policy dimensions");
  const int f = cfg.static_features();
  const int de = cfg.encode_dim();
  const int dx = cfg.decoder_in();
  ws = M::Zero(cfg.d_static, f);
  bs = M::Zero(cfg.d_static, 1);
  wd1 = M::Zero(cfg.d_dynamic, 3 * cfg.capacity);
  bd1 = M::Zero(cfg.d_dynamic, 1);
  wd2 = M::Zero(cfg.d_dynamic, cfg.d_dynamic);
  bd2 = M::Zero(cfg.d_dynamic, 1);
  wh = M::Zero(cfg.d_height, cfg.height_len());
  bh = M::Zero(cfg.d_height, 1);
  start = M::Zero(cfg.d_static, 1);
  wz = M::Zero(cfg.hidden, dx);
  uz = M::Zero(cfg.hidden, cfg.hidden);
  bz = M::Zero(cfg.hidden, 1);
  wr = M::Zero(cfg.hidden, dx);
  ur = M::Zero(cfg.hidden, cfg.hidden);
  br = M::Zero(cfg.hidden, 1);
  wn = M::Zero(cfg.hidden, dx);
  un = M::Zero(cfg.hidden, cfg.hidden);
  bn = M::Zero(cfg.hidden, 1);
  wa = M::Zero(cfg.d_attention, de + cfg.hidden);
  va = M::Zero(cfg.d_attention, 1);
  wp = M::Zero(cfg.d_pointer, 2 * de);
  vp = M::Zero(cfg.d_pointer, 1);
  wv1 = M::Zero(cfg.d_critic, de);
  bv1 = M::Zero(cfg.d_critic, 1);
  wv2 = M::Zero(1, cfg.d_critic);
  bv2 = M::Zero(1, 1);
}

PolicyParams init_params(const PolicyConfig& cfg, Rng& rng) {
  PolicyParams p;
  p.allocate(cfg);
  p.for_each([&](const char* name, Eigen::MatrixXf& m) {
    if (name[0] == 'b') return;  // biases stay zero
    const auto fan_in = m.cols() > 1 ? m.cols() : m.rows();
    const double r = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index i = 0; i < m.size(); ++i)
      m.data()[i] = static_cast<float>((rng.uniform() * 2.0 - 1.0) * r);
  });
  return p;
}

static const char* kCheckpointFormat = "tap-checkpoint/1";

void save_checkpoint(const std::string& path, const PolicyConfig& cfg,
                     const PolicyParams& params) {
  Json pj = Json::object();
  params.for_each([&](const char* name, const Eigen::MatrixXf& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        row.push_back(static_cast<double>(m(i, j)));
      rows.push_back(std::move(row));
    }
    pj[name] = std::move(rows);
  });
  save_json(path, Json{{"format", kCheckpointFormat},
                       {"config", to_json(cfg)},
                       {"params", pj}});
}

std::pair<PolicyConfig, PolicyParams> load_checkpoint(const std::string& path) {
  const Json j = load_json(path);
  if (j.value("format", "") != kCheckpointFormat)
    throw ValidationError("not a checkpoint: " + path);
  const PolicyConfig cfg = policy_config_from_json(j.at("config"));
  PolicyParams p;
  p.allocate(cfg);
  const Json& pj = j.at("params");
  p.for_each([&](const char* name, Eigen::MatrixXf& m) {
    if (!pj.contains(name))
      throw ValidationError(std::string("checkpoint missing tensor: ") + name);
    const Json& rows = pj.at(name);
    if (static_cast<Eigen::Index>(rows.size()) != m.rows())
      throw ValidationError(std::string("checkpoint shape mismatch: ") + name);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const Json& row = rows.at(static_cast<std::size_t>(i));
      if (static_cast<Eigen::Index>(row.size()) != m.cols())
        throw ValidationError(std::string("checkpoint shape mismatch: ") +
                              name);
      for (Eigen::Index jc = 0; jc < m.cols(); ++jc)
        m(i, jc) = static_cast<float>(row.at(static_cast<std::size_t>(jc))
                                          .get<double>());
    }
  });
  return {cfg, std::move(p)};
}

template <typename S>
PolicyNet<S>::PolicyNet(const PolicyConfig& cfg,
                        const PolicyParamsT<S>& params,
                        PolicyParamsT<S>* grads)
    : cfg_(cfg.normalized()) {
  auto bind = [&](const M& v, M* g) { return tape_.param(v, g); };
  PolicyParamsT<S>* gp = grads;
  p_.ws = bind(params.ws, gp ? &gp->ws : nullptr);
  p_.bs = bind(params.bs, gp ? &gp->bs : nullptr);
  p_.wd1 = bind(params.wd1, gp ? &gp->wd1 : nullptr);
  p_.bd1 = bind(params.bd1, gp ? &gp->bd1 : nullptr);
  p_.wd2 = bind(params.wd2, gp ? &gp->wd2 : nullptr);
  p_.bd2 = bind(params.bd2, gp ? &gp->bd2 : nullptr);
  p_.wh = bind(params.wh, gp ? &gp->wh : nullptr);
  p_.bh = bind(params.bh, gp ? &gp->bh : nullptr);
  p_.start = bind(params.start, gp ? &gp->start : nullptr);
  p_.wz = bind(params.wz, gp ? &gp->wz : nullptr);
  p_.uz = bind(params.uz, gp ? &gp->uz : nullptr);
  p_.bz = bind(params.bz, gp ? &gp->bz : nullptr);
  p_.wr = bind(params.wr, gp ? &gp->wr : nullptr);
  p_.ur = bind(params.ur, gp ? &gp->ur : nullptr);
  p_.br = bind(params.br, gp ? &gp->br : nullptr);
  p_.wn = bind(params.wn, gp ? &gp->wn : nullptr);
  p_.un = bind(params.un, gp ? &gp->un : nullptr);
  p_.bn = bind(params.bn, gp ? &gp->bn : nullptr);
  p_.wa = bind(params.wa, gp ? &gp->wa : nullptr);
  p_.va = bind(params.va, gp ? &gp->va : nullptr);
  p_.wp = bind(params.wp, gp ? &gp->wp : nullptr);
  p_.vp = bind(params.vp, gp ? &gp->vp : nullptr);
  p_.wv1 = bind(params.wv1, gp ? &gp->wv1 : nullptr);
  p_.bv1 = bind(params.bv1, gp ? &gp->bv1 : nullptr);
  p_.wv2 = bind(params.wv2, gp ? &gp->wv2 : nullptr);
  p_.bv2 = bind(params.bv2, gp ? &gp->bv2 : nullptr);
}

template <typename S>
void PolicyNet<S>::set_static(const M& features) {
  if (features.rows() != cfg_.static_features() ||
      features.cols() != cfg_.slots())
    throw ContractError("static feature shape mismatch");
  const int f = tape_.constant(features);
  es_ = tape_.add_bias(tape_.matmul(p_.ws, f), p_.bs);
  e_ = -1;
}

template <typename S>
void PolicyNet<S>::encode(const Eigen::MatrixXd& bits, const Mask& attend) {
  if (bits.rows() != 3 * cfg_.capacity || bits.cols() != cfg_.slots())
    throw ContractError("dynamic bits shape mismatch");
  Eigen::MatrixXd use = bits;
  if (cfg_.dynamic_mode == DynamicMode::kNone) {
    use.setZero();
  } else if (cfg_.dynamic_mode == DynamicMode::kInit) {
    if (!have_init_bits_) {
      init_bits_ = bits;
      have_init_bits_ = true;
    }
    use = init_bits_;
  }
  const int b = tape_.constant(use.cast<S>());
  const int h1 = tape_.relu(tape_.add_bias(tape_.matmul(p_.wd1, b), p_.bd1));
  const int ed = tape_.add_bias(tape_.matmul(p_.wd2, h1), p_.bd2);
  e_ = tape_.vcat(es_, ed);
  if (e0_ < 0) {
    e0_ = e_;
    e0_real_ = attend;
  }
}

template <typename S>
int PolicyNet<S>::gru(int x) {
  const int h = hidden_;
  const int z = tape_.sigmoid(
      tape_.add(tape_.add(tape_.matmul(p_.wz, x), tape_.matmul(p_.uz, h)),
                p_.bz));
  const int r = tape_.sigmoid(
      tape_.add(tape_.add(tape_.matmul(p_.wr, x), tape_.matmul(p_.ur, h)),
                p_.br));
  const int n = tape_.tanh(tape_.add(
      tape_.add(tape_.matmul(p_.wn, x), tape_.matmul(p_.un, tape_.hadamard(r, h))),
      p_.bn));
  return tape_.add(tape_.hadamard(tape_.one_minus(z), n),
                   tape_.hadamard(z, h));
}

template <typename S>
typename PolicyNet<S>::StepOut PolicyNet<S>::step(
    const Eigen::MatrixXd& bits, const std::vector<Eigen::VectorXd>& heights,
    const Mask& attend, const Mask& point) {
  if (es_ < 0) throw ContractError("static features not set");
  if (static_cast<int>(attend.size()) != cfg_.slots() ||
      static_cast<int>(point.size()) != cfg_.slots())
    throw ContractError("mask length mismatch");
  if (cfg_.dynamic_mode == DynamicMode::kDyn || e_ < 0) encode(bits, attend);

  if (hidden_ < 0) {
    hidden_ = tape_.constant(M::Zero(cfg_.hidden, 1));
    prev_ = p_.start;
  }

  int x = -1;
  if (cfg_.decoder_input != DecoderInput::kHeight) x = prev_;
  if (cfg_.decoder_input != DecoderInput::kShape) {
    if (static_cast<int>(heights.size()) != cfg_.containers)
      throw ContractError("height map count mismatch");
    for (const auto& hvec : heights) {
      if (static_cast<int>(hvec.size()) != cfg_.height_len())
        throw ContractError("height representation length mismatch");
      const int hv = tape_.constant(hvec.cast<S>());
      const int he = tape_.add(tape_.matmul(p_.wh, hv), p_.bh);
      x = x < 0 ? he : tape_.vcat(x, he);
    }
  }
  hidden_ = gru(x);

  const int n = cfg_.slots();
  const int eh = tape_.vcat(e_, tape_.replicate_cols(hidden_, n));
  const int u = tape_.matmul(tape_.transpose(p_.va),
                             tape_.tanh(tape_.matmul(p_.wa, eh)));
  const int a = tape_.masked_softmax(u, attend);
  const int ctx = tape_.matmul(e_, tape_.transpose(a));
  const int ec = tape_.vcat(e_, tape_.replicate_cols(ctx, n));
  const int scores = tape_.matmul(tape_.transpose(p_.vp),
                                  tape_.tanh(tape_.matmul(p_.wp, ec)));

  StepOut out;
  out.scores = scores;
  const M& sc = tape_.value(scores);
  S hi = -std::numeric_limits<S>::infinity();
  bool any = false;
  for (int j = 0; j < n; ++j)
    if (point[static_cast<std::size_t>(j)]) {
      hi = std::max(hi, sc(0, j));
      any = true;
    }
  if (!any) throw FeasibilityError("every state is masked");
  out.probs = M::Zero(1, n);
  S total = S(0);
  for (int j = 0; j < n; ++j) {
    if (!point[static_cast<std::size_t>(j)]) continue;
    const S e = std::exp(sc(0, j) - hi);
    out.probs(0, j) = e;
    total += e;
  }
  out.probs /= total;
  return out;
}

template <typename S>
typename PolicyNet<S>::Picked PolicyNet<S>::pick(const StepOut& out,
                                                 const Mask& point, int slot) {
  Picked pk;
  pk.logp = tape_.masked_log_pick(out.scores, point, slot);
  pk.entropy = tape_.masked_entropy(out.scores, point);
  if (cfg_.decoder_input != DecoderInput::kHeight)
    prev_ = tape_.pick_col(es_, slot);
  return pk;
}

template <typename S>
int PolicyNet<S>::critic_node() {
  if (critic_ < 0) {
    if (e0_ < 0) throw ContractError("critic needs an encoded step");
    const int pooled = tape_.mean_cols_masked(e0_, e0_real_);
    const int h = tape_.relu(
        tape_.add(tape_.matmul(p_.wv1, pooled), p_.bv1));
    critic_ = tape_.add(tape_.matmul(p_.wv2, h), p_.bv2);
  }
  return critic_;
}

template <typename S>
double PolicyNet<S>::critic_value() {
  return static_cast<double>(tape_.value(critic_node())(0, 0));
}

template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> static_features(
    const PolicyConfig& raw, const ProblemInstance& inst) {
  const PolicyConfig cfg = raw.normalized();
  using M = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  M f = M::Zero(cfg.static_features(), cfg.slots());
  const int spb = cfg.states_per_box();
  const S w = static_cast<S>(cfg.target_width);
  for (std::size_t i = 0; i < inst.boxes.size(); ++i) {
    const BoxSpec& b = inst.boxes[i];
    for (int o = 0; o < spb; ++o) {
      const int col = static_cast<int>(i) * spb + o;
      const Extents e = oriented(b.dims, o, cfg.dims_mode);
      f(0, col) = static_cast<S>(e.w) / w;
      f(1, col) = static_cast<S>(e.h) / w;
      if (cfg.dims_mode == 3) f(2, col) = static_cast<S>(e.d) / w;
      if (cfg.containers > 1)
        f(cfg.dims_mode + b.target_idx, col) = S(1);
    }
  }
  return f;
}

int state_slot(const PrecedenceGraph& g, const PolicyConfig& cfg,
               const OrientedState& s) {
  return g.index_of(s.box_id) * cfg.states_per_box() + s.orientation;
}

int sample_slot(const Eigen::RowVectorXd& probs,
                const std::vector<std::uint8_t>& mask, Rng& rng) {
  const double r = rng.uniform();
  double cum = 0.0;
  int last = -1;
  for (int j = 0; j < probs.size(); ++j) {
    if (!mask[static_cast<std::size_t>(j)]) continue;
    last = j;
    cum += probs(j);
    if (r < cum) return j;
  }
  if (last < 0) throw ContractError("empty mask");
  return last;
}

int argmax_slot(const Eigen::RowVectorXd& probs,
                const std::vector<std::uint8_t>& mask) {
  int best = -1;
  for (int j = 0; j < probs.size(); ++j) {
    if (!mask[static_cast<std::size_t>(j)]) continue;
    if (best < 0 || probs(j) > probs(best)) best = j;
  }
  if (best < 0) throw ContractError("empty mask");
  return best;
}

template <typename S>
RolloutResult<S> rollout(PolicyNet<S>& net, const ProblemInstance& inst,
                         Strategy strategy, RolloutMode mode, Rng* rng,
                         const std::vector<int>* forced) {
  const PolicyConfig& cfg = net.config();
  if (inst.dims_mode != cfg.dims_mode)
    throw ValidationError("instance dimensionality does not match the model");
  if (inst.container_count != cfg.containers)
    throw ValidationError("container count does not match the model");
  const int m = static_cast<int>(inst.boxes.size());
  if (m > cfg.capacity)
    throw CapacityError("instance exceeds policy capacity; use rolling mode");
  if (mode == RolloutMode::kSample && !rng)
    throw ContractError("sampling needs an rng");
  if (mode == RolloutMode::kTeacher &&
      (!forced || static_cast<int>(forced->size()) != m))
    throw ContractError("teacher mode needs one slot per box");

  PackEnv env(inst);
  net.set_static(static_features<S>(cfg, inst));

  const int spb = cfg.states_per_box();
  typename PolicyNet<S>::Mask attend(
      static_cast<std::size_t>(cfg.slots()), 0);
  for (int s = 0; s < cfg.slots(); ++s)
    if (s / spb < m) attend[static_cast<std::size_t>(s)] = 1;

  RolloutResult<S> out;
  for (int t = 0; t < m; ++t) {
    const DynamicEncoding enc = encode_dynamic(env.g, cfg.capacity);
    std::vector<Eigen::VectorXd> heights;
    for (int c = 0; c < cfg.containers; ++c)
      heights.push_back(
          represent(env.state.maps[static_cast<std::size_t>(c)],
                    cfg.height_mode));

    const auto states = placeable_states(inst, env.g);
    if (states.empty())
      throw FeasibilityError("no movable box fits the target container");
    typename PolicyNet<S>::Mask point(
        static_cast<std::size_t>(cfg.slots()), 0);
    for (const auto& s : states)
      point[static_cast<std::size_t>(state_slot(env.g, cfg, s))] = 1;

    auto so = net.step(enc.bits, heights, attend, point);

    int slot = -1;
    if (mode == RolloutMode::kSample) {
      slot = sample_slot(so.probs.template cast<double>(), point, *rng);
    } else if (mode == RolloutMode::kArgmax) {
      slot = argmax_slot(so.probs.template cast<double>(), point);
    } else {
      slot = (*forced)[static_cast<std::size_t>(t)];
      if (slot < 0 || slot >= cfg.slots() ||
          !point[static_cast<std::size_t>(slot)])
        throw ContractError("forced slot is masked");
    }

    const auto picked = net.pick(so, point, slot);
    RolloutStep<S> rec;
    rec.slot = slot;
    rec.mask.assign(point.begin(), point.end());
    rec.logp = picked.logp;
    rec.entropy = picked.entropy;
    out.steps.push_back(std::move(rec));
    out.chosen.push_back(slot);

    const int bi = slot / spb;
    const int o = slot % spb;
    const int id = env.g.box_ids[static_cast<std::size_t>(bi)];
    const Extents dims =
        oriented(env.g.dims[static_cast<std::size_t>(bi)], o, cfg.dims_mode);
    env.commit(OrientedState{id, o, dims}, strategy);
  }

  out.solution = env.finish();
  out.critic_node = net.critic_node();
  out.critic = net.critic_value();
  return out;
}

template struct PolicyParamsT<float>;
template struct PolicyParamsT<double>;
template class PolicyNet<float>;
template class PolicyNet<double>;
template Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic>
static_features<float>(const PolicyConfig&, const ProblemInstance&);
template Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>
static_features<double>(const PolicyConfig&, const ProblemInstance&);
template RolloutResult<float> rollout<float>(PolicyNet<float>&,
                                             const ProblemInstance&, Strategy,
                                             RolloutMode, Rng*,
                                             const std::vector<int>*);
template RolloutResult<double> rollout<double>(PolicyNet<double>&,
                                               const ProblemInstance&,
                                               Strategy, RolloutMode, Rng*,
                                               const std::vector<int>*);

}  // namespace tap
