#ifndef TAP_AUTODIFF_HPP
#define TAP_AUTODIFF_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "tap/core.hpp"

namespace tap {

// Reverse-mode tape over dense matrices. One tape records one forward pass;
// backward() walks the records in reverse and accumulates parameter
// gradients into caller-owned sink matrices. Scalars are 1x1 matrices.
template <typename S>
class Tape {
 public:
  using M = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  using Mask = std::vector<std::uint8_t>;

  int constant(M v) { return push(std::move(v), nullptr); }

  int scalar(S v) {
    M m(1, 1);
    m(0, 0) = v;
    return constant(std::move(m));
  }

  // Learnable leaf: value is copied in, gradients flow into *sink.
  int param(const M& v, M* sink) {
    const int id = push(v, nullptr);
    if (sink) {
      if (sink->rows() != v.rows() || sink->cols() != v.cols())
        throw ContractError("gradient sink shape mismatch");
      sinks_.push_back({id, sink});
    }
    return id;
  }

  const M& value(int id) const { return nodes_[check(id)].value; }
  const M& grad(int id) const { return nodes_[check(id)].grad; }

  int matmul(int a, int b) {
    const M& A = value(a);
    const M& B = value(b);
    if (A.cols() != B.rows()) throw ContractError("matmul shape mismatch");
    const int id = push(A * B, [this, a, b](const M& g) {
      acc(a, g * value(b).transpose());
      acc(b, value(a).transpose() * g);
    });
    return id;
  }

  int transpose(int a) {
    return push(value(a).transpose(),
                [this, a](const M& g) { acc(a, g.transpose()); });
  }

  int add(int a, int b) {
    same_shape(a, b, "add");
    return push(value(a) + value(b), [this, a, b](const M& g) {
      acc(a, g);
      acc(b, g);
    });
  }

  int sub(int a, int b) {
    same_shape(a, b, "sub");
    return push(value(a) - value(b), [this, a, b](const M& g) {
      acc(a, g);
      acc(b, -g);
    });
  }

  // A.colwise() + bias, bias is m x 1.
  int add_bias(int a, int bias) {
    const M& A = value(a);
    const M& B = value(bias);
    if (B.cols() != 1 || B.rows() != A.rows())
      throw ContractError("add_bias shape mismatch");
    return push(A.colwise() + B.col(0), [this, a, bias](const M& g) {
      acc(a, g);
      acc(bias, g.rowwise().sum());
    });
  }

  int hadamard(int a, int b) {
    same_shape(a, b, "hadamard");
    return push(value(a).cwiseProduct(value(b)), [this, a, b](const M& g) {
      acc(a, g.cwiseProduct(value(b)));
      acc(b, g.cwiseProduct(value(a)));
    });
  }

  int tanh(int a) {
    M y = value(a).array().tanh().matrix();
    const int id = push(std::move(y), nullptr);
    nodes_[static_cast<std::size_t>(id)].backward = [this, a, id](const M& g) {
      const M& y2 = value(id);
      acc(a, (g.array() * (S(1) - y2.array().square())).matrix());
    };
    return id;
  }

  int sigmoid(int a) {
    M y = (S(1) / (S(1) + (-value(a).array()).exp())).matrix();
    const int id = push(std::move(y), nullptr);
    nodes_[static_cast<std::size_t>(id)].backward = [this, a, id](const M& g) {
      const auto& y2 = value(id).array();
      acc(a, (g.array() * y2 * (S(1) - y2)).matrix());
    };
    return id;
  }

  int relu(int a) {
    return push(value(a).cwiseMax(S(0)), [this, a](const M& g) {
      acc(a, (g.array() * (value(a).array() > S(0)).template cast<S>())
                 .matrix());
    });
  }

  int scale(int a, S s) {
    return push(value(a) * s, [this, a, s](const M& g) { acc(a, g * s); });
  }

  int one_minus(int a) {
    return push((S(1) - value(a).array()).matrix(),
                [this, a](const M& g) { acc(a, -g); });
  }

  int vcat(int a, int b) {
    const M& A = value(a);
    const M& B = value(b);
    if (A.cols() != B.cols()) throw ContractError("vcat shape mismatch");
    M y(A.rows() + B.rows(), A.cols());
    y << A, B;
    return push(std::move(y), [this, a, b](const M& g) {
      acc(a, g.topRows(value(a).rows()));
      acc(b, g.bottomRows(value(b).rows()));
    });
  }

  // Column vector tiled n times.
  int replicate_cols(int a, int n) {
    const M& A = value(a);
    if (A.cols() != 1) throw ContractError("replicate_cols wants a column");
    return push(A.replicate(1, n),
                [this, a](const M& g) { acc(a, g.rowwise().sum()); });
  }

  int pick_col(int a, int j) {
    const M& A = value(a);
    if (j < 0 || j >= A.cols()) throw ContractError("pick_col out of range");
    return push(A.col(j), [this, a, j](const M& g) {
      M d = M::Zero(value(a).rows(), value(a).cols());
      d.col(j) = g;
      acc(a, d);
    });
  }

  int mean_cols(int a) {
    const M& A = value(a);
    const S inv = S(1) / static_cast<S>(A.cols());
    return push(A.rowwise().sum() * inv, [this, a, inv](const M& g) {
      acc(a, (g * inv).replicate(1, value(a).cols()));
    });
  }

  // Mean over a subset of columns (column vector result).
  int mean_cols_masked(int a, const Mask& keep) {
    const M& A = value(a);
    check_mask(keep, A.cols());
    int count = 0;
    M sum = M::Zero(A.rows(), 1);
    for (int j = 0; j < A.cols(); ++j) {
      if (!keep[static_cast<std::size_t>(j)]) continue;
      sum += A.col(j);
      ++count;
    }
    if (count == 0) throw ContractError("mean over empty column set");
    const S inv = S(1) / static_cast<S>(count);
    return push(sum * inv, [this, a, keep, inv](const M& g) {
      M d = M::Zero(value(a).rows(), value(a).cols());
      for (int j = 0; j < d.cols(); ++j)
        if (keep[static_cast<std::size_t>(j)]) d.col(j) = g * inv;
      acc(a, d);
    });
  }

  int sum_all(int a) {
    M y(1, 1);
    y(0, 0) = value(a).sum();
    return push(std::move(y), [this, a](const M& g) {
      acc(a, M::Constant(value(a).rows(), value(a).cols(), g(0, 0)));
    });
  }

  // Row-vector softmax restricted to allowed entries; masked entries are 0.
  int masked_softmax(int a, const Mask& allowed) {
    const int id = push(softmax_row(value(a), allowed), nullptr);
    nodes_[static_cast<std::size_t>(id)].backward =
        [this, a, allowed, id](const M& g) {
          const M& p = value(id);
          S dot = S(0);
          for (int j = 0; j < p.cols(); ++j)
            if (allowed[static_cast<std::size_t>(j)]) dot += g(0, j) * p(0, j);
          M d = M::Zero(1, p.cols());
          for (int j = 0; j < p.cols(); ++j)
            if (allowed[static_cast<std::size_t>(j)])
              d(0, j) = p(0, j) * (g(0, j) - dot);
          acc(a, d);
        };
    return id;
  }

  // log softmax(a)[pick] over allowed entries, as a scalar.
  int masked_log_pick(int a, const Mask& allowed, int pick) {
    const M& A = value(a);
    check_mask(allowed, A.cols());
    if (pick < 0 || pick >= A.cols() ||
        !allowed[static_cast<std::size_t>(pick)])
      throw ContractError("picked entry is masked");
    const M p = softmax_row(A, allowed);
    M y(1, 1);
    y(0, 0) = std::log(p(0, pick));
    const int id = push(std::move(y), nullptr);
    nodes_[static_cast<std::size_t>(id)].backward =
        [this, a, allowed, pick, p](const M& g) {
          M d = M::Zero(1, p.cols());
          for (int j = 0; j < p.cols(); ++j)
            if (allowed[static_cast<std::size_t>(j)])
              d(0, j) = g(0, 0) * ((j == pick ? S(1) : S(0)) - p(0, j));
          acc(a, d);
        };
    return id;
  }

  // Entropy of the masked softmax distribution, as a scalar.
  int masked_entropy(int a, const Mask& allowed) {
    const M p = softmax_row(value(a), allowed);
    S h = S(0);
    for (int j = 0; j < p.cols(); ++j)
      if (allowed[static_cast<std::size_t>(j)] && p(0, j) > S(0))
        h -= p(0, j) * std::log(p(0, j));
    M y(1, 1);
    y(0, 0) = h;
    const int id = push(std::move(y), nullptr);
    nodes_[static_cast<std::size_t>(id)].backward =
        [this, a, allowed, p, h](const M& g) {
          M d = M::Zero(1, p.cols());
          for (int j = 0; j < p.cols(); ++j)
            if (allowed[static_cast<std::size_t>(j)] && p(0, j) > S(0))
              d(0, j) = -g(0, 0) * p(0, j) * (std::log(p(0, j)) + h);
          acc(a, d);
        };
    return id;
  }

  // Seeds d(root) = 1 and accumulates into every parameter sink. The root
  // must be scalar. Gradients of intermediate nodes stay readable until the
  // next backward call.
  void backward(int root) {
    const M& r = value(root);
    if (r.rows() != 1 || r.cols() != 1)
      throw ContractError("backward root must be scalar");
    for (auto& n : nodes_) n.grad = M::Zero(n.value.rows(), n.value.cols());
    nodes_[static_cast<std::size_t>(root)].grad(0, 0) = S(1);
    for (int i = root; i >= 0; --i) {
      Node& n = nodes_[static_cast<std::size_t>(i)];
      if (n.backward && n.grad.cwiseAbs().sum() != S(0)) n.backward(n.grad);
    }
    for (const auto& [id, sink] : sinks_)
      *sink += nodes_[static_cast<std::size_t>(id)].grad;
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    M value;
    M grad;
    std::function<void(const M&)> backward;
  };

  std::vector<Node> nodes_;
  std::vector<std::pair<int, M*>> sinks_;

  std::size_t check(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size())
      throw ContractError("bad tape node id");
    return static_cast<std::size_t>(id);
  }

  void same_shape(int a, int b, const char* op) const {
    const M& A = value(a);
    const M& B = value(b);
    if (A.rows() != B.rows() || A.cols() != B.cols())
      throw ContractError(std::string(op) + " shape mismatch");
  }

  static void check_mask(const Mask& mask, Eigen::Index cols) {
    if (static_cast<Eigen::Index>(mask.size()) != cols)
      throw ContractError("mask length mismatch");
    bool any = false;
    for (auto b : mask) any = any || b != 0;
    if (!any) throw ContractError("empty mask");
  }

  static M softmax_row(const M& a, const Mask& allowed) {
    if (a.rows() != 1) throw ContractError("softmax wants a row");
    check_mask(allowed, a.cols());
    S hi = -std::numeric_limits<S>::infinity();
    for (int j = 0; j < a.cols(); ++j)
      if (allowed[static_cast<std::size_t>(j)]) hi = std::max(hi, a(0, j));
    M p = M::Zero(1, a.cols());
    S total = S(0);
    for (int j = 0; j < a.cols(); ++j) {
      if (!allowed[static_cast<std::size_t>(j)]) continue;
      const S e = std::exp(a(0, j) - hi);
      p(0, j) = e;
      total += e;
    }
    for (int j = 0; j < a.cols(); ++j) p(0, j) /= total;
    return p;
  }

  int push(M v, std::function<void(const M&)> back) {
    Node n;
    n.value = std::move(v);
    n.backward = std::move(back);
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  void acc(int id, const M& g) {
    nodes_[check(id)].grad += g;
  }
};

}  // namespace tap

#endif
