#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>

#include "crosscount/core.hpp"
#include "crosscount/error.hpp"
#include "crosscount/rng.hpp"

namespace crosscount::nn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Gate blocks are stacked in this order in every 4*hidden tensor.
enum Gate : int { kInput = 0, kForget = 1, kCandidate = 2, kOutput = 3 };
inline constexpr std::array<std::string_view, 4> kGateNames = {"input", "forget", "candidate", "output"};

// Weights of a single-layer LSTM with a scalar input and a softmax dense head.
// Also used for gradients and optimizer velocity, which share the same shape.
struct LstmParams {
  int hidden = 0;
  int classes = 0;
  VectorXd w_input;      // 4H    (four H x 1 gate matrices)
  MatrixXd w_recurrent;  // 4H x H
  VectorXd bias;         // 4H
  MatrixXd w_dense;      // K x H
  VectorXd b_dense;      // K

  static LstmParams zeros(int hidden, int classes) {
    if (hidden < 1 || classes < 2) {
      fail(ErrorKind::InvalidArgument, "LSTM needs hidden >= 1 and classes >= 2");
    }
    LstmParams p;
    p.hidden = hidden;
    p.classes = classes;
    p.w_input = VectorXd::Zero(4 * hidden);
    p.w_recurrent = MatrixXd::Zero(4 * hidden, hidden);
    p.bias = VectorXd::Zero(4 * hidden);
    p.w_dense = MatrixXd::Zero(classes, hidden);
    p.b_dense = VectorXd::Zero(classes);
    return p;
  }

  LstmParams zeros_like() const { return zeros(hidden, classes); }

  bool same_shape(const LstmParams& o) const noexcept {
    return hidden == o.hidden && classes == o.classes && w_input.size() == o.w_input.size() &&
           w_recurrent.rows() == o.w_recurrent.rows() && w_recurrent.cols() == o.w_recurrent.cols() &&
           bias.size() == o.bias.size() && w_dense.rows() == o.w_dense.rows() &&
           w_dense.cols() == o.w_dense.cols() && b_dense.size() == o.b_dense.size();
  }

  bool consistent() const noexcept {
    const Eigen::Index h4 = 4 * static_cast<Eigen::Index>(hidden);
    return hidden >= 1 && classes >= 2 && w_input.size() == h4 && w_recurrent.rows() == h4 &&
           w_recurrent.cols() == hidden && bias.size() == h4 && w_dense.rows() == classes &&
           w_dense.cols() == hidden && b_dense.size() == classes;
  }

  bool all_finite() const {
    return w_input.allFinite() && w_recurrent.allFinite() && bias.allFinite() && w_dense.allFinite() &&
           b_dense.allFinite();
  }

  std::size_t parameter_count() const noexcept {
    return static_cast<std::size_t>(w_input.size() + w_recurrent.size() + bias.size() + w_dense.size() +
                                    b_dense.size());
  }

  // Flat element access in the same order as zip_tensors (used by gradient checks).
  double& flat(std::size_t k) {
    auto pick = [&](auto& t) -> double* {
      if (k < static_cast<std::size_t>(t.size())) return t.data() + k;
      k -= static_cast<std::size_t>(t.size());
      return nullptr;
    };
    if (auto* p = pick(w_input)) return *p;
    if (auto* p = pick(w_recurrent)) return *p;
    if (auto* p = pick(bias)) return *p;
    if (auto* p = pick(w_dense)) return *p;
    if (auto* p = pick(b_dense)) return *p;
    fail(ErrorKind::OutOfRange, "flat parameter index out of range");
  }
  double flat(std::size_t k) const { return const_cast<LstmParams*>(this)->flat(k); }

  friend bool operator==(const LstmParams& a, const LstmParams& b) {
    return a.same_shape(b) && a.w_input == b.w_input && a.w_recurrent == b.w_recurrent && a.bias == b.bias &&
           a.w_dense == b.w_dense && a.b_dense == b.b_dense;
  }
};

// Apply f to corresponding tensors of several same-shaped parameter sets, in a fixed order.
template <typename F, typename... Ps>
void zip_tensors(F&& f, Ps&&... ps) {
  f(ps.w_input...);
  f(ps.w_recurrent...);
  f(ps.bias...);
  f(ps.w_dense...);
  f(ps.b_dense...);
}

// Uniform +-sqrt(6/(fan_in+fan_out)) per gate matrix, forget bias 1, other biases 0.
inline LstmParams init_params(int hidden, int classes, Rng& rng) {
  LstmParams p = LstmParams::zeros(hidden, classes);
  auto fill = [&](auto&& block, double fan_in, double fan_out) {
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-a, a);
    for (Eigen::Index c = 0; c < block.cols(); ++c) {
      for (Eigen::Index r = 0; r < block.rows(); ++r) block(r, c) = u(rng);
    }
  };
  for (int g = 0; g < 4; ++g) {
    fill(p.w_input.segment(g * hidden, hidden), 1.0, hidden);
    fill(p.w_recurrent.middleRows(g * hidden, hidden), hidden, hidden);
  }
  fill(p.w_dense, hidden, classes);
  p.bias.segment(kForget * hidden, hidden).setConstant(1.0);
  return p;
}

inline double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

struct LstmState {
  VectorXd h;
  VectorXd c;
};

namespace detail {

// Pre-activations -> activated gates in place.
inline void activate(Eigen::Ref<VectorXd> z, int hidden) {
  auto i = z.segment(kInput * hidden, hidden);
  auto f = z.segment(kForget * hidden, hidden);
  auto g = z.segment(kCandidate * hidden, hidden);
  auto o = z.segment(kOutput * hidden, hidden);
  i = i.unaryExpr([](double v) { return sigmoid(v); });
  f = f.unaryExpr([](double v) { return sigmoid(v); });
  g = g.array().tanh().matrix();
  o = o.unaryExpr([](double v) { return sigmoid(v); });
}

inline void check_gates(const Eigen::Ref<const VectorXd>& gates, int hidden) {
  for (int g = 0; g < 4; ++g) {
    if (!gates.segment(g * hidden, hidden).allFinite()) {
      fail(ErrorKind::Numeric, "non-finite value in LSTM " + std::string(kGateNames[g]) + " gate");
    }
  }
}

}  // namespace detail

inline LstmState lstm_step(double x, const VectorXd& h, const VectorXd& c, const LstmParams& params) {
  const int H = params.hidden;
  if (!params.consistent() || h.size() != H || c.size() != H) {
    fail(ErrorKind::Mismatch, "LSTM step with inconsistent shapes");
  }
  VectorXd z = params.bias + params.w_input * x;
  z.noalias() += params.w_recurrent * h;
  detail::activate(z, H);
  detail::check_gates(z, H);

  LstmState next;
  next.c = z.segment(kForget * H, H).cwiseProduct(c) + z.segment(kInput * H, H).cwiseProduct(z.segment(kCandidate * H, H));
  if (!next.c.allFinite()) fail(ErrorKind::Numeric, "non-finite value in LSTM cell state");
  next.h = z.segment(kOutput * H, H).cwiseProduct(next.c.array().tanh().matrix());
  return next;
}

inline VectorXd softmax(const VectorXd& logits) {
  const double mx = logits.maxCoeff();
  VectorXd e = (logits.array() - mx).exp().matrix();
  return e / e.sum();
}

// Activations kept from a forward pass for backpropagation through time.
struct ForwardCache {
  MatrixXd gates;   // 4H x T, activated
  MatrixXd cells;   // H x (T+1), column 0 is the zero initial state
  MatrixXd hiddens; // H x (T+1)
  VectorXd probs;
};

inline ForwardCache forward_cached(const BlockageSequence& sequence, const LstmParams& params) {
  if (sequence.size() < 1) fail(ErrorKind::InvalidArgument, "forward pass needs a sequence of length >= 1");
  if (!params.consistent()) fail(ErrorKind::Mismatch, "LSTM parameters have inconsistent shapes");
  const int H = params.hidden;
  const auto T = static_cast<Eigen::Index>(sequence.size());

  ForwardCache fc;
  fc.gates.resize(4 * H, T);
  fc.cells = MatrixXd::Zero(H, T + 1);
  fc.hiddens = MatrixXd::Zero(H, T + 1);
  VectorXd z(4 * H);
  for (Eigen::Index t = 0; t < T; ++t) {
    z = params.bias;
    if (sequence[static_cast<std::size_t>(t)]) z += params.w_input;
    z.noalias() += params.w_recurrent * fc.hiddens.col(t);
    detail::activate(z, H);
    detail::check_gates(z, H);
    fc.gates.col(t) = z;
    fc.cells.col(t + 1) = z.segment(kForget * H, H).cwiseProduct(fc.cells.col(t)) +
                          z.segment(kInput * H, H).cwiseProduct(z.segment(kCandidate * H, H));
    fc.hiddens.col(t + 1) = z.segment(kOutput * H, H).cwiseProduct(fc.cells.col(t + 1).array().tanh().matrix());
  }
  if (!fc.cells.col(T).allFinite()) fail(ErrorKind::Numeric, "non-finite value in LSTM cell state");
  VectorXd logits = params.b_dense;
  logits.noalias() += params.w_dense * fc.hiddens.col(T);
  fc.probs = softmax(logits);
  if (!fc.probs.allFinite()) fail(ErrorKind::Numeric, "non-finite softmax output");
  return fc;
}

inline VectorXd forward(const BlockageSequence& sequence, const LstmParams& params) {
  return forward_cached(sequence, params).probs;
}

inline constexpr double kProbabilityFloor = 1e-12;

inline double cross_entropy(const VectorXd& probs, int label) {
  if (label < 0 || label >= probs.size()) {
    fail(ErrorKind::OutOfRange, "label " + std::to_string(label) + " outside 0.." + std::to_string(probs.size() - 1));
  }
  return -std::log(std::max(probs[label], kProbabilityFloor));
}

// Gradient of cross_entropy(forward(sequence), label) with respect to every parameter.
// Returns the loss alongside.
inline std::pair<LstmParams, double> backward_with_loss(const BlockageSequence& sequence, int label,
                                                        const LstmParams& params) {
  const ForwardCache fc = forward_cached(sequence, params);
  const double loss = cross_entropy(fc.probs, label);
  const int H = params.hidden;
  const auto T = static_cast<Eigen::Index>(sequence.size());

  LstmParams grad = params.zeros_like();
  VectorXd dlogits = fc.probs;
  if (fc.probs[label] >= kProbabilityFloor) {
    dlogits[label] -= 1.0;
  } else {
    dlogits.setZero();  // the floored loss is locally constant
  }
  grad.b_dense = dlogits;
  grad.w_dense.noalias() = dlogits * fc.hiddens.col(T).transpose();

  VectorXd dh = params.w_dense.transpose() * dlogits;
  VectorXd dc = VectorXd::Zero(H);
  MatrixXd dz(4 * H, T);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    const auto gates = fc.gates.col(t);
    const auto i = gates.segment(kInput * H, H).array();
    const auto f = gates.segment(kForget * H, H).array();
    const auto g = gates.segment(kCandidate * H, H).array();
    const auto o = gates.segment(kOutput * H, H).array();
    const Eigen::ArrayXd tc = fc.cells.col(t + 1).array().tanh();
    const auto c_prev = fc.cells.col(t).array();

    dc.array() += dh.array() * o * (1.0 - tc * tc);
    auto col = dz.col(t);
    col.segment(kInput * H, H) = (dc.array() * g * i * (1.0 - i)).matrix();
    col.segment(kForget * H, H) = (dc.array() * c_prev * f * (1.0 - f)).matrix();
    col.segment(kCandidate * H, H) = (dc.array() * i * (1.0 - g * g)).matrix();
    col.segment(kOutput * H, H) = (dh.array() * tc * o * (1.0 - o)).matrix();

    dh.noalias() = params.w_recurrent.transpose() * col;
    dc.array() *= f;
  }

  VectorXd x(T);
  for (Eigen::Index t = 0; t < T; ++t) x[t] = sequence[static_cast<std::size_t>(t)] ? 1.0 : 0.0;
  grad.w_input.noalias() = dz * x;
  grad.w_recurrent.noalias() = dz * fc.hiddens.leftCols(T).transpose();
  grad.bias = dz.rowwise().sum();

  if (!grad.all_finite()) fail(ErrorKind::Numeric, "non-finite gradient");
  return {std::move(grad), loss};
}

inline LstmParams backward(const BlockageSequence& sequence, int label, const LstmParams& params) {
  return backward_with_loss(sequence, label, params).first;
}

}  // namespace crosscount::nn
