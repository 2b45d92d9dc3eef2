#pragma once

#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "crosscount/core.hpp"
#include "crosscount/error.hpp"
#include "crosscount/nn/lstm.hpp"
#include "crosscount/nn/sgdm.hpp"
#include "crosscount/rng.hpp"

namespace crosscount::nn {

struct Architecture {
  int hidden = 100;
  int classes = 11;
};

struct LstmModel {
  LstmParams params;
  std::size_t w = 0;
  double slot_duration = 1.0;
  TrainHyper hyper;  // echo of the training configuration

  int classes() const noexcept { return params.classes; }
  int hidden() const noexcept { return params.hidden; }

  friend bool operator==(const LstmModel& a, const LstmModel& b) {
    return a.params == b.params && a.w == b.w && a.slot_duration == b.slot_duration &&
           a.hyper.learning_rate == b.hyper.learning_rate && a.hyper.momentum == b.hyper.momentum &&
           a.hyper.epochs == b.hyper.epochs && a.hyper.batch_size == b.hyper.batch_size &&
           a.hyper.rng_seed == b.hyper.rng_seed && a.hyper.clip_norm == b.hyper.clip_norm;
  }
};

struct TrainResult {
  LstmModel model;
  double initial_loss = 0.0;       // mean loss of the initialized network, before any update
  std::vector<double> epoch_loss;  // mean per-sample loss seen during each epoch
};

using EpochCallback = std::function<void(int epoch, double mean_loss)>;

// Index of the largest probability; ties go to the smaller class.
inline int argmax_class(const VectorXd& probs) {
  int best = 0;
  for (Eigen::Index k = 1; k < probs.size(); ++k) {
    if (probs[k] > probs[best]) best = static_cast<int>(k);
  }
  return best;
}

inline int predict(const LstmModel& model, const BlockageSequence& sequence) {
  if (sequence.size() != model.w) {
    fail(ErrorKind::Mismatch, "sequence of length " + std::to_string(sequence.size()) +
                                  " does not match the model window of " + std::to_string(model.w) + " slots");
  }
  return argmax_class(forward(sequence, model.params));
}

inline double mean_loss(const LstmParams& params, const LabeledDataset& dataset) {
  double total = 0.0;
  for (const auto& s : dataset.samples) total += cross_entropy(forward(s.sequence, params), s.label);
  return total / static_cast<double>(dataset.samples.size());
}

inline double training_accuracy(const LstmModel& model, const LabeledDataset& dataset) {
  std::size_t hits = 0;
  for (const auto& s : dataset.samples) hits += predict(model, s.sequence) == s.label ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(dataset.samples.size());
}

inline void clip_gradient(LstmParams& grad, double max_norm) {
  double sq = 0.0;
  zip_tensors([&](const auto& t) { sq += t.squaredNorm(); }, grad);
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    zip_tensors([&](auto& t) { t *= scale; }, grad);
  }
}

// Mini-batch SGDM over a per-epoch seeded shuffle. The last partial batch is kept and
// every batch gradient is the mean of its per-sample gradients, summed in sample order.
inline TrainResult train(const LabeledDataset& dataset, const Architecture& arch, const TrainHyper& hyper,
                         const EpochCallback& on_epoch = {}) {
  hyper.validate();
  if (dataset.samples.empty()) fail(ErrorKind::InvalidArgument, "cannot train on an empty dataset");
  if (arch.hidden < 1 || arch.classes < 2) fail(ErrorKind::InvalidArgument, "degenerate architecture");
  if (dataset.max_class + 1 > arch.classes) {
    fail(ErrorKind::Mismatch, "dataset has " + std::to_string(dataset.max_class + 1) +
                                  " classes but the network only " + std::to_string(arch.classes));
  }
  dataset.validate();

  Rng init_rng = derive_rng(hyper.rng_seed, {stream::init});
  Rng shuffle_rng = derive_rng(hyper.rng_seed, {stream::shuffle});

  TrainResult result;
  LstmModel& model = result.model;
  model.params = init_params(arch.hidden, arch.classes, init_rng);
  model.w = dataset.w;
  model.slot_duration = dataset.samples.front().sequence.slot_duration();
  model.hyper = hyper;
  result.initial_loss = mean_loss(model.params, dataset);

  OptimizerState state = OptimizerState::for_params(model.params);
  const std::size_t n = dataset.samples.size();
  const auto batch = static_cast<std::size_t>(hyper.batch_size);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  LstmParams batch_grad = model.params.zeros_like();

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_total = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      zip_tensors([](auto& t) { t.setZero(); }, batch_grad);
      for (std::size_t k = start; k < end; ++k) {
        const auto& s = dataset.samples[order[k]];
        auto [g, loss] = backward_with_loss(s.sequence, s.label, model.params);
        epoch_total += loss;
        zip_tensors([](auto& acc, const auto& t) { acc += t; }, batch_grad, g);
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      zip_tensors([&](auto& t) { t *= scale; }, batch_grad);
      if (hyper.clip_norm > 0.0) clip_gradient(batch_grad, hyper.clip_norm);
      sgdm_step(model.params, batch_grad, state, hyper);
    }
    const double mean = epoch_total / static_cast<double>(n);
    result.epoch_loss.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  if (!model.params.all_finite()) fail(ErrorKind::Numeric, "training diverged to non-finite weights");
  return result;
}

}  // namespace crosscount::nn
