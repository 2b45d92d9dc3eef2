#pragma once

// End-to-end flows: crossing log -> balanced dataset -> trained model, and labelled simulated
// windows -> detection -> prediction -> evaluation report, plus the parameter sweeps.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "crosscount/blockage.hpp"
#include "crosscount/config.hpp"
#include "crosscount/core.hpp"
#include "crosscount/io.hpp"
#include "crosscount/metrics.hpp"
#include "crosscount/nn/train.hpp"
#include "crosscount/rng.hpp"
#include "crosscount/sim.hpp"
#include "crosscount/synthesis.hpp"

namespace crosscount {

inline std::vector<BlockageSequence> originals_from_log(const io::CrossingLog& log, const SystemConfig& cfg) {
  return split_into_windows(log.times, log.duration, cfg.window_minutes, cfg.slot_duration);
}

inline LabeledDataset synthesize_from_log(const io::CrossingLog& log, const SystemConfig& cfg) {
  const auto originals = originals_from_log(log, cfg);
  return build_dataset(originals, cfg.plan());
}

// Crossing log of a single walker in `scenario` over `minutes`.
inline io::CrossingLog simulate_training_log(sim::SimScenario scenario, double minutes) {
  scenario.agents = 1;
  scenario.duration = minutes * 60.0;
  scenario.validate();
  io::CrossingLog log;
  log.duration = scenario.duration;
  log.times = sim::crossings(sim::simulate_agent(scenario, 0), scenario.los);
  return log;
}

// RSS trace of a single walker in `scenario` over `minutes`.
inline RssTrace simulate_training_trace(sim::SimScenario scenario, double minutes) {
  scenario.agents = 1;
  scenario.duration = minutes * 60.0;
  scenario.validate();
  return sim::synthesize_rss({sim::simulate_agent(scenario, 0)}, scenario);
}

// Detector output over consecutive windows of a long single-walker trace. These are the
// originals a deployed link would actually record, pulse widths and false positives included.
inline std::vector<BlockageSequence> originals_from_trace(const RssTrace& trace, const SystemConfig& cfg) {
  std::vector<BlockageSequence> out;
  for (const auto& win : split_trace(trace, cfg.window_minutes, cfg.slot_duration)) {
    out.push_back(detect_blockages(win, cfg.detector()));
  }
  return out;
}

struct TrainedCounter {
  LabeledDataset dataset;
  nn::TrainResult result;
};

inline TrainedCounter train_from_originals(const std::vector<BlockageSequence>& originals, const SystemConfig& cfg,
                                           const nn::EpochCallback& on_epoch = {}) {
  TrainedCounter out;
  out.dataset = build_dataset(originals, cfg.plan());
  out.result = nn::train(out.dataset, cfg.architecture(), cfg.hyper(), on_epoch);
  return out;
}

inline TrainedCounter train_from_log(const io::CrossingLog& log, const SystemConfig& cfg,
                                     const nn::EpochCallback& on_epoch = {}) {
  TrainedCounter out;
  out.dataset = synthesize_from_log(log, cfg);
  out.result = nn::train(out.dataset, cfg.architecture(), cfg.hyper(), on_epoch);
  return out;
}

struct EvalWindow {
  int label = 0;
  RssTrace trace;
};

// `windows_per_class` fresh simulated windows for every count 0..max_count. Each window gets its
// own scenario seed derived from (seed, count, index).
inline std::vector<EvalWindow> make_eval_windows(const sim::SimScenario& base, const SystemConfig& cfg,
                                                 int windows_per_class, std::uint64_t seed) {
  if (windows_per_class < 1) fail(ErrorKind::InvalidArgument, "need at least one evaluation window per class");
  std::vector<EvalWindow> out;
  for (int n = 0; n <= cfg.max_count; ++n) {
    for (int j = 0; j < windows_per_class; ++j) {
      sim::SimScenario sc = base;
      sc.agents = n;
      sc.duration = cfg.window_minutes * 60.0;
      Rng r = derive_rng(seed, {stream::eval, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(j)});
      sc.rng_seed = r();
      sc.validate();
      auto trajectories = sim::simulate_walk(sc);
      out.push_back({n, sim::synthesize_rss(trajectories, sc)});
    }
  }
  return out;
}

inline BlockageSequence detect_for_model(const RssTrace& trace, const nn::LstmModel& model, double tau,
                                         DetectorMode mode) {
  const double expected = static_cast<double>(model.w) * model.slot_duration;
  if (std::abs(trace.window_length() - expected) > 1e-9 * std::max(1.0, expected)) {
    std::ostringstream os;
    os << "trace covers " << trace.window_length() << " s but the model was trained on " << expected
       << " s windows";
    fail(ErrorKind::Mismatch, os.str());
  }
  return detect_blockages(trace, DetectorParams{tau, mode, model.slot_duration, model.w});
}

inline int count_people(const nn::LstmModel& model, const RssTrace& trace, double tau, DetectorMode mode) {
  return nn::predict(model, detect_for_model(trace, model, tau, mode));
}

inline EvalReport evaluate(const nn::LstmModel& model, const std::vector<EvalWindow>& windows, double tau,
                           DetectorMode mode) {
  std::vector<CountPair> pairs;
  pairs.reserve(windows.size());
  for (const auto& win : windows) pairs.push_back({win.label, count_people(model, win.trace, tau, mode)});
  return EvalReport::from_pairs(std::move(pairs));
}

struct SweepRow {
  double value = 0.0;
  long epsilon = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

inline std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "value,epsilon\n";
  for (const auto& r : rows) out += io::format_double(r.value) + "," + std::to_string(r.epsilon) + "\n";
  return out;
}

inline void check_sweep_values(std::string_view parameter, const std::vector<double>& values, double lo, double hi) {
  if (values.empty()) fail(ErrorKind::InvalidArgument, "sweep needs at least one value");
  for (double v : values) {
    if (!(v >= lo && v <= hi)) {
      std::ostringstream os;
      os << parameter << " sweep value " << v << " is outside [" << lo << ", " << hi << "]";
      fail(ErrorKind::Config, os.str());
    }
  }
}

// Re-runs detection at each threshold against a fixed model and fixed evaluation windows.
inline std::vector<SweepRow> sweep_tau(const nn::LstmModel& model, const std::vector<EvalWindow>& windows,
                                       const std::vector<double>& taus, DetectorMode mode) {
  check_sweep_values("tau", taus, 0.0, 10.0);
  std::vector<SweepRow> rows;
  for (double tau : taus) rows.push_back({tau, evaluate(model, windows, tau, mode).epsilon});
  return rows;
}

// Re-synthesizes, re-trains and re-evaluates for each window length (minutes).
inline std::vector<SweepRow> sweep_window(const io::CrossingLog& log, const sim::SimScenario& base,
                                          const SystemConfig& cfg, const std::vector<double>& minutes,
                                          int windows_per_class, std::uint64_t eval_seed) {
  check_sweep_values("window_minutes", minutes, 1.0, 5.0);
  std::vector<SweepRow> rows;
  for (double m : minutes) {
    SystemConfig c = cfg;
    c.window_minutes = m;
    c.validate();
    const auto trained = train_from_log(log, c);
    const auto windows = make_eval_windows(base, c, windows_per_class, eval_seed);
    rows.push_back({m, evaluate(trained.result.model, windows, c.tau, c.detector_mode).epsilon});
  }
  return rows;
}

}  // namespace crosscount
