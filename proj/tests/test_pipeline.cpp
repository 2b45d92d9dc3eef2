#include <gtest/gtest.h>

#include "crosscount/pipeline.hpp"

using namespace crosscount;

namespace {

SystemConfig small_config() {
  SystemConfig c;
  c.window_minutes = 1.0;
  c.max_count = 2;
  c.lstm_hidden = 10;
  c.epochs = 10;
  c.batch_size = 10;
  c.rng_seed = 4;
  return c;
}

const TrainedCounter& small_counter() {
  static const TrainedCounter tc = [] {
    const auto cfg = small_config();
    sim::SimScenario sc;
    sc.rng_seed = 2;
    return train_from_originals(originals_from_trace(simulate_training_trace(sc, 10.0), cfg), cfg);
  }();
  return tc;
}

}  // namespace

TEST(SplitTrace, RebasesAndDropsPartialWindow) {
  std::vector<RssReading> r;
  for (int k = 0; k < 250; ++k) r.push_back({0.5 * k, static_cast<double>(k)});
  const auto parts = split_trace(RssTrace(r, 125.0), 1.0);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts[0].size(), 120u);
  EXPECT_EQ(parts[1].readings().front(), (RssReading{0.0, 120.0}));
  EXPECT_EQ(parts[1].window_length(), 60.0);
  EXPECT_THROW(split_trace(RssTrace(r, 125.0), 3.0), Error);
}

TEST(TrainingOriginals, OneSequencePerWindowOfTheWalk) {
  auto cfg = small_config();
  sim::SimScenario sc;
  sc.rss.multipath_sigma = 0.0;
  const auto trace = simulate_training_trace(sc, 10.0);
  const auto originals = originals_from_trace(trace, cfg);
  ASSERT_EQ(originals.size(), 10u);
  std::size_t ones = 0;
  for (const auto& o : originals) ones += o.popcount();
  std::size_t low = 0;
  for (const auto& r : trace.readings()) low += r.rss < sc.rss.baseline - 1.0;
  // Every detected slot holds at least one attenuated reading and at most 20 of them.
  EXPECT_GE(low, ones);
  EXPECT_LE(low, 20 * ones);
  EXPECT_GT(ones, 0u);
}

TEST(EvalWindows, LabelsAndDeterminism) {
  const auto cfg = small_config();
  const sim::SimScenario sc;
  const auto a = make_eval_windows(sc, cfg, 3, 17);
  const auto b = make_eval_windows(sc, cfg, 3, 17);
  ASSERT_EQ(a.size(), 9u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].label, static_cast<int>(k / 3));
    EXPECT_EQ(a[k].trace, b[k].trace);
    EXPECT_EQ(a[k].trace.window_length(), 60.0);
  }
  EXPECT_FALSE(make_eval_windows(sc, cfg, 3, 18)[4].trace == a[4].trace);
  EXPECT_THROW(make_eval_windows(sc, cfg, 0, 1), Error);
}

TEST(Evaluate, SingleValueSweepMatchesPlainEvaluation) {
  const auto& tc = small_counter();
  const auto windows = make_eval_windows(sim::SimScenario{}, small_config(), 2, 5);
  const auto report = evaluate(tc.result.model, windows, 5.0, DetectorMode::Attenuation);
  const auto rows = sweep_tau(tc.result.model, windows, {5.0}, DetectorMode::Attenuation);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].epsilon, report.epsilon);
  EXPECT_EQ(evaluate(tc.result.model, windows, 5.0, DetectorMode::Attenuation), report);
  EXPECT_EQ(format_sweep_csv(rows), "value,epsilon\n5," + std::to_string(report.epsilon) + "\n");
}

TEST(Evaluate, SweepValuesAreRangeChecked) {
  const auto& tc = small_counter();
  const auto windows = make_eval_windows(sim::SimScenario{}, small_config(), 1, 5);
  EXPECT_THROW(sweep_tau(tc.result.model, windows, {5.0, 11.0}, DetectorMode::Attenuation), Error);
  EXPECT_THROW(sweep_tau(tc.result.model, windows, {}, DetectorMode::Attenuation), Error);
  EXPECT_THROW(sweep_window({}, {}, small_config(), {0.5}, 1, 0), Error);
}

TEST(Count, RefusesTraceOfAnotherLength) {
  const auto& tc = small_counter();
  sim::SimScenario sc;
  sc.agents = 0;
  sc.duration = 120.0;
  const auto trace = sim::generate_ground_truth(sc).trace;
  try {
    count_people(tc.result.model, trace, 5.0, DetectorMode::Attenuation);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Mismatch);
  }
  sc.duration = 60.0;
  EXPECT_NO_THROW(count_people(tc.result.model, sim::generate_ground_truth(sc).trace, 5.0, DetectorMode::Attenuation));
}
