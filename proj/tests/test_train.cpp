#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "crosscount/nn/model_io.hpp"
#include "crosscount/nn/train.hpp"

using namespace crosscount;
using namespace crosscount::nn;

namespace {

// Class k carries 2k blockages at random positions; separable by count alone.
LabeledDataset counting_dataset(int classes, std::size_t w, int per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  LabeledDataset ds;
  ds.w = w;
  ds.max_class = classes - 1;
  for (int k = 0; k < classes; ++k) {
    for (int j = 0; j < per_class; ++j) {
      BlockageSequence s(w);
      std::vector<std::size_t> idx(w);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::shuffle(idx.begin(), idx.end(), rng);
      for (int b = 0; b < 2 * k; ++b) s.set(idx[static_cast<std::size_t>(b)]);
      ds.samples.push_back({s, k, Origin::Collected, {}, std::nullopt, std::nullopt});
    }
  }
  return ds;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("crosscount_test_" + name);
}

}  // namespace

TEST(Train, LearnsASmallCountingTask) {
  const auto ds = counting_dataset(3, 12, 8, 1);
  TrainHyper hyper{0.05, 0.9, 150, 4, 3, 0.0};
  const auto res = train(ds, {8, 3}, hyper);
  ASSERT_EQ(res.epoch_loss.size(), 150u);
  EXPECT_LT(res.epoch_loss.back(), res.epoch_loss.front());
  EXPECT_NEAR(res.epoch_loss.front(), std::log(3.0), 0.1 * std::log(3.0));
  EXPECT_DOUBLE_EQ(training_accuracy(res.model, ds), 1.0);
}

TEST(Train, IdenticalSeedsGiveIdenticalWeights) {
  const auto ds = counting_dataset(3, 10, 5, 2);
  TrainHyper hyper{0.01, 0.9, 5, 4, 11, 0.0};
  const auto a = train(ds, {6, 3}, hyper);
  const auto b = train(ds, {6, 3}, hyper);
  EXPECT_TRUE(a.model == b.model);
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
  hyper.rng_seed = 12;
  EXPECT_FALSE(train(ds, {6, 3}, hyper).model == a.model);
}

TEST(Train, LastPartialBatchIsUsed) {
  // 7 samples with batch 3: batches of 3, 3, 1; every sample contributes to the epoch loss.
  auto ds = counting_dataset(2, 6, 4, 3);
  ds.samples.pop_back();
  TrainHyper hyper{0.01, 0.0, 1, 3, 0, 0.0};
  const auto res = train(ds, {4, 2}, hyper);
  ASSERT_EQ(res.epoch_loss.size(), 1u);
  EXPECT_TRUE(std::isfinite(res.epoch_loss[0]));
}

TEST(Train, Errors) {
  LabeledDataset empty;
  empty.w = 5;
  empty.max_class = 1;
  EXPECT_THROW(train(empty, {4, 2}, TrainHyper{}), Error);
  const auto ds = counting_dataset(3, 6, 2, 4);
  EXPECT_THROW(train(ds, {0, 3}, TrainHyper{}), Error);
  EXPECT_THROW(train(ds, {4, 2}, TrainHyper{}), Error);
  EXPECT_THROW(train(ds, {4, 3}, TrainHyper{0.0, 0.9, 1, 1, 0, 0.0}), Error);
  EXPECT_THROW(train(ds, {4, 3}, TrainHyper{0.1, 1.0, 1, 1, 0, 0.0}), Error);
}

TEST(Predict, ZeroWeightModelPicksClassZero) {
  LstmModel m;
  m.params = LstmParams::zeros(4, 6);
  m.w = 8;
  EXPECT_EQ(predict(m, BlockageSequence::from_string("01101001")), 0);
}

TEST(Predict, TiesGoToSmallerClass) {
  VectorXd p(4);
  p << 0.1, 0.4, 0.4, 0.1;
  EXPECT_EQ(argmax_class(p), 1);
}

TEST(Predict, LengthMismatch) {
  LstmModel m;
  m.params = LstmParams::zeros(4, 3);
  m.w = 8;
  EXPECT_THROW(predict(m, BlockageSequence(9)), Error);
}

TEST(Predict, IsPure) {
  const auto ds = counting_dataset(3, 10, 3, 5);
  const auto res = train(ds, {5, 3}, TrainHyper{0.01, 0.9, 3, 3, 1, 0.0});
  const auto seq = ds.samples[4].sequence;
  const auto a = forward(seq, res.model.params);
  for (int k = 0; k < 10; ++k) EXPECT_TRUE(forward(seq, res.model.params) == a);
}

TEST(ModelIo, RoundTripIsBitExact) {
  const auto ds = counting_dataset(4, 16, 3, 6);
  const auto res = train(ds, {7, 4}, TrainHyper{0.02, 0.9, 4, 5, 8, 0.0});
  const auto path = temp_path("model.json");
  save_model(res.model, path);
  const auto loaded = load_model(path);
  EXPECT_TRUE(loaded == res.model);
  for (const auto& s : ds.samples) {
    const VectorXd a = forward(s.sequence, res.model.params);
    const VectorXd b = forward(s.sequence, loaded.params);
    for (Eigen::Index k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]);
  }
  std::filesystem::remove(path);
}

TEST(ModelIo, TruncatedFileIsAStructuredError) {
  LstmModel m;
  m.params = LstmParams::zeros(3, 3);
  m.w = 10;
  const auto text = serialize_model(m);
  try {
    deserialize_model(std::string_view(text).substr(0, text.size() / 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
  }
}

TEST(ModelIo, VersionAndDimensionChecks) {
  LstmModel m;
  m.params = LstmParams::zeros(3, 3);
  m.w = 10;
  auto j = model_to_json(m);
  j["format_version"] = 99;
  try {
    model_from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Version);
  }
  j = model_to_json(m);
  j["architecture"]["hidden"] = 4;
  try {
    model_from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Mismatch);
  }
  j = model_to_json(m);
  j["weights"]["dense_bias"] = {1.0, 2.0};
  EXPECT_THROW(model_from_json(j), Error);
  EXPECT_THROW(load_model(temp_path("does_not_exist.json")), Error);
}

TEST(ModelIo, LoadedModelRejectsWrongWindow) {
  LstmModel m;
  m.params = LstmParams::zeros(3, 5);
  m.w = 10;
  const auto loaded = deserialize_model(serialize_model(m));
  EXPECT_THROW(predict(loaded, BlockageSequence(11)), Error);
}
