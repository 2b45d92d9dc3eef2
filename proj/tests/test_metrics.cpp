#include <gtest/gtest.h>

#include <vector>

#include "crosscount/metrics.hpp"

using namespace crosscount;

namespace {

// Real count and estimate per row of the two published result tables.
const std::vector<CountPair> kTestbed1{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 4}, {6, 4}, {7, 8}};
const std::vector<CountPair> kTestbed2{{0, 0}, {1, 2}, {2, 4}, {3, 3}, {4, 4}, {5, 6},
                                       {6, 6}, {7, 7}, {8, 9}, {9, 7}, {10, 10}};

}  // namespace

TEST(Metrics, FirstTestbedTable) {
  EXPECT_EQ(absolute_counting_error(kTestbed1), 4);
  EXPECT_EQ(max_absolute_error(kTestbed1), 2);
  EXPECT_DOUBLE_EQ(exact_accuracy(kTestbed1), 5.0 / 8.0);
  EXPECT_DOUBLE_EQ(fraction_within(kTestbed1, 1), 7.0 / 8.0);
  const auto cdf = error_cdf(kTestbed1);
  EXPECT_EQ(cdf, (std::vector<CdfPoint>{{0, 5.0 / 8.0}, {1, 7.0 / 8.0}, {2, 1.0}}));
}

TEST(Metrics, SecondTestbedTable) {
  EXPECT_EQ(absolute_counting_error(kTestbed2), 7);
  EXPECT_DOUBLE_EQ(exact_accuracy(kTestbed2), 6.0 / 11.0);
  const auto cdf = error_cdf(kTestbed2);
  ASSERT_EQ(cdf.size(), 3u);
  EXPECT_DOUBLE_EQ(cdf[2].fraction, 1.0);
  EXPECT_DOUBLE_EQ(cdf[1].fraction, 9.0 / 11.0);
}

TEST(Metrics, AllExact) {
  const std::vector<CountPair> p{{3, 3}, {0, 0}};
  EXPECT_EQ(absolute_counting_error(p), 0);
  const std::vector<CountPair> single{{4, 4}};
  EXPECT_EQ(error_cdf(single), (std::vector<CdfPoint>{{0, 1.0}}));
}

TEST(Metrics, EmptyInputIsAnError) {
  const std::vector<CountPair> none;
  EXPECT_THROW(absolute_counting_error(none), Error);
  EXPECT_THROW(exact_accuracy(none), Error);
  EXPECT_THROW(error_cdf(none), Error);
  EXPECT_THROW(EvalReport::from_pairs({}), Error);
}

TEST(EvalReport, CsvRoundTripAndInvariants) {
  const auto r = EvalReport::from_pairs(kTestbed2);
  EXPECT_EQ(r.epsilon, 7);
  const auto csv = r.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "real,estimated,error");
  EXPECT_NE(csv.find("\n9,7,-2\n"), std::string::npos);
  const auto back = parse_eval_csv(csv);
  EXPECT_EQ(back, r);
  for (std::size_t k = 1; k < r.cdf.size(); ++k) EXPECT_GE(r.cdf[k].fraction, r.cdf[k - 1].fraction);
  EXPECT_DOUBLE_EQ(r.cdf.back().fraction, 1.0);
  EXPECT_NE(r.to_table().find("epsilon (sum |error|): 7"), std::string::npos);
}

TEST(EvalReport, ParseRejectsInconsistentRows) {
  EXPECT_THROW(parse_eval_csv("real,estimated,error\n3,4,0\n"), Error);
  EXPECT_THROW(parse_eval_csv("a,b\n"), Error);
  EXPECT_THROW(parse_eval_csv("real,estimated,error\n3;4\n"), Error);
}
