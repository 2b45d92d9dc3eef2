#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "crosscount/core.hpp"
#include "oracles.hpp"

using namespace crosscount;

TEST(TimestampsToSequence, EmptyLogGivesAllZeros) {
  const auto seq = timestamps_to_sequence({}, 300);
  EXPECT_EQ(seq.size(), 300u);
  EXPECT_EQ(seq.popcount(), 0u);
}

TEST(TimestampsToSequence, CollapsesCrossingsInOneSlot) {
  const std::vector<double> times{1.2, 1.8, 7.0};
  const auto seq = timestamps_to_sequence(times, 10, 1.0);
  EXPECT_EQ(seq.ones(), (std::vector<std::size_t>{1, 7}));
}

TEST(TimestampsToSequence, BoundaryBelongsToNextSlot) {
  const std::vector<double> times{2.0};
  EXPECT_EQ(timestamps_to_sequence(times, 5).ones(), (std::vector<std::size_t>{2}));
}

TEST(TimestampsToSequence, RejectsTimesOutsideWindow) {
  const std::vector<double> late{10.0};
  const std::vector<double> early{-0.1};
  try {
    timestamps_to_sequence(late, 10);
    FAIL() << "expected an out-of-range error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfRange);
    EXPECT_NE(std::string(e.what()).find("10"), std::string::npos);
  }
  EXPECT_THROW(timestamps_to_sequence(early, 10), Error);
}

TEST(TimestampsToSequence, IdempotentUnderDuplicateCrossing) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 60.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> times(20);
    for (auto& t : times) t = u(rng);
    const auto base = timestamps_to_sequence(times, 60);
    times.push_back(times[static_cast<std::size_t>(trial) % times.size()]);
    EXPECT_EQ(timestamps_to_sequence(times, 60), base);
  }
}

TEST(SplitIntoWindows, HundredMinutesGiveTwentyWindows) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 6000.0);
  std::vector<double> times(700);
  for (auto& t : times) t = u(rng);
  const auto windows = split_into_windows(times, 6000.0, 5.0);
  ASSERT_EQ(windows.size(), 20u);
  for (const auto& w : windows) EXPECT_EQ(w.size(), 300u);
}

TEST(SplitIntoWindows, EmptyLogGivesZeroWindows) {
  const auto windows = split_into_windows({}, 600.0, 5.0);
  ASSERT_EQ(windows.size(), 2u);
  EXPECT_EQ(windows[0].popcount(), 0u);
  EXPECT_EQ(windows[1].popcount(), 0u);
}

TEST(SplitIntoWindows, RebasesToWindowStart) {
  const std::vector<double> times{330.0};
  const auto windows = split_into_windows(times, 600.0, 5.0);
  EXPECT_EQ(windows[0].popcount(), 0u);
  EXPECT_EQ(windows[1].ones(), (std::vector<std::size_t>{30}));
}

TEST(SplitIntoWindows, DropsTrailingPartialWindow) {
  const std::vector<double> times{100.0, 650.0};
  const auto windows = split_into_windows(times, 700.0, 5.0);
  ASSERT_EQ(windows.size(), 2u);
  EXPECT_DOUBLE_EQ(trailing_remainder(700.0, 5.0), 100.0);
  EXPECT_EQ(windows[0].popcount() + windows[1].popcount(), 1u);
}

TEST(SplitIntoWindows, LogShorterThanWindowIsAnError) {
  EXPECT_THROW(split_into_windows({}, 200.0, 5.0), Error);
}

// Concatenated windows match a slot-by-slot scan of the full log, and the number of set bits is
// the number of crossings minus same-slot collisions.
TEST(SplitIntoWindows, ConcatenationMatchesFullLogScan) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    std::uniform_real_distribution<double> u(0.0, 6000.0);
    std::vector<double> times(400 + 100 * trial);
    for (auto& t : times) t = u(rng);
    times.push_back(299.999);
    times.push_back(300.0);

    const auto windows = split_into_windows(times, 6000.0, 5.0);
    std::vector<int> concat;
    for (const auto& w : windows) {
      for (std::size_t i = 0; i < w.size(); ++i) concat.push_back(w[i] ? 1 : 0);
    }
    const auto full = oracle::bits_by_scan(times, 6000, 1.0);
    EXPECT_EQ(concat, full);

    std::vector<int> per_slot(6000, 0);
    for (double t : times) ++per_slot[static_cast<std::size_t>(t)];
    std::size_t collisions = 0;
    for (int c : per_slot) collisions += c > 1 ? static_cast<std::size_t>(c - 1) : 0;
    std::size_t ones = 0;
    for (const auto& w : windows) ones += w.popcount();
    EXPECT_EQ(ones, times.size() - collisions);
  }
}

TEST(WindowSlots, RequiresWholeSlots) {
  EXPECT_EQ(window_slots(5.0, 1.0), 300u);
  EXPECT_EQ(window_slots(1.0, 0.5), 120u);
  EXPECT_THROW(window_slots(1.0, 7.0), Error);
}

TEST(SlotIndex, AgreesWithHalfOpenIntervals) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  for (double slot : {1.0, 0.1, 0.3, 0.7}) {
    for (int k = 0; k < 2000; ++k) {
      const double t = u(rng);
      const auto i = slot_index(t, slot);
      EXPECT_LE(static_cast<double>(i) * slot, t);
      EXPECT_LT(t, static_cast<double>(i + 1) * slot);
    }
  }
}

TEST(RssTrace, EnforcesOrderingAndRange) {
  EXPECT_THROW(RssTrace({{0.5, -40}, {0.5, -41}}, 2.0), Error);
  EXPECT_THROW(RssTrace({{2.0, -40}}, 2.0), Error);
  EXPECT_NO_THROW(RssTrace({{0.0, -40}, {1.9, -41}}, 2.0));
}

TEST(BlockageSequence, StringRoundTripAndValidation) {
  const auto s = BlockageSequence::from_string("0110");
  EXPECT_EQ(s.to_string(), "0110");
  EXPECT_EQ(s.popcount(), 2u);
  EXPECT_THROW(BlockageSequence::from_string("01x0"), Error);
  EXPECT_THROW(BlockageSequence({0, 2}, 1.0), Error);
}
