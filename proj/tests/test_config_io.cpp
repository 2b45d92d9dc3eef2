#include <gtest/gtest.h>

#include <filesystem>
#include <limits>

#include "crosscount/config.hpp"
#include "crosscount/io.hpp"

using namespace crosscount;

TEST(Config, DefaultsAndFormatRoundTrip) {
  SystemConfig c;
  EXPECT_EQ(c.w(), 300u);
  EXPECT_EQ(c.architecture().classes, 11);
  c.tau = 4.25;
  c.detector_mode = DetectorMode::Deviation;
  c.rng_seed = 123456789012345ULL;
  EXPECT_EQ(parse_config(format_config(c)), c);
}

TEST(Config, FileValuesOverrideBase) {
  const auto c = parse_config("# comment\ntau = 6\nbatch_size=3\n", preset("testbed2"));
  EXPECT_EQ(c.tau, 6.0);
  EXPECT_EQ(c.batch_size, 3);
  EXPECT_EQ(c.epochs, 150);
}

TEST(Config, UnknownKeyIsAnError) {
  try {
    parse_config("tua=5\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
    EXPECT_NE(std::string(e.what()).find("tua"), std::string::npos);
  }
  EXPECT_THROW(parse_config("tau\n"), Error);
  EXPECT_THROW(parse_config("tau=1\ntau=2\n"), Error);
  EXPECT_THROW(parse_config("tau=abc\n"), Error);
}

TEST(Config, RangesAreEnforced) {
  for (const char* text : {"tau=10.5", "tau=-1", "window_minutes=0.5", "window_minutes=6", "lstm_hidden=5",
                           "lstm_hidden=101", "epochs=9", "batch_size=31", "momentum=1", "max_count=0",
                           "window_minutes=2.5\nslot_duration=7"}) {
    EXPECT_THROW(parse_config(text).validate(), Error) << text;
  }
  EXPECT_NO_THROW(parse_config("tau=0\nwindow_minutes=1\nlstm_hidden=10\nepochs=10\nbatch_size=30").validate());
}

TEST(Config, Presets) {
  EXPECT_EQ(preset("testbed1"), SystemConfig{});
  const auto t2 = preset("testbed2");
  EXPECT_EQ(t2.tau, 5.5);
  EXPECT_EQ(t2.batch_size, 3);
  EXPECT_THROW(preset("testbed3"), Error);
}

TEST(Scenario, FormatRoundTrip) {
  sim::SimScenario s;
  s.room = {-1.5, 0, 4, 9.25};
  s.los = {{-1.5, 2}, {4, 3}};
  s.agents = 4;
  s.rss.multipath_sigma = 0.0;
  s.rng_seed = 42;
  EXPECT_EQ(parse_scenario(format_scenario(s)), s);
  EXPECT_THROW(parse_scenario("walls=3\n"), Error);
}

TEST(Io, DoubleFormattingRoundTrips) {
  for (double v : {0.0, -40.123456789, 1e-300, 0.1, 299.99999999999994, 1.0 / 3.0}) {
    EXPECT_EQ(io::parse_double(io::format_double(v), "v"), v);
  }
  EXPECT_THROW(io::parse_double("1.5x", "v"), Error);
  EXPECT_THROW(io::parse_double("", "v"), Error);
}

TEST(Io, CrossingLogRoundTrip) {
  io::CrossingLog log{600.0, {0.5, 17.25, 599.875}};
  EXPECT_EQ(io::parse_crossing_log(io::format_crossing_log(log)), log);
  EXPECT_THROW(io::parse_crossing_log("0.5\n1.0\n"), Error);
  EXPECT_THROW(io::parse_crossing_log("# duration_s=10\nfoo\n"), Error);
}

TEST(Io, RssTraceRoundTrip) {
  const RssTrace tr({{0.0, -40.5}, {0.05, -41.0}, {2.95, -48.125}}, 3.0);
  EXPECT_EQ(io::parse_rss_trace(io::format_rss_trace(tr)), tr);
  EXPECT_THROW(io::parse_rss_trace("# window_s=3\n1.0,-40\n0.5,-40\n"), Error);
  EXPECT_THROW(io::parse_rss_trace("# window_s=3\n4.0,-40\n"), Error);
  EXPECT_THROW(io::parse_rss_trace("# window_s=3\n1.0 -40\n"), Error);
}

TEST(Io, SequenceFile) {
  const auto rows = io::parse_sequence_file("0,000\n1,010\n# note\n1,110\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[2].sequence.to_string(), "110");
  EXPECT_THROW(io::parse_sequence_file("0,000\n1,01\n"), Error);
  EXPECT_THROW(io::parse_sequence_file("0,0a0\n"), Error);
  EXPECT_THROW(io::parse_sequence_file("-1,000\n"), Error);
  EXPECT_THROW(io::dataset_from_sequences(io::parse_sequence_file("0,000\n1,010\n1,110\n")), Error);
}

TEST(Io, AtomicWriteLeavesNoTemporary) {
  const auto path = std::filesystem::temp_directory_path() / "crosscount_atomic.txt";
  io::write_file_atomic(path, "one\n");
  io::write_file_atomic(path, "two\n");
  EXPECT_EQ(io::read_file(path), "two\n");
  EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  std::filesystem::remove(path);
  EXPECT_THROW(io::read_file(path), Error);
}
