#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "crosscount/error.hpp"

namespace crosscount {

struct RssReading {
  double t = 0.0;    // seconds since window start
  double rss = 0.0;  // dBm

  friend bool operator==(const RssReading&, const RssReading&) = default;
};

// Timestamped signal-strength readings from one link over one counting window.
class RssTrace {
 public:
  RssTrace() = default;

  RssTrace(std::vector<RssReading> readings, double window_length)
      : readings_(std::move(readings)), window_length_(window_length) {
    if (!(window_length_ > 0.0) || !std::isfinite(window_length_)) {
      fail(ErrorKind::InvalidArgument, "trace window length must be positive");
    }
    for (std::size_t j = 0; j < readings_.size(); ++j) {
      const auto& r = readings_[j];
      if (!std::isfinite(r.t) || !std::isfinite(r.rss)) {
        fail(ErrorKind::InvalidArgument, "trace reading " + std::to_string(j) + " is not finite");
      }
      if (r.t < 0.0 || r.t >= window_length_) {
        std::ostringstream os;
        os << "trace reading at t=" << r.t << " lies outside [0, " << window_length_ << ")";
        fail(ErrorKind::OutOfRange, os.str());
      }
      if (j > 0 && !(r.t > readings_[j - 1].t)) {
        std::ostringstream os;
        os << "trace timestamps must be strictly increasing (t=" << r.t << " at reading " << j << ")";
        fail(ErrorKind::InvalidArgument, os.str());
      }
    }
  }

  const std::vector<RssReading>& readings() const noexcept { return readings_; }
  double window_length() const noexcept { return window_length_; }
  std::size_t size() const noexcept { return readings_.size(); }
  bool empty() const noexcept { return readings_.empty(); }

  friend bool operator==(const RssTrace&, const RssTrace&) = default;

 private:
  std::vector<RssReading> readings_;
  double window_length_ = 0.0;
};

// Fixed-length binary stream, one bit per time slot; 1 = line of sight blocked.
class BlockageSequence {
 public:
  BlockageSequence() = default;

  explicit BlockageSequence(std::size_t w, double slot_duration = 1.0)
      : bits_(w, 0), slot_duration_(slot_duration) {
    check_slot(slot_duration_);
  }

  BlockageSequence(std::vector<std::uint8_t> bits, double slot_duration)
      : bits_(std::move(bits)), slot_duration_(slot_duration) {
    check_slot(slot_duration_);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i] > 1) {
        fail(ErrorKind::InvalidArgument, "blockage bit " + std::to_string(i) + " is not 0 or 1");
      }
    }
  }

  static BlockageSequence from_string(std::string_view text, double slot_duration = 1.0) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char ch : text) {
      if (ch != '0' && ch != '1') {
        fail(ErrorKind::Parse, "bitstring contains a character other than 0/1");
      }
      bits.push_back(static_cast<std::uint8_t>(ch - '0'));
    }
    return BlockageSequence(std::move(bits), slot_duration);
  }

  std::size_t size() const noexcept { return bits_.size(); }
  double slot_duration() const noexcept { return slot_duration_; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool value = true) { bits_.at(i) = value ? 1 : 0; }

  std::size_t popcount() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }

  std::vector<std::size_t> ones() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i]) out.push_back(i);
    }
    return out;
  }

  std::string to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i]) s[i] = '1';
    }
    return s;
  }

  friend bool operator==(const BlockageSequence&, const BlockageSequence&) = default;

 private:
  static void check_slot(double slot) {
    if (!(slot > 0.0) || !std::isfinite(slot)) {
      fail(ErrorKind::InvalidArgument, "slot duration must be positive");
    }
  }

  std::vector<std::uint8_t> bits_;
  double slot_duration_ = 1.0;
};

inline std::size_t hamming_distance(const BlockageSequence& a, const BlockageSequence& b) {
  if (a.size() != b.size()) fail(ErrorKind::Mismatch, "hamming distance of sequences of different length");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]) ? 1 : 0;
  return d;
}

enum class Origin { Collected, Superposed, Noised };

inline std::string_view to_string(Origin o) noexcept {
  switch (o) {
    case Origin::Collected: return "collected";
    case Origin::Superposed: return "superposed";
    case Origin::Noised: return "noised";
  }
  return "?";
}

struct LabeledSample {
  BlockageSequence sequence;
  int label = 0;
  Origin origin = Origin::Collected;
  // Indices into the original single-person sequences (collected/superposed).
  std::vector<std::size_t> constituents;
  // For noised samples: index within the class of the source sample and the flipped slot.
  std::optional<std::size_t> source;
  std::optional<std::size_t> flipped_bit;

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

struct LabeledDataset {
  std::vector<LabeledSample> samples;
  int max_class = 0;  // classes are 0..max_class
  std::size_t w = 0;

  std::size_t class_size(int label) const {
    return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(),
                                                  [&](const LabeledSample& s) { return s.label == label; }));
  }

  std::size_t count(int label, Origin origin) const {
    return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(), [&](const LabeledSample& s) {
      return s.label == label && s.origin == origin;
    }));
  }

  // All sequences have length w and labels lie in 0..max_class.
  void validate() const {
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const auto& s = samples[k];
      if (s.sequence.size() != w) {
        fail(ErrorKind::Mismatch, "sample " + std::to_string(k) + " has length " +
                                      std::to_string(s.sequence.size()) + ", expected " + std::to_string(w));
      }
      if (s.label < 0 || s.label > max_class) {
        fail(ErrorKind::OutOfRange, "sample " + std::to_string(k) + " has label " + std::to_string(s.label) +
                                        " outside 0.." + std::to_string(max_class));
      }
    }
  }

  bool balanced() const {
    if (max_class < 0) return false;
    for (int c = 0; c <= max_class; ++c) {
      if (class_size(c) != w + 1) return false;
    }
    return samples.size() == static_cast<std::size_t>(max_class + 1) * (w + 1);
  }

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

// Slot i covers [i*slot, (i+1)*slot). The floor estimate is corrected so the
// result agrees with the half-open comparisons exactly.
inline std::size_t slot_index(double t, double slot_duration) {
  auto i = static_cast<std::int64_t>(std::floor(t / slot_duration));
  while (static_cast<double>(i + 1) * slot_duration <= t) ++i;
  while (i > 0 && static_cast<double>(i) * slot_duration > t) --i;
  return static_cast<std::size_t>(std::max<std::int64_t>(i, 0));
}

inline std::size_t window_slots(double window_minutes, double slot_duration) {
  if (!(window_minutes > 0.0) || !(slot_duration > 0.0)) {
    fail(ErrorKind::InvalidArgument, "window length and slot duration must be positive");
  }
  const double exact = window_minutes * 60.0 / slot_duration;
  const double rounded = std::round(exact);
  if (rounded < 1.0 || std::abs(exact - rounded) > 1e-9 * std::max(1.0, exact)) {
    std::ostringstream os;
    os << "window of " << window_minutes << " min is not a whole number of " << slot_duration << " s slots";
    fail(ErrorKind::Config, os.str());
  }
  return static_cast<std::size_t>(rounded);
}

inline BlockageSequence timestamps_to_sequence(std::span<const double> crossing_times, std::size_t w,
                                               double slot_duration = 1.0) {
  BlockageSequence seq(w, slot_duration);
  const double limit = static_cast<double>(w) * slot_duration;
  for (double t : crossing_times) {
    if (!std::isfinite(t) || t < 0.0 || t >= limit) {
      std::ostringstream os;
      os << "crossing time " << t << " s lies outside the window [0, " << limit << ")";
      fail(ErrorKind::OutOfRange, os.str());
    }
    seq.set(std::min(slot_index(t, slot_duration), w - 1));
  }
  return seq;
}

// Seconds of the log that do not fill a whole window and are dropped by split_into_windows.
inline double trailing_remainder(double total_duration, double window_minutes) {
  const double window = window_minutes * 60.0;
  const double full = std::floor(total_duration / window + 1e-12);
  return std::max(0.0, total_duration - full * window);
}

inline std::vector<BlockageSequence> split_into_windows(std::span<const double> crossing_times,
                                                        double total_duration, double window_minutes,
                                                        double slot_duration = 1.0) {
  const std::size_t w = window_slots(window_minutes, slot_duration);
  const double window = static_cast<double>(w) * slot_duration;
  if (!(total_duration >= window)) {
    std::ostringstream os;
    os << "log of " << total_duration << " s is shorter than one " << window << " s window";
    fail(ErrorKind::InvalidArgument, os.str());
  }
  const auto count = static_cast<std::size_t>(std::floor(total_duration / window + 1e-12));

  std::vector<std::vector<double>> per_window(count);
  for (double t : crossing_times) {
    if (!std::isfinite(t) || t < 0.0 || t >= total_duration) {
      std::ostringstream os;
      os << "crossing time " << t << " s lies outside the log [0, " << total_duration << ")";
      fail(ErrorKind::OutOfRange, os.str());
    }
    const std::size_t k = slot_index(t, window);
    if (k >= count) continue;  // trailing partial window
    per_window[k].push_back(t - static_cast<double>(k) * window);
  }

  std::vector<BlockageSequence> out;
  out.reserve(count);
  for (auto& times : per_window) {
    // Re-basing can round a time up to exactly the window length.
    for (double& t : times) t = std::clamp(t, 0.0, std::nextafter(window, 0.0));
    out.push_back(timestamps_to_sequence(times, w, slot_duration));
  }
  return out;
}

// Consecutive whole windows of a long trace, each re-based to start at zero.
inline std::vector<RssTrace> split_trace(const RssTrace& trace, double window_minutes, double slot_duration = 1.0) {
  const double window = static_cast<double>(window_slots(window_minutes, slot_duration)) * slot_duration;
  if (!(trace.window_length() >= window)) {
    std::ostringstream os;
    os << "trace of " << trace.window_length() << " s is shorter than one " << window << " s window";
    fail(ErrorKind::InvalidArgument, os.str());
  }
  const auto count = static_cast<std::size_t>(std::floor(trace.window_length() / window + 1e-12));
  std::vector<std::vector<RssReading>> per_window(count);
  for (const auto& r : trace.readings()) {
    const std::size_t k = slot_index(r.t, window);
    if (k >= count) continue;
    const double t = std::clamp(r.t - static_cast<double>(k) * window, 0.0, std::nextafter(window, 0.0));
    if (!per_window[k].empty() && !(t > per_window[k].back().t)) continue;
    per_window[k].push_back({t, r.rss});
  }
  std::vector<RssTrace> out;
  out.reserve(count);
  for (auto& readings : per_window) out.emplace_back(std::move(readings), window);
  return out;
}

}  // namespace crosscount
