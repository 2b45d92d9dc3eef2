#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <string_view>

#include "crosscount/core.hpp"
#include "crosscount/error.hpp"

namespace crosscount {

// Which side of the window mean counts as a blockage.
//   attenuation: r <= mean - tau (a down pulse, the physical blockage signature)
//   elevation:   r >= mean + tau
//   deviation:   |r - mean| >= tau
enum class DetectorMode { Attenuation, Deviation, Elevation };

inline std::string_view to_string(DetectorMode m) noexcept {
  switch (m) {
    case DetectorMode::Attenuation: return "attenuation";
    case DetectorMode::Deviation: return "deviation";
    case DetectorMode::Elevation: return "elevation";
  }
  return "?";
}

inline DetectorMode parse_detector_mode(std::string_view s) {
  if (s == "attenuation") return DetectorMode::Attenuation;
  if (s == "deviation") return DetectorMode::Deviation;
  if (s == "elevation") return DetectorMode::Elevation;
  fail(ErrorKind::Config, "unknown detector mode '" + std::string(s) + "'");
}

struct DetectorParams {
  double tau = 5.0;  // dBm
  DetectorMode mode = DetectorMode::Attenuation;
  double slot_duration = 1.0;
  std::size_t w = 300;

  void validate() const {
    if (!(tau >= 0.0) || !std::isfinite(tau)) fail(ErrorKind::InvalidArgument, "detector threshold must be >= 0");
    if (w < 1) fail(ErrorKind::InvalidArgument, "detector needs at least one slot");
    if (!(slot_duration > 0.0)) fail(ErrorKind::InvalidArgument, "slot duration must be positive");
  }
};

inline double mean_rss(const RssTrace& trace) {
  if (trace.empty()) fail(ErrorKind::InvalidArgument, "mean of an empty RSS trace");
  double sum = 0.0;
  for (const auto& r : trace.readings()) sum += r.rss;
  return sum / static_cast<double>(trace.size());
}

inline bool is_blocked(double rss, double mean, double tau, DetectorMode mode) noexcept {
  switch (mode) {
    case DetectorMode::Attenuation: return rss <= mean - tau;
    case DetectorMode::Elevation: return rss >= mean + tau;
    case DetectorMode::Deviation: return std::abs(rss - mean) >= tau;
  }
  return false;
}

inline BlockageSequence detect_blockages(const RssTrace& trace, const DetectorParams& params) {
  params.validate();
  if (trace.empty()) fail(ErrorKind::InvalidArgument, "cannot detect blockages in an empty RSS trace");
  const double expected = static_cast<double>(params.w) * params.slot_duration;
  if (std::abs(trace.window_length() - expected) > 1e-9 * std::max(1.0, expected)) {
    std::ostringstream os;
    os << "trace window of " << trace.window_length() << " s does not match " << params.w << " slots of "
       << params.slot_duration << " s";
    fail(ErrorKind::Mismatch, os.str());
  }

  const double mean = mean_rss(trace);
  BlockageSequence seq(params.w, params.slot_duration);
  for (const auto& r : trace.readings()) {
    if (is_blocked(r.rss, mean, params.tau, params.mode)) {
      seq.set(std::min(slot_index(r.t, params.slot_duration), params.w - 1));
    }
  }
  return seq;
}

}  // namespace crosscount
