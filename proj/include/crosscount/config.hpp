#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "crosscount/blockage.hpp"
#include "crosscount/core.hpp"
#include "crosscount/error.hpp"
#include "crosscount/io.hpp"
#include "crosscount/nn/train.hpp"
#include "crosscount/sim.hpp"
#include "crosscount/synthesis.hpp"

namespace crosscount {

// System-wide parameters. Defaults are the first testbed's settings with one-second slots.
struct SystemConfig {
  double tau = 5.0;  // dBm
  double window_minutes = 5.0;
  double slot_duration = 1.0;  // s
  int max_count = 10;
  int lstm_hidden = 100;
  int epochs = 120;
  int batch_size = 15;
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::uint64_t rng_seed = 0;
  DetectorMode detector_mode = DetectorMode::Attenuation;
  double clip_norm = 0.0;

  std::size_t w() const { return window_slots(window_minutes, slot_duration); }

  void validate() const {
    auto range = [](std::string_view name, double v, double lo, double hi) {
      if (!(v >= lo && v <= hi)) {
        std::ostringstream os;
        os << name << "=" << v << " is outside [" << lo << ", " << hi << "]";
        fail(ErrorKind::Config, os.str());
      }
    };
    range("tau", tau, 0.0, 10.0);
    range("window_minutes", window_minutes, 1.0, 5.0);
    range("lstm_hidden", lstm_hidden, 10, 100);
    range("epochs", epochs, 10, 150);
    range("batch_size", batch_size, 1, 30);
    if (!(slot_duration > 0.0)) fail(ErrorKind::Config, "slot_duration must be positive");
    if (max_count < 1) fail(ErrorKind::Config, "max_count must be >= 1");
    if (!(learning_rate > 0.0)) fail(ErrorKind::Config, "learning_rate must be > 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) fail(ErrorKind::Config, "momentum must lie in [0, 1)");
    if (!(clip_norm >= 0.0)) fail(ErrorKind::Config, "clip_norm must be >= 0");
    (void)w();
  }

  DetectorParams detector() const { return DetectorParams{tau, detector_mode, slot_duration, w()}; }

  nn::TrainHyper hyper() const {
    return nn::TrainHyper{learning_rate, momentum, epochs, batch_size, rng_seed, clip_norm};
  }

  nn::Architecture architecture() const { return nn::Architecture{lstm_hidden, max_count + 1}; }

  SynthesisPlan plan() const { return SynthesisPlan{max_count, w(), slot_duration, rng_seed}; }

  friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

// Settings for the two reference deployments.
inline SystemConfig preset(std::string_view name) {
  SystemConfig c;
  if (name == "testbed1") return c;
  if (name == "testbed2") {
    c.tau = 5.5;
    c.epochs = 150;
    c.batch_size = 3;
    return c;
  }
  fail(ErrorKind::Config, "unknown preset '" + std::string(name) + "' (expected testbed1 or testbed2)");
}

namespace detail {

template <typename T>
using Setter = std::function<void(T&, const std::string&, const std::string&)>;

template <typename T>
inline void apply_key_values(T& target, const std::map<std::string, std::string>& kv,
                             const std::map<std::string, Setter<T>>& setters, std::string_view what) {
  for (const auto& [key, value] : kv) {
    auto it = setters.find(key);
    if (it == setters.end()) fail(ErrorKind::Config, "unknown " + std::string(what) + " key '" + key + "'");
    it->second(target, key, value);
  }
}

inline int to_int(const std::string& key, const std::string& v) { return static_cast<int>(io::parse_int(v, key)); }

inline std::uint64_t to_seed(const std::string& key, const std::string& v) {
  const auto s = io::parse_int(v, key);
  if (s < 0) fail(ErrorKind::Config, key + " must be non-negative");
  return static_cast<std::uint64_t>(s);
}

}  // namespace detail

// Applies key=value overrides on top of `base`; unknown keys are errors. Range checks are left
// to validate() so that command-line overrides can be applied first.
inline SystemConfig apply_config(SystemConfig base, const std::map<std::string, std::string>& kv) {
  using S = detail::Setter<SystemConfig>;
  static const std::map<std::string, S> setters = {
      {"tau", [](auto& c, auto& k, auto& v) { c.tau = io::parse_double(v, k); }},
      {"window_minutes", [](auto& c, auto& k, auto& v) { c.window_minutes = io::parse_double(v, k); }},
      {"slot_duration", [](auto& c, auto& k, auto& v) { c.slot_duration = io::parse_double(v, k); }},
      {"max_count", [](auto& c, auto& k, auto& v) { c.max_count = detail::to_int(k, v); }},
      {"lstm_hidden", [](auto& c, auto& k, auto& v) { c.lstm_hidden = detail::to_int(k, v); }},
      {"epochs", [](auto& c, auto& k, auto& v) { c.epochs = detail::to_int(k, v); }},
      {"batch_size", [](auto& c, auto& k, auto& v) { c.batch_size = detail::to_int(k, v); }},
      {"learning_rate", [](auto& c, auto& k, auto& v) { c.learning_rate = io::parse_double(v, k); }},
      {"momentum", [](auto& c, auto& k, auto& v) { c.momentum = io::parse_double(v, k); }},
      {"rng_seed", [](auto& c, auto& k, auto& v) { c.rng_seed = detail::to_seed(k, v); }},
      {"detector_mode", [](auto& c, auto&, auto& v) { c.detector_mode = parse_detector_mode(v); }},
      {"clip_norm", [](auto& c, auto& k, auto& v) { c.clip_norm = io::parse_double(v, k); }},
  };
  detail::apply_key_values(base, kv, setters, "config");
  return base;
}

inline SystemConfig parse_config(std::string_view text, SystemConfig base = {}) {
  return apply_config(std::move(base), io::parse_key_values(text));
}

inline std::string format_config(const SystemConfig& c) {
  std::string out;
  out += "tau=" + io::format_double(c.tau) + "\n";
  out += "window_minutes=" + io::format_double(c.window_minutes) + "\n";
  out += "slot_duration=" + io::format_double(c.slot_duration) + "\n";
  out += "max_count=" + std::to_string(c.max_count) + "\n";
  out += "lstm_hidden=" + std::to_string(c.lstm_hidden) + "\n";
  out += "epochs=" + std::to_string(c.epochs) + "\n";
  out += "batch_size=" + std::to_string(c.batch_size) + "\n";
  out += "learning_rate=" + io::format_double(c.learning_rate) + "\n";
  out += "momentum=" + io::format_double(c.momentum) + "\n";
  out += "rng_seed=" + std::to_string(c.rng_seed) + "\n";
  out += "detector_mode=" + std::string(to_string(c.detector_mode)) + "\n";
  out += "clip_norm=" + io::format_double(c.clip_norm) + "\n";
  return out;
}

inline sim::SimScenario apply_scenario(sim::SimScenario base, const std::map<std::string, std::string>& kv) {
  using S = detail::Setter<sim::SimScenario>;
  auto num = [](double sim::SimScenario::*field) -> S {
    return [field](sim::SimScenario& s, const std::string& k, const std::string& v) { s.*field = io::parse_double(v, k); };
  };
  static const std::map<std::string, S> setters = {
      {"room_x0", [](auto& s, auto& k, auto& v) { s.room.x0 = io::parse_double(v, k); }},
      {"room_y0", [](auto& s, auto& k, auto& v) { s.room.y0 = io::parse_double(v, k); }},
      {"room_x1", [](auto& s, auto& k, auto& v) { s.room.x1 = io::parse_double(v, k); }},
      {"room_y1", [](auto& s, auto& k, auto& v) { s.room.y1 = io::parse_double(v, k); }},
      {"los_x0", [](auto& s, auto& k, auto& v) { s.los.a.x = io::parse_double(v, k); }},
      {"los_y0", [](auto& s, auto& k, auto& v) { s.los.a.y = io::parse_double(v, k); }},
      {"los_x1", [](auto& s, auto& k, auto& v) { s.los.b.x = io::parse_double(v, k); }},
      {"los_y1", [](auto& s, auto& k, auto& v) { s.los.b.y = io::parse_double(v, k); }},
      {"agents", [](auto& s, auto& k, auto& v) { s.agents = detail::to_int(k, v); }},
      {"speed_min", num(&sim::SimScenario::speed_min)},
      {"speed_max", num(&sim::SimScenario::speed_max)},
      {"duration", num(&sim::SimScenario::duration)},
      {"baseline", [](auto& s, auto& k, auto& v) { s.rss.baseline = io::parse_double(v, k); }},
      {"multipath_sigma", [](auto& s, auto& k, auto& v) { s.rss.multipath_sigma = io::parse_double(v, k); }},
      {"pulse_depth", [](auto& s, auto& k, auto& v) { s.rss.pulse_depth = io::parse_double(v, k); }},
      {"pulse_halfwidth", [](auto& s, auto& k, auto& v) { s.rss.pulse_halfwidth = io::parse_double(v, k); }},
      {"sample_rate", [](auto& s, auto& k, auto& v) { s.rss.sample_rate = io::parse_double(v, k); }},
      {"rng_seed", [](auto& s, auto& k, auto& v) { s.rng_seed = detail::to_seed(k, v); }},
  };
  detail::apply_key_values(base, kv, setters, "scenario");
  return base;
}

inline sim::SimScenario parse_scenario(std::string_view text, sim::SimScenario base = {}) {
  return apply_scenario(std::move(base), io::parse_key_values(text));
}

inline std::string format_scenario(const sim::SimScenario& s) {
  auto f = [](double v) { return io::format_double(v); };
  std::string out;
  out += "room_x0=" + f(s.room.x0) + "\nroom_y0=" + f(s.room.y0) + "\n";
  out += "room_x1=" + f(s.room.x1) + "\nroom_y1=" + f(s.room.y1) + "\n";
  out += "los_x0=" + f(s.los.a.x) + "\nlos_y0=" + f(s.los.a.y) + "\n";
  out += "los_x1=" + f(s.los.b.x) + "\nlos_y1=" + f(s.los.b.y) + "\n";
  out += "agents=" + std::to_string(s.agents) + "\n";
  out += "speed_min=" + f(s.speed_min) + "\nspeed_max=" + f(s.speed_max) + "\n";
  out += "duration=" + f(s.duration) + "\n";
  out += "baseline=" + f(s.rss.baseline) + "\n";
  out += "multipath_sigma=" + f(s.rss.multipath_sigma) + "\n";
  out += "pulse_depth=" + f(s.rss.pulse_depth) + "\n";
  out += "pulse_halfwidth=" + f(s.rss.pulse_halfwidth) + "\n";
  out += "sample_rate=" + f(s.rss.sample_rate) + "\n";
  out += "rng_seed=" + std::to_string(s.rng_seed) + "\n";
  return out;
}

}  // namespace crosscount
