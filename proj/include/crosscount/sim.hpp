#pragma once

// Deterministic synthetic ground truth: random-waypoint walkers in a rectangular room,
// their crossings of the link's line of sight, and the RSS trace the link would report.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "crosscount/core.hpp"
#include "crosscount/error.hpp"
#include "crosscount/rng.hpp"

namespace crosscount::sim {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Segment {
  Point a;
  Point b;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct Room {
  double x0 = 0.0, y0 = 0.0, x1 = 7.0, y1 = 7.0;

  double width() const noexcept { return x1 - x0; }
  double height() const noexcept { return y1 - y0; }
  bool contains(Point p) const noexcept { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }

  friend bool operator==(const Room&, const Room&) = default;
};

struct RssModel {
  double baseline = -40.0;        // dBm
  double multipath_sigma = 1.5;   // dBm
  double pulse_depth = 8.0;       // dBm
  double pulse_halfwidth = 0.3;   // m
  double sample_rate = 20.0;      // Hz

  friend bool operator==(const RssModel&, const RssModel&) = default;
};

struct SimScenario {
  Room room;
  Segment los{{0.0, 3.5}, {7.0, 3.5}};
  int agents = 1;
  double speed_min = 0.5;  // m/s
  double speed_max = 1.5;
  double duration = 300.0;  // s
  RssModel rss;
  std::uint64_t rng_seed = 0;

  // Hard invariants; every simulation entry point checks them.
  void validate() const {
    if (!(room.width() > 0.0) || !(room.height() > 0.0)) {
      fail(ErrorKind::InvalidArgument, "degenerate room: width and height must be positive");
    }
    if (los.a == los.b) fail(ErrorKind::InvalidArgument, "line-of-sight segment has zero length");
    if (agents < 0) fail(ErrorKind::InvalidArgument, "agent count must be >= 0");
    if (!(speed_min > 0.0) || speed_max < speed_min) {
      fail(ErrorKind::InvalidArgument, "speed range needs 0 < speed_min <= speed_max");
    }
    if (!(duration > 0.0)) fail(ErrorKind::InvalidArgument, "duration must be positive");
    if (!(rss.sample_rate > 0.0)) fail(ErrorKind::InvalidArgument, "sample rate must be positive");
    if (!(rss.multipath_sigma >= 0.0) || !(rss.pulse_depth >= 0.0) || !(rss.pulse_halfwidth >= 0.0)) {
      fail(ErrorKind::InvalidArgument, "RSS model parameters must be non-negative");
    }
  }

  // Pulses must stand out of the multipath floor.
  void require_detectable() const {
    if (!(rss.pulse_depth > rss.multipath_sigma)) {
      fail(ErrorKind::Config, "pulse_depth must exceed multipath_sigma");
    }
  }

  std::size_t sample_count() const {
    return static_cast<std::size_t>(std::ceil(duration * rss.sample_rate - 1e-9));
  }
  double sample_time(std::size_t k) const { return static_cast<double>(k) / rss.sample_rate; }

  friend bool operator==(const SimScenario&, const SimScenario&) = default;
};

// One straight random-waypoint leg.
struct Leg {
  Point from;
  Point to;
  double start = 0.0;  // s
  double speed = 0.0;  // m/s

  double length() const { return std::hypot(to.x - from.x, to.y - from.y); }
  double duration() const { return length() / speed; }
};

struct Trajectory {
  std::vector<Leg> legs;
  std::vector<Point> positions;  // sampled at k / sample_rate
  double sample_rate = 0.0;

  double time(std::size_t k) const { return static_cast<double>(k) / sample_rate; }
};

inline double cross(Point o, Point a, Point b) noexcept {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline double distance_to_segment(Point p, const Segment& s) noexcept {
  const double dx = s.b.x - s.a.x;
  const double dy = s.b.y - s.a.y;
  const double len2 = dx * dx + dy * dy;
  double u = len2 > 0.0 ? ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / len2 : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  return std::hypot(p.x - (s.a.x + u * dx), p.y - (s.a.y + u * dy));
}

// Trajectory of one agent; depends only on (seed, agent index) and the scenario geometry.
inline Trajectory simulate_agent(const SimScenario& sc, int agent_index) {
  sc.validate();
  Rng rng = derive_rng(sc.rng_seed, {stream::walk, static_cast<std::uint64_t>(agent_index)});
  std::uniform_real_distribution<double> ux(sc.room.x0, sc.room.x1);
  std::uniform_real_distribution<double> uy(sc.room.y0, sc.room.y1);
  std::uniform_real_distribution<double> us(sc.speed_min, sc.speed_max);

  Trajectory tr;
  tr.sample_rate = sc.rss.sample_rate;
  Point here{ux(rng), uy(rng)};
  double clock = 0.0;
  while (clock < sc.duration) {
    Leg leg{here, {ux(rng), uy(rng)}, clock, us(rng)};
    if (leg.length() == 0.0) continue;
    clock += leg.duration();
    here = leg.to;
    tr.legs.push_back(leg);
  }

  const std::size_t n = sc.sample_count();
  tr.positions.reserve(n);
  std::size_t li = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = sc.sample_time(k);
    while (li + 1 < tr.legs.size() && tr.legs[li + 1].start <= t) ++li;
    const Leg& leg = tr.legs[li];
    const double frac = std::clamp((t - leg.start) / leg.duration(), 0.0, 1.0);
    tr.positions.push_back({leg.from.x + frac * (leg.to.x - leg.from.x), leg.from.y + frac * (leg.to.y - leg.from.y)});
  }
  return tr;
}

inline std::vector<Trajectory> simulate_walk(const SimScenario& sc) {
  sc.validate();
  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(sc.agents));
  for (int a = 0; a < sc.agents; ++a) out.push_back(simulate_agent(sc, a));
  return out;
}

// A crossing needs consecutive samples strictly on opposite sides of the supporting line and
// the step segment must meet the line-of-sight segment; the time is linearly interpolated.
inline std::vector<double> crossings(const Trajectory& tr, const Segment& los) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < tr.positions.size(); ++k) {
    const Point p0 = tr.positions[k];
    const Point p1 = tr.positions[k + 1];
    const double s0 = cross(los.a, los.b, p0);
    const double s1 = cross(los.a, los.b, p1);
    if (!((s0 < 0.0 && s1 > 0.0) || (s0 > 0.0 && s1 < 0.0))) continue;
    const double d0 = cross(p0, p1, los.a);
    const double d1 = cross(p0, p1, los.b);
    if (d0 * d1 > 0.0) continue;
    const double t0 = tr.time(k);
    const double t1 = tr.time(k + 1);
    out.push_back(t0 + (t1 - t0) * s0 / (s0 - s1));
  }
  return out;
}

// r(t) = baseline + N(0, sigma) - depth * [some agent within halfwidth of the LoS segment].
inline RssTrace synthesize_rss(const std::vector<Trajectory>& trajectories, const SimScenario& sc) {
  sc.validate();
  const std::size_t n = sc.sample_count();
  for (const auto& tr : trajectories) {
    if (tr.positions.size() != n) fail(ErrorKind::Mismatch, "trajectory sampling does not match the scenario");
  }
  Rng rng = derive_rng(sc.rng_seed, {stream::rss_noise});
  std::normal_distribution<double> noise(0.0, sc.rss.multipath_sigma > 0.0 ? sc.rss.multipath_sigma : 1.0);

  std::vector<RssReading> readings;
  readings.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    double r = sc.rss.baseline;
    if (sc.rss.multipath_sigma > 0.0) r += noise(rng);
    const bool blocked = std::any_of(trajectories.begin(), trajectories.end(), [&](const Trajectory& tr) {
      return distance_to_segment(tr.positions[k], sc.los) < sc.rss.pulse_halfwidth;
    });
    if (blocked) r -= sc.rss.pulse_depth;
    readings.push_back({sc.sample_time(k), r});
  }
  return RssTrace(std::move(readings), sc.duration);
}

struct GroundTruth {
  RssTrace trace;
  int count = 0;
  BlockageSequence truth;
  std::vector<double> crossing_times;  // all agents, sorted
  std::vector<Trajectory> trajectories;
};

inline std::size_t scenario_slots(const SimScenario& sc, double slot_duration) {
  const double exact = sc.duration / slot_duration;
  const double rounded = std::round(exact);
  if (rounded < 1.0 || std::abs(exact - rounded) > 1e-9 * std::max(1.0, exact)) {
    std::ostringstream os;
    os << "scenario duration " << sc.duration << " s is not a whole number of " << slot_duration << " s slots";
    fail(ErrorKind::Config, os.str());
  }
  return static_cast<std::size_t>(rounded);
}

inline GroundTruth generate_ground_truth(const SimScenario& sc, double slot_duration = 1.0) {
  sc.validate();
  const std::size_t w = scenario_slots(sc, slot_duration);
  GroundTruth gt;
  gt.count = sc.agents;
  gt.trajectories = simulate_walk(sc);
  for (const auto& tr : gt.trajectories) {
    const auto c = crossings(tr, sc.los);
    gt.crossing_times.insert(gt.crossing_times.end(), c.begin(), c.end());
  }
  std::sort(gt.crossing_times.begin(), gt.crossing_times.end());
  gt.truth = timestamps_to_sequence(gt.crossing_times, w, slot_duration);
  gt.trace = synthesize_rss(gt.trajectories, sc);
  return gt;
}

}  // namespace crosscount::sim
