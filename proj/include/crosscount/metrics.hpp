#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crosscount/error.hpp"
#include "crosscount/io.hpp"

namespace crosscount {

struct CountPair {
  int real = 0;
  int estimated = 0;

  int error() const noexcept { return estimated - real; }

  friend bool operator==(const CountPair&, const CountPair&) = default;
};

struct CdfPoint {
  int bound = 0;         // k
  double fraction = 0.0; // share of pairs with |error| <= k

  friend bool operator==(const CdfPoint&, const CdfPoint&) = default;
};

namespace detail {
inline void require_pairs(std::span<const CountPair> pairs) {
  if (pairs.empty()) fail(ErrorKind::InvalidArgument, "metric over an empty list of count pairs");
}
}  // namespace detail

// Sum of |real - estimated|.
inline long absolute_counting_error(std::span<const CountPair> pairs) {
  detail::require_pairs(pairs);
  long eps = 0;
  for (const auto& p : pairs) eps += std::abs(p.error());
  return eps;
}

inline int max_absolute_error(std::span<const CountPair> pairs) {
  detail::require_pairs(pairs);
  int mx = 0;
  for (const auto& p : pairs) mx = std::max(mx, std::abs(p.error()));
  return mx;
}

inline double exact_accuracy(std::span<const CountPair> pairs) {
  detail::require_pairs(pairs);
  std::size_t hits = 0;
  for (const auto& p : pairs) hits += p.error() == 0 ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

// Fraction within k for k = 0 .. max |error|; the last point is always 1.
inline std::vector<CdfPoint> error_cdf(std::span<const CountPair> pairs) {
  const int mx = max_absolute_error(pairs);
  std::vector<std::size_t> hist(static_cast<std::size_t>(mx) + 1, 0);
  for (const auto& p : pairs) ++hist[static_cast<std::size_t>(std::abs(p.error()))];
  std::vector<CdfPoint> out;
  std::size_t running = 0;
  for (int k = 0; k <= mx; ++k) {
    running += hist[static_cast<std::size_t>(k)];
    out.push_back({k, static_cast<double>(running) / static_cast<double>(pairs.size())});
  }
  return out;
}

inline double fraction_within(std::span<const CountPair> pairs, int k) {
  detail::require_pairs(pairs);
  std::size_t hits = 0;
  for (const auto& p : pairs) hits += std::abs(p.error()) <= k ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

struct EvalReport {
  std::vector<CountPair> pairs;
  long epsilon = 0;
  double exact = 0.0;
  std::vector<CdfPoint> cdf;

  static EvalReport from_pairs(std::vector<CountPair> pairs) {
    EvalReport r;
    r.pairs = std::move(pairs);
    r.epsilon = absolute_counting_error(r.pairs);
    r.exact = exact_accuracy(r.pairs);
    r.cdf = error_cdf(r.pairs);
    return r;
  }

  std::string to_csv() const {
    std::string out = "real,estimated,error\n";
    for (const auto& p : pairs) {
      out += std::to_string(p.real) + "," + std::to_string(p.estimated) + "," + std::to_string(p.error()) + "\n";
    }
    return out;
  }

  std::string to_table() const {
    std::string out = "  real  estimated  error\n";
    char buf[64];
    for (const auto& p : pairs) {
      std::snprintf(buf, sizeof buf, "%6d %10d %+6d\n", p.real, p.estimated, p.error());
      out += buf;
    }
    out += "epsilon (sum |error|): " + std::to_string(epsilon) + "\n";
    std::snprintf(buf, sizeof buf, "exact accuracy: %.4f\n", exact);
    out += buf;
    for (const auto& c : cdf) {
      std::snprintf(buf, sizeof buf, "P(|error| <= %d) = %.4f\n", c.bound, c.fraction);
      out += buf;
    }
    return out;
  }

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

inline EvalReport parse_eval_csv(std::string_view text) {
  const auto lines = io::lines_of(text);
  if (lines.empty() || io::trim(lines.front()) != "real,estimated,error") {
    fail(ErrorKind::Parse, "evaluation CSV must start with 'real,estimated,error'");
  }
  std::vector<CountPair> pairs;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto line = io::trim(lines[k]);
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      fail(ErrorKind::Parse, "evaluation CSV line " + std::to_string(k + 1) + " needs three fields");
    }
    CountPair p{static_cast<int>(io::parse_int(line.substr(0, c1), "real")),
                static_cast<int>(io::parse_int(line.substr(c1 + 1, c2 - c1 - 1), "estimated"))};
    if (io::parse_int(line.substr(c2 + 1), "error") != p.error()) {
      fail(ErrorKind::Parse, "evaluation CSV line " + std::to_string(k + 1) + " has an inconsistent error");
    }
    pairs.push_back(p);
  }
  return EvalReport::from_pairs(std::move(pairs));
}

}  // namespace crosscount
