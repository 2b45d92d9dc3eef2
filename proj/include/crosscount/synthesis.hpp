#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "crosscount/core.hpp"
#include "crosscount/error.hpp"
#include "crosscount/rng.hpp"

namespace crosscount {

struct SynthesisPlan {
  int max_class = 10;  // N
  std::size_t w = 300;
  double slot_duration = 1.0;
  std::uint64_t rng_seed = 0;

  std::size_t target_per_class() const noexcept { return w + 1; }
};

// C(m, n), saturating at the largest representable value.
inline std::uint64_t binomial(std::uint64_t m, std::uint64_t n) {
  if (n > m) return 0;
  n = std::min(n, m - n);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t result = 1;
  for (std::uint64_t k = 1; k <= n; ++k) {
    // result * (m - n + k) / k is always integral; divide by the gcd first to delay overflow.
    std::uint64_t num = m - n + k;
    std::uint64_t den = k;
    const std::uint64_t g1 = std::gcd(result, den);
    result /= g1;
    den /= g1;
    num /= den;  // den now divides num
    if (result > kMax / num) return kMax;
    result *= num;
  }
  return result;
}

// Imbalanced class size when every combination is superposed; class 0 is the lone all-zeros sequence.
inline std::uint64_t unbalanced_class_size(std::uint64_t m, std::uint64_t n) {
  if (n == 0) return 1;
  return binomial(m, n);
}

inline BlockageSequence superpose(std::span<const BlockageSequence> sequences) {
  if (sequences.empty()) fail(ErrorKind::InvalidArgument, "superpose needs at least one sequence");
  BlockageSequence out(sequences.front().size(), sequences.front().slot_duration());
  for (const auto& s : sequences) {
    if (s.size() != out.size()) {
      fail(ErrorKind::Mismatch, "superpose: sequence of length " + std::to_string(s.size()) +
                                    " does not match length " + std::to_string(out.size()));
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i]) out.set(i);
    }
  }
  return out;
}

inline BlockageSequence flip_bit(const BlockageSequence& sequence, std::size_t index) {
  BlockageSequence out = sequence;
  out.set(index, !sequence[index]);
  return out;
}

inline std::size_t random_bit_index(std::size_t w, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(0, w - 1)(rng);
}

inline BlockageSequence flip_random_bit(const BlockageSequence& sequence, Rng& rng) {
  if (sequence.size() == 0) fail(ErrorKind::InvalidArgument, "cannot flip a bit of an empty sequence");
  return flip_bit(sequence, random_bit_index(sequence.size(), rng));
}

// The all-zeros sequence plus every single-bit flip of it: w + 1 samples labelled 0.
inline std::vector<LabeledSample> zero_class_set(std::size_t w, double slot_duration = 1.0) {
  if (w < 1) fail(ErrorKind::InvalidArgument, "zero class needs w >= 1");
  std::vector<LabeledSample> out;
  out.reserve(w + 1);
  const BlockageSequence zeros(w, slot_duration);
  out.push_back(LabeledSample{zeros, 0, Origin::Collected, {}, std::nullopt, std::nullopt});
  for (std::size_t i = 0; i < w; ++i) {
    out.push_back(LabeledSample{flip_bit(zeros, i), 0, Origin::Noised, {}, std::size_t{0}, i});
  }
  return out;
}

namespace detail {

// Every n-subset of {0..m-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> all_combinations(std::size_t m, std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> combo(n);
  std::iota(combo.begin(), combo.end(), std::size_t{0});
  while (true) {
    out.push_back(combo);
    std::size_t i = n;
    while (i > 0 && combo[i - 1] == m - n + (i - 1)) --i;
    if (i == 0) break;
    ++combo[i - 1];
    for (std::size_t j = i; j < n; ++j) combo[j] = combo[j - 1] + 1;
  }
  return out;
}

inline std::vector<std::size_t> random_combination(std::size_t m, std::size_t n, Rng& rng) {
  std::vector<std::size_t> pool(m);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t k = 0; k < n; ++k) {
    const auto j = std::uniform_int_distribution<std::size_t>(k, m - 1)(rng);
    std::swap(pool[k], pool[j]);
  }
  pool.resize(n);
  std::sort(pool.begin(), pool.end());
  return pool;
}

// Up to `count` distinct n-subsets of {0..m-1}, in random order.
inline std::vector<std::vector<std::size_t>> distinct_combinations(std::size_t m, std::size_t n,
                                                                   std::size_t count, Rng& rng) {
  const std::uint64_t total = binomial(m, n);
  if (total <= 4 * static_cast<std::uint64_t>(count)) {
    auto all = all_combinations(m, n);
    std::shuffle(all.begin(), all.end(), rng);
    if (all.size() > count) all.resize(count);
    return all;
  }
  // Sparse regime: rejection sampling accepts with probability >= 3/4.
  std::vector<std::vector<std::size_t>> out;
  std::set<std::vector<std::size_t>> seen;
  out.reserve(count);
  while (out.size() < count) {
    auto combo = random_combination(m, n, rng);
    if (seen.insert(combo).second) out.push_back(std::move(combo));
  }
  return out;
}

}  // namespace detail

inline std::vector<LabeledSample> balance_class(int n, std::span<const BlockageSequence> originals,
                                                const SynthesisPlan& plan, Rng& rng) {
  const std::size_t m = originals.size();
  if (n < 1 || n > plan.max_class) {
    fail(ErrorKind::OutOfRange,
         "class " + std::to_string(n) + " outside 1.." + std::to_string(plan.max_class));
  }
  if (static_cast<std::size_t>(n) > m) {
    fail(ErrorKind::InvalidArgument, "class " + std::to_string(n) + " needs " + std::to_string(n) +
                                         " distinct originals but only " + std::to_string(m) + " exist");
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (originals[k].size() != plan.w) {
      fail(ErrorKind::Mismatch, "original " + std::to_string(k) + " has length " +
                                    std::to_string(originals[k].size()) + ", expected " + std::to_string(plan.w));
    }
  }

  const std::size_t target = plan.target_per_class();
  const auto combos = detail::distinct_combinations(m, static_cast<std::size_t>(n), target, rng);

  std::vector<LabeledSample> out;
  out.reserve(target);
  std::vector<BlockageSequence> picked;
  for (const auto& combo : combos) {
    picked.clear();
    for (auto idx : combo) picked.push_back(originals[idx]);
    out.push_back(LabeledSample{superpose(picked), n, n == 1 ? Origin::Collected : Origin::Superposed, combo,
                                std::nullopt, std::nullopt});
  }

  // Combination space exhausted: noise uniformly chosen superposed samples.
  const std::size_t sources = out.size();
  while (out.size() < target) {
    const auto src = std::uniform_int_distribution<std::size_t>(0, sources - 1)(rng);
    const auto bit = random_bit_index(plan.w, rng);
    out.push_back(LabeledSample{flip_bit(out[src].sequence, bit), n, Origin::Noised, {}, src, bit});
  }
  return out;
}

inline LabeledDataset build_dataset(std::span<const BlockageSequence> originals, const SynthesisPlan& plan) {
  if (originals.empty()) fail(ErrorKind::InvalidArgument, "need at least one original sequence");
  if (plan.max_class < 1) fail(ErrorKind::InvalidArgument, "maximum count class must be >= 1");
  if (plan.w < 1) fail(ErrorKind::InvalidArgument, "sequence length must be >= 1");

  const std::size_t m = originals.size();
  if (static_cast<std::size_t>(plan.max_class) > m) {
    std::string classes;
    for (int n = static_cast<int>(m) + 1; n <= plan.max_class; ++n) {
      classes += (classes.empty() ? "" : ",") + std::to_string(n);
    }
    fail(ErrorKind::InvalidArgument, "classes {" + classes + "} need more than the " + std::to_string(m) +
                                         " available originals");
  }

  LabeledDataset ds;
  ds.max_class = plan.max_class;
  ds.w = plan.w;
  ds.samples = zero_class_set(plan.w, plan.slot_duration);
  for (int n = 1; n <= plan.max_class; ++n) {
    Rng rng = derive_rng(plan.rng_seed, {stream::synthesis, static_cast<std::uint64_t>(n)});
    auto cls = balance_class(n, originals, plan, rng);
    ds.samples.insert(ds.samples.end(), std::make_move_iterator(cls.begin()), std::make_move_iterator(cls.end()));
  }
  return ds;
}

}  // namespace crosscount
