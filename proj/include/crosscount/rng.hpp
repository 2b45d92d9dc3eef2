#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace crosscount {

using Rng = std::mt19937_64;

// Independent stream for (seed, tag...) so that serial and parallel runs agree.
inline Rng derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * tags.size());
  words.push_back(static_cast<std::uint32_t>(seed));
  words.push_back(static_cast<std::uint32_t>(seed >> 32));
  for (auto t : tags) {
    words.push_back(static_cast<std::uint32_t>(t));
    words.push_back(static_cast<std::uint32_t>(t >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

// Stream tags used across modules.
namespace stream {
inline constexpr std::uint64_t synthesis = 0x5359;
inline constexpr std::uint64_t walk = 0x57414c4b;
inline constexpr std::uint64_t rss_noise = 0x525353;
inline constexpr std::uint64_t init = 0x494e4954;
inline constexpr std::uint64_t shuffle = 0x53485546;
inline constexpr std::uint64_t eval = 0x4556414c;
}  // namespace stream

}  // namespace crosscount
