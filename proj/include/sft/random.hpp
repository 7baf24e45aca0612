// Copyright 2026 The SFT Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small deterministic generators. SplitMix64 seeds xoshiro256**; both match
// the reference implementations bit for bit.

#ifndef SFT_RANDOM_HPP_
#define SFT_RANDOM_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

namespace sft {

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  constexpr explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t operator()() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t min() noexcept { return 0; }
  static constexpr std::uint64_t max() noexcept {
    return std::numeric_limits<std::uint64_t>::max();
  }

 private:
  std::uint64_t state_;
};

class Xoshiro256StarStar {
 public:
  using result_type = std::uint64_t;
  using State = std::array<std::uint64_t, 4>;

  constexpr explicit Xoshiro256StarStar(std::uint64_t seed) noexcept : s_{} {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm();
  }

  // State must not be all zero.
  constexpr explicit Xoshiro256StarStar(const State& state) noexcept : s_(state) {}

  // Stream for replicate `r` of a run seeded with `seed`. Depends only on
  // (seed, r), so replicates can be generated in any order or in parallel.
  static constexpr Xoshiro256StarStar for_replicate(std::uint64_t seed,
                                                     std::uint64_t r) noexcept {
    const std::uint64_t key = SplitMix64(seed)();
    return Xoshiro256StarStar(SplitMix64(key + r * 0xd1342543de82ef95ULL)());
  }

  constexpr std::uint64_t operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  [[nodiscard]] constexpr const State& state() const noexcept { return s_; }

  static constexpr std::uint64_t min() noexcept { return 0; }
  static constexpr std::uint64_t max() noexcept {
    return std::numeric_limits<std::uint64_t>::max();
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  State s_;
};

// Uniform integer in [0, bound), bound > 0. Rejection sampling, no modulo bias.
template <typename Rng>
constexpr std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) noexcept {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

// k distinct indices from [0, n) via a partial Fisher-Yates shuffle. The
// returned order is the draw order. Requires k <= n.
template <typename Rng>
std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  k = std::min(k, n);
  for (std::size_t t = 0; t < k; ++t) {
    const auto u = t + static_cast<std::size_t>(uniform_below(rng, n - t));
    std::swap(idx[t], idx[u]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace sft

#endif  // SFT_RANDOM_HPP_
