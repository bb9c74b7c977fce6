// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BAYESROM_RANDOM_HPP
#define BAYESROM_RANDOM_HPP

#include <cstdint>
#include <random>

namespace bayesrom {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent per-task seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// seed_k = hash(base, k); order-independent so concurrent tasks stay reproducible.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k) noexcept {
  return mix_seed(mix_seed(base) ^ (k * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
}

}  // namespace bayesrom

#endif  // BAYESROM_RANDOM_HPP
