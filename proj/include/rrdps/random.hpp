// Copyright (c) 2026 rrdps-sim contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "rrdps/errors.hpp"

namespace rrdps::rng {

/// splitmix64 finalizer (Vigna). Used both as a seed mixer and as the
/// per-stream generator, so every round/window gets an independent,
/// counter-derived stream that is reproducible across thread counts.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derive an independent stream seed from a base seed and up to two salts.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt_a,
                                    std::uint64_t salt_b = 0) {
  return mix64(mix64(mix64(base) ^ salt_a) ^ salt_b);
}

/// Minimal deterministic engine over the splitmix64 sequence. Satisfies
/// UniformRandomBitGenerator, so it plugs into <random> distributions.
class Engine {
 public:
  using result_type = std::uint64_t;

  explicit Engine(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

inline Engine make_engine(std::uint64_t base, std::uint64_t salt_a,
                          std::uint64_t salt_b = 0) {
  return Engine(derive_seed(base, salt_a, salt_b));
}

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Source of single random bits. Two flavours: a finite stream over
/// explicit bits (throws RandomnessExhausted when drained, never reuses
/// bits) and an unbounded seeded stream for simulation runs.
class BitStream {
 public:
  explicit BitStream(std::vector<std::uint8_t> bits)
      : fixed_(std::move(bits)), bounded_(true), engine_(0) {}

  explicit BitStream(std::uint64_t seed) : bounded_(false), engine_(seed) {}

  /// Next bit, 0 or 1.
  int next() {
    if (bounded_) {
      if (pos_ >= fixed_.size()) {
        throw RandomnessExhausted("bit stream exhausted after " +
                                  std::to_string(fixed_.size()) + " bits");
      }
      return fixed_[pos_++] ? 1 : 0;
    }
    if (avail_ == 0) {
      word_ = engine_();
      avail_ = 64;
    }
    int bit = static_cast<int>(word_ & 1u);
    word_ >>= 1;
    --avail_;
    return bit;
  }

  /// Assemble nbits (<= 63) into an unsigned value, MSB first.
  std::uint64_t next_word(int nbits) {
    std::uint64_t value = 0;
    for (int i = 0; i < nbits; ++i) {
      value = (value << 1) | static_cast<std::uint64_t>(next());
    }
    return value;
  }

 private:
  std::vector<std::uint8_t> fixed_;
  std::size_t pos_ = 0;
  bool bounded_;
  Engine engine_;
  std::uint64_t word_ = 0;
  int avail_ = 0;
};

}  // namespace rrdps::rng
