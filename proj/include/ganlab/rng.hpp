#pragma once

#include <cstdint>
#include <random>

namespace ganlab {

// Deterministic random source. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard, and every distribution transform below
// is implemented here rather than with std::*_distribution (those are
// implementation defined). Same seed, same stream of draws, everywhere.
//
// Independent streams come from split(key): the child seed is
// splitmix64(seed_hash ^ (key + golden_gamma)), so streams derived with
// different keys are decorrelated and reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Child generator for an independent named stream.
  Rng split(std::uint64_t key) const;

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();

  // Uniform on (0, 1], safe as a log() argument.
  double uniform_pos();

  // Standard normal via Box-Muller; the spare draw is cached.
  double normal();

  // Uniform integer in [0, n), n > 0.
  int uniform_int(int n);

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_hash_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// SplitMix64 mixing step, also used to derive seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ganlab
