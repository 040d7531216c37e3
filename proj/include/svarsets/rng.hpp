#pragma once

// Deterministic RNG stream derivation.
//
// Every randomized routine takes a base seed plus a path of integers
// (replication index, bootstrap draw index, retry attempt, ...) and derives
// an independent mt19937_64 stream from them.  Results are then identical
// no matter how work is scheduled across threads, because a stream depends
// only on (seed, path), never on execution order.

#include <cstdint>
#include <initializer_list>
#include <random>

#include "svarsets/common.hpp"

namespace svarsets {

using Rng = std::mt19937_64;

// splitmix64 finalizer; good avalanche behavior for seed mixing.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Collapse (seed, path) into a new base seed for a nested component that
// takes its own scalar seed (bootstrap inside a Monte Carlo replication...).
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(seed ^ 0x40490fdb3e0bULL);
  for (std::uint64_t part : path) h = mix64(h ^ part);
  return h;
}

inline Rng derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(seed ^ 0x8f1bbcdcbfa53e0bULL);
  for (std::uint64_t part : path) h = mix64(h ^ part);
  // expand into a seed sequence so the full mt19937_64 state is filled
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                    static_cast<std::uint32_t>(mix64(h)), static_cast<std::uint32_t>(mix64(h) >> 32)};
  return Rng(seq);
}

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = normal(rng);
  return out;
}

inline Vector gaussian_vector(Eigen::Index size, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector out(size);
  for (Eigen::Index i = 0; i < size; ++i) out(i) = normal(rng);
  return out;
}

}  // namespace svarsets
