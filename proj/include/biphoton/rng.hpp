// rng.hpp
// Seeded randomness with a fully pinned-down bit stream. std::mt19937_64 has
// a standardized sequence, but the standard distributions do not, so uniform,
// normal and Poisson draws are generated here explicitly. Identical seeds
// give identical samples on every platform and toolchain.

#pragma once

#include <cstdint>
#include <random>

namespace biphoton {

// SplitMix64 scramble; used to derive independent sub-seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Deterministic sub-seed for stream `index` of a run seeded with `seed`.
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index);

using Engine = std::mt19937_64;

Engine make_engine(std::uint64_t seed);

// Uniform double in the open interval (0, 1).
double uniform_open(Engine& eng);

// Standard normal via Box-Muller.
double standard_normal(Engine& eng);

// Exact Poisson sample. Knuth's product method below mean 30, Hormann's
// PTRS transformed rejection above; both O(1) amortized and exact.
std::uint64_t poisson(double mean, Engine& eng);

}  // namespace biphoton
