#pragma once

// Random streams.
//
// Two kinds of randomness are used:
//  * keyed draws, a pure function of a 64-bit key and a counter, used for
//    everything that belongs to the environment so that a vertex's offspring
//    and conductances do not depend on the order in which vertices are grown;
//  * sequential streams (std::mt19937_64) for walk steps and resampling.

#include <cstdint>
#include <random>

namespace gwrw {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t key, std::uint64_t value) noexcept {
  return mix64(key ^ mix64(value + 0x632be59bd9b4e019ULL));
}

// Maps 64 random bits to [0, 1) using the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Counter-based draw: the `counter`-th uniform attached to `key`.
constexpr double keyed_uniform(std::uint64_t key, std::uint64_t counter) noexcept {
  return to_unit(hash_combine(key, counter));
}

template <class Engine>
double uniform01(Engine& engine) {
  static_assert(Engine::min() == 0 && Engine::max() == ~std::uint64_t{0},
                "uniform01 expects a full-range 64-bit engine");
  return to_unit(engine());
}

// Uniform index in [0, n) via the multiply-shift reduction.
template <class Engine>
std::uint64_t uniform_index(Engine& engine, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine()) * n) >> 64);
}

// Stream tags keep seeds for different purposes apart.
enum class StreamTag : std::uint64_t {
  environment = 0x656e76,
  walk = 0x77616c6b,
  bootstrap = 0x626f6f74,
  sweep = 0x73776570,
  verify = 0x76726679,
};

constexpr std::uint64_t stream_seed(std::uint64_t seed, StreamTag tag, std::uint64_t index = 0) noexcept {
  return hash_combine(hash_combine(mix64(seed), static_cast<std::uint64_t>(tag)), index);
}

inline Rng make_rng(std::uint64_t seed, StreamTag tag, std::uint64_t index = 0) {
  return Rng{stream_seed(seed, tag, index)};
}

}  // namespace gwrw
