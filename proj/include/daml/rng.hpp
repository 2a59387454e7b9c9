#pragma once

// Seedable random streams.
//
// Engine: std::mt19937_64. Seeds for child streams are derived from a parent
// seed and a path of integer tags with the SplitMix64 finaliser, so a stream
// for (seed, epoch, t, role) is independent of how many numbers any other
// stream consumed. Standard normals come from Boost.Random's ziggurat
// normal_distribution; uniforms use the top 53 bits of one engine draw.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace daml {

using Rng = std::mt19937_64;

// Role tags used when deriving child streams.
namespace stream {
inline constexpr std::uint64_t kInit = 0x1001;
inline constexpr std::uint64_t kEpoch = 0x1002;
inline constexpr std::uint64_t kPeriod = 0x1003;
inline constexpr std::uint64_t kSamples = 0x1004;
inline constexpr std::uint64_t kNoise = 0x1005;
inline constexpr std::uint64_t kEval = 0x1006;
inline constexpr std::uint64_t kTrial = 0x1007;
inline constexpr std::uint64_t kTruth = 0x1008;
inline constexpr std::uint64_t kData = 0x1009;
}  // namespace stream

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the child stream reached from `seed` by following `path`.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {});

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double standard_normal(Rng& rng);
void fill_standard_normal(Rng& rng, std::span<double> out);

/// Gamma(shape, scale) via Boost.Random (Marsaglia-Tsang). shape > 0.
double gamma_variate(Rng& rng, double shape, double scale);
/// Poisson(mean) via Boost.Random; mean <= 0 returns 0.
long long poisson_variate(Rng& rng, double mean);

/// Binomial(n, p) via Boost.Random (BTRD). p is clamped to [0, 1].
long long binomial_variate(Rng& rng, long long n, double p);

}  // namespace daml
