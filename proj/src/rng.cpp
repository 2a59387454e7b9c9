#include "daml/rng.hpp"

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

namespace daml {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(seed);
  for (std::uint64_t tag : path) s = splitmix64(s ^ splitmix64(tag + 0x632BE59BD9B4E019ULL));
  return s;
}

Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(seed, path));
}

double standard_normal(Rng& rng) {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

void fill_standard_normal(Rng& rng, std::span<double> out) {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  for (double& v : out) v = dist(rng);
}

double gamma_variate(Rng& rng, double shape, double scale) {
  boost::random::gamma_distribution<double> dist(shape, scale);
  return dist(rng);
}

long long poisson_variate(Rng& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  boost::random::poisson_distribution<long long, double> dist(mean);
  return dist(rng);
}

long long binomial_variate(Rng& rng, long long n, double p) {
  if (n <= 0 || !(p > 0.0)) return 0;
  if (p >= 1.0) return n;
  boost::random::binomial_distribution<long long, double> dist(n, p);
  return dist(rng);
}

}  // namespace daml
