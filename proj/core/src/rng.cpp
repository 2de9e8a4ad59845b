#include "freectl/rng.hpp"

#include <boost/random/normal_distribution.hpp>

namespace freectl {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Stream Stream::derive(std::uint64_t master_seed, std::uint64_t path, StreamTag tag, std::uint64_t sub) {
  std::uint64_t k = mix64(master_seed);
  k = mix64(k ^ path);
  k = mix64(k ^ static_cast<std::uint64_t>(tag));
  k = mix64(k ^ sub);
  return Stream(k);
}

// Ziggurat sampler; stateless apart from the engine, so constructing one per
// call keeps draws a pure function of the stream counter.
double Stream::normal() {
  boost::random::normal_distribution<double> dist;
  return dist(*this);
}

void Stream::fill_normal(std::span<double> out) {
  boost::random::normal_distribution<double> dist;
  for (double& v : out) v = dist(*this);
}

}  // namespace freectl
