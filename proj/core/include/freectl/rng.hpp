#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace freectl {

/// Purposes a stream can be drawn for. Part of the stream key, so two
/// sources on the same path never share random numbers.
enum class StreamTag : std::uint64_t {
  common_noise = 1,
  free_noise = 2,
  semicircular_proxy = 3,
  dyson_noise = 4,
  optimizer = 5,
  test_data = 6,
  user = 7,
};

/// Counter-based random stream: output k is splitmix64(key + k * gamma).
///
/// The key is a hash of (master seed, path index, tag, sub-index), so a path
/// can be replayed from its coordinates alone regardless of which thread or
/// in which order it runs. Satisfies UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t key = 0) : key_(key) {}
  static Stream derive(std::uint64_t master_seed, std::uint64_t path, StreamTag tag,
                       std::uint64_t sub = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = key_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double normal();
  void fill_normal(std::span<double> out);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace freectl
