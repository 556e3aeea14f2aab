#pragma once

#include <cstdint>
#include <limits>

namespace graphfuse {

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based generator: output i of stream s is a hash of (seed, s, i).
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed = 0, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  // Uniform in the open interval (0, 1).
  double uniform();
  CounterRng split(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

int sample_poisson(CounterRng& rng, double mean);

}  // namespace graphfuse
