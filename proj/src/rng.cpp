#include "graphfuse/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace graphfuse {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng::result_type CounterRng::operator()() {
  const std::uint64_t key = splitmix64(seed_ ^ splitmix64(stream_ * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
  return splitmix64(key + 0x9e3779b97f4a7c15ULL * ++counter_);
}

double CounterRng::uniform() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

CounterRng CounterRng::split(std::uint64_t stream) const {
  return CounterRng(splitmix64(seed_ + 0x632be59bd9b4e019ULL * (stream_ + 1)), stream);
}

int sample_poisson(CounterRng& rng, double mean) {
  if (mean < 0.0) throw std::invalid_argument("negative Poisson mean");
  if (mean > 50.0) throw std::invalid_argument("Poisson mean too large for the inversion sampler");
  const double u = rng.uniform();
  double p = std::exp(-mean);
  double cdf = p;
  int k = 0;
  while (u > cdf && k < 1000) {
    ++k;
    p *= mean / k;
    cdf += p;
  }
  return k;
}

}  // namespace graphfuse
