#include "covshift/rng.hpp"

#include <cmath>
#include <numbers>

namespace covshift {

std::uint64_t mix64(std::uint64_t x)
{
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b)
{
  return mix64(mix64(mix64(base) ^ (a + 0x632be59bd9b4e019ULL)) ^ (b + 0x85157af5ULL));
}

std::uint64_t CounterRng::bits(std::uint64_t index) const
{
  return mix64(key_ ^ mix64(index));
}

double CounterRng::uniform(std::uint64_t index) const
{
  // 53 random bits, shifted off zero.
  return (static_cast<double>(bits(index) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::gaussian(std::uint64_t index) const
{
  const double u1 = uniform(2 * index);
  const double u2 = uniform(2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

CounterRng CounterRng::substream(std::uint64_t tag) const
{
  return CounterRng(derive_seed(key_, tag));
}

} // namespace covshift
