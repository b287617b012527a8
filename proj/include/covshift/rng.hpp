#pragma once

#include <cstdint>

namespace covshift {

// Counter-based random stream: every draw is a pure function of
// (key, index), so results do not depend on evaluation order or threading.
class CounterRng
{
public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t key() const { return key_; }

  std::uint64_t bits(std::uint64_t index) const;

  // Uniform on the open interval (0, 1).
  double uniform(std::uint64_t index) const;

  // Standard normal via Box-Muller on two sub-counters of `index`.
  double gaussian(std::uint64_t index) const;

  CounterRng substream(std::uint64_t tag) const;

private:
  std::uint64_t key_;
};

std::uint64_t mix64(std::uint64_t x);

// hash(base, a, b) used to key per-grid-point / per-trial streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

} // namespace covshift
