#pragma once

// Counter-based random numbers (Philox4x32-10, Salmon et al. 2011). Every
// draw is a pure function of (key, counter), so results do not depend on
// platform, thread count or call order.

#include <array>
#include <cstdint>

namespace protmeas {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key);
};

/// Sequential view of a Philox stream: key = seed, counter = (i, stream).
class CounterStream {
 public:
  explicit CounterStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
  Philox4x32::Counter buffer_{};
  int buffered_ = 0;
};

/// Seed of trial `index` under `base_seed`; distinct streams per index.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) noexcept;

}  // namespace protmeas
