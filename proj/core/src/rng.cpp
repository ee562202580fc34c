#include "protmeas/rng.hpp"

namespace protmeas {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
constexpr int kRounds = 10;

// Stream tag reserved for seed derivation.
constexpr std::uint64_t kDeriveStream = 0x5EED5EEDull;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

Philox4x32::Counter counter_of(std::uint64_t index, std::uint64_t stream) {
  return {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
}

Philox4x32::Key key_of(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
  for (int round = 0; round < kRounds; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

CounterStream::CounterStream(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(key_of(seed)), stream_(stream) {}

std::uint64_t CounterStream::next_u64() {
  if (buffered_ == 0) {
    buffer_ = Philox4x32::block(counter_of(index_++, stream_), key_);
    buffered_ = 2;
  }
  const int slot = 2 - buffered_;
  --buffered_;
  return (static_cast<std::uint64_t>(buffer_[2 * slot + 1]) << 32) | buffer_[2 * slot];
}

double CounterStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
  const auto out = Philox4x32::block(counter_of(index, kDeriveStream), key_of(base_seed));
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

}  // namespace protmeas
