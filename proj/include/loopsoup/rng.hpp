#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace loopsoup {

/// Philox4x32-10 block function. Counter and key words are little-endian halves.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer, used to derive child stream ids.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream id for a named sub-computation, e.g. derive_stream(parent, replica).
constexpr std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t k) {
  return mix64(parent ^ mix64(k + 0x632be59bd9b4e019ULL));
}

/// Hash of a short tag string, for stream derivation by experiment kind.
constexpr std::uint64_t tag_hash(const char* s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (; *s; ++s) h = (h ^ static_cast<unsigned char>(*s)) * 0x100000001b3ULL;
  return h;
}

/// Counter-based random stream. The key is the 64-bit seed; the upper half of
/// the 128-bit counter is the stream id and the lower half the block index, so
/// every (seed, stream) pair owns a disjoint, platform-independent sequence.
/// Output is the concatenation of the four words of blocks 0, 1, 2, ...
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  std::uint32_t next_u32() {
    if (pos_ == fill_) refill();
    return buf_[pos_++];
  }
  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    return lo | (static_cast<std::uint64_t>(next_u32()) << 32);
  }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }
  /// Unbiased integer in [0, n), n >= 1 (Lemire's multiply-shift with rejection).
  std::uint32_t below(std::uint32_t n) {
    std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * n;
    auto lo = static_cast<std::uint32_t>(m);
    if (lo < n) {
      const std::uint32_t threshold = static_cast<std::uint32_t>(-n) % n;
      while (lo < threshold) {
        m = static_cast<std::uint64_t>(next_u32()) * n;
        lo = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }
  bool bernoulli(double p) { return uniform() < p; }

  /// Continue the sequence into `out` (bulk path, uses the dispatched kernel).
  void fill(std::span<std::uint32_t> out);

  RngStream child(std::uint64_t k) const noexcept { return {seed_, derive_stream(stream_, k)}; }

 private:
  void refill();

  static constexpr std::size_t kMaxBlocks = 16;
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4 * kMaxBlocks> buf_{};
  std::size_t pos_ = 0;
  std::size_t fill_ = 0;
  std::size_t next_blocks_ = 1;
};

}  // namespace loopsoup
