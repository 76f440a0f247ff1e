#include "loopsoup/rng.hpp"

#include <algorithm>

#include "loopsoup/simd/kernels.hpp"

namespace loopsoup {

namespace {
constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }
  return c;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) noexcept
    : seed_(seed), stream_(stream) {}

void RngStream::refill() {
  // Short-lived streams (one per lattice vertex in the sampler) only pay for a
  // single block; long walks ramp up to batched generation.
  const std::size_t blocks = next_blocks_;
  simd::kernels().philox_fill({seed_, stream_, block_}, blocks, buf_.data());
  block_ += blocks;
  fill_ = 4 * blocks;
  pos_ = 0;
  next_blocks_ = std::min(kMaxBlocks, 2 * next_blocks_);
}

void RngStream::fill(std::span<std::uint32_t> out) {
  std::size_t i = 0;
  while (i < out.size() && pos_ < fill_) out[i++] = buf_[pos_++];
  const std::size_t whole = (out.size() - i) / 4;
  if (whole > 0) {
    simd::kernels().philox_fill({seed_, stream_, block_}, whole, out.data() + i);
    block_ += whole;
    i += 4 * whole;
  }
  while (i < out.size()) out[i++] = next_u32();
}

}  // namespace loopsoup
