#include <cmath>
#include <vector>

#include "doctest.h"
#include "loopsoup/distributions.hpp"
#include "loopsoup/rng.hpp"
#include "loopsoup/simd/kernels.hpp"

using namespace loopsoup;

TEST_CASE("philox4x32-10 known answers") {
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("stream output is independent of how it is consumed") {
  RngStream a(7, 11), b(7, 11);
  std::vector<std::uint32_t> bulk(1000);
  b.fill(bulk);
  for (std::uint32_t w : bulk) REQUIRE(a.next_u32() == w);
  RngStream c(7, 12);
  CHECK(c.next_u32() != RngStream(7, 11).next_u32());
}

TEST_CASE("below is in range and roughly uniform") {
  RngStream rng(1, 1);
  std::vector<int> hist(6);
  for (int i = 0; i < 60000; ++i) ++hist[rng.below(6)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
}

TEST_CASE("poisson sampler mean and variance") {
  RngStream rng(2, 3);
  for (double mean : {0.3, 5.0, 40.0}) {
    double s = 0, s2 = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
      const double v = static_cast<double>(sample_poisson(rng, mean));
      s += v;
      s2 += v * v;
    }
    const double m = s / n, var = s2 / n - m * m;
    CHECK(std::abs(m - mean) < 5.0 * std::sqrt(mean / n));
    CHECK(var == doctest::Approx(mean).epsilon(0.05));
  }
}

TEST_CASE("scalar and AVX2 kernels agree") {
  const simd::KernelTable* avx = simd::avx2_kernels();
  if (!avx) {
    MESSAGE("AVX2 variant unavailable on this host");
    return;
  }
  const simd::KernelTable& ref = simd::scalar_kernels();

  SUBCASE("philox fill bit-exact") {
    for (std::size_t blocks : {1u, 3u, 8u, 17u}) {
      std::vector<std::uint32_t> x(4 * blocks), y(4 * blocks);
      ref.philox_fill({99, 12345, 5}, blocks, x.data());
      avx->philox_fill({99, 12345, 5}, blocks, y.data());
      CHECK(x == y);
    }
  }

  RngStream rng(5, 6);
  const std::size_t n = 1003;
  const int dim = 5;
  std::vector<double> w(n * dim);
  for (double& v : w) v = 2.0 * rng.uniform() - 1.0;

  SUBCASE("parseval and fourier accumulators") {
    const auto a = ref.parseval_accumulate(w.data(), n, dim);
    const auto b = avx->parseval_accumulate(w.data(), n, dim);
    CHECK(b.sum == doctest::Approx(a.sum).epsilon(1e-12));
    CHECK(b.sum_sq == doctest::Approx(a.sum_sq).epsilon(1e-12));
    const int offset[dim] = {1, 0, 2, 0, 1};
    const auto c = ref.fourier_green_accumulate(w.data(), n, dim, offset);
    const auto e = avx->fourier_green_accumulate(w.data(), n, dim, offset);
    CHECK(e.sum == doctest::Approx(c.sum).epsilon(1e-10));
    CHECK(e.sum_sq == doctest::Approx(c.sum_sq).epsilon(1e-12));
  }

  SUBCASE("linear algebra kernels") {
    const std::size_t m = 517;
    std::vector<double> x(m), y(m), mask(m);
    for (std::size_t i = 0; i < m; ++i) {
      x[i] = rng.uniform();
      y[i] = rng.uniform();
      mask[i] = rng.uniform() < 0.8 ? 1.0 : 0.0;
    }
    CHECK(avx->dot(x.data(), y.data(), m) == doctest::Approx(ref.dot(x.data(), y.data(), m)).epsilon(1e-13));
    auto y1 = y, y2 = y;
    ref.axpy(0.37, x.data(), y1.data(), m);
    avx->axpy(0.37, x.data(), y2.data(), m);
    for (std::size_t i = 0; i < m; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));
    ref.xpay(x.data(), -0.2, y1.data(), m);
    avx->xpay(x.data(), -0.2, y2.data(), m);
    for (std::size_t i = 0; i < m; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));

    const std::ptrdiff_t strides[3] = {1, 9, 81};
    std::vector<double> o1(m, 0.0), o2(m, 0.0);
    ref.masked_stencil(x.data(), mask.data(), o1.data(), 81, m - 81, strides, 3, 1.0 / 6.0);
    avx->masked_stencil(x.data(), mask.data(), o2.data(), 81, m - 81, strides, 3, 1.0 / 6.0);
    for (std::size_t i = 0; i < m; ++i) CHECK(o1[i] == doctest::Approx(o2[i]).epsilon(1e-14));
  }
}
