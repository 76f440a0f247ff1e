#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace loopsoup::simd {

/// Sum and sum of squares of a per-sample quantity.
struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

/// Counter block layout shared by every Philox batch: blocks `first_block`,
/// `first_block + 1`, ... of stream `stream` under key `seed`.
struct PhiloxBatch {
  std::uint64_t seed;
  std::uint64_t stream;
  std::uint64_t first_block;
};

/// Table of data-parallel kernels. Every variant must agree with the scalar
/// reference: bit-exactly for the integer kernels, to rounding for the
/// floating-point ones.
struct KernelTable {
  std::string_view name;

  /// Writes 4 * blocks words.
  void (*philox_fill)(PhiloxBatch batch, std::size_t blocks, std::uint32_t* out);

  /// `halfturns` holds `dim` rows of `count` values w in [-1, 1) (row-major by
  /// dimension). Per sample: z = mean_i cos(pi w_i); accumulates (1 - z)^-2.
  Moments (*parseval_accumulate)(const double* halfturns, std::size_t count, int dim);

  /// Same layout; accumulates prod_i cos(pi w_i x_i) / (1 - z).
  Moments (*fourier_green_accumulate)(const double* halfturns, std::size_t count, int dim,
                                      const int* offset);

  /// y[i] = mask[i] * (x[i] - c * sum_s (x[i + s] + x[i - s])) for i in [begin, end).
  void (*masked_stencil)(const double* x, const double* mask, double* y, std::size_t begin,
                         std::size_t end, const std::ptrdiff_t* strides, int nstrides, double c);

  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// p = r + b * p
  void (*xpay)(const double* r, double b, double* p, std::size_t n);
};

const KernelTable& scalar_kernels();
/// nullptr when the AVX2 variant is not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// Active table. Selection happens once: LOOPSOUP_SIMD=scalar|avx2 forces a
/// variant, otherwise the widest supported one is used.
const KernelTable& kernels();

}  // namespace loopsoup::simd
