#include <cmath>
#include <numbers>

#include "loopsoup/rng.hpp"
#include "loopsoup/simd/kernels.hpp"

namespace loopsoup::simd {
namespace {

void philox_fill(PhiloxBatch batch, std::size_t blocks, std::uint32_t* out) {
  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(batch.seed),
                                         static_cast<std::uint32_t>(batch.seed >> 32)};
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::uint64_t ctr = batch.first_block + b;
    const auto r = philox4x32({static_cast<std::uint32_t>(ctr), static_cast<std::uint32_t>(ctr >> 32),
                               static_cast<std::uint32_t>(batch.stream),
                               static_cast<std::uint32_t>(batch.stream >> 32)},
                              key);
    for (int w = 0; w < 4; ++w) out[4 * b + w] = r[w];
  }
}

Moments parseval_accumulate(const double* w, std::size_t count, int dim) {
  Moments m;
  for (std::size_t s = 0; s < count; ++s) {
    double z = 0.0;
    for (int i = 0; i < dim; ++i) z += std::cos(std::numbers::pi * w[i * count + s]);
    z /= dim;
    const double f = 1.0 / ((1.0 - z) * (1.0 - z));
    m.sum += f;
    m.sum_sq += f * f;
  }
  return m;
}

Moments fourier_green_accumulate(const double* w, std::size_t count, int dim, const int* x) {
  Moments m;
  for (std::size_t s = 0; s < count; ++s) {
    double z = 0.0;
    double phase = 1.0;
    for (int i = 0; i < dim; ++i) {
      const double wi = w[i * count + s];
      z += std::cos(std::numbers::pi * wi);
      if (x[i] != 0) phase *= std::cos(std::numbers::pi * wi * x[i]);
    }
    z /= dim;
    const double f = phase / (1.0 - z);
    m.sum += f;
    m.sum_sq += f * f;
  }
  return m;
}

void masked_stencil(const double* x, const double* mask, double* y, std::size_t begin,
                    std::size_t end, const std::ptrdiff_t* strides, int nstrides, double c) {
  for (std::size_t i = begin; i < end; ++i) {
    double acc = 0.0;
    for (int k = 0; k < nstrides; ++k) acc += x[i + strides[k]] + x[i - strides[k]];
    y[i] = mask[i] * (x[i] - c * acc);
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpay(const double* r, double b, double* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + b * p[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", philox_fill, parseval_accumulate,
                                 fourier_green_accumulate, masked_stencil, dot, axpy, xpay};
  return table;
}

}  // namespace loopsoup::simd
