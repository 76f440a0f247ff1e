#include <immintrin.h>

#include <array>
#include <numbers>

#include "loopsoup/simd/kernels.hpp"

namespace loopsoup::simd {
namespace {

inline void mulhilo(__m256i a, __m256i m, __m256i& hi, __m256i& lo) {
  const __m256i even = _mm256_mul_epu32(a, m);
  const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), m);
  lo = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0xAA);
  hi = _mm256_blend_epi32(_mm256_srli_epi64(even, 32), odd, 0xAA);
}

void philox_fill(PhiloxBatch batch, std::size_t blocks, std::uint32_t* out) {
  const __m256i m0 = _mm256_set1_epi32(static_cast<int>(0xD2511F53u));
  const __m256i m1 = _mm256_set1_epi32(static_cast<int>(0xCD9E8D57u));
  const __m256i w0 = _mm256_set1_epi32(static_cast<int>(0x9E3779B9u));
  const __m256i w1 = _mm256_set1_epi32(static_cast<int>(0xBB67AE85u));
  const __m256i s_lo = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(batch.stream)));
  const __m256i s_hi = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(batch.stream >> 32)));
  const __m256i key0 = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(batch.seed)));
  const __m256i key1 = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(batch.seed >> 32)));

  std::size_t b = 0;
  alignas(32) std::array<std::uint32_t, 8> lo_words, hi_words;
  alignas(32) std::array<std::uint32_t, 8> r0, r1, r2, r3;
  for (; b + 8 <= blocks; b += 8) {
    for (int l = 0; l < 8; ++l) {
      const std::uint64_t ctr = batch.first_block + b + l;
      lo_words[l] = static_cast<std::uint32_t>(ctr);
      hi_words[l] = static_cast<std::uint32_t>(ctr >> 32);
    }
    __m256i c0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(lo_words.data()));
    __m256i c1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(hi_words.data()));
    __m256i c2 = s_lo;
    __m256i c3 = s_hi;
    __m256i k0 = key0;
    __m256i k1 = key1;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k0 = _mm256_add_epi32(k0, w0);
        k1 = _mm256_add_epi32(k1, w1);
      }
      __m256i hi0, lo0, hi1, lo1;
      mulhilo(c0, m0, hi0, lo0);
      mulhilo(c2, m1, hi1, lo1);
      c0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), k0);
      c1 = lo1;
      c2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), k1);
      c3 = lo0;
    }
    _mm256_store_si256(reinterpret_cast<__m256i*>(r0.data()), c0);
    _mm256_store_si256(reinterpret_cast<__m256i*>(r1.data()), c1);
    _mm256_store_si256(reinterpret_cast<__m256i*>(r2.data()), c2);
    _mm256_store_si256(reinterpret_cast<__m256i*>(r3.data()), c3);
    std::uint32_t* o = out + 4 * b;
    for (int l = 0; l < 8; ++l) {
      o[4 * l + 0] = r0[l];
      o[4 * l + 1] = r1[l];
      o[4 * l + 2] = r2[l];
      o[4 * l + 3] = r3[l];
    }
  }
  if (b < blocks) {
    scalar_kernels().philox_fill({batch.seed, batch.stream, batch.first_block + b}, blocks - b,
                                 out + 4 * b);
  }
}

// cos(pi * r) with the argument reduced in half-turns, so the reduction is exact.
inline __m256d cos_halfturns(__m256d r) {
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d quarter = _mm256_set1_pd(0.25);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);

  const __m256d q = _mm256_round_pd(_mm256_mul_pd(r, half), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  r = _mm256_fnmadd_pd(two, q, r);
  __m256d a = _mm256_andnot_pd(sign_mask, r);
  const __m256d flip = _mm256_cmp_pd(a, half, _CMP_GT_OQ);
  a = _mm256_blendv_pd(a, _mm256_sub_pd(one, a), flip);
  const __m256d use_sin = _mm256_cmp_pd(a, quarter, _CMP_GT_OQ);
  const __m256d b = _mm256_blendv_pd(a, _mm256_sub_pd(half, a), use_sin);

  const __m256d y = _mm256_mul_pd(_mm256_set1_pd(std::numbers::pi), b);
  const __m256d z = _mm256_mul_pd(y, y);

  __m256d ps = _mm256_set1_pd(1.58962301576546568060E-10);
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(-2.50507477628578072866E-8));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(2.75573136213857245213E-6));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(-1.98412698295895385996E-4));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(8.33333333332211858878E-3));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(-1.66666666666666307295E-1));
  const __m256d s = _mm256_fmadd_pd(_mm256_mul_pd(y, z), ps, y);

  __m256d pc = _mm256_set1_pd(-1.13585365213876817300E-11);
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(2.08757008419747316778E-9));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(-2.75573141792967388112E-7));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(2.48015872888517045348E-5));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(-1.38888888888730564116E-3));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(4.16666666666665929218E-2));
  const __m256d c = _mm256_fmadd_pd(_mm256_mul_pd(z, z), pc, _mm256_fnmadd_pd(half, z, one));

  const __m256d v = _mm256_blendv_pd(c, s, use_sin);
  return _mm256_xor_pd(v, _mm256_and_pd(flip, sign_mask));
}

inline double cos_halfturns1(double r) {
  alignas(32) double t[4];
  _mm256_store_pd(t, cos_halfturns(_mm256_set1_pd(r)));
  return t[0];
}

inline double hsum(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return (t[0] + t[1]) + (t[2] + t[3]);
}

Moments parseval_accumulate(const double* w, std::size_t count, int dim) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d inv_dim = _mm256_set1_pd(1.0 / dim);
  __m256d sum = _mm256_setzero_pd();
  __m256d sum_sq = _mm256_setzero_pd();
  std::size_t s = 0;
  for (; s + 4 <= count; s += 4) {
    __m256d z = _mm256_setzero_pd();
    for (int i = 0; i < dim; ++i) z = _mm256_add_pd(z, cos_halfturns(_mm256_loadu_pd(w + i * count + s)));
    const __m256d g = _mm256_sub_pd(one, _mm256_mul_pd(z, inv_dim));
    const __m256d f = _mm256_div_pd(one, _mm256_mul_pd(g, g));
    sum = _mm256_add_pd(sum, f);
    sum_sq = _mm256_fmadd_pd(f, f, sum_sq);
  }
  Moments m{hsum(sum), hsum(sum_sq)};
  for (; s < count; ++s) {
    double z = 0.0;
    for (int i = 0; i < dim; ++i) z += cos_halfturns1(w[i * count + s]);
    z /= dim;
    const double f = 1.0 / ((1.0 - z) * (1.0 - z));
    m.sum += f;
    m.sum_sq += f * f;
  }
  return m;
}

Moments fourier_green_accumulate(const double* w, std::size_t count, int dim, const int* x) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d inv_dim = _mm256_set1_pd(1.0 / dim);
  __m256d sum = _mm256_setzero_pd();
  __m256d sum_sq = _mm256_setzero_pd();
  std::size_t s = 0;
  for (; s + 4 <= count; s += 4) {
    __m256d z = _mm256_setzero_pd();
    __m256d phase = one;
    for (int i = 0; i < dim; ++i) {
      const __m256d wi = _mm256_loadu_pd(w + i * count + s);
      z = _mm256_add_pd(z, cos_halfturns(wi));
      if (x[i] != 0) {
        phase = _mm256_mul_pd(phase, cos_halfturns(_mm256_mul_pd(wi, _mm256_set1_pd(x[i]))));
      }
    }
    const __m256d g = _mm256_sub_pd(one, _mm256_mul_pd(z, inv_dim));
    const __m256d f = _mm256_div_pd(phase, g);
    sum = _mm256_add_pd(sum, f);
    sum_sq = _mm256_fmadd_pd(f, f, sum_sq);
  }
  Moments m{hsum(sum), hsum(sum_sq)};
  for (; s < count; ++s) {
    double z = 0.0;
    double phase = 1.0;
    for (int i = 0; i < dim; ++i) {
      const double wi = w[i * count + s];
      z += cos_halfturns1(wi);
      if (x[i] != 0) phase *= cos_halfturns1(wi * x[i]);
    }
    const double f = phase / (1.0 - z / dim);
    m.sum += f;
    m.sum_sq += f * f;
  }
  return m;
}

void masked_stencil(const double* x, const double* mask, double* y, std::size_t begin,
                    std::size_t end, const std::ptrdiff_t* strides, int nstrides, double c) {
  const __m256d cv = _mm256_set1_pd(c);
  std::size_t i = begin;
  for (; i + 4 <= end; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (int k = 0; k < nstrides; ++k) {
      acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i + strides[k]));
      acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i - strides[k]));
    }
    const __m256d v = _mm256_fnmadd_pd(cv, acc, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(mask + i), v));
  }
  if (i < end) scalar_kernels().masked_stencil(x, mask, y, i, end, strides, nstrides, c);
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void xpay(const double* r, double b, double* p, std::size_t n) {
  const __m256d bv = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(p + i, _mm256_fmadd_pd(bv, _mm256_loadu_pd(p + i), _mm256_loadu_pd(r + i)));
  }
  for (; i < n; ++i) p[i] = r[i] + b * p[i];
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2", philox_fill, parseval_accumulate,
                                 fourier_green_accumulate, masked_stencil, dot, axpy, xpay};
  return table;
}

}  // namespace loopsoup::simd
