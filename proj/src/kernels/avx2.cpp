// AVX2+FMA kernels.  This TU is the only one compiled with -mavx2 -mfma; the
// dispatcher calls avx2_impl() which checks CPU support at runtime before
// handing out the backend, so including this TU in a baseline build is safe.
//
// The vector exp/log cores follow the classic Cephes double-precision
// rational approximations (range reduction + P/Q rational on the remainder),
// which land within a few ulp of libm.  log1p adds the standard first-order
// correction (p - (u-1))/u on top of log(u), u = 1+p.

#include "gtp/kernels.hpp"

#if defined(GTP_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <limits>

namespace gtp::kernels {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

// 1.5 * 2^52: adding it forces a double holding a small integer into a fixed
// exponent, making the integer recoverable from the mantissa bits.
const __m256d kMagic = _mm256_set1_pd(6755399441055744.0);

inline __m256d pow2i(__m256d n) {
  // 2^n for integral-valued n in [-1022, 1023].
  const __m256d a = _mm256_add_pd(n, kMagic);
  const __m256i ni = _mm256_sub_epi64(_mm256_castpd_si256(a), _mm256_castpd_si256(kMagic));
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
  return _mm256_castsi256_pd(bits);
}

inline __m256d int64_small_to_pd(__m256i v) {
  // int64 lanes with |v| < 2^51 -> double lanes.
  const __m256i biased = _mm256_add_epi64(v, _mm256_castpd_si256(kMagic));
  return _mm256_sub_pd(_mm256_castsi256_pd(biased), kMagic);
}

// ---------------------------------------------------------------- exp ----

inline __m256d exp_pd(__m256d x0) {
  const __m256d log2e = _mm256_set1_pd(1.44269504088896340736);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);

  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d too_big = _mm256_cmp_pd(x0, hi, _CMP_GT_OQ);
  const __m256d too_small = _mm256_cmp_pd(x0, lo, _CMP_LT_OQ);

  __m256d x = _mm256_min_pd(_mm256_max_pd(x0, lo), hi);
  const __m256d n =
      _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  x = _mm256_fnmadd_pd(n, c1, x);
  x = _mm256_fnmadd_pd(n, c2, x);

  const __m256d z = _mm256_mul_pd(x, x);
  __m256d px = _mm256_fmadd_pd(p0, z, p1);
  px = _mm256_fmadd_pd(px, z, p2);
  px = _mm256_mul_pd(px, x);
  __m256d qx = _mm256_fmadd_pd(q0, z, q1);
  qx = _mm256_fmadd_pd(qx, z, q2);
  qx = _mm256_fmadd_pd(qx, z, q3);
  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));
  e = _mm256_mul_pd(e, pow2i(n));

  e = _mm256_blendv_pd(e, _mm256_setzero_pd(), too_small);
  e = _mm256_blendv_pd(e, _mm256_set1_pd(kPosInf), too_big);
  return e;
}

// -------------------------------------------------------------- log1p ----

// Lanes where u = 1+p is positive but below this need the exponent-extraction
// path rewritten; they are rare (p within 1e-290 of -1), so fall back to
// libm per lane instead.
const __m256d kTinyU = _mm256_set1_pd(0x1p-990);

inline __m256d log1p_pd(__m256d p, int* fallback_mask) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d u = _mm256_add_pd(one, p);

  const __m256d nonpos = _mm256_cmp_pd(u, _mm256_setzero_pd(), _CMP_LE_OQ);
  const __m256d isinf = _mm256_cmp_pd(p, _mm256_set1_pd(kPosInf), _CMP_EQ_OQ);
  const __m256d tiny =
      _mm256_andnot_pd(nonpos, _mm256_cmp_pd(u, kTinyU, _CMP_LT_OQ));
  *fallback_mask = _mm256_movemask_pd(tiny);

  // frexp(u): exponent e, mantissa m in [0.5, 1).
  const __m256i bits = _mm256_castpd_si256(u);
  const __m256i expo = _mm256_and_si256(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(0x7ff));
  __m256d e = int64_small_to_pd(_mm256_sub_epi64(expo, _mm256_set1_epi64x(1022)));
  const __m256i mant_mask = _mm256_set1_epi64x(0x000fffffffffffffLL);
  const __m256i half_bits = _mm256_set1_epi64x(0x3fe0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), half_bits));

  // Pull m into [sqrt(1/2), sqrt(2)).
  const __m256d sqrth = _mm256_set1_pd(0.70710678118654752440);
  const __m256d below = _mm256_cmp_pd(m, sqrth, _CMP_LT_OQ);
  e = _mm256_sub_pd(e, _mm256_and_pd(below, one));
  m = _mm256_blendv_pd(m, _mm256_add_pd(m, m), below);
  const __m256d z = _mm256_sub_pd(m, one);

  const __m256d P0 = _mm256_set1_pd(1.01875663804580931796e-4);
  const __m256d P1 = _mm256_set1_pd(4.97494994976747001425e-1);
  const __m256d P2 = _mm256_set1_pd(4.70579119878881725854e0);
  const __m256d P3 = _mm256_set1_pd(1.44989225341610930846e1);
  const __m256d P4 = _mm256_set1_pd(1.79368678507819816313e1);
  const __m256d P5 = _mm256_set1_pd(7.70838733755885391666e0);
  const __m256d Q0 = _mm256_set1_pd(1.12873587189167450590e1);
  const __m256d Q1 = _mm256_set1_pd(4.52279145837532221105e1);
  const __m256d Q2 = _mm256_set1_pd(8.29875266912776603211e1);
  const __m256d Q3 = _mm256_set1_pd(7.11544750618563894466e1);
  const __m256d Q4 = _mm256_set1_pd(2.31251620126765340583e1);

  const __m256d zz = _mm256_mul_pd(z, z);
  __m256d pz = _mm256_fmadd_pd(P0, z, P1);
  pz = _mm256_fmadd_pd(pz, z, P2);
  pz = _mm256_fmadd_pd(pz, z, P3);
  pz = _mm256_fmadd_pd(pz, z, P4);
  pz = _mm256_fmadd_pd(pz, z, P5);
  __m256d qz = _mm256_add_pd(z, Q0);
  qz = _mm256_fmadd_pd(qz, z, Q1);
  qz = _mm256_fmadd_pd(qz, z, Q2);
  qz = _mm256_fmadd_pd(qz, z, Q3);
  qz = _mm256_fmadd_pd(qz, z, Q4);

  __m256d r = _mm256_div_pd(_mm256_mul_pd(_mm256_mul_pd(z, zz), pz), qz);
  r = _mm256_fnmadd_pd(_mm256_set1_pd(0.5), zz, r);

  // ln(u) = z + r + e*ln2, ln2 split hi/lo for accuracy.
  const __m256d ln2_lo = _mm256_set1_pd(-2.121944400546905827679e-4);
  const __m256d ln2_hi = _mm256_set1_pd(0.693359375);
  __m256d res = _mm256_fmadd_pd(e, ln2_lo, r);
  res = _mm256_add_pd(res, z);
  res = _mm256_fmadd_pd(e, ln2_hi, res);

  // log1p correction for the rounding in u = 1+p.
  const __m256d corr = _mm256_div_pd(_mm256_sub_pd(p, _mm256_sub_pd(u, one)), u);
  res = _mm256_add_pd(res, corr);

  res = _mm256_blendv_pd(res, _mm256_set1_pd(kNegInf), nonpos);
  res = _mm256_blendv_pd(res, _mm256_set1_pd(kPosInf), isinf);
  return res;
}

// ------------------------------------------------------------ drivers ----

void log1p_scaled_add_avx2(double* L, const double* eps, std::size_t n, double x) {
  const __m256d vx = _mm256_set1_pd(x);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d ve = _mm256_loadu_pd(eps + j);
    const __m256d p = _mm256_mul_pd(ve, vx);
    int fb = 0;
    const __m256d v = log1p_pd(p, &fb);
    if (fb == 0) {
      _mm256_storeu_pd(L + j, _mm256_add_pd(_mm256_loadu_pd(L + j), v));
    } else {
      alignas(32) double pv[4], vv[4];
      _mm256_store_pd(pv, p);
      _mm256_store_pd(vv, v);
      for (int k = 0; k < 4; ++k) {
        L[j + k] += (fb & (1 << k)) ? std::log1p(pv[k]) : vv[k];
      }
    }
  }
  for (; j < n; ++j) {
    const double p = eps[j] * x;
    const double u = 1.0 + p;
    if (u <= 0.0) {
      L[j] = kNegInf;
    } else {
      L[j] += std::log1p(p);
    }
  }
}

void exp_vec_avx2(const double* in, double* out, std::size_t n) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    _mm256_storeu_pd(out + j, exp_pd(_mm256_loadu_pd(in + j)));
  }
  for (; j < n; ++j) out[j] = std::exp(in[j]);
}

inline double hsum(__m256d v) {
  alignas(32) double a[4];
  _mm256_store_pd(a, v);
  return (a[0] + a[1]) + (a[2] + a[3]);
}

inline double hmax(__m256d v) {
  alignas(32) double a[4];
  _mm256_store_pd(a, v);
  return std::max(std::max(a[0], a[1]), std::max(a[2], a[3]));
}

double log_sum_exp_avx2(const double* t, std::size_t n) {
  double m = kNegInf;
  std::size_t j = 0;
  if (n >= 4) {
    __m256d vm = _mm256_loadu_pd(t);
    for (j = 4; j + 4 <= n; j += 4) vm = _mm256_max_pd(vm, _mm256_loadu_pd(t + j));
    m = hmax(vm);
  }
  for (; j < n; ++j) m = std::max(m, t[j]);
  if (!(m > kNegInf)) return kNegInf;

  const __m256d vm = _mm256_set1_pd(m);
  __m256d vs = _mm256_setzero_pd();
  for (j = 0; j + 4 <= n; j += 4) {
    vs = _mm256_add_pd(vs, exp_pd(_mm256_sub_pd(_mm256_loadu_pd(t + j), vm)));
  }
  double s = hsum(vs);
  for (; j < n; ++j) s += std::exp(t[j] - m);
  return m + std::log(s);
}

MeanResult softmax_mean_avx2(const double* t, const double* w, std::size_t n) {
  double m = kNegInf;
  std::size_t j = 0;
  if (n >= 4) {
    __m256d vm = _mm256_loadu_pd(t);
    for (j = 4; j + 4 <= n; j += 4) vm = _mm256_max_pd(vm, _mm256_loadu_pd(t + j));
    m = hmax(vm);
  }
  for (; j < n; ++j) m = std::max(m, t[j]);
  if (!(m > kNegInf)) return {kNegInf, std::numeric_limits<double>::quiet_NaN()};

  const __m256d vm = _mm256_set1_pd(m);
  __m256d vden = _mm256_setzero_pd();
  __m256d vnum = _mm256_setzero_pd();
  for (j = 0; j + 4 <= n; j += 4) {
    const __m256d u = exp_pd(_mm256_sub_pd(_mm256_loadu_pd(t + j), vm));
    vden = _mm256_add_pd(vden, u);
    vnum = _mm256_fmadd_pd(_mm256_loadu_pd(w + j), u, vnum);
  }
  double den = hsum(vden), num = hsum(vnum);
  for (; j < n; ++j) {
    const double u = std::exp(t[j] - m);
    den += u;
    num += w[j] * u;
  }
  return {m + std::log(den), num / den};
}

const Backend kAvx2 = {
    "avx2",
    &log1p_scaled_add_avx2,
    &exp_vec_avx2,
    &log_sum_exp_avx2,
    &softmax_mean_avx2,
};

}  // namespace

const Backend* avx2_impl() {
#if defined(__GNUC__) || defined(__clang__)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &kAvx2;
#endif
  return nullptr;
}

}  // namespace gtp::kernels

#endif  // GTP_HAVE_AVX2
