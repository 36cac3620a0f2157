#pragma once
// Numeric kernels for the mixture inner loops: per-node log-growth
// accumulation, vectorized exp, log-sum-exp and softmax-weighted means.
// A scalar reference implementation always exists; on x86-64 an AVX2+FMA
// variant is compiled in a separate TU and selected at runtime.  The two are
// equivalence-tested; the env var GTP_KERNEL=scalar|avx2 forces a backend.

#include <cstddef>

namespace gtp::kernels {

// Result of a fused log-sum-exp / softmax-mean pass over terms t_j with node
// values w_j: log_total = log sum_j exp(t_j), mean = the w-average under the
// normalized weights exp(t_j)/sum.  An all--inf input yields log_total=-inf
// and mean=NaN.
struct MeanResult {
  double log_total;
  double mean;
};

struct Backend {
  const char* name;
  // L[j] += log1p(eps[j]*x).  1+eps*x == 0 gives exactly -inf; -inf entries
  // are absorbing.  eps[j] >= 0, x >= -1 in all call sites, but the kernel
  // only assumes finite inputs.
  void (*log1p_scaled_add)(double* L, const double* eps, std::size_t n, double x);
  // out[j] = exp(in[j]); -inf and anything below the double underflow point
  // flush to +0, large arguments saturate to +inf.
  void (*exp_vec)(const double* in, double* out, std::size_t n);
  // Max-subtracted log sum_j exp(t[j]); -inf for empty or all--inf input.
  double (*log_sum_exp)(const double* t, std::size_t n);
  // Fused log_sum_exp plus softmax-weighted mean of w.
  MeanResult (*softmax_mean)(const double* t, const double* w, std::size_t n);
};

// Scalar reference backend (always available).
const Backend& scalar();

// AVX2+FMA backend, or nullptr when the build or the CPU lacks support.
const Backend* avx2();

// Runtime selection: GTP_KERNEL env override, else best supported backend.
// The choice is made once per process, so a run is internally consistent.
const Backend& active();

}  // namespace gtp::kernels
