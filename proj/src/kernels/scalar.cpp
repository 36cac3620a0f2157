// Scalar reference kernels.  These are the semantics the SIMD variants must
// reproduce; keep them simple and obviously correct.

#include "gtp/kernels.hpp"

#include <cmath>
#include <limits>

namespace gtp::kernels {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void log1p_scaled_add_scalar(double* L, const double* eps, std::size_t n, double x) {
  for (std::size_t j = 0; j < n; ++j) {
    const double p = eps[j] * x;
    const double u = 1.0 + p;
    if (u <= 0.0) {
      L[j] = kNegInf;
    } else {
      L[j] += std::log1p(p);
    }
  }
}

void exp_vec_scalar(const double* in, double* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) out[j] = std::exp(in[j]);
}

double log_sum_exp_scalar(const double* t, std::size_t n) {
  double m = kNegInf;
  for (std::size_t j = 0; j < n; ++j) m = std::max(m, t[j]);
  if (!(m > kNegInf)) return kNegInf;
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += std::exp(t[j] - m);
  return m + std::log(s);
}

MeanResult softmax_mean_scalar(const double* t, const double* w, std::size_t n) {
  double m = kNegInf;
  for (std::size_t j = 0; j < n; ++j) m = std::max(m, t[j]);
  if (!(m > kNegInf)) return {kNegInf, std::numeric_limits<double>::quiet_NaN()};
  double den = 0.0, num = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double u = std::exp(t[j] - m);
    den += u;
    num += w[j] * u;
  }
  return {m + std::log(den), num / den};
}

const Backend kScalar = {
    "scalar",
    &log1p_scaled_add_scalar,
    &exp_vec_scalar,
    &log_sum_exp_scalar,
    &softmax_mean_scalar,
};

}  // namespace

const Backend& scalar() { return kScalar; }

}  // namespace gtp::kernels
