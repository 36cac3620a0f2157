#include "gtp/bounds.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gtp {

namespace {

BoundValue not_applicable(std::string reason) {
  BoundValue bv;
  bv.applicable = false;
  bv.reason = std::move(reason);
  return bv;
}

BoundValue applicable_log(double log_value) {
  BoundValue bv;
  bv.applicable = true;
  bv.log_value = log_value;
  return bv;
}

bool finite_inputs(double S, double A) {
  return std::isfinite(S) && std::isfinite(A) && A > 0.0;
}

}  // namespace

double BoundValue::value() const {
  return applicable ? std::exp(log_value)
                    : std::numeric_limits<double>::quiet_NaN();
}

GapResult log_inequality_gap(double t, double C) {
  if (!(t > -1.0) || !std::isfinite(t)) {
    throw std::domain_error("log_inequality_gap: t must be > -1");
  }
  if (!(C > 0.0) || !std::isfinite(C)) {
    throw std::domain_error("log_inequality_gap: C must be positive");
  }
  const double g = std::log1p(t) - t + 0.5 * (1.0 + C) * t * t;
  return {g, t >= -C / (1.0 + C)};
}

BoundValue thm41(const Prior& pi, double S, double A, double C, bool sharp,
                 const BoundConstants& k) {
  if (!finite_inputs(S, A) || !std::isfinite(C)) {
    return not_applicable("inputs must be finite with A > 0");
  }
  if (!(C > 0.0) || !(C < 0.5)) return not_applicable("C outside (0, 1/2)");
  if (!(C < pi.eps_pi())) return not_applicable("C >= eps_pi");
  if (!(S > 0.0)) return not_applicable("S <= 0");
  const double r = S / A;
  if (!(r < 0.5 * C)) return not_applicable("S/A >= C/2");

  const double sq = std::sqrt(C);
  const double log_factor =
      sharp ? std::log((1.0 - sq) / (1.0 + sq)) + 0.5 * std::log(C)
            : std::log(k.thm41_factor) + 0.5 * std::log(C);
  const double log_r = std::log(r);
  return applicable_log(log_factor + log_r + pi.log_density_log(log_r) +
                        (1.0 - 2.0 * C) * S * S / (2.0 * A));
}

BoundValue thm43(const Prior& pi, double S, double A, const BoundConstants& k) {
  if (!finite_inputs(S, A)) {
    return not_applicable("inputs must be finite with A > 0");
  }
  if (!(S > 0.0)) return not_applicable("S <= 0");
  const double ratio2 = S * S / A;
  const double threshold = std::max(2.0, 1.0 / pi.eps_pi());
  if (!(ratio2 > threshold)) return not_applicable("S^2/A <= max(2, 1/eps_pi)");
  const double ratio3 = S * S * S / (A * A);
  if (!(ratio3 < 0.5)) return not_applicable("S^3/A^2 >= 1/2");

  const double log_r = std::log(S / A);
  return applicable_log(std::log(k.thm43_factor) - 0.5 * std::log(A) +
                        pi.log_density_log(log_r) + S * S / (2.0 * A));
}

double remark41_u(double S, double A) {
  return (1.0 + std::sqrt(A) / S) / (1.0 + A / (S * S)) * (S / A);
}

BoundValue remark41(const Prior& pi, const StaircaseTilt& tilt, double S,
                    double A, const BoundConstants& k) {
  BoundValue base = thm43(pi, S, A, k);
  if (!base.applicable) return base;
  const double u = remark41_u(S, A);
  base.log_value += std::log(tilt.value(u));
  return base;
}

BoundValue prop31(const Prior& pi, double S, double A, double delta,
                  const BoundConstants& k) {
  if (!finite_inputs(S, A) || !std::isfinite(delta)) {
    return not_applicable("inputs must be finite with A > 0");
  }
  if (!(delta > 0.0) || !(delta < std::min(pi.eps_pi(), 0.5))) {
    return not_applicable("delta outside (0, min(eps_pi, 1/2))");
  }
  if (!(S > delta * A)) return not_applicable("S <= delta*A");

  const double log_third = std::log(delta / 3.0);
  return applicable_log(std::log(k.prop31_factor) +
                        pi.log_density_log(log_third) + log_third +
                        A * delta * delta / 9.0);
}

std::vector<double> efkp_psi_coeffs(int b, double gamma) {
  if (b < 4) throw std::invalid_argument("efkp_psi: b must be >= 4");
  if (!(gamma > 0.0)) throw std::invalid_argument("efkp_psi: gamma must be positive");
  // Coefficients of (ln_2, ln_3, ..., ln_{b+1}): 2 everywhere except 3 on
  // ln_3 and 2(1+2 gamma) on the last term.
  std::vector<double> c(static_cast<std::size_t>(b), 2.0);
  c[1] = 3.0;
  c.back() = 2.0 * (1.0 + 2.0 * gamma);
  return c;
}

double efkp_psi_from_logs(const std::vector<double>& iterated_logs, int b,
                          double gamma) {
  const std::vector<double> coeffs = efkp_psi_coeffs(b, gamma);
  if (iterated_logs.size() != coeffs.size()) {
    throw std::invalid_argument("efkp_psi_from_logs: need exactly b values (ln_2 .. ln_{b+1})");
  }
  if (!(iterated_logs.back() > 0.0)) {
    throw std::domain_error("efkp_psi: ln_{b+1}(A) must be positive");
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) sq += coeffs[i] * iterated_logs[i];
  return std::sqrt(sq);
}

double efkp_psi(double A, int b, double gamma) {
  const std::vector<double> coeffs = efkp_psi_coeffs(b, gamma);  // validates b, gamma
  std::vector<double> logs(coeffs.size());
  for (int j = 2; j <= b + 1; ++j) {
    logs[static_cast<std::size_t>(j - 2)] = iterated_log(A, j);
  }
  if (!(logs.back() > 0.0)) {
    std::ostringstream msg;
    msg << "efkp_psi: ln_" << (b + 1) << "(" << A << ") = " << logs.back()
        << " <= 0; argument too small for b=" << b;
    throw std::domain_error(msg.str());
  }
  return efkp_psi_from_logs(logs, b, gamma);
}

void BoundCheckStats::update(double log_K, const BoundValue& bv) {
  ++rounds;
  if (!bv.applicable) return;
  ++applicable_rounds;
  const double slack = log_K - bv.log_value;
  min_slack = std::min(min_slack, slack);
  max_slack = std::max(max_slack, slack);
  if (slack < -tolerance) ++violations;
}

}  // namespace gtp
