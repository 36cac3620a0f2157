#pragma once
// Closed-form capital lower bounds and the elementary log inequality they
// rest on.  Every bound checks its own preconditions and reports
// "not applicable" (with the violated condition named) instead of a number
// when they fail; values are carried in log domain because exp(S^2/2A)
// overflows on long drifted paths.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gtp/prior.hpp"

namespace gtp {

// g(t, C) = ln(1+t) - t + ((1+C)/2) t^2.  Nonnegative whenever
// t >= -C/(1+C); outside that region the value is still returned but
// `guaranteed` is false.  t <= -1 or C <= 0 is a domain error.
struct GapResult {
  double value;
  bool guaranteed;
};
GapResult log_inequality_gap(double t, double C);

// A capital lower bound at one round: either ln(bound) or the reason it does
// not apply.
struct BoundValue {
  bool applicable = false;
  double log_value = -std::numeric_limits<double>::infinity();
  std::string reason;  // violated precondition when not applicable

  double value() const;  // exp(log_value); NaN when not applicable
};

// Leading constants, overridable so soundness campaigns can prove they would
// catch a mis-transcribed constant (see the verification tests).
struct BoundConstants {
  double thm41_factor = 1.0 / 6.0;        // in  factor*sqrt(C) * ...
  double thm43_factor = 0.061313240195240384;  // 1/(6e)
  double prop31_factor = 0.5;
};

// Capital bound  factor*sqrt(C) * (S/A) * pi(S/A) * exp((1-2C) S^2/(2A)),
// valid for C in (0, min(eps_pi, 1/2)) and 0 < S/A < C/2.  `sharp` swaps the
// printed 1/6 for the tighter (1-sqrt(C))/(1+sqrt(C)) factor the same
// derivation yields.
BoundValue thm41(const Prior& pi, double S, double A, double C,
                 bool sharp = false, const BoundConstants& k = {});

// Capital bound  (1/(6e)) * (1/sqrt(A)) * pi(S/A) * exp(S^2/(2A)), valid for
// S > 0, S^2/A > max(2, 1/eps_pi), S^3/A^2 < 1/2.
BoundValue thm43(const Prior& pi, double S, double A,
                 const BoundConstants& k = {});

// Evaluation point of the staircase factor in the tilted-prior bound.
double remark41_u(double S, double A);

// Tilted-prior bound  c(u_n) * thm43(pi, S, A)  with the thm43 preconditions
// checked against the base prior.
BoundValue remark41(const Prior& pi, const StaircaseTilt& tilt, double S,
                    double A, const BoundConstants& k = {});

// Drift bound  (1/2) * pi(delta/3) * (delta/3) * exp(A delta^2 / 9), valid
// when S > delta*A and delta in (0, min(eps_pi, 1/2)).
BoundValue prop31(const Prior& pi, double S, double A, double delta,
                  const BoundConstants& k = {});

// Threshold sqrt(2 ln_2 A + 3 ln_3 A + 2 ln_4 A + ... + 2 ln_b A
//              + 2(1+2 gamma) ln_{b+1} A), b >= 4.  Throws a domain error
// naming the failing depth when the iterated logs run out (for b >= 4 this
// needs A beyond double range; see efkp_psi_terms for symbolic use).
double efkp_psi(double A, int b, double gamma);

// The coefficient vector (2, 3, 2, ..., 2, 2(1+2 gamma)) applied to
// (ln_2 A, ..., ln_{b+1} A).
std::vector<double> efkp_psi_coeffs(int b, double gamma);

// psi from precomputed iterated-log values l = (ln_2 A, ..., ln_{b+1} A),
// for arguments too large to represent directly.
double efkp_psi_from_logs(const std::vector<double>& iterated_logs, int b,
                          double gamma);

// Running tally of one bound against a capital trajectory, compared in log
// domain with a relative slack tolerance.
struct BoundCheckStats {
  std::string bound;
  std::int64_t rounds = 0;
  std::int64_t applicable_rounds = 0;
  std::int64_t violations = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  double max_slack = -std::numeric_limits<double>::infinity();
  double tolerance = 1e-6;

  // log_K = ln K_n from the capital process.  Slack is log_K - ln(bound).
  void update(double log_K, const BoundValue& bv);
};

}  // namespace gtp
