#pragma once
// Growth envelopes psi(lambda) on (M, inf) -- the functions a mixture's
// log-capital can be tested against -- and the two transforms that pair them
// with mixing densities: F maps an envelope to a density, G maps a density
// to an envelope, and each is the other's asymptotic inverse.
//
// Envelopes are evaluated through psi(e^u)^2 as a function of u = ln lambda,
// so thresholds and probes far beyond double-range lambda (u up to ~1e300)
// stay exact.  The convergence/divergence of  I(psi) = int psi e^{-psi^2/2}
// dlambda/lambda  is decided by a windowed far-tail classifier with an
// explicit Inconclusive verdict: the property is asymptotic and no finite
// computation settles every case.

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gtp/prior.hpp"

namespace gtp {

enum class PsiFamily { Efkp, SqrtLogLog, Composed, Custom };

// Positive nondecreasing envelope on the open domain lambda > M, carried as
// u |-> psi(e^u)^2 with u_min = ln M.  For deep families M itself overflows
// (exp of u_min); u_min is the authoritative threshold.
class UpperClassFunction {
 public:
  static UpperClassFunction custom(std::string name, PsiFamily family,
                                   std::function<double(double)> psi_sq_of_u,
                                   double u_min);

  double operator()(double lambda) const;  // psi(lambda), lambda > M
  double psi_sq_u(double u) const;         // psi(e^u)^2, u > u_min
  double psi_u(double u) const;            // psi(e^u)

  double u_min() const { return u_min_; }
  double M() const;  // exp(u_min); +inf when the threshold overflows
  const std::string& describe() const { return name_; }
  PsiFamily family() const { return family_; }

  // Grid infimum of ln(lambda psi e^{-psi^2/2}) over a geometric u grid --
  // the positivity witness the envelope contract demands.  Kept in log form;
  // delta() is its exp (+inf for deep families where lambda dominates).
  double log_delta() const;
  double delta() const;

 private:
  UpperClassFunction() = default;
  std::function<double(double)> psi_sq_;
  std::string name_;
  PsiFamily family_ = PsiFamily::Custom;
  double u_min_ = 0.0;
  mutable std::optional<double> cached_log_delta_;
};

// ------------------------------------------------------------ families ----

// psi = sqrt(c lnln lambda), lambda > e.  In the upper class iff c > 2.
UpperClassFunction psi_sqrt_log_log(double c);

// Iterated-log ladder psi^2 = 2 ln_2 + 3 ln_3 + 2 ln_4 + ... + 2 ln_b
// + 2(1+2 gamma) ln_{b+1}; b = 2 puts the gamma weight directly on ln_3
// (psi = sqrt(2 ln_2 + 4 ln_3) at gamma = 1/2).  Domain needs ln_b(u) > 0,
// a (b-1)-fold exponential tower; b >= 5 exceeds double range entirely and
// is rejected.
UpperClassFunction psi_efkp(int b, double gamma);

// Pointwise min of two envelopes on the intersection of their domains; the
// standard cap construction min{psi, sqrt(2 ln_2 + 4 ln_3)} keeps a finite
// I(psi) finite while pulling the envelope down to the classic scale.
UpperClassFunction psi_min(const UpperClassFunction& a, const UpperClassFunction& b);

// ------------------------------------------------------- integral test ----

enum class IntegralVerdict { Convergent, Divergent, Inconclusive };

struct IntegralTestOptions {
  double lambda_hi = 1e15;      // first checkpoint Lambda
  double growth_factor = 10.0;  // second checkpoint Lambda * growth
  double u_cap = 1e200;         // far-tail probe end, in u = ln lambda
  double window_ratio = 2.0;    // geometric u-window growth in the far tail
  double tail_rel_threshold = 1e-3;  // checkpoint increment considered settled
  double geometric_ratio = 0.7;      // per-window decay ratio => convergent
  double slope_margin = 0.15;        // dead band around the critical slope 1
  int min_fit_windows = 12;
};

struct IntegralTestResult {
  IntegralVerdict verdict = IntegralVerdict::Inconclusive;
  double value = 0.0;          // mass accumulated up to u_cap
  double tail_estimate = 0.0;  // projected remainder (inf when divergent)
  double I_at_lambda_hi = 0.0;
  double I_at_growth = 0.0;    // mass up to Lambda * growth
  double increment_rel = 0.0;  // (I_at_growth - I_at_lambda_hi) / I_at_lambda_hi
  double fitted_slope = 0.0;   // extrapolated decay exponent of window masses
  int windows = 0;
  std::string note;
};

// Decides I(psi) < inf where the far tail admits it.  Geometric u-windows
// have constant width in t = ln u, turning an (ln_2 lambda)-power tail into
// a power sequence of window masses; the fitted decay exponent is compared
// against the critical value 1 with an explicit indistinguishability band.
// Envelopes whose distinguishing factor sits three iterated logs deep vary
// by less than one e-fold across all representable u, and come back
// Inconclusive by design.
IntegralTestResult integral_test(const UpperClassFunction& psi,
                                 const IntegralTestOptions& opts = {});
IntegralTestResult integral_test(const UpperClassFunction& psi, double lambda_hi,
                                 double growth_factor = 10.0);

// --------------------------------------------------------- F and G maps ----

// Density F[psi](eps) = psi(1/eps)/eps * exp(-psi(1/eps)^2/2).  The formula
// applies below eps_one = exp(-u_one), u_one the point where psi crosses 1
// (the scaled density eps*pi turns over there); above it the density is
// frozen at its eps_one value, which keeps eps*pi nondecreasing on all of
// (0,1).  The monotone-region marker is min(1/M, 0.5).  When enforce is
// set, a Divergent integral test rejects the construction; Inconclusive is
// allowed (the test cannot prove divergence).
Prior apply_F(const UpperClassFunction& psi, bool enforce = true);

// Envelope G[pi](lambda) = sqrt(beta + ln beta), beta(eps) =
// max(-2 ln(eps pi(eps)), 1) at eps = 1/lambda.  The domain threshold is the
// smallest u with the clamp inactive, located by doubling scan + bisection
// with relative convergence (deep densities put the crossing at u in the
// hundreds, beyond fixed absolute resolution).
UpperClassFunction apply_G(const Prior& pi);

// Closed-form composition values, each cross-checked against the direct
// object pipeline where the beta clamp is inactive; disagreement beyond
// rel_tol is an internal fault and throws std::logic_error.
struct Composition {
  double value = 0.0;      // closed form, linear scale
  double log_value = 0.0;  // closed form, log scale
  double direct = 0.0;     // pipeline evaluation (NaN when clamped)
  double rel_gap = 0.0;    // |direct/value - 1| where checked
  bool clamped = false;    // beta clamp active: out of asymptotic range
};

// F[G[pi]](eps) = pi(eps) sqrt((beta + ln beta)/beta).
Composition compose_FG(const Prior& pi, double eps, double rel_tol = 1e-10);

// G[F[psi]](lambda) = sqrt(psi^2 - 2 ln psi + ln(psi^2 - 2 ln psi)); always
// < psi(lambda) when psi(lambda) > 1, which is asserted.
Composition compose_GF(const UpperClassFunction& psi, double lambda,
                       double rel_tol = 1e-10);

// ---------------------------------------------------------- equivalence ----

// Two densities are interchangeable near 0 when their ratio stays inside
// [1/R, R] with no monotone drift; two envelopes when exp((psi2^2-psi1^2)/2)
// does.  Comparisons run on the exponent difference, never on raw
// exponentials.
struct EquivalenceOptions {
  double ratio_bound = 1e3;   // R
  double drift_bound = 2.302585092994046;  // ln 10: fitted end-to-end swing
  int points = 200;
  double eps_lo = 1e-30, eps_hi = 1e-2;  // density grid (geometric)
  double u_hi = 1e15;                    // envelope grid reaches u = ln lambda
};

struct EquivalenceReport {
  bool equivalent = false;
  double log_ratio_min = 0.0;  // of pi2/pi1, or (psi2^2-psi1^2)/2
  double log_ratio_max = 0.0;
  double drift = 0.0;          // fitted swing of the log ratio across the grid
  int points = 0;
  std::string note;
};

EquivalenceReport equivalent_priors(const Prior& p1, const Prior& p2,
                                    const EquivalenceOptions& opts = {});
EquivalenceReport equivalent_psis(const UpperClassFunction& s1,
                                  const UpperClassFunction& s2,
                                  const EquivalenceOptions& opts = {});

// Equivalence carried through a transform: G on a density pair, F on an
// envelope pair.  An inequivalent input pair skips the conclusion.
struct PreservationReport {
  EquivalenceReport input;
  bool skipped = false;
  std::optional<EquivalenceReport> output;
  bool pass() const { return !skipped && output && output->equivalent; }
};

PreservationReport check_G_preserves(const Prior& p1, const Prior& p2,
                                     const EquivalenceOptions& opts = {});
PreservationReport check_F_preserves(const UpperClassFunction& s1,
                                     const UpperClassFunction& s2,
                                     const EquivalenceOptions& opts = {});

// ------------------------------------------------------------ validation ----

// Envelope contract: positive, nondecreasing, I(psi) finite where
// decidable, and the lambda psi e^{-psi^2/2} floor strictly positive.
struct Assumption2Report {
  bool positive = false;
  bool nondecreasing = false;
  long monotone_violations = 0;
  IntegralTestResult integral;
  double log_delta = 0.0;

  bool pass() const {
    return positive && nondecreasing &&
           integral.verdict != IntegralVerdict::Divergent &&
           log_delta > -std::numeric_limits<double>::infinity();
  }
};

Assumption2Report validate_assumption2(const UpperClassFunction& psi,
                                       int grid_points = 400);

}  // namespace gtp
