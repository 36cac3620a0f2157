#pragma once
// Mixing densities over the betting proportion eps in (0,1], the regularity
// checks they must satisfy (integrable; bounded below near 0; eps*pi(eps)
// nondecreasing near 0), and the doubling-staircase tilt built from a
// density's cumulative integral.
//
// Densities are unnormalized.  The core evaluator works on v = ln(eps) so
// deep grids (eps far below double-linear comfort) stay exact; iterated-log
// families extend their formula value at eps0 as a constant up to eps = 1.

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gtp {

enum class PriorFamily { Uniform, Power, Lil, Efkp, Tilted, FromPsi, Custom };

class Prior {
 public:
  // log pi at v = ln(eps) <= 0.
  double log_density_log(double log_eps) const { return logpi_(log_eps); }
  double log_density(double eps) const;
  double density(double eps) const;

  // ln(eps * pi(eps)) at v = ln(eps).  For the shipped families ln pi is
  // -v plus slowly varying terms, so tail integrals at symbolic depths
  // (v far beyond ln(DBL_MIN)) must use this form: computing
  // ln pi(e^-t) - t directly absorbs the slow terms into t once t > ~1e16.
  double log_scaled_density_log(double log_eps) const { return log_epspi_(log_eps); }

  PriorFamily family() const { return family_; }
  const std::string& describe() const { return name_; }
  double eps_pi() const { return eps_pi_; }
  // Lower-bound witness near 0: inf of pi over a geometric grid on
  // (:, eps_pi), kept in log form since iterated-log families overflow.
  double log_delta_pi() const { return log_delta_pi_; }

  // Total mass int_0^1 pi (body quadrature + tail extension), cached.
  double integral() const;
  double log_integral() const;

  // Construction backdoor for the functional-calculus and custom factories.
  static Prior custom(std::string name, PriorFamily family,
                      std::function<double(double)> logpi_of_logeps, double eps_pi);

 private:
  Prior() = default;
  std::function<double(double)> logpi_;     // v -> ln pi
  std::function<double(double)> log_epspi_; // v -> ln(eps*pi), cancellation-free
  PriorFamily family_ = PriorFamily::Custom;
  std::string name_;
  double eps_pi_ = 0.5;
  double log_delta_pi_ = 0.0;
  mutable std::optional<double> cached_integral_;
  friend Prior finish_prior(Prior p);
  friend Prior assemble_prior(std::string name, PriorFamily family,
                              std::function<double(double)> logpi,
                              std::function<double(double)> log_epspi,
                              double eps_pi);
};

// ------------------------------------------------------------ families ----

Prior make_uniform();
Prior make_power(double a);  // pi = eps^-a, 0 < a < 1

// pi = 1/(eps ln(1/eps) (lnln(1/eps))^2) below eps0 (< e^-e), constant above.
double default_lil_eps0();
Prior make_lil(double eps0 = default_lil_eps0());

// pi = 1/(eps L1 L2 ... L_{b-1} L_b^{1+gamma}) below eps0, constant above,
// L_k = k-times-iterated log of 1/eps.  The default eps0 places the deepest
// log at the largest margin representable in double precision; depths whose
// domain exceeds doubles entirely are rejected.
Prior make_efkp(int b, double gamma, std::optional<double> eps0 = std::nullopt);
double default_efkp_eps0(int b);

// CSV with "eps,pi" rows, log-linearly interpolated; outside the table the
// boundary segments extrapolate (power-law continuation below, constant
// above the last point).
Prior make_custom_csv(const std::string& path, double eps_pi = 0.5);

// k-times iterated natural log; throws std::domain_error naming the first
// depth whose argument is non-positive.
double iterated_log(double x, int depth);

// ----------------------------------------------------------- staircase ----

// Right-continuous step function c(eps) = k on [eps_{k+1}, eps_k), where
// eps_k splits off mass 2^-k: int_0^{eps_k} pi = 2^-k int_0^1 pi.  c = 1 on
// [eps_1, 1]; below the last representable breakpoint c freezes at its last
// value (an under-estimate, which is the safe direction everywhere c is
// consumed).
struct StaircaseTilt {
  std::vector<double> log_breakpoints;  // ln eps_k, strictly decreasing
  double mass = 0.0;                    // int_0^1 pi of the base density
  int levels() const { return static_cast<int>(log_breakpoints.size()); }
  double value(double eps) const;
  double value_log(double log_eps) const;
};

StaircaseTilt build_staircase_tilt(const Prior& p, int k_max = 60);

// Tilted density c(eps) * pi(eps).  Exempt from the eps*pi monotonicity
// check (the tilt is a decreasing staircase); its integral is within a
// factor 2 of the base mass, which validate_assumption1 verifies instead.
Prior make_tilted(const Prior& base, const StaircaseTilt& tilt);

// ---------------------------------------------------------- validation ----

struct Assumption1Report {
  // pi bounded below by a positive constant near 0: grid infimum is finite
  // and the left-edge log-log slope shows no decay to zero.
  bool lower_bounded = false;
  double log_delta = 0.0;
  double left_slope = 0.0;
  // eps*pi(eps) nondecreasing on (0, eps_pi) within tolerance 1e-12.
  bool eps_pi_monotone = false;
  bool monotone_exempt = false;
  long monotone_violations = 0;
  // int_0^1 pi finite: increments over shrinking cutoffs must decrease.
  bool integrable = false;
  double integral_estimate = 0.0;
  std::vector<double> cutoff_increments;

  bool pass() const {
    return lower_bounded && (eps_pi_monotone || monotone_exempt) && integrable;
  }
};

Assumption1Report validate_assumption1(const Prior& p, int grid_points = 2000);

}  // namespace gtp
