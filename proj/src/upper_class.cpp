#include "gtp/upper_class.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gtp/kernels.hpp"
#include "gtp/quadrature.hpp"

namespace gtp {

Prior assemble_prior(std::string name, PriorFamily family,
                     std::function<double(double)> logpi,
                     std::function<double(double)> log_epspi, double eps_pi);

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double edge_margin(double u_min) { return std::max(1e-9, u_min * 1e-12); }

// ln of  int_a^b psi e^{-psi^2/2} du  by two 16-point panels, assembled in
// the log domain so windows at u ~ 1e200 with masses ~ e^{-1e3} stay exact.
double log_window_mass(const UpperClassFunction& psi, double a, double b) {
  static const GaussRule rule = gauss_legendre(16);
  std::vector<double> terms;
  terms.reserve(2 * rule.x.size());
  const double edges[3] = {a, 0.5 * (a + b), b};
  for (int p = 0; p < 2; ++p) {
    const double mid = 0.5 * (edges[p] + edges[p + 1]);
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    if (!(half > 0.0)) continue;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const double u = mid + half * rule.x[i];
      const double q = psi.psi_sq_u(u);
      // q = +inf would make 0.5 ln q - q/2 a NaN; the exponential wins.
      const double lg =
          (q > 0.0 && std::isfinite(q)) ? 0.5 * std::log(q) - 0.5 * q : -kInf;
      terms.push_back(std::log(rule.w[i] * half) + lg);
    }
  }
  if (terms.empty()) return -kInf;
  return kernels::scalar().log_sum_exp(terms.data(), terms.size());
}

// Mass of [a, b] split into slowly growing subwindows, accumulated linearly
// (magnitudes here are moderate by construction).  Width is capped so the
// 32-node rule resolves even an e^{-u}-speed decay within each window.
double phase_mass(const UpperClassFunction& psi, double a, double b, double grow) {
  double total = 0.0, w = a;
  while (w < b) {
    const double next = std::min(b, w + std::max(0.25, std::min(w * grow, 8.0)));
    total += std::exp(log_window_mass(psi, w, next));
    w = next;
  }
  return total;
}

struct Fit {
  double slope = 0.0;
  bool ok = false;
};

Fit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  Fit f;
  const double n = static_cast<double>(xs.size());
  if (xs.size() < 3) return f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) return f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.ok = true;
  return f;
}

}  // namespace

// ------------------------------------------------------------ envelope ----

UpperClassFunction UpperClassFunction::custom(std::string name, PsiFamily family,
                                              std::function<double(double)> psi_sq_of_u,
                                              double u_min) {
  if (!psi_sq_of_u) throw std::invalid_argument("envelope: null psi^2 callback");
  if (!std::isfinite(u_min) || u_min < 0.0) {
    throw std::invalid_argument("envelope: u_min must be finite and >= 0");
  }
  UpperClassFunction f;
  f.name_ = std::move(name);
  f.family_ = family;
  f.psi_sq_ = std::move(psi_sq_of_u);
  f.u_min_ = u_min;
  // Probe a few points so pathological callbacks fail at construction.
  double u = u_min + edge_margin(u_min);
  for (int i = 0; i < 4; ++i, u = 2.0 * u + 1.0) {
    const double q = f.psi_sq_(u);
    if (std::isnan(q) || q < 0.0) {
      throw std::invalid_argument(f.name_ + ": psi^2 must be >= 0 on the domain");
    }
  }
  return f;
}

double UpperClassFunction::psi_sq_u(double u) const {
  if (!(u > u_min_)) {
    throw std::domain_error(name_ + ": evaluated at or below the domain threshold");
  }
  const double q = psi_sq_(u);
  if (std::isnan(q)) throw std::domain_error(name_ + ": psi^2 evaluated to NaN");
  if (q < 0.0) throw std::domain_error(name_ + ": psi^2 negative inside the domain");
  return q;
}

double UpperClassFunction::psi_u(double u) const { return std::sqrt(psi_sq_u(u)); }

double UpperClassFunction::operator()(double lambda) const {
  if (!(lambda > 0.0)) throw std::domain_error(name_ + ": lambda must be positive");
  return psi_u(std::log(lambda));
}

double UpperClassFunction::M() const { return std::exp(u_min_); }

double UpperClassFunction::log_delta() const {
  if (!cached_log_delta_) {
    // Survey ln(lambda psi e^{-psi^2/2}) = u + ln psi - psi^2/2 on a
    // geometric grid.  The survey starts where the envelope clears 1/2:
    // families that vanish at the domain edge would otherwise drive the
    // floor to zero through their own startup, not through tail behavior.
    const int n = 512;
    const double lo = u_min_ + edge_margin(u_min_);
    const double hi = std::max(1e15, u_min_ * 1e4);
    const double r = std::log(hi / std::max(lo, 1e-8)) / (n - 1);
    double best = kInf;
    bool cleared = false;
    for (int i = 0; i < n; ++i) {
      const double u = std::max(lo, 1e-8) * std::exp(r * i);
      const double q = psi_sq_u(u);
      if (!cleared && q < 0.25) continue;
      cleared = true;
      const double v = u + 0.5 * std::log(q) - 0.5 * q;
      best = std::min(best, v);
    }
    cached_log_delta_ = cleared ? best : -kInf;
  }
  return *cached_log_delta_;
}

double UpperClassFunction::delta() const { return std::exp(log_delta()); }

// ------------------------------------------------------------ families ----

UpperClassFunction psi_sqrt_log_log(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("sqrt-log-log: c must be > 0");
  std::ostringstream name;
  name << "sqrt-log-log(c=" << c << ")";
  return UpperClassFunction::custom(
      name.str(), PsiFamily::SqrtLogLog,
      [c](double u) { return c * std::log(u); }, 1.0);
}

UpperClassFunction psi_efkp(int b, double gamma) {
  if (b < 2) throw std::invalid_argument("efkp-psi: depth b must be >= 2");
  if (!(gamma > 0.0)) throw std::invalid_argument("efkp-psi: gamma must be > 0");
  if (b >= 5) {
    throw std::invalid_argument(
        "efkp-psi: depth b=" + std::to_string(b) +
        " places the domain threshold beyond double range");
  }
  std::vector<double> coeffs;
  coeffs.push_back(2.0);
  for (int j = 3; j <= b; ++j) coeffs.push_back(j == 3 ? 3.0 : 2.0);
  coeffs.push_back(2.0 * (1.0 + 2.0 * gamma));
  double u_min = 1.0;
  for (int j = 1; j < b; ++j) u_min = std::exp(u_min);
  std::ostringstream name;
  name << "efkp-psi(b=" << b << ",gamma=" << gamma << ")";
  return UpperClassFunction::custom(
      name.str(), PsiFamily::Efkp,
      [coeffs](double u) {
        double q = 0.0;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
          q += coeffs[i] * iterated_log(u, static_cast<int>(i) + 1);
        }
        return q;
      },
      u_min);
}

UpperClassFunction psi_min(const UpperClassFunction& a, const UpperClassFunction& b) {
  return UpperClassFunction::custom(
      "min(" + a.describe() + "," + b.describe() + ")", PsiFamily::Composed,
      [a, b](double u) { return std::min(a.psi_sq_u(u), b.psi_sq_u(u)); },
      std::max(a.u_min(), b.u_min()));
}

// -------------------------------------------------------- integral test ----

IntegralTestResult integral_test(const UpperClassFunction& psi,
                                 const IntegralTestOptions& opts) {
  IntegralTestResult r;
  std::ostringstream note;
  const double u_start = psi.u_min() + edge_margin(psi.u_min());

  double u1 = std::log(opts.lambda_hi);
  if (!(u1 > u_start + 1.0)) {
    u1 = 2.0 * (u_start + 1.0);
    note << "checkpoint below domain, raised to u=" << u1 << "; ";
  }
  const double u2 = u1 + std::log(opts.growth_factor);

  r.I_at_lambda_hi = phase_mass(psi, u_start, u1, 0.35);
  double inc = 0.0;
  {
    const double step = (u2 - u1) / 8.0;
    for (int i = 0; i < 8; ++i) {
      inc += std::exp(log_window_mass(psi, u1 + i * step, u1 + (i + 1) * step));
    }
  }
  r.I_at_growth = r.I_at_lambda_hi + inc;
  r.increment_rel = r.I_at_lambda_hi > 0.0 ? inc / r.I_at_lambda_hi : kInf;

  // Far tail: geometric u-windows [w, rho*w].  Masses stay in logs; the
  // window's t-midpoint L = ln w + (ln rho)/2 is recorded because in
  // t = ln u every window has the same width ln rho, so a density falling
  // like 1/(u * (ln u)^a * ...) gives window masses ~ (ln rho) L^{-a}.
  // The final partial window up to u_cap joins the accumulated mass but not
  // the classification series (its width breaks the pattern).
  std::vector<double> logd, Ls;
  const double lnrho = std::log(opts.window_ratio);
  double tail_sum = 0.0;
  int dead_run = 0;
  double w = u2;
  for (; w * opts.window_ratio <= opts.u_cap; w *= opts.window_ratio) {
    const double lm = log_window_mass(psi, w, w * opts.window_ratio);
    logd.push_back(lm);
    Ls.push_back(std::log(w) + 0.5 * lnrho);
    tail_sum += std::exp(lm);
    dead_run = std::isfinite(lm) ? 0 : dead_run + 1;
    if (dead_run >= 20) break;  // underflowed for good; nothing left to see
  }
  if (dead_run < 20 && w < opts.u_cap) {
    tail_sum += std::exp(log_window_mass(psi, w, opts.u_cap));
  }
  r.windows = static_cast<int>(logd.size());
  r.value = r.I_at_growth + tail_sum;

  note << "checkpoint increment " << r.increment_rel << " (threshold "
       << opts.tail_rel_threshold << "); ";

  // Rule 1: window masses still rising at the probe horizon.
  {
    const std::size_t n = logd.size();
    const std::size_t m = std::min<std::size_t>(20, n);
    bool rising = m >= 3;
    int finite = 0;
    for (std::size_t i = n - m; rising && i < n; ++i) {
      if (std::isfinite(logd[i])) ++finite;
      if (i + 1 < n && logd[i + 1] < logd[i] - 1e-12) rising = false;
    }
    if (rising && finite >= 3) {
      r.verdict = IntegralVerdict::Divergent;
      r.tail_estimate = kInf;
      note << "window masses nondecreasing through the far tail";
      r.note = note.str();
      return r;
    }
  }

  // Rule 2: geometric collapse running unbroken to the end of the probe.
  // A window at most `geometric_ratio` times its predecessor extends the
  // run, underflow to -inf continues it, and recovery (-inf back to a
  // finite mass, or a ratio above the bar) resets it.
  {
    const double lr = std::log(opts.geometric_ratio);
    int run = 0;
    int last_finite = -1;
    for (std::size_t i = 0; i < logd.size(); ++i) {
      if (std::isfinite(logd[i])) last_finite = static_cast<int>(i);
      if (i == 0) continue;
      const bool prev_fin = std::isfinite(logd[i - 1]);
      const bool cur_fin = std::isfinite(logd[i]);
      if (prev_fin && cur_fin) {
        run = logd[i] - logd[i - 1] <= lr ? run + 1 : 0;
      } else if (!cur_fin && (prev_fin || run > 0)) {
        ++run;
      } else {
        run = 0;
      }
    }
    if (run >= 12) {
      r.verdict = IntegralVerdict::Convergent;
      double tail = 0.0;
      if (last_finite >= 1 && std::isfinite(logd[last_finite - 1])) {
        const double rr = std::min(
            std::exp(logd[last_finite] - logd[last_finite - 1]), opts.geometric_ratio);
        tail = std::exp(logd[last_finite]) * rr / (1.0 - rr);
      }
      r.tail_estimate = tail;
      note << "geometric collapse over " << run << " windows";
      r.note = note.str();
      return r;
    }
  }

  // Rule 3: power fit of ln(window mass) against ln L over the deep half of
  // the probe, with an honesty band: a decay exponent within ~(1/ln L) of
  // the critical value 1 is indistinguishable from its slowly-divergent
  // neighbors at representable depths, and stays Inconclusive.
  {
    std::vector<double> xs, ys;
    if (!Ls.empty()) {
      const double cut = 0.5 * (std::log(Ls.front()) + std::log(Ls.back()));
      for (std::size_t i = 0; i < logd.size(); ++i) {
        const double x = std::log(Ls[i]);
        if (x >= cut && std::isfinite(logd[i])) {
          xs.push_back(x);
          ys.push_back(logd[i]);
        }
      }
    }
    if (static_cast<int>(xs.size()) >= opts.min_fit_windows) {
      const Fit fit = least_squares(xs, ys);
      if (fit.ok) {
        const double a_hat = -fit.slope;
        r.fitted_slope = a_hat;
        double mean_x = 0.0;
        for (double x : xs) mean_x += x;
        mean_x /= static_cast<double>(xs.size());
        const double ln2L = std::max(std::log(std::max(mean_x, 1.001)), 0.5);
        const double band =
            std::max((1.0 + 2.0 / ln2L) / mean_x, opts.slope_margin);
        note << "decay exponent " << a_hat << " +- " << band << " vs critical 1";
        if (a_hat >= 1.0 + band) {
          r.verdict = IntegralVerdict::Convergent;
          // Remaining mass ~ sum_{j>=1} d_last (L + j ln rho)^{-a} L^a.
          r.tail_estimate = std::exp(ys.back()) * std::exp(xs.back()) /
                            (std::max(a_hat - 1.0, 1e-3) * lnrho);
        } else if (a_hat <= 1.0 - band) {
          r.verdict = IntegralVerdict::Divergent;
          r.tail_estimate = kInf;
        } else {
          r.verdict = IntegralVerdict::Inconclusive;
          note << "; within the indistinguishability band";
        }
        r.note = note.str();
        return r;
      }
    }
  }

  if (r.I_at_growth > 0.0 && tail_sum == 0.0) {
    // Integrand died before the far-tail probe even started.
    r.verdict = IntegralVerdict::Convergent;
    r.tail_estimate = 0.0;
    note << "tail vanished before the far-tail probe";
  } else {
    r.verdict = IntegralVerdict::Inconclusive;
    note << "too few usable far-tail windows";
  }
  r.note = note.str();
  return r;
}

IntegralTestResult integral_test(const UpperClassFunction& psi, double lambda_hi,
                                 double growth_factor) {
  IntegralTestOptions opts;
  opts.lambda_hi = lambda_hi;
  opts.growth_factor = growth_factor;
  return integral_test(psi, opts);
}

// --------------------------------------------------------- F and G maps ----

namespace {

// Smallest u with cond(u) true, assuming cond is eventually-true and
// upward-closed on the scan scale.  Bisection converges relatively: deep
// densities put the crossing at u in the hundreds, where a fixed absolute
// tolerance would be finer than the spacing of doubles.
double rising_threshold(const std::function<bool(double)>& cond, double u_seed,
                        const char* what) {
  double lo = u_seed;
  if (cond(lo)) return 0.0;
  double hi = std::max(2.0 * lo, 1.0 / 32.0);
  int guard = 0;
  while (!cond(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e306 || ++guard > 1100) {
      throw std::invalid_argument(std::string(what) +
                                  ": threshold not reached at any representable u");
    }
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (cond(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

UpperClassFunction apply_G(const Prior& pi) {
  const auto beta_ready = [pi](double u) {
    return -2.0 * pi.log_scaled_density_log(-u) >= 1.0;
  };
  const double u_star = rising_threshold(beta_ready, 1e-8, "apply_G");
  return UpperClassFunction::custom(
      "G[" + pi.describe() + "]", PsiFamily::Composed,
      [pi](double u) {
        const double beta = std::max(-2.0 * pi.log_scaled_density_log(-u), 1.0);
        return beta + std::log(beta);
      },
      u_star);
}

Prior apply_F(const UpperClassFunction& psi, bool enforce) {
  // The envelope must be nondecreasing for the density's scaled form to be
  // monotone where claimed; probe a geometric grid.
  {
    const double lo = psi.u_min() + edge_margin(psi.u_min());
    const double hi = std::max(1e6, psi.u_min() * 10.0);
    double prev = -kInf;
    for (int i = 0; i < 64; ++i) {
      const double u = lo * std::pow(hi / std::max(lo, 1e-8), i / 63.0);
      const double q = psi.psi_sq_u(std::max(u, lo));
      if (!std::isfinite(q)) {
        throw std::invalid_argument("apply_F: psi^2 must be finite on the domain");
      }
      if (q < prev - 1e-9 * (1.0 + std::fabs(prev))) {
        throw std::invalid_argument("apply_F: psi must be nondecreasing");
      }
      prev = std::max(prev, q);
    }
  }
  if (psi.u_min() > 690.0) {
    throw std::invalid_argument(
        "apply_F: domain threshold exceeds representable densities (1/M underflows)");
  }
  // Freeze point: where psi crosses 1.  Below it (in lambda) the density is
  // constant, which keeps eps*pi nondecreasing on all of (0,1).
  const double u_edge = psi.u_min() + edge_margin(psi.u_min());
  double u_one;
  if (psi.psi_sq_u(u_edge) >= 1.0) {
    u_one = u_edge;
  } else {
    u_one = rising_threshold([psi](double u) { return u > psi.u_min() &&
                                                      psi.psi_sq_u(u) >= 1.0; },
                             u_edge, "apply_F (psi crossing 1)");
  }
  if (u_one > 690.0) {
    throw std::invalid_argument("apply_F: psi reaches 1 beyond representable densities");
  }
  if (enforce) {
    const IntegralTestResult t = integral_test(psi);
    if (t.verdict == IntegralVerdict::Divergent) {
      throw std::invalid_argument("apply_F: integral test verdict Divergent (" +
                                  t.note + "); not an upper-class envelope");
    }
  }
  const double q1 = psi.psi_sq_u(u_one);
  const double logF0 = 0.5 * std::log(q1) + u_one - 0.5 * q1;
  auto logpi = [psi, u_one, logF0](double v) {
    const double u = -v;
    if (u <= u_one) return logF0;
    const double q = psi.psi_sq_u(u);
    return q > 0.0 ? 0.5 * std::log(q) + u - 0.5 * q : -kInf;
  };
  auto log_epspi = [psi, u_one, logF0](double v) {
    const double u = -v;
    if (u <= u_one) return logF0 + v;
    const double q = psi.psi_sq_u(u);
    return q > 0.0 ? 0.5 * std::log(q) - 0.5 * q : -kInf;
  };
  const double eps_pi = std::min(std::exp(-psi.u_min()), 0.5);
  return assemble_prior("F[" + psi.describe() + "]", PriorFamily::FromPsi,
                        std::move(logpi), std::move(log_epspi), eps_pi);
}

Composition compose_FG(const Prior& pi, double eps, double rel_tol) {
  if (!(eps > 0.0) || eps > 1.0) {
    throw std::domain_error("compose_FG: eps must lie in (0, 1]");
  }
  const double v = std::log(eps);
  const double braw = -2.0 * pi.log_scaled_density_log(v);
  Composition c;
  c.clamped = braw < 1.0;
  const double beta = std::max(braw, 1.0);
  c.log_value = pi.log_density_log(v) + 0.5 * std::log1p(std::log(beta) / beta);
  c.value = std::exp(c.log_value);
  c.direct = kNaN;
  if (!c.clamped) {
    const double gsq = beta + std::log(beta);
    const double log_direct = 0.5 * std::log(gsq) - v - 0.5 * gsq;
    c.direct = std::exp(log_direct);
    c.rel_gap = std::fabs(std::expm1(log_direct - c.log_value));
    if (!(c.rel_gap <= rel_tol)) {
      throw std::logic_error("compose_FG: closed form and direct composition "
                             "disagree beyond tolerance");
    }
  }
  return c;
}

Composition compose_GF(const UpperClassFunction& psi, double lambda, double rel_tol) {
  const double u = std::log(lambda);
  const double q = psi.psi_sq_u(u);
  if (!(q > 0.0)) throw std::domain_error("compose_GF: psi must be positive at lambda");
  const double braw = q - std::log(q);
  Composition c;
  c.clamped = braw < 1.0;
  const double betaF = std::max(braw, 1.0);
  const double gsq = betaF + std::log(betaF);
  c.log_value = 0.5 * std::log(gsq);
  c.value = std::sqrt(gsq);
  c.direct = kNaN;
  const double psival = std::sqrt(q);
  if (!c.clamped && psival > 1.0 + 1e-9) {
    const Prior fp = apply_F(psi, /*enforce=*/false);
    const UpperClassFunction gf = apply_G(fp);
    c.direct = gf.psi_u(u);
    c.rel_gap = std::fabs(c.direct / c.value - 1.0);
    if (!(c.rel_gap <= rel_tol)) {
      throw std::logic_error("compose_GF: closed form and direct composition "
                             "disagree beyond tolerance");
    }
    if (!(c.value < psival)) {
      throw std::logic_error("compose_GF: composition failed to contract below psi");
    }
  }
  return c;
}

// ---------------------------------------------------------- equivalence ----

namespace {

EquivalenceReport classify_log_ratio(const std::vector<double>& xs,
                                     const std::vector<double>& ds,
                                     const EquivalenceOptions& opts) {
  EquivalenceReport rep;
  rep.points = static_cast<int>(ds.size());
  rep.log_ratio_min = kInf;
  rep.log_ratio_max = -kInf;
  bool finite = true;
  for (double d : ds) {
    if (!std::isfinite(d)) finite = false;
    rep.log_ratio_min = std::min(rep.log_ratio_min, d);
    rep.log_ratio_max = std::max(rep.log_ratio_max, d);
  }
  if (!finite) {
    rep.equivalent = false;
    rep.note = "log ratio not finite on the grid";
    return rep;
  }
  const double lr = std::log(opts.ratio_bound);
  const bool in_range = rep.log_ratio_max <= lr && rep.log_ratio_min >= -lr;
  const Fit fit = least_squares(xs, ds);
  rep.drift = fit.ok ? fit.slope * (xs.back() - xs.front()) : 0.0;
  const bool no_drift = std::fabs(rep.drift) <= opts.drift_bound;
  rep.equivalent = in_range && no_drift;
  std::ostringstream note;
  if (!in_range) note << "ratio leaves [1/R, R]; ";
  if (!no_drift) note << "monotone drift " << rep.drift << " across the grid; ";
  if (rep.equivalent) note << "ratio bounded, no drift";
  rep.note = note.str();
  return rep;
}

}  // namespace

EquivalenceReport equivalent_priors(const Prior& p1, const Prior& p2,
                                    const EquivalenceOptions& opts) {
  const double u_lo = -std::log(opts.eps_hi);
  const double u_hi = -std::log(opts.eps_lo);
  std::vector<double> xs, ds;
  for (int i = 0; i < opts.points; ++i) {
    const double u = u_lo * std::pow(u_hi / u_lo, i / double(opts.points - 1));
    xs.push_back(std::log(u));
    ds.push_back(p2.log_density_log(-u) - p1.log_density_log(-u));
  }
  return classify_log_ratio(xs, ds, opts);
}

EquivalenceReport equivalent_psis(const UpperClassFunction& s1,
                                  const UpperClassFunction& s2,
                                  const EquivalenceOptions& opts) {
  double u_lo = std::max(s1.u_min(), s2.u_min());
  u_lo = u_lo <= 0.0 ? 1.0 : 1.05 * u_lo + 1.0;
  u_lo = std::max(u_lo, -std::log(opts.eps_hi));
  const double u_hi = std::max(opts.u_hi, u_lo * 1e4);
  std::vector<double> xs, ds;
  for (int i = 0; i < opts.points; ++i) {
    const double u = u_lo * std::pow(u_hi / u_lo, i / double(opts.points - 1));
    xs.push_back(std::log(u));
    ds.push_back(0.5 * (s2.psi_sq_u(u) - s1.psi_sq_u(u)));
  }
  return classify_log_ratio(xs, ds, opts);
}

PreservationReport check_G_preserves(const Prior& p1, const Prior& p2,
                                     const EquivalenceOptions& opts) {
  PreservationReport rep;
  rep.input = equivalent_priors(p1, p2, opts);
  if (!rep.input.equivalent) {
    rep.skipped = true;
    return rep;
  }
  rep.output = equivalent_psis(apply_G(p1), apply_G(p2), opts);
  return rep;
}

PreservationReport check_F_preserves(const UpperClassFunction& s1,
                                     const UpperClassFunction& s2,
                                     const EquivalenceOptions& opts) {
  PreservationReport rep;
  rep.input = equivalent_psis(s1, s2, opts);
  if (!rep.input.equivalent) {
    rep.skipped = true;
    return rep;
  }
  // Densities only; integrability is the input pair's own property and is
  // reported separately by integral_test.
  rep.output = equivalent_priors(apply_F(s1, /*enforce=*/false),
                                 apply_F(s2, /*enforce=*/false), opts);
  return rep;
}

// ------------------------------------------------------------ validation ----

Assumption2Report validate_assumption2(const UpperClassFunction& psi,
                                       int grid_points) {
  Assumption2Report rep;
  const double lo = psi.u_min() + edge_margin(psi.u_min());
  const double hi = std::max(1e15, psi.u_min() * 1e4);
  rep.positive = true;
  double prev = -kInf;
  for (int i = 0; i < grid_points; ++i) {
    const double u =
        std::max(lo, 1e-8) * std::pow(hi / std::max(lo, 1e-8), i / double(grid_points - 1));
    const double q = psi.psi_sq_u(std::max(u, lo));
    if (!(q > 0.0)) rep.positive = false;
    if (q < prev - 1e-9 * (1.0 + std::fabs(prev))) ++rep.monotone_violations;
    prev = std::max(prev, q);
  }
  rep.nondecreasing = rep.monotone_violations == 0;
  rep.integral = integral_test(psi);
  rep.log_delta = psi.log_delta();
  return rep;
}

}  // namespace gtp
