#include "gtp/prior.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "gtp/kernels.hpp"
#include "gtp/quadrature.hpp"

namespace gtp {

Prior assemble_prior(std::string name, PriorFamily family,
                     std::function<double(double)> logpi,
                     std::function<double(double)> log_epspi, double eps_pi);

namespace {

// Geometric survey of log pi over (eps_min, eps_hi): the infimum, and the
// least-squares slope of log pi against ln eps over the deepest tenth of the
// grid.  The slope is what actually separates "bounded below" from "decays
// to zero": a density vanishing like eps^c shows slope ~c > 0 even though
// every finite grid value is positive.
struct EdgeSurvey {
  double log_inf;
  double left_slope;
};

EdgeSurvey survey_edge(const std::function<double(double)>& logpi, double eps_hi,
                       int points) {
  const double v_hi = std::log(eps_hi);
  const double v_lo = std::log(std::min(1e-30, eps_hi * 1e-20));
  EdgeSurvey s{std::numeric_limits<double>::infinity(), 0.0};
  std::vector<double> vs, ys;
  for (int i = 0; i < points; ++i) {
    const double v = v_lo + (v_hi - v_lo) * i / (points - 1);
    const double y = logpi(v);
    s.log_inf = std::min(s.log_inf, y);
    if (i < std::max(8, points / 10)) {
      vs.push_back(v);
      ys.push_back(y);
    }
  }
  // Plain least squares on the retained edge block.
  double sv = 0, sy = 0, svv = 0, svy = 0;
  const double m = static_cast<double>(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    sv += vs[i];
    sy += ys[i];
    svv += vs[i] * vs[i];
    svy += vs[i] * ys[i];
  }
  const double denom = m * svv - sv * sv;
  s.left_slope = denom != 0.0 ? (m * svy - sv * sy) / denom : 0.0;
  return s;
}

// Scaled log density ln(eps*pi) for the iterated-log ladder
// pi = 1/(eps L1 ... L_{b-1} L_b^{1+g}), L_k the k-fold iterated log of
// 1/eps, evaluated at t = ln(1/eps).  The ln of each factor is the next
// rung, so eps*pi telescopes into a plain sum of iterated logs of t --
// no t-sized terms, hence exact at any symbolic depth.
double log_ladder_scaled(double t, int b, double gamma) {
  double rung = t, acc = 0.0;
  for (int j = 1; j <= b; ++j) {
    rung = std::log(rung);
    acc -= (j == b) ? (1.0 + gamma) * rung : rung;
  }
  return acc;
}

Prior make_ladder(int b, double gamma, double eps0, PriorFamily family,
                  std::string name) {
  const double v0 = std::log(eps0);
  // Constant extension above eps0; the formula needs its deepest log
  // positive, which the eps0 rules guarantee at and below eps0.
  const double log_const = log_ladder_scaled(-v0, b, gamma) - v0;
  auto logpi = [v0, b, gamma, log_const](double v) {
    return v >= v0 ? log_const : log_ladder_scaled(-v, b, gamma) - v;
  };
  auto scaled = [v0, b, gamma, log_const](double v) {
    return v >= v0 ? log_const + v : log_ladder_scaled(-v, b, gamma);
  };
  return assemble_prior(std::move(name), family, logpi, scaled, 1.0);
}

double tail_mass(const Prior& p, double t) {
  return integrate_to_infinity(
             [&p](double u) { return std::exp(p.log_scaled_density_log(-u)); }, t)
      .value;
}

TailResult tail_mass_full(const Prior& p, double t) {
  return integrate_to_infinity(
      [&p](double u) { return std::exp(p.log_scaled_density_log(-u)); }, t);
}

}  // namespace

Prior finish_prior(Prior p) {
  const EdgeSurvey s = survey_edge(p.logpi_, p.eps_pi_, 512);
  p.log_delta_pi_ = s.log_inf;
  return p;
}

double Prior::log_density(double eps) const {
  if (!(eps > 0.0)) throw std::domain_error("prior density needs eps > 0");
  return logpi_(std::log(eps));
}

double Prior::density(double eps) const { return std::exp(log_density(eps)); }

double Prior::integral() const {
  if (!cached_integral_) {
    const LogNodes nodes = make_log_nodes(QuadratureSpec{});
    std::vector<double> terms(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      terms[i] = nodes.log_w[i] + logpi_(nodes.log_eps[i]);
    }
    const double body =
        std::exp(kernels::scalar().log_sum_exp(terms.data(), terms.size()));
    cached_integral_ = body + tail_mass(*this, QuadratureSpec{}.tmax);
  }
  return *cached_integral_;
}

double Prior::log_integral() const { return std::log(integral()); }

Prior assemble_prior(std::string name, PriorFamily family,
                     std::function<double(double)> logpi,
                     std::function<double(double)> log_epspi, double eps_pi) {
  if (!logpi || !log_epspi) {
    throw std::invalid_argument("prior: null density callback");
  }
  if (!(eps_pi > 0.0) || eps_pi > 1.0) {
    throw std::invalid_argument("prior: eps_pi must lie in (0, 1]");
  }
  Prior p;
  p.name_ = std::move(name);
  p.family_ = family;
  p.logpi_ = std::move(logpi);
  p.log_epspi_ = std::move(log_epspi);
  p.eps_pi_ = eps_pi;
  return finish_prior(std::move(p));
}

Prior Prior::custom(std::string name, PriorFamily family,
                    std::function<double(double)> logpi_of_logeps, double eps_pi) {
  if (!logpi_of_logeps) throw std::invalid_argument("prior: null density callback");
  // The scaled form is derived by addition here; externally supplied
  // densities are only as deep-tail-stable as the callback itself.
  auto scaled = [f = logpi_of_logeps](double v) { return f(v) + v; };
  return assemble_prior(std::move(name), family, std::move(logpi_of_logeps),
                        std::move(scaled), eps_pi);
}

// ------------------------------------------------------------ families ----

Prior make_uniform() {
  return assemble_prior("uniform", PriorFamily::Uniform, [](double) { return 0.0; },
                        [](double v) { return v; }, 1.0);
}

Prior make_power(double a) {
  if (!(a > 0.0) || !(a < 1.0)) {
    throw std::invalid_argument("power prior: exponent must lie in (0, 1)");
  }
  std::ostringstream name;
  name << "power(a=" << a << ")";
  return assemble_prior(name.str(), PriorFamily::Power,
                        [a](double v) { return -a * v; },
                        [a](double v) { return (1.0 - a) * v; }, 1.0);
}

double default_lil_eps0() { return std::exp(-std::exp(1.0) * 1.01); }

Prior make_lil(double eps0) {
  if (!(eps0 > 0.0) || !(eps0 < std::exp(-std::exp(1.0)))) {
    throw std::invalid_argument("lil prior: eps0 must lie in (0, e^-e)");
  }
  std::ostringstream name;
  name << "lil(eps0=" << eps0 << ")";
  return make_ladder(2, 1.0, eps0, PriorFamily::Lil, name.str());
}

double default_efkp_eps0(int b) {
  // Deepest margin first: pick the largest L_b(1/eps0) whose (b-1)-fold
  // exponential tower still leaves ln(1/eps0) inside double range.
  for (double margin : {1.5, 1.0, 0.75, 0.5}) {
    double t = margin;
    for (int j = 1; j < b; ++j) t = std::exp(t);
    if (t <= 690.0) return std::exp(-t);
  }
  throw std::invalid_argument(
      "efkp prior: the depth-" + std::to_string(b) +
      " iterated log is non-positive for every eps representable in double "
      "precision, so no usable eps0 exists");
}

Prior make_efkp(int b, double gamma, std::optional<double> eps0_opt) {
  if (b < 1) throw std::invalid_argument("efkp prior: depth b must be >= 1");
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("efkp prior: gamma must be > 0 for integrability");
  }
  const double eps0 = eps0_opt ? *eps0_opt : default_efkp_eps0(b);
  if (!(eps0 > 0.0) || eps0 >= 1.0) {
    throw std::invalid_argument("efkp prior: eps0 must lie in (0, 1)");
  }
  // Surfaces a domain_error naming the offending depth when eps0 is too
  // shallow for the requested ladder.
  if (iterated_log(1.0 / eps0, b) <= 0.0) {
    throw std::invalid_argument("efkp prior: L_b(1/eps0) must be positive");
  }
  std::ostringstream name;
  name << "efkp(b=" << b << ",gamma=" << gamma << ")";
  return make_ladder(b, gamma, eps0, PriorFamily::Efkp, name.str());
}

double iterated_log(double x, int depth) {
  if (depth < 1) throw std::invalid_argument("iterated_log: depth must be >= 1");
  double cur = x;
  for (int j = 1; j <= depth; ++j) {
    if (!(cur > 0.0)) {
      std::ostringstream msg;
      msg << "iterated_log: depth-" << j << " log of " << x
          << " is undefined (inner value " << cur << " <= 0)";
      throw std::domain_error(msg.str());
    }
    cur = std::log(cur);
  }
  return cur;
}

Prior make_custom_csv(const std::string& path, double eps_pi) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("custom prior: cannot open " + path);
  std::vector<std::pair<double, double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line.substr(first));
    std::string a, b;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b)) {
      throw std::runtime_error("custom prior: malformed row '" + line + "'");
    }
    char* end = nullptr;
    const double eps = std::strtod(a.c_str(), &end);
    if (end == a.c_str()) continue;  // header row
    const double pi = std::strtod(b.c_str(), &end);
    if (!(eps > 0.0) || eps > 1.0 || !(pi > 0.0) || !std::isfinite(pi)) {
      throw std::runtime_error("custom prior: row '" + line +
                               "' needs eps in (0,1] and pi > 0");
    }
    rows.emplace_back(eps, pi);
  }
  if (rows.size() < 2) {
    throw std::runtime_error("custom prior: need at least two data rows");
  }
  std::sort(rows.begin(), rows.end());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].first == rows[i - 1].first) {
      throw std::runtime_error("custom prior: duplicate eps value");
    }
  }
  auto table = std::make_shared<std::vector<std::pair<double, double>>>();
  auto scaled_table = std::make_shared<std::vector<std::pair<double, double>>>();
  table->reserve(rows.size());
  scaled_table->reserve(rows.size());
  for (const auto& [eps, pi] : rows) {
    const double v = std::log(eps), y = std::log(pi);
    table->emplace_back(v, y);
    scaled_table->emplace_back(v, y + v);  // ln(eps*pi) nodes
  }
  // Piecewise-linear in (ln eps, ln pi): power-law segments, power-law
  // continuation below the table, constant density above it.  Interpolating
  // the scaled table separately keeps deep-tail evaluation exact instead of
  // reconstructing y + v from two large opposing terms.
  auto interp = [](std::shared_ptr<std::vector<std::pair<double, double>>> tp,
                   double above_slope) {
    return [tp, above_slope](double v) {
      const auto& tb = *tp;
      if (v >= tb.back().first) {
        return tb.back().second + above_slope * (v - tb.back().first);
      }
      std::size_t j = 1;
      while (j + 1 < tb.size() && v > tb[j].first) ++j;
      const auto& [v0, y0] = tb[j - 1];
      const auto& [v1, y1] = tb[j];
      return y0 + (y1 - y0) * (v - v0) / (v1 - v0);
    };
  };
  return assemble_prior("csv(" + path + ")", PriorFamily::Custom,
                        interp(table, 0.0), interp(scaled_table, 1.0), eps_pi);
}

// ----------------------------------------------------------- staircase ----

double StaircaseTilt::value_log(double log_eps) const {
  // Breakpoints descend; the tilt is 1 + (number of breakpoints above eps),
  // capped by construction at the last computed level.
  const auto it = std::lower_bound(log_breakpoints.begin(), log_breakpoints.end(),
                                   log_eps, std::greater<double>());
  const auto above = static_cast<int>(it - log_breakpoints.begin());
  return static_cast<double>(std::max(1, above));
}

double StaircaseTilt::value(double eps) const {
  if (!(eps > 0.0)) throw std::domain_error("staircase tilt needs eps > 0");
  return value_log(std::log(eps));
}

StaircaseTilt build_staircase_tilt(const Prior& p, int k_max) {
  if (k_max < 1) throw std::invalid_argument("staircase tilt: k_max must be >= 1");
  StaircaseTilt s;
  s.mass = p.integral();
  if (!(s.mass > 0.0) || !std::isfinite(s.mass)) {
    throw std::invalid_argument(
        "staircase tilt: base density must have positive finite mass");
  }
  // eps_k solves Tail(ln(1/eps_k)) = 2^-k * mass, Tail evaluated directly as
  // a tail integral so each target keeps full relative precision.  Levels
  // stop when the next breakpoint would fall below double range, or when the
  // target sinks under the unresolvable part of the tail estimate (fat
  // iterated-log tails); the staircase then freezes at its last value, which
  // under-tilts and is therefore safe.
  const double t_cap = 700.0;
  const double cap_tail = tail_mass(p, t_cap);
  double t_lo = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    const double target = std::ldexp(s.mass, -k);
    const TailResult at_lo = tail_mass_full(p, t_lo);
    if (target <= 10.0 * at_lo.value * at_lo.rel_uncertainty) break;
    if (cap_tail >= target) break;
    double lo = t_lo, hi = t_cap;
    for (int it = 0; it < 120 && hi - lo > 1e-11; ++it) {
      const double mid = 0.5 * (lo + hi);
      (tail_mass(p, mid) >= target ? lo : hi) = mid;
    }
    const double t_k = 0.5 * (lo + hi);
    s.log_breakpoints.push_back(-t_k);
    t_lo = t_k;
  }
  return s;
}

Prior make_tilted(const Prior& base, const StaircaseTilt& tilt) {
  if (tilt.levels() == 0) {
    throw std::invalid_argument("tilted prior: staircase has no levels");
  }
  auto logpi = [base, tilt](double v) {
    return std::log(tilt.value_log(v)) + base.log_density_log(v);
  };
  auto scaled = [base, tilt](double v) {
    return std::log(tilt.value_log(v)) + base.log_scaled_density_log(v);
  };
  return assemble_prior("tilted(" + base.describe() + ")", PriorFamily::Tilted,
                        std::move(logpi), std::move(scaled), base.eps_pi());
}

// ---------------------------------------------------------- validation ----

Assumption1Report validate_assumption1(const Prior& p, int grid_points) {
  if (grid_points < 64) {
    throw std::invalid_argument("validate_assumption1: need >= 64 grid points");
  }
  Assumption1Report r;
  auto fn = [&p](double v) { return p.log_density_log(v); };
  const EdgeSurvey s = survey_edge(fn, p.eps_pi(), grid_points);
  r.log_delta = s.log_inf;
  r.left_slope = s.left_slope;
  r.lower_bounded = std::isfinite(s.log_inf) && s.left_slope <= 0.05;

  // eps*pi nondecreasing in eps on (0, eps_pi): walk ln(eps*pi) up the grid.
  const double v_hi = std::log(p.eps_pi());
  const double v_lo = std::log(std::min(1e-30, p.eps_pi() * 1e-20));
  double prev = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double v = v_lo + (v_hi - v_lo) * i / (grid_points - 1);
    const double g = v + fn(v);
    if (g < prev - 1e-12) ++r.monotone_violations;
    prev = g;
  }
  r.eps_pi_monotone = r.monotone_violations == 0;
  r.monotone_exempt = p.family() == PriorFamily::Tilted;

  // Mass increments over shrinking cutoff windows must decrease; a
  // logarithmically divergent density shows flat or growing increments.
  const double cuts[] = {1.0, 1e-4, 1e-8, 1e-16};
  auto f = [&p](double eps) { return p.density(eps); };
  for (int i = 0; i + 1 < 4; ++i) {
    r.cutoff_increments.push_back(integrate_log_sub(f, cuts[i + 1], cuts[i]));
  }
  r.integrable = true;
  for (std::size_t i = 1; i < r.cutoff_increments.size(); ++i) {
    if (r.cutoff_increments[i] > r.cutoff_increments[i - 1] * (1.0 - 1e-6)) {
      r.integrable = false;
    }
  }
  r.integral_estimate = p.integral();
  return r;
}

}  // namespace gtp
