#include "gtp/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace gtp {
namespace {

// Accumulate one GL panel of h over [a, b] (plain variable).
double panel_sum(const GaussRule& g, const std::function<double(double)>& h, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * h(mid + half * g.x[i]);
  return s * half;
}

// Geometric panel edges over [a, b]: widths grow by `growth` toward b.
std::vector<double> geometric_edges(double a, double b, int panels, double growth) {
  std::vector<double> e(panels + 1);
  e[0] = a;
  e[panels] = b;
  if (std::abs(growth - 1.0) < 1e-12) {
    for (int k = 1; k < panels; ++k) e[k] = a + (b - a) * k / panels;
    return e;
  }
  const double denom = std::pow(growth, panels) - 1.0;
  for (int k = 1; k < panels; ++k) {
    e[k] = a + (b - a) * (std::pow(growth, k) - 1.0) / denom;
  }
  return e;
}

}  // namespace

GaussRule gauss_legendre(int order) {
  if (order < 2 || order > 128) throw std::invalid_argument("gauss_legendre: order out of range");
  GaussRule g;
  g.x.resize(order);
  g.w.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    g.x[i] = -x;
    g.x[order - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.w[i] = w;
    g.w[order - 1 - i] = w;
  }
  return g;
}

LogNodes make_log_nodes(const QuadratureSpec& spec) {
  if (!(spec.tmax > 0.0) || spec.panels < 1 || spec.points < 2 || !(spec.growth >= 1.0)) {
    throw std::invalid_argument("make_log_nodes: bad quadrature spec");
  }
  if (spec.panels * spec.points < 64) {
    throw std::invalid_argument("make_log_nodes: need at least 64 nodes");
  }
  const GaussRule g = gauss_legendre(spec.points);
  const auto edges = geometric_edges(0.0, spec.tmax, spec.panels, spec.growth);
  LogNodes out;
  out.eps.reserve(spec.panels * spec.points);
  out.log_eps.reserve(spec.panels * spec.points);
  out.log_w.reserve(spec.panels * spec.points);
  for (int k = 0; k < spec.panels; ++k) {
    const double a = edges[k], b = edges[k + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < spec.points; ++i) {
      const double t = mid + half * g.x[i];
      out.log_eps.push_back(-t);
      out.eps.push_back(std::exp(-t));
      out.log_w.push_back(std::log(g.w[i] * half) - t);
    }
  }
  return out;
}

double integrate_log_sub(const std::function<double(double)>& f, double lo, double hi,
                         int panels, int points) {
  if (!(lo > 0.0) || !(hi > lo) || hi > 1.0) {
    throw std::invalid_argument("integrate_log_sub: need 0 < lo < hi <= 1");
  }
  const GaussRule g = gauss_legendre(points);
  const double ta = -std::log(hi), tb = -std::log(lo);
  const auto edges = geometric_edges(ta, tb, panels, 1.2);
  const auto h = [&f](double t) { return f(std::exp(-t)) * std::exp(-t); };
  double s = 0.0;
  for (int k = 0; k < panels; ++k) s += panel_sum(g, h, edges[k], edges[k + 1]);
  return s;
}

TailResult integrate_to_infinity(const std::function<double(double)>& h, double t0,
                                 double rel_tol, int max_windows) {
  if (!(t0 >= 0.0) || !std::isfinite(t0)) {
    throw std::invalid_argument("integrate_to_infinity: need finite t0 >= 0");
  }
  const GaussRule g = gauss_legendre(16);
  TailResult r;
  // Lead-in: plain-variable panels over [t0, t0+40], narrow enough that GL-16
  // resolves exponential decay to machine precision.  Whatever an
  // exponentially decaying integrand leaves beyond the lead-in is below
  // e^-40 of its tail, so the cruder windows that follow cannot hurt it.
  const double lead = 40.0;
  {
    const auto edges = geometric_edges(t0, t0 + lead, 10, 1.0);
    for (int k = 0; k < 10; ++k) r.value += panel_sum(g, h, edges[k], edges[k + 1]);
  }
  // Doubling windows [a, 2a] with GL in v = ln t, which resolves power-law
  // and iterated-log decay; such tails may still be unresolvable within
  // double range, in which case the leftover is estimated by geometric
  // extrapolation of the window increments and reported as uncertainty.
  double a = t0 + lead;
  double inc_prev = 0.0, inc_last = 0.0;
  int calm = 0;
  const auto h_logt = [&h](double v) {
    const double t = std::exp(v);
    return h(t) * t;
  };
  for (int jw = 0; jw < max_windows; ++jw) {
    const double b = 2.0 * a;
    double inc = 0.0;
    const auto edges = geometric_edges(std::log(a), std::log(b), 4, 1.0);
    for (int k = 0; k < 4; ++k) inc += panel_sum(g, h_logt, edges[k], edges[k + 1]);
    r.value += inc;
    inc_prev = inc_last;
    inc_last = inc;
    if (inc <= rel_tol * r.value) {
      if (++calm >= 2) {
        r.converged = true;
        r.rel_uncertainty = 0.0;
        return r;
      }
    } else {
      calm = 0;
    }
    a = b;
    if (a > 1e300) break;
  }
  r.converged = false;
  double rest = 0.0;
  if (inc_last > 0.0) {
    double ratio = inc_prev > 0.0 ? inc_last / inc_prev : 1.0;
    ratio = std::min(std::max(ratio, 0.0), 0.999);
    rest = inc_last * ratio / (1.0 - ratio);
  }
  r.rel_uncertainty = r.value > 0.0 ? rest / r.value : 1.0;
  return r;
}

}  // namespace gtp
