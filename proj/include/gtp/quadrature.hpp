#pragma once
// Quadrature over (0,1] for integrands with an integrable endpoint
// singularity at 0.  Everything runs through the substitution eps = exp(-t):
// panels are laid out in t, growing geometrically away from eps = 1, so the
// node set is dense where posterior mass concentrates and still reaches
// eps = exp(-tmax) with a handful of panels.

#include <functional>
#include <vector>

namespace gtp {

// Gauss-Legendre rule on [-1, 1], nodes ascending.  Computed by Newton
// iteration on the Legendre recurrence; exact to machine precision for the
// small orders used here.
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
GaussRule gauss_legendre(int order);

struct QuadratureSpec {
  double tmax = 60.0;    // deepest node at eps = exp(-tmax)
  int panels = 40;       // geometric panels in t
  int points = 16;       // GL points per panel
  double growth = 1.15;  // panel width ratio
};

// Node set for  int_0^1 f(eps) pi(eps) deps  ~=  sum_j e^{log_w_j} f(eps_j) pi(eps_j).
// log_w folds in both the GL weight and the e^{-t} Jacobian; log_eps = -t_j
// exactly.  Nodes are ordered by ascending t (descending eps, all < 1).
struct LogNodes {
  std::vector<double> eps;
  std::vector<double> log_eps;
  std::vector<double> log_w;
  std::size_t size() const { return eps.size(); }
};
LogNodes make_log_nodes(const QuadratureSpec& spec);

// int_lo^hi f(eps) deps with the same substitution (lo > 0).  `f` must be
// evaluable in linear eps over [lo, hi].
double integrate_log_sub(const std::function<double(double)>& f, double lo, double hi,
                         int panels = 24, int points = 16);

// int_{t0}^{inf} h(t) dt for a nonnegative decaying integrand given directly
// in t (the caller folds in any Jacobian).  A plain-panel lead-in nails
// exponential decay; geometric windows with GL in log-t then sweep power-law
// and iterated-log tails.  Stops when increments drop below rel_tol of the
// running total, or at the window budget, reporting which; an uncapturable
// leftover (tails still fat at the edge of double range) shows up as
// rel_uncertainty.
struct TailResult {
  double value = 0.0;
  bool converged = false;
  double rel_uncertainty = 0.0;  // last increment / total (0 when converged)
};
TailResult integrate_to_infinity(const std::function<double(double)>& h, double t0,
                                 double rel_tol = 1e-14, int max_windows = 100);

}  // namespace gtp
