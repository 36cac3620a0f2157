// Quadrature unit tests: Gauss-Legendre rule exactness, the log-substituted
// node set against closed-form integrals, and tail integration across
// exponential, power-law, and iterated-log decay.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gtp/quadrature.hpp"

#include <cmath>
#include <vector>

using gtp::gauss_legendre;
using gtp::integrate_log_sub;
using gtp::integrate_to_infinity;
using gtp::LogNodes;
using gtp::make_log_nodes;
using gtp::QuadratureSpec;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_CASE("gauss_legendre: symmetry, weight sum, and polynomial exactness") {
  const auto g = gauss_legendre(16);
  REQUIRE(g.x.size() == 16);
  double wsum = 0.0;
  for (std::size_t i = 0; i < 16; ++i) {
    wsum += g.w[i];
    CHECK(g.x[i] == doctest::Approx(-g.x[15 - i]).epsilon(1e-15));
    CHECK(g.w[i] == doctest::Approx(g.w[15 - i]).epsilon(1e-15));
    if (i > 0) CHECK(g.x[i] > g.x[i - 1]);
  }
  CHECK(std::abs(wsum - 2.0) < 1e-14);
  // A 16-point rule integrates monomials through degree 31 exactly:
  // int_-1^1 x^k = 0 (odd), 2/(k+1) (even).
  for (int k = 0; k <= 31; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < 16; ++i) s += g.w[i] * std::pow(g.x[i], k);
    const double want = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
    CHECK(std::abs(s - want) < 1e-13);
  }
  CHECK_THROWS(gauss_legendre(1));
  CHECK_THROWS(gauss_legendre(1000));
}

TEST_CASE("make_log_nodes: layout and closed-form integrals over (0,1]") {
  const QuadratureSpec spec;
  const LogNodes nodes = make_log_nodes(spec);
  REQUIRE(nodes.size() == static_cast<std::size_t>(spec.panels * spec.points));
  REQUIRE(nodes.size() >= 64);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    CHECK(nodes.eps[i] > 0.0);
    CHECK(nodes.eps[i] < 1.0);
    CHECK(nodes.log_eps[i] == doctest::Approx(std::log(nodes.eps[i])).epsilon(1e-14));
    if (i > 0) CHECK(nodes.eps[i] < nodes.eps[i - 1]);  // descending eps
  }
  CHECK(nodes.eps.back() > std::exp(-spec.tmax - 1.0));

  // int_0^1 1 deps: the node set covers (e^-60, 1), so expect 1 - e^-60.
  double s1 = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) s1 += std::exp(nodes.log_w[i]);
  CHECK(std::abs(s1 - 1.0) < 1e-13);

  // int_0^1 eps^{-1/2} deps = 2, with the endpoint singularity at 0.
  double s2 = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    s2 += std::exp(nodes.log_w[i] - 0.5 * nodes.log_eps[i]);
  }
  CHECK(rel_err(s2, 2.0) < 1e-12);

  // int_0^1 eps deps = 1/2.
  double s3 = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    s3 += std::exp(nodes.log_w[i] + nodes.log_eps[i]);
  }
  CHECK(rel_err(s3, 0.5) < 1e-13);

  QuadratureSpec tiny;
  tiny.panels = 3;
  tiny.points = 4;
  CHECK_THROWS(make_log_nodes(tiny));  // under the 64-node floor
}

TEST_CASE("integrate_log_sub: closed forms on interior windows") {
  const auto inv = [](double e) { return 1.0 / e; };
  CHECK(rel_err(integrate_log_sub(inv, 0.25, 1.0), std::log(4.0)) < 1e-13);
  const auto lin = [](double e) { return e; };
  CHECK(rel_err(integrate_log_sub(lin, 1e-8, 1e-2), 0.5 * (1e-4 - 1e-16)) < 1e-12);
  const auto powhalf = [](double e) { return 1.0 / std::sqrt(e); };
  CHECK(rel_err(integrate_log_sub(powhalf, 1e-12, 1.0), 2.0 * (1.0 - 1e-6)) < 1e-12);
  CHECK_THROWS(integrate_log_sub(inv, 0.0, 1.0));
  CHECK_THROWS(integrate_log_sub(inv, 0.5, 0.25));
}

TEST_CASE("integrate_to_infinity: exponential decay to full relative precision") {
  const auto e1 = integrate_to_infinity([](double t) { return std::exp(-t); }, 0.0);
  CHECK(e1.converged);
  CHECK(rel_err(e1.value, 1.0) < 1e-13);

  // Deep tail: int_60^inf e^-t = e^-60 ~ 8.8e-27, still full relative accuracy.
  const auto e2 = integrate_to_infinity([](double t) { return std::exp(-t); }, 60.0);
  CHECK(e2.converged);
  CHECK(rel_err(e2.value, std::exp(-60.0)) < 1e-13);

  const auto e3 =
      integrate_to_infinity([](double t) { return std::exp(-0.5 * t); }, 10.0);
  CHECK(e3.converged);
  CHECK(rel_err(e3.value, 2.0 * std::exp(-5.0)) < 1e-13);
}

TEST_CASE("integrate_to_infinity: power-law decay") {
  // int_2^inf t^-2 = 1/2; the doubling windows converge geometrically.
  const auto r = integrate_to_infinity([](double t) { return 1.0 / (t * t); }, 2.0);
  CHECK(r.converged);
  CHECK(rel_err(r.value, 0.5) < 1e-12);

  const auto r3 =
      integrate_to_infinity([](double t) { return std::pow(t, -1.5); }, 4.0);
  CHECK(r3.converged);
  CHECK(rel_err(r3.value, 2.0 / std::sqrt(4.0)) < 1e-11);
}

TEST_CASE("integrate_to_infinity: iterated-log tail reports honest uncertainty") {
  // int_60^inf dt/(t ln^2 t) = 1/ln 60 ~ 0.2442.  The integrand still holds
  // ~1/ln(t_end) of its mass at any representable t_end, so the window budget
  // cannot converge; the result must say so and carry a nonzero uncertainty.
  const auto h = [](double t) {
    const double lt = std::log(t);
    return 1.0 / (t * lt * lt);
  };
  const auto r = integrate_to_infinity(h, 60.0);
  CHECK_FALSE(r.converged);
  CHECK(r.value > 0.20);
  CHECK(r.value < 1.0 / std::log(60.0));
  CHECK(r.rel_uncertainty > 0.005);
  CHECK(r.rel_uncertainty < 0.5);
}

TEST_CASE("integrate_to_infinity: zero tail and argument validation") {
  const auto z = integrate_to_infinity([](double) { return 0.0; }, 5.0);
  CHECK(z.converged);
  CHECK(z.value == 0.0);
  CHECK_THROWS(integrate_to_infinity([](double) { return 0.0; }, -1.0));
}
