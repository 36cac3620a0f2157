// Envelope-module tests: family spot values and domain thresholds, the
// density<->envelope transforms against closed forms, the far-tail integral
// classifier on families with known answers (including the ones it must
// refuse to call), equivalence of densities and envelopes with preservation
// under the transforms, and the envelope contract checks.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gtp/upper_class.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gtp/prior.hpp"

using namespace gtp;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

const double kE = std::exp(1.0);

UpperClassFunction const_psi(double value) {
  return UpperClassFunction::custom(
      "const", PsiFamily::Custom, [value](double) { return value * value; }, 0.0);
}

Prior scaled_prior(const Prior& base, double factor) {
  return Prior::custom(base.describe() + " scaled", PriorFamily::Custom,
                       [base, lf = std::log(factor)](double v) {
                         return base.log_density_log(v) + lf;
                       },
                       base.eps_pi());
}

UpperClassFunction shifted_psi(const UpperClassFunction& base, double sq_shift) {
  return UpperClassFunction::custom(
      base.describe() + " shifted", PsiFamily::Custom,
      [base, sq_shift](double u) { return base.psi_sq_u(u) + sq_shift; },
      base.u_min());
}

}  // namespace

TEST_CASE("envelope families: spot values, thresholds, domains") {
  const UpperClassFunction cor = psi_efkp(2, 0.5);
  CHECK(cor.family() == PsiFamily::Efkp);
  CHECK(cor.u_min() == kE);
  CHECK(cor.M() == doctest::Approx(std::exp(kE)).epsilon(1e-14));
  // psi^2(e^3) = 2*3 + 4 ln 3.
  CHECK(cor.psi_u(std::exp(3.0)) ==
        doctest::Approx(3.224042362419024).epsilon(1e-13));
  CHECK(cor(std::exp(std::exp(3.0))) ==
        doctest::Approx(3.224042362419024).epsilon(1e-13));

  CHECK(psi_efkp(3, 0.5).u_min() == doctest::Approx(std::exp(kE)).epsilon(1e-14));
  const UpperClassFunction deep = psi_efkp(4, 0.5);
  CHECK(deep.u_min() == doctest::Approx(std::exp(std::exp(kE))).epsilon(1e-13));
  CHECK(std::isinf(deep.M()));  // threshold itself is beyond double range

  const UpperClassFunction sll = psi_sqrt_log_log(2.0);
  CHECK(sll.family() == PsiFamily::SqrtLogLog);
  CHECK(sll.u_min() == 1.0);
  CHECK(sll.psi_u(std::exp(2.0)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(sll(std::exp(std::exp(2.0))) == doctest::Approx(2.0).epsilon(1e-14));

  const UpperClassFunction capped =
      psi_min(UpperClassFunction::custom(
                  "ln", PsiFamily::Custom, [](double u) { return u; }, 1.0),
              cor);
  CHECK(capped.family() == PsiFamily::Composed);
  CHECK(capped.u_min() == kE);
  CHECK(capped.psi_u(5.0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-13));
  CHECK(capped.psi_sq_u(100.0) ==
        doctest::Approx(cor.psi_sq_u(100.0)).epsilon(1e-13));

  CHECK_THROWS_AS(cor.psi_sq_u(1.0), std::domain_error);
  CHECK_THROWS_AS(cor.psi_sq_u(kE), std::domain_error);  // boundary excluded
  CHECK_THROWS_AS(sll(2.0), std::domain_error);          // ln 2 < u_min
  CHECK_THROWS_AS(sll(-1.0), std::domain_error);
}

TEST_CASE("envelope construction rejects bad input") {
  CHECK_THROWS_AS(psi_efkp(1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(psi_efkp(5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(psi_efkp(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(psi_efkp(2, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(psi_sqrt_log_log(0.0), std::invalid_argument);
  CHECK_THROWS_AS(psi_sqrt_log_log(-2.0), std::invalid_argument);
  CHECK_THROWS_AS(UpperClassFunction::custom("null", PsiFamily::Custom, nullptr, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(UpperClassFunction::custom(
                      "neg", PsiFamily::Custom, [](double) { return -1.0; }, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(UpperClassFunction::custom(
                      "bad-umin", PsiFamily::Custom, [](double) { return 1.0; }, -1.0),
                  std::invalid_argument);
}

TEST_CASE("G transform: domain thresholds match closed forms") {
  const UpperClassFunction gu = apply_G(make_uniform());
  CHECK(gu.family() == PsiFamily::Composed);
  CHECK(gu.describe().rfind("G[", 0) == 0);
  CHECK(gu.u_min() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(gu.M() == doctest::Approx(1.6487212707001282).epsilon(1e-12));

  CHECK(apply_G(make_power(0.3)).M() ==
        doctest::Approx(2.042727070266142).epsilon(1e-11));
  CHECK(apply_G(make_power(0.5)).M() ==
        doctest::Approx(2.7182818284590451).epsilon(1e-11));
  CHECK(apply_G(make_power(0.7)).M() ==
        doctest::Approx(5.2944900504700296).epsilon(1e-11));

  const UpperClassFunction gl = apply_G(make_lil());
  CHECK(gl.u_min() == doctest::Approx(2.2157120113488267).epsilon(1e-12));
  CHECK(gl.M() == doctest::Approx(9.1679344616534841).epsilon(1e-11));

  // Deep ladder: the clamp releases inside the constant-extension region,
  // 5.81 below the extension boundary exp(exp(exp(1/2))) = 181.33.
  const UpperClassFunction gd = apply_G(make_efkp(4, 0.5));
  CHECK(gd.u_min() == doctest::Approx(175.52197734389557).epsilon(1e-12));
  CHECK(gd.M() == doctest::Approx(1.6913216696667801e76).epsilon(1e-9));
}

TEST_CASE("G transform: envelope values and the scaled-density identity") {
  const UpperClassFunction gu = apply_G(make_uniform());
  CHECK(gu(std::exp(2.0)) == doctest::Approx(2.3208391502040575).epsilon(1e-13));
  CHECK(apply_G(make_power(0.5))(std::exp(10.0)) ==
        doctest::Approx(3.5075041116147028).epsilon(1e-13));
  {
    // lil ladder region at u = e^2: beta = 4 + 4 ln 2.
    const double beta = 4.0 + 4.0 * std::log(2.0);
    CHECK(apply_G(make_lil()).psi_u(kE * kE) ==
          doctest::Approx(std::sqrt(beta + std::log(beta))).epsilon(1e-13));
  }

  // lambda G e^{-G^2/2} = sqrt(1 + ln beta / beta) * (1/lambda) pi(1/lambda)
  // wherever the clamp is inactive, for every shipped density family.
  const struct {
    Prior pi;
    double u_lo;
  } cases[] = {
      {make_uniform(), 0.6},
      {make_power(0.5), 1.2},
      {make_lil(), 2.4},
      {make_efkp(4, 0.5), 176.0},
  };
  for (const auto& c : cases) {
    const UpperClassFunction g = apply_G(c.pi);
    for (int i = 0; i < 40; ++i) {
      const double u = c.u_lo * std::pow(600.0 / c.u_lo, i / 39.0);
      const double beta = -2.0 * c.pi.log_scaled_density_log(-u);
      REQUIRE(beta >= 1.0);
      const double q = g.psi_sq_u(u);
      CHECK(rel_err(q, beta + std::log(beta)) < 1e-12);
      const double lhs = 0.5 * std::log(q) - 0.5 * q;
      const double rhs = 0.5 * std::log1p(std::log(beta) / beta) +
                         c.pi.log_density_log(-u) - u;
      CHECK(std::abs(lhs - rhs) < 1e-9);
    }
  }
}

TEST_CASE("F transform: frozen density values and the monotone freeze") {
  // sqrt(2 lnln lambda) is not integrable, so construction must be forced;
  // the density formula itself is still exact.
  const Prior f2 = apply_F(psi_sqrt_log_log(2.0), /*enforce=*/false);
  CHECK(f2.family() == PriorFamily::FromPsi);
  CHECK(f2.describe().rfind("F[", 0) == 0);
  CHECK(f2.density(1e-5) == doctest::Approx(19201.397673294261).epsilon(1e-11));
  CHECK(f2.density(1e-10) == doctest::Approx(1087752505.6410716).epsilon(1e-11));
  CHECK(f2.eps_pi() == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  const Prior fc = apply_F(psi_efkp(2, 0.5));  // integrable: enforce allowed
  // Above eps_one the density is frozen at its turnover value
  // sqrt(q1) e^{e - q1/2} with q1 = psi^2 at the domain edge = 2.
  CHECK(fc.density(0.5) == fc.density(0.9));
  CHECK(fc.log_density_log(std::log(0.5)) ==
        doctest::Approx(0.5 * std::log(2.0) + kE - 1.0).epsilon(1e-6));
  // Formula region at eps = e^{-e^3}: ln F = ln psi + u - psi^2/2.
  {
    const double q = 6.0 + 4.0 * std::log(3.0);
    CHECK(fc.log_density_log(-std::exp(3.0)) ==
          doctest::Approx(std::log(3.224042362419024) + std::exp(3.0) - 0.5 * q)
              .epsilon(1e-12));
  }
  CHECK(validate_assumption1(fc).pass());

  // Constant envelope (not integrable, forced): F = psi e^{-psi^2/2} / eps.
  const Prior fk = apply_F(const_psi(2.0), /*enforce=*/false);
  CHECK(fk.density(0.01) ==
        doctest::Approx(2.0 * std::exp(-2.0) / 0.01).epsilon(1e-9));
}

TEST_CASE("F transform: rejections") {
  CHECK_THROWS_AS(apply_F(psi_sqrt_log_log(2.0)), std::invalid_argument);
  CHECK_THROWS_AS(apply_F(const_psi(2.0)), std::invalid_argument);
  // Decreasing envelope violates the contract regardless of enforcement.
  CHECK_THROWS_AS(apply_F(UpperClassFunction::custom(
                              "dec", PsiFamily::Custom,
                              [](double u) { return 4.0 / (1.0 + u); }, 0.0),
                          /*enforce=*/false),
                  std::invalid_argument);
  // Domain threshold so deep that 1/M underflows every representable density.
  CHECK_THROWS_AS(apply_F(psi_efkp(4, 0.5), /*enforce=*/false),
                  std::invalid_argument);
  // An envelope stuck below 1 never reaches the freeze point: the scan for
  // the crossing exhausts the representable range.
  CHECK_THROWS_AS(apply_F(const_psi(0.5), /*enforce=*/false),
                  std::invalid_argument);
  // Depth 3 is representable and Inconclusive, which enforcement accepts.
  CHECK(apply_F(psi_efkp(3, 0.5)).density(1e-9) > 0.0);
}

TEST_CASE("FG composition: closed form, direct cross-check, frozen ratios") {
  const Prior uni = make_uniform();
  {
    const Composition c = compose_FG(uni, std::exp(-10.0));
    CHECK_FALSE(c.clamped);
    CHECK(c.value == doctest::Approx(1.0722810329748911).epsilon(1e-12));
    CHECK(std::isfinite(c.direct));
    CHECK(c.rel_gap < 1e-12);
  }
  CHECK(-2.0 * uni.log_scaled_density_log(std::log(1e-20)) ==
        doctest::Approx(92.103403719761843).epsilon(1e-13));

  const struct {
    Prior pi;
    double ratio;
  } at20[] = {
      {make_uniform(), 1.0242591918067836},
      {make_power(0.3), 1.0318044824488255},
      {make_power(0.5), 1.0407508271522883},
      {make_power(0.7), 1.0583555221327681},
      {make_lil(), 1.0940838966866364},
  };
  for (const auto& t : at20) {
    const double v = std::log(1e-20);
    const Composition c = compose_FG(t.pi, 1e-20);
    CHECK_FALSE(c.clamped);
    const double ratio = std::exp(c.log_value - t.pi.log_density_log(v));
    CHECK(ratio == doctest::Approx(t.ratio).epsilon(1e-12));
    CHECK(ratio > 1.0);
    CHECK(c.rel_gap < 1e-12);
  }

  // The ratio creeps toward 1 as eps drops, but is nowhere near it at any
  // workable depth.
  const double r50 =
      std::exp(compose_FG(uni, 1e-50).log_value - uni.log_density_log(std::log(1e-50)));
  const double r100 = std::exp(compose_FG(uni, 1e-100).log_value -
                               uni.log_density_log(std::log(1e-100)));
  const double r200 = std::exp(compose_FG(uni, 1e-200).log_value -
                               uni.log_density_log(std::log(1e-200)));
  CHECK(r50 == doctest::Approx(1.011742139523206).epsilon(1e-12));
  CHECK(r100 == doctest::Approx(1.0066360953302922).epsilon(1e-12));
  CHECK(r200 == doctest::Approx(1.0036985051299361).epsilon(1e-12));
  CHECK(r50 > r100);
  CHECK(r100 > r200);
  CHECK(r200 > 1.0);
}

TEST_CASE("FG composition: clamp region and overflow handling") {
  const Prior deep = make_efkp(4, 0.5);
  {
    // At eps = 1e-20 the deep ladder's eps*pi is still far above 1: the
    // clamp is active and the composition returns the density unchanged.
    const Composition c = compose_FG(deep, 1e-20);
    CHECK(c.clamped);
    CHECK(c.log_value == deep.log_density_log(std::log(1e-20)));
    CHECK(std::isnan(c.direct));
    CHECK(c.rel_gap == 0.0);
  }
  {
    // At eps = e^{-200} the ladder region is active and unclamped:
    // beta = 2(ln t + ln_2 t + ln_3 t + 1.5 ln_4 t) at t = 200.
    const double t = 200.0;
    const double beta = 2.0 * (std::log(t) + std::log(std::log(t)) +
                               std::log(std::log(std::log(t))) +
                               1.5 * std::log(std::log(std::log(std::log(t)))));
    const Composition c = compose_FG(deep, std::exp(-t));
    CHECK_FALSE(c.clamped);
    const double ratio = std::exp(c.log_value - deep.log_density_log(-t));
    CHECK(ratio == doctest::Approx(std::sqrt(1.0 + std::log(beta) / beta))
                       .epsilon(1e-11));
  }
  {
    const Composition c = compose_FG(make_uniform(), 1.0);
    CHECK(c.clamped);  // beta raw = 0 at eps = 1
    CHECK(c.value == 1.0);
  }
  {
    // Linear-scale value overflows for the lil ladder at denormal eps; the
    // log fields stay exact and the cross-check runs in logs.
    const Composition c = compose_FG(make_lil(), 1e-320);
    CHECK_FALSE(c.clamped);
    CHECK(std::isinf(c.value));
    CHECK(std::isinf(c.direct));
    CHECK(std::isfinite(c.log_value));
    CHECK(c.rel_gap < 1e-9);
  }
  CHECK_THROWS_AS(compose_FG(make_uniform(), 0.0), std::domain_error);
  CHECK_THROWS_AS(compose_FG(make_uniform(), 2.0), std::domain_error);
  CHECK_THROWS_AS(compose_FG(make_uniform(), -0.5), std::domain_error);
}

TEST_CASE("GF composition: frozen values, contraction, cross-check") {
  {
    const Composition c = compose_GF(const_psi(3.0), 10.0);
    CHECK(c.value == doctest::Approx(2.9529825773219285).epsilon(1e-12));
    CHECK(c.direct == doctest::Approx(2.9529825773219285).epsilon(1e-8));
    CHECK(c.rel_gap < 1e-9);
    CHECK(c.value < 3.0);
  }
  CHECK(compose_GF(const_psi(kE), 10.0).value ==
        doctest::Approx(2.6595913873608539).epsilon(1e-12));

  // Closed form sqrt(q - ln q + ln(q - ln q)) at q = psi^2.
  const UpperClassFunction cor = psi_efkp(2, 0.5);
  {
    const double q = 6.0 + 4.0 * std::log(3.0);
    const double bf = q - std::log(q);
    const Composition c = compose_GF(cor, std::exp(std::exp(3.0)));
    CHECK(c.value ==
          doctest::Approx(std::sqrt(bf + std::log(bf))).epsilon(1e-12));
    CHECK(c.value < 3.224042362419024);
  }
  // Below psi = 1 the closed form holds but contraction does not; the
  // direct pipeline is skipped there.
  {
    const Composition c = compose_GF(const_psi(0.5), 2.0);
    const double braw = 0.25 - std::log(0.25);
    CHECK_FALSE(c.clamped);
    CHECK(std::isnan(c.direct));
    CHECK(c.value ==
          doctest::Approx(std::sqrt(braw + std::log(braw))).epsilon(1e-12));
    CHECK(c.value > 0.5);
  }
  // Pipeline agreement and contraction across a wide grid (the composition
  // itself throws if closed and direct drift past 1e-10).
  for (double u : {4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0}) {
    const Composition c = compose_GF(cor, std::exp(u));
    CHECK(c.value < cor.psi_u(u));
    CHECK(c.rel_gap < 1e-10);
  }
}

TEST_CASE("integral test: convergent families with frozen mass") {
  const UpperClassFunction cor = psi_efkp(2, 0.5);
  {
    const IntegralTestResult r = integral_test(cor);
    CHECK(r.verdict == IntegralVerdict::Convergent);
    CHECK(r.value == doctest::Approx(3.2543680296213182).epsilon(1e-6));
    // The probe stops at u = 1e200; the fitted tail recovers the missing
    // far-tail mass of the full integral 3.3868160751924838.
    CHECK(rel_err(r.value + r.tail_estimate, 3.3868160751924838) < 0.02);
    CHECK(r.fitted_slope > 1.4);
    CHECK(r.windows > 400);
  }
  CHECK(integral_test(psi_efkp(2, 1.0)).verdict == IntegralVerdict::Convergent);
  CHECK(integral_test(psi_sqrt_log_log(3.0)).verdict == IntegralVerdict::Convergent);
  {
    const IntegralTestResult r = integral_test(apply_G(make_uniform()));
    CHECK(r.verdict == IntegralVerdict::Convergent);
    CHECK(r.value == doctest::Approx(0.68990099744675426).epsilon(1e-7));
    CHECK(r.tail_estimate < 1e-10);
    CHECK(r.note.find("geometric collapse") != std::string::npos);
  }
  for (double a : {0.3, 0.5, 0.7}) {
    CHECK(integral_test(apply_G(make_power(a))).verdict ==
          IntegralVerdict::Convergent);
  }
  {
    const IntegralTestResult r = integral_test(apply_G(make_lil()));
    CHECK(r.verdict == IntegralVerdict::Convergent);
    CHECK(r.fitted_slope > 1.6);  // window masses fall like L^{-2}
    CHECK(r.value > 0.0);
  }
  {
    const UpperClassFunction capped =
        psi_min(UpperClassFunction::custom(
                    "ln", PsiFamily::Custom, [](double u) { return u; }, 1.0),
                cor);
    CHECK(integral_test(capped).verdict == IntegralVerdict::Convergent);
  }
  CHECK(integral_test(cor, 1e15, 10.0).verdict == IntegralVerdict::Convergent);
}

TEST_CASE("integral test: divergent families and the honest refusals") {
  {
    const IntegralTestResult r = integral_test(psi_sqrt_log_log(2.0));
    CHECK(r.verdict == IntegralVerdict::Divergent);
    CHECK(std::isinf(r.tail_estimate));
    CHECK(r.note.find("nondecreasing") != std::string::npos);
  }
  CHECK(integral_test(psi_sqrt_log_log(1.0)).verdict == IntegralVerdict::Divergent);
  CHECK(integral_test(const_psi(2.0)).verdict == IntegralVerdict::Divergent);

  // 2 ln_2 + 3 ln_3 sits exactly on the divergent side of the criterion; its
  // window masses decay at the critical exponent 1 and the classifier must
  // refuse the call rather than guess.
  {
    const IntegralTestResult r = integral_test(psi_efkp(2, 0.25));
    CHECK(r.verdict == IntegralVerdict::Inconclusive);
    CHECK(r.fitted_slope > 0.8);
    CHECK(r.fitted_slope < 1.2);
  }
  // The deep-ladder envelope's distinguishing factor is three iterated logs
  // down: across every representable u it moves the decay exponent by less
  // than the honesty band, so the verdict stays open by design.
  {
    const IntegralTestResult r = integral_test(apply_G(make_efkp(4, 0.5)));
    CHECK(r.verdict == IntegralVerdict::Inconclusive);
    CHECK(r.fitted_slope > 1.0);
    CHECK(r.fitted_slope < 1.45);
    CHECK(r.note.find("raised") != std::string::npos);
    CHECK(r.note.find("indistinguishability") != std::string::npos);
  }
}

TEST_CASE("integral test: checkpoint evidence is always reported") {
  {
    const IntegralTestResult r = integral_test(apply_G(make_power(0.5)));
    CHECK(r.I_at_lambda_hi > 0.0);
    CHECK(r.I_at_growth >= r.I_at_lambda_hi);
    CHECK(r.increment_rel >= 0.0);
    CHECK(r.increment_rel < 1e-3);  // settled by the first checkpoint
    CHECK(!r.note.empty());
  }
  {
    // Divergent case: the checkpoint increment alone already shows growth.
    const IntegralTestResult r = integral_test(psi_sqrt_log_log(2.0));
    CHECK(r.I_at_growth > r.I_at_lambda_hi);
    CHECK(r.increment_rel > 1e-3);
  }
}

TEST_CASE("equivalence: densities") {
  const Prior uni = make_uniform();
  {
    const EquivalenceReport rep = equivalent_priors(uni, scaled_prior(uni, 2.0));
    CHECK(rep.equivalent);
    CHECK(rep.points == 200);
    CHECK(rep.log_ratio_min == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(rep.log_ratio_max == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(std::abs(rep.drift) < 1e-9);
  }
  {
    const EquivalenceReport rep = equivalent_priors(uni, make_power(0.5));
    CHECK_FALSE(rep.equivalent);
    CHECK(rep.log_ratio_max > std::log(1e3));
  }
  {
    // A density and its FG image are interchangeable: the ratio is
    // sqrt((beta + ln beta)/beta), trapped in (1, 1.1] on the whole grid.
    const EquivalenceReport rep =
        equivalent_priors(uni, apply_F(apply_G(uni)));
    CHECK(rep.equivalent);
    CHECK(rep.log_ratio_min > 0.0);
    CHECK(rep.log_ratio_max < 0.11);  // ln ratio at eps = 1e-2, beta = 9.2
  }
  CHECK(equivalent_priors(make_lil(), scaled_prior(make_lil(), 3.0)).equivalent);
}

TEST_CASE("equivalence: envelopes") {
  const UpperClassFunction cor = psi_efkp(2, 0.5);
  {
    const EquivalenceReport rep =
        equivalent_psis(cor, shifted_psi(cor, 2.0 * std::log(2.0)));
    CHECK(rep.equivalent);
    CHECK(rep.log_ratio_min == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(rep.log_ratio_max == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
  {
    // sqrt(2 lnln) vs sqrt(3 lnln): the gap (1/2) ln_2 lambda is unbounded;
    // the grid must reach far enough for the range rule to fire.
    const EquivalenceReport rep =
        equivalent_psis(psi_sqrt_log_log(2.0), psi_sqrt_log_log(3.0));
    CHECK_FALSE(rep.equivalent);
    CHECK(rep.log_ratio_max > std::log(1e3));
  }
  {
    // An envelope and its GF image differ by (1/2) ln(1 - ln q / q) -> 0.
    const EquivalenceReport rep =
        equivalent_psis(cor, apply_G(apply_F(cor, /*enforce=*/false)));
    CHECK(rep.equivalent);
    CHECK(rep.log_ratio_max <= 0.0);
    CHECK(rep.log_ratio_min > -0.5);
  }
}

TEST_CASE("equivalence preserved through the transforms") {
  const Prior uni = make_uniform();
  CHECK(check_G_preserves(uni, scaled_prior(uni, 2.0)).pass());
  CHECK(check_G_preserves(make_power(0.5), scaled_prior(make_power(0.5), 2.0)).pass());
  CHECK(check_G_preserves(make_lil(), scaled_prior(make_lil(), 3.0)).pass());
  {
    const PreservationReport rep = check_G_preserves(uni, make_power(0.5));
    CHECK(rep.skipped);
    CHECK_FALSE(rep.output.has_value());
    CHECK_FALSE(rep.pass());
  }

  const UpperClassFunction cor = psi_efkp(2, 0.5);
  CHECK(check_F_preserves(cor, shifted_psi(cor, 2.0 * std::log(2.0))).pass());
  CHECK(check_F_preserves(psi_sqrt_log_log(3.0),
                          shifted_psi(psi_sqrt_log_log(3.0), 2.0 * std::log(5.0)))
            .pass());
  {
    const PreservationReport rep =
        check_F_preserves(psi_sqrt_log_log(2.0), psi_sqrt_log_log(3.0));
    CHECK(rep.skipped);
    CHECK_FALSE(rep.pass());
  }
}

TEST_CASE("envelope contract validation") {
  {
    const Assumption2Report rep = validate_assumption2(psi_efkp(2, 0.5));
    CHECK(rep.pass());
    CHECK(rep.positive);
    CHECK(rep.nondecreasing);
    CHECK(rep.integral.verdict == IntegralVerdict::Convergent);
    // Floor of ln(lambda psi e^{-psi^2/2}) sits at the domain edge where
    // psi^2 = 2: e + (1/2) ln 2 - 1.
    CHECK(rep.log_delta ==
          doctest::Approx(kE + 0.5 * std::log(2.0) - 1.0).epsilon(1e-6));
  }
  {
    const Assumption2Report rep = validate_assumption2(apply_G(make_uniform()));
    CHECK(rep.pass());
    CHECK(rep.log_delta >= 0.0);
    CHECK(rep.log_delta < 1e-6);
  }
  {
    // Inconclusive integrability does not fail the contract; the floor for
    // the deep ladder equals the constant-region density exponent.
    const Assumption2Report rep = validate_assumption2(apply_G(make_efkp(4, 0.5)));
    CHECK(rep.pass());
    CHECK(rep.integral.verdict == IntegralVerdict::Inconclusive);
    CHECK(rep.log_delta == doctest::Approx(175.02197734389557).epsilon(1e-9));
  }
  {
    const Assumption2Report rep = validate_assumption2(psi_sqrt_log_log(2.0));
    CHECK_FALSE(rep.pass());  // divergent integral
    CHECK(rep.positive);
    CHECK(rep.nondecreasing);
  }
}
