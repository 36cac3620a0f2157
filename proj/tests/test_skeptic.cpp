// Strategy tests.  The mixture oracles are closed forms: for the flat prior
// the path (1,1,1) gives capital int_0^1 (1+e)^3 de = 15/4 with round
// fractions 1/2, 5/9, 17/28; for the square-root-singular prior the opening
// fraction is (2/3)/2 = 1/3; the two-atom posterior mean after one upward
// move is 17/44.  The capital identity (game-accumulated capital equals the
// mixture integral) is checked round by round against a fresh recomputation.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gtp/skeptic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "gtp/game.hpp"
#include "gtp/prior.hpp"

using namespace gtp;

namespace {

std::vector<double> random_path(std::size_t n, double down, double up,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> xs(n);
  for (auto& x : xs) x = (rng() >> 63) ? up : down;
  return xs;
}

// Drives a strategy through a game and checks the running capital against the
// strategy's own mixture capital at every round.
double drive_and_check(MixtureStrategy& strat, const std::vector<double>& path,
                       double K0, double rel_tol) {
  GameState s = make_game(GameVariant::Unbounded, K0);
  double worst = 0.0;
  for (double x : path) {
    const double M = strat.stake(s);
    REQUIRE(stake_is_legal(s.variant, M, s.K));
    const PlayResult pr = play_round(s, M, x);
    REQUIRE(pr.outcome == RoundOutcome::Ok);
    s = pr.state;
    strat.observe(x);
    const double ref = strat.capital(K0);
    const double rel = std::abs(s.K - ref) / std::max(std::abs(ref), 1e-300);
    worst = std::max(worst, rel);
    REQUIRE(rel <= rel_tol);
  }
  return worst;
}

}  // namespace

TEST_CASE("constant proportion stakes a fixed fraction") {
  ConstantProportion cp(0.3);
  GameState s = make_game(GameVariant::Unbounded, 2.0);
  CHECK(cp.stake(s) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(cp.proportion() == 0.3);
  CHECK_THROWS_AS(ConstantProportion(1.5), std::invalid_argument);
  CHECK_THROWS_AS(ConstantProportion(-1.5), std::invalid_argument);
  CHECK_THROWS_AS(cp.observe(-2.0), std::invalid_argument);
}

TEST_CASE("flat-prior mixture: opening fraction and the (1,1,1) path") {
  auto strat = make_bayes_mixture(make_uniform());
  CHECK(strat.atoms() >= 64);

  GameState s = make_game(GameVariant::Unbounded, 1.0);
  // Opening fraction: mean of e under the flat density = 1/2.
  CHECK(strat.proportion() == doctest::Approx(0.5).epsilon(1e-12));

  const double want_prop[3] = {0.5, 5.0 / 9.0, 17.0 / 28.0};
  const double want_K[3] = {1.5, 7.0 / 3.0, 15.0 / 4.0};
  for (int i = 0; i < 3; ++i) {
    CHECK(strat.proportion() == doctest::Approx(want_prop[i]).epsilon(1e-12));
    const double M = strat.stake(s);
    const PlayResult pr = play_round(s, M, 1.0);
    REQUIRE(pr.outcome == RoundOutcome::Ok);
    s = pr.state;
    strat.observe(1.0);
    CHECK(s.K == doctest::Approx(want_K[i]).epsilon(1e-12));
    CHECK(strat.capital(1.0) == doctest::Approx(want_K[i]).epsilon(1e-12));
  }
  CHECK_FALSE(strat.ruined());
}

TEST_CASE("square-root-singular prior opens at 1/3") {
  auto strat = make_bayes_mixture(make_power(0.5));
  CHECK(strat.proportion() == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("two-atom posterior mean after one upward move") {
  auto strat = make_discrete_mixture({0.5, 0.25}, {0.5, 0.5});
  CHECK(strat.proportion() == doctest::Approx(0.375).epsilon(1e-15));
  strat.observe(1.0);
  // (0.5*0.75 + 0.25*0.625) / (0.75 + 0.625) = 17/44.
  CHECK(strat.proportion() == doctest::Approx(17.0 / 44.0).epsilon(1e-13));
  CHECK(strat.capital(1.0) == doctest::Approx(1.375).epsilon(1e-13));
}

TEST_CASE("dyadic mixture carries initial mass 1/2") {
  auto strat = make_dyadic_mixture();
  CHECK(strat.atoms() == 60);
  CHECK(std::exp(strat.log_initial_weight()) == doctest::Approx(0.5).epsilon(1e-14));

  // One down-move: growth = sum_j 2^-(j+1) (1 - 2^-j) / (1/2).
  double num = 0.0, den = 0.0;
  for (int j = 1; j <= 60; ++j) {
    const double w = std::ldexp(1.0, -(j + 1));
    num += w * (1.0 - std::ldexp(1.0, -j));
    den += w;
  }
  strat.observe(-1.0);
  CHECK(strat.log_growth() == doctest::Approx(std::log(num / den)).epsilon(1e-13));
  CHECK_THROWS_AS(make_dyadic_mixture(0), std::invalid_argument);
}

TEST_CASE("single-atom mixture equals the fixed-fraction strategy") {
  auto mix = make_discrete_mixture({0.3}, {2.0});
  ConstantProportion cp(0.3);
  GameState s = make_game(GameVariant::Unbounded, 1.0);
  const auto path = random_path(200, -0.8, 1.3, 7);
  double growth = 1.0;
  for (double x : path) {
    CHECK(mix.stake(s) == doctest::Approx(cp.stake(s)).epsilon(1e-13));
    mix.observe(x);
    cp.observe(x);
    growth *= 1.0 + 0.3 * x;
    const PlayResult pr = play_round(s, 0.3 * s.K, x);
    REQUIRE(pr.outcome == RoundOutcome::Ok);
    s = pr.state;
  }
  CHECK(mix.capital(1.0) == doctest::Approx(growth).epsilon(1e-10));
  CHECK(mix.proportion() == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("explicit atoms at the quadrature nodes reproduce the continuous mixture") {
  auto bayes = make_bayes_mixture(make_uniform());
  std::vector<double> w(bayes.atom_log_w().size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::exp(bayes.atom_log_w()[j]);
  auto disc = make_discrete_mixture(bayes.atom_eps(), w);

  const auto path = random_path(100, -0.7, 0.7, 11);
  for (double x : path) {
    bayes.observe(x);
    disc.observe(x);
  }
  CHECK(disc.log_growth() == doctest::Approx(bayes.log_growth()).epsilon(1e-12));
  CHECK(disc.proportion() == doctest::Approx(bayes.proportion()).epsilon(1e-12));
}

TEST_CASE("capital identity: game capital tracks the mixture integral") {
  SUBCASE("flat prior, 2000 rounds") {
    auto strat = make_bayes_mixture(make_uniform());
    const auto path = random_path(2000, -0.9, 1.1, 42);
    const double worst = drive_and_check(strat, path, 1.0, 1e-6);
    CHECK(worst < 1e-9);  // typical drift is far below the acceptance budget

    // End-state growth agrees with a from-scratch recomputation.
    const double fresh =
        log_mixture_growth(strat.atom_eps(), strat.atom_log_w(), path);
    CHECK(strat.log_growth() == doctest::Approx(fresh).epsilon(1e-11));
  }
  SUBCASE("singular prior, 500 rounds") {
    auto strat = make_bayes_mixture(make_power(0.5));
    const auto path = random_path(500, -0.6, 0.8, 43);
    drive_and_check(strat, path, 2.0, 1e-6);
  }
  SUBCASE("iterated-log prior, 500 rounds") {
    auto strat = make_bayes_mixture(make_lil());
    const auto path = random_path(500, -1.0, 1.0, 44);
    drive_and_check(strat, path, 1.0, 1e-6);
  }
}

TEST_CASE("posterior fraction stays strictly inside (0,1)") {
  auto strat = make_bayes_mixture(make_uniform());
  const auto path = random_path(200, -1.0, 1.0, 13);
  for (double x : path) {
    const double e = strat.proportion();
    CHECK(e > 0.0);
    CHECK(e < 1.0);
    strat.observe(x);
  }
}

TEST_CASE("doubling the node budget leaves the growth in place") {
  auto coarse = make_bayes_mixture(make_uniform());
  QuadratureSpec fine_spec;
  fine_spec.panels = 80;
  auto fine = make_bayes_mixture(make_uniform(), fine_spec);
  CHECK(fine.atoms() > coarse.atoms());

  const auto path = random_path(500, -0.9, 1.0, 99);
  for (double x : path) {
    coarse.observe(x);
    fine.observe(x);
  }
  const double g0 = coarse.log_growth();
  const double g1 = fine.log_growth();
  CHECK(std::abs(g1 - g0) <= 1e-8 * std::max(1.0, std::abs(g0)));
}

TEST_CASE("ruin freezes the mixture at zero") {
  SUBCASE("single full-fraction atom") {
    auto strat = make_discrete_mixture({1.0}, {1.0});
    strat.observe(-1.0);
    CHECK(strat.ruined());
    CHECK(strat.proportion() == 0.0);
    CHECK(strat.capital(1.0) == 0.0);
    GameState s = make_game(GameVariant::Unbounded, 1.0);
    CHECK(strat.stake(s) == 0.0);
  }
  SUBCASE("surviving atom takes over") {
    auto strat = make_discrete_mixture({1.0, 0.5}, {0.5, 0.5});
    strat.observe(-1.0);
    CHECK_FALSE(strat.ruined());
    CHECK(strat.proportion() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(strat.capital(1.0) == doctest::Approx(0.25).epsilon(1e-14));
  }
}

TEST_CASE("two-sided atoms for the bounded variant") {
  CHECK_THROWS_AS(make_discrete_mixture({-0.5}, {1.0}), std::invalid_argument);
  auto strat = make_discrete_mixture({-0.5, 0.5}, {1.0, 1.0}, GameVariant::Bounded);
  strat.observe(1.0);
  // (-0.5*0.5 + 0.5*1.5) / (0.5 + 1.5) = 1/4.
  CHECK(strat.proportion() == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("mixture construction validation") {
  CHECK_THROWS_AS(make_discrete_mixture({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_discrete_mixture({0.5}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(make_discrete_mixture({0.5}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_discrete_mixture({0.5}, {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_discrete_mixture({1.5}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(MixtureStrategy({0.5}, {1.0, 2.0}, "bad"), std::invalid_argument);
}

TEST_CASE("harmonic-stake strategy") {
  SUBCASE("quadratic sequence: stakes, collateral, nonnegative value") {
    KroneckerStrategy k(seq_quadratic(), 100);
    double Z = 0.0;
    for (int n = 100; n >= 1; --n) Z += 1.0 / (static_cast<double>(n) * n);
    CHECK(k.collateral() == doctest::Approx(Z).epsilon(1e-15));

    GameState s = make_game(GameVariant::Unbounded, k.collateral());
    for (int n = 1; n <= 100; ++n) {
      const double M = k.stake(s);
      if (n == 3) CHECK(M == doctest::Approx(1.0 / 9.0).epsilon(1e-16));
      REQUIRE(stake_is_legal(s.variant, M, s.K));
      const PlayResult pr = play_round(s, M, -1.0);
      REQUIRE(pr.outcome == RoundOutcome::Ok);
      s = pr.state;
      k.observe(-1.0);
      CHECK(k.value() >= 0.0);  // exact, not approximate
      CHECK(s.K == doctest::Approx(k.value()).epsilon(1e-12));
    }
    CHECK(k.value() == 0.0);  // the all-down path spends the collateral exactly
    CHECK_THROWS_AS(k.stake(s), std::out_of_range);
  }
  SUBCASE("value process on a mixed path") {
    KroneckerStrategy k(seq_n_log_sq(), 50);
    const auto path = random_path(50, -1.0, 1.0, 3);
    for (double x : path) {
      k.observe(x);
      CHECK(k.value() >= 0.0);
    }
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(KroneckerStrategy(nullptr, 10), std::invalid_argument);
    CHECK_THROWS_AS(KroneckerStrategy(seq_linear(), 0), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        KroneckerStrategy([](int n) { return n <= 10 ? n : 20.0 - n; }, 20),
        doctest::Contains("violated at n=11"), std::invalid_argument);
    CHECK_THROWS_AS(KroneckerStrategy([](int) { return 0.0; }, 5),
                    std::invalid_argument);
  }
}

TEST_CASE("describe strings") {
  CHECK(make_bayes_mixture(make_uniform()).describe() == "bayes[uniform]");
  CHECK(make_dyadic_mixture(8).describe() == "dyadic-mixture[8 levels]");
  CHECK(KroneckerStrategy(seq_linear(), 5).describe() == "kronecker[horizon=5]");
}
