#pragma once
// Skeptic-side strategies: fixed-fraction betting, finite mixtures of
// fixed fractions (discrete or quadrature-backed continuous), and the
// harmonic-stake strategy used for the non-normalized law of large numbers.
//
// A mixture keeps one running term per atom, T_j = ln w_j + L_j with
// L_j = sum_i ln(1 + eps_j x_i).  The posterior-mean betting fraction and the
// mixture growth are exact functionals of T, evaluated through the runtime
// kernel backend with fixed-order reductions, so a run is bit-reproducible.

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gtp/game.hpp"
#include "gtp/prior.hpp"
#include "gtp/quadrature.hpp"

namespace gtp {

// A strategy quotes a stake for the coming round from the public state, then
// records Reality's move.  Implementations are deterministic.
class Strategy {
 public:
  virtual ~Strategy() = default;
  // Stake for round n+1 given the state after n rounds.
  virtual double stake(const GameState& s) = 0;
  // Record Reality's move for the round just quoted.  x >= -1 required.
  virtual void observe(double x) = 0;
  virtual std::string describe() const = 0;
};

// Stakes a fixed fraction eps of current capital every round.
class ConstantProportion final : public Strategy {
 public:
  // eps in [0,1] for the one-sided game; [-1,1] is accepted for the bounded
  // variant.
  explicit ConstantProportion(double eps);
  double stake(const GameState& s) override;
  void observe(double x) override;
  std::string describe() const override;
  double proportion() const { return eps_; }

 private:
  double eps_;
};

// Finite mixture of fixed-fraction strategies.  Stakes the posterior-mean
// fraction of current capital; its capital process is the weighted average of
// the per-atom capital processes, which the engine tracks in log domain.
class MixtureStrategy final : public Strategy {
 public:
  // eps: atom fractions; log_w: ln of the (unnormalized) weights.  Sizes must
  // match and be nonzero; weights must be finite or -inf (ignored atoms).
  MixtureStrategy(std::vector<double> eps, std::vector<double> log_w,
                  std::string name);

  double stake(const GameState& s) override;
  void observe(double x) override;
  std::string describe() const override;

  // Posterior-mean fraction for the coming round; 0 once ruined.
  double proportion();
  // ln of the capital growth factor:  ln sum_j w_j G_j  -  ln sum_j w_j,
  // where G_j = prod_i (1 + eps_j x_i).  -inf once ruined.
  double log_growth();
  // Capital after the observed rounds for initial capital K0.
  double capital(double K0);
  // ln sum_j w_j (the unnormalized initial mass).
  double log_initial_weight() const { return log_norm_; }
  // All atoms at zero capital: every stake from here on is 0.
  bool ruined();

  std::size_t atoms() const { return eps_.size(); }
  int rounds() const { return n_; }
  const std::vector<double>& atom_eps() const { return eps_; }
  const std::vector<double>& atom_log_w() const { return log_w0_; }

 private:
  void refresh();

  std::vector<double> eps_;
  std::vector<double> log_w0_;  // initial T
  std::vector<double> T_;      // ln w_j + L_j, running
  double log_norm_ = 0.0;      // ln sum_j w_j
  int n_ = 0;
  bool dirty_ = true;
  double cached_lse_ = 0.0;
  double cached_mean_ = 0.0;
  std::string name_;
};

// Continuous mixture over a prior density, discretized at the quadrature
// nodes of `spec`: atom j has fraction eps_j and weight w_j pi(eps_j) with
// w_j the quadrature weight.  At least 64 nodes are required.
MixtureStrategy make_bayes_mixture(const Prior& prior,
                                   const QuadratureSpec& spec = {});

// Discrete mixture with explicit atoms.  For the one-sided game fractions
// must lie in [0,1]; the bounded variant admits [-1,1].  Weights must be
// positive and finite.
MixtureStrategy make_discrete_mixture(const std::vector<double>& eps,
                                      const std::vector<double>& weights,
                                      GameVariant variant = GameVariant::Unbounded);

// The classic countable mixture with atoms eps_j = 2^-j and weights 2^-(j+1),
// j = 1..levels; total initial mass 1/2 (up to the truncation tail).
MixtureStrategy make_dyadic_mixture(int levels = 60);

// From-scratch recomputation of the mixture growth over a whole path, for
// cross-checking the running engine.  Same reduction order as the engine.
double log_mixture_growth(const std::vector<double>& eps,
                          const std::vector<double>& log_w,
                          const std::vector<double>& path);

// Harmonic-stake strategy: stakes M_n = 1/b_n regardless of capital, for a
// positive nondecreasing sequence b.  With initial capital equal to the
// collateral Z = sum_{n<=horizon} 1/b_n, the value process
// Y_n = Z + sum_{i<=n} x_i/b_i stays nonnegative for every path of length up
// to `horizon`, and Y_n -> const forces S_n/b_n -> 0 when sum 1/b_n
// converges.
class KroneckerStrategy final : public Strategy {
 public:
  // b(n) is evaluated for n = 1..horizon at construction; it must be finite,
  // positive and nondecreasing or the constructor throws.
  KroneckerStrategy(std::function<double(int)> b, int horizon);

  double stake(const GameState& s) override;  // 1/b_{n+1}; throws past horizon
  void observe(double x) override;
  std::string describe() const override;

  double collateral() const { return Z_; }  // Z
  // Y_n for the observed rounds, computed as
  // sum_{i<=n} (1+x_i)/b_i + sum_{n<i<=horizon} 1/b_i  -- a sum of
  // nonnegative terms, so nonnegativity holds exactly in floating point.
  double value() const { return pos_ + suffix_[static_cast<std::size_t>(n_)]; }
  int horizon() const { return horizon_; }

 private:
  std::vector<double> inv_b_;   // 1/b_1 .. 1/b_horizon
  std::vector<double> suffix_;  // suffix_[n] = sum_{i>n} 1/b_i
  int horizon_;
  int n_ = 0;
  double Z_ = 0.0;
  double pos_ = 0.0;  // sum of (1+x_i)/b_i over observed rounds
};

// Common test sequences for the harmonic-stake strategy.
std::function<double(int)> seq_linear();        // b_n = n       (sum diverges)
std::function<double(int)> seq_quadratic();     // b_n = n^2     (sum converges)
std::function<double(int)> seq_n_log_sq();      // b_n = n ln^2(n+1)  (converges)

}  // namespace gtp
