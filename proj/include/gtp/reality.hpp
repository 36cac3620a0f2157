#pragma once
// Reality-side move sources: scripted paths, seeded iid samplers, and a
// deterministic complying opponent that keeps the skeptic's capital bounded
// while pushing S_n/b_n above 1 infinitely often (possible whenever
// sum 1/b_n diverges).
//
// Samplers draw from a fixed-seed mt19937_64 with hand-rolled output maps
// (sign bit for coin flips, 53-bit mantissa for uniforms), so a seed pins the
// byte-exact path on every platform.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gtp/game.hpp"

namespace gtp {

// Produces the move for the coming round.  `s` is the state after n rounds
// and `M` the stake the skeptic just announced; samplers ignore both.
class MoveSource {
 public:
  virtual ~MoveSource() = default;
  virtual double next(const GameState& s, double M) = 0;
  virtual std::string describe() const = 0;
};

// Replays a fixed move sequence; every entry is validated against the
// variant's move space up front.  Throws when the script is exhausted.
class ScriptedPath final : public MoveSource {
 public:
  ScriptedPath(std::vector<double> moves, GameVariant variant = GameVariant::Unbounded);
  double next(const GameState& s, double M) override;
  std::string describe() const override;
  std::size_t remaining() const { return moves_.size() - pos_; }

 private:
  std::vector<double> moves_;
  std::size_t pos_ = 0;
  GameVariant variant_;
};

// Seeded iid move sampler.
class IidSampler final : public MoveSource {
 public:
  // Fair coin on {-1, +1}.
  static IidSampler rademacher(std::uint64_t seed);
  // Fair coin on {-1+delta, 1+delta}; delta >= 0 keeps the support legal.
  static IidSampler shifted_rademacher(double delta, std::uint64_t seed);
  // Continuous uniform on [-1, hi]; hi > -1.
  static IidSampler uniform(double hi, std::uint64_t seed);

  double next(const GameState& s, double M) override;
  std::string describe() const override;

 private:
  enum class Kind { Rademacher, Shifted, Uniform };
  IidSampler(Kind kind, double lo, double hi, std::uint64_t seed, std::string name);
  Kind kind_;
  double lo_, hi_;  // the two support points (coins) or interval ends (uniform)
  std::mt19937_64 rng_;
  std::string name_;
};

// Candidate-weight scheme for the complying opponent.  Each round it prices
// the two candidate moves x = -1 and x = 2 b_n with a likelihood factor c and
// plays one that keeps the potential L_n = K_n + prod_k c_k from rising.
// With p_n = 1/(1+2 b_n) (the zero-expectation probability of the big move):
//
//   EvenOdds:      c(-1) = 1/(2(1-p_n)),       c(2b_n) = 1/(2 p_n).
//   Proportional:  c(-1) = (1-p_n/2)/(1-p_n),  c(2b_n) = 1/2.
//
// Both schemes satisfy (1-p)c(-1) + p c(2b) = 1, so one candidate is always
// admissible and sup K_n <= K_0 + 1.  Under EvenOdds c(-1) < 1, so the down
// move never raises the potential and is always chosen; the weight product
// then decays and no witness round occurs.  Under Proportional c(-1) > 1:
// the weight product grows along down-runs until the down move becomes
// inadmissible and the big move must be played, which yields the witness
// rounds S_n/b_n >= 1 (given b_n >= n-1).
enum class AdversaryMode { EvenOdds, Proportional };

class ComplyingAdversary final : public MoveSource {
 public:
  // b(n) must be finite, positive and nondecreasing (checked as rounds are
  // played).  One-sided game only.
  ComplyingAdversary(std::function<double(int)> b,
                     AdversaryMode mode = AdversaryMode::Proportional,
                     double K0 = 1.0);

  // Assumes the returned move is actually played before the next call.
  double next(const GameState& s, double M) override;
  std::string describe() const override;

  double potential() const { return L_; }        // current L_n (starts K0+1)
  double log_weight() const { return logC_; }    // ln prod_k c_k
  int witness_count() const { return witness_count_; }
  int first_witness() const { return first_witness_; }  // 0 when none yet
  // True once b_n < n-1 crossed the windowed threshold; from then on the
  // opponent plays the down move unconditionally.
  bool degraded() const { return degraded_; }

 private:
  std::function<double(int)> b_;
  AdversaryMode mode_;
  double L_;
  double logC_ = 0.0;
  double prev_b_ = 0.0;
  int witness_count_ = 0;
  int first_witness_ = 0;
  bool degraded_ = false;
  int window_small_ = 0;  // rounds with b_n < n-1 in the current window
};

}  // namespace gtp
