#pragma once
// Betting-game protocol state and per-round bookkeeping.
//
// Two move spaces: Bounded (x in [-1,1], stake |M| <= K) and Unbounded
// (x in [-1, inf), stake M in [0, K]).  A round is Skeptic announcing the
// stake M, Reality announcing the move x, and capital updating by K + M*x;
// S and A accumulate x and x^2 for the self-normalized statistics.

#include <cstdint>
#include <optional>
#include <string>

namespace gtp {

enum class GameVariant { Bounded, Unbounded };

// True iff x is inside the variant's move space.
bool move_is_legal(GameVariant v, double x);

// True iff the stake honors the collateral duty (K stays >= 0 for every
// legal x).  Requires K >= 0 to begin with.
bool stake_is_legal(GameVariant v, double M, double K);

struct GameState {
  GameVariant variant = GameVariant::Unbounded;
  std::int64_t n = 0;
  double K = 1.0;
  double K0 = 1.0;
  double S = 0.0;
  double A = 0.0;
};

GameState make_game(GameVariant v, double K0);

struct RoundRecord {
  std::int64_t n;  // 1-based round index
  double M;
  double x;
  double S, A, K;  // post-round values
};

enum class RoundOutcome {
  Ok,
  IllegalMove,          // x outside the move space; state unchanged
  CollateralViolation,  // capital went negative; state updated, game stops
};

struct PlayResult {
  GameState state;
  RoundRecord record;
  RoundOutcome outcome;
};

// Pure one-round transition.  The capital update is the single expression
// K + M*x, so a recorded trace replays bit-for-bit.  An out-of-range stake is
// tolerated until a move actually drives K negative, which is reported as a
// collateral violation.
PlayResult play_round(const GameState& s, double M, double x);

// Self-normalized ratios; each absent when its domain guard fails.
struct NormalizedStats {
  std::optional<double> slln;     // S/A               (A > 0)
  std::optional<double> sqrtlog;  // S/sqrt(A ln A)    (A > 1)
  std::optional<double> lil;      // S/sqrt(2A lnln A) (ln A > 1)
};
NormalizedStats self_normalized_stats(double S, double A);

// CSV trace row "n,M,eps,x,S,A,K".  eps is the stake proportion M/K_{n-1}
// when pre-round capital is positive, empty otherwise.  Doubles print with
// max_digits10 so identical runs produce identical bytes.
std::string trace_header();
std::string trace_row(const RoundRecord& r, std::optional<double> eps);
std::string format_double(double v);

}  // namespace gtp
