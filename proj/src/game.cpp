#include "gtp/game.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gtp {

bool move_is_legal(GameVariant v, double x) {
  if (!std::isfinite(x)) return false;
  if (x < -1.0) return false;
  return v == GameVariant::Unbounded || x <= 1.0;
}

bool stake_is_legal(GameVariant v, double M, double K) {
  if (!std::isfinite(M) || !(K >= 0.0)) return false;
  if (v == GameVariant::Unbounded) return M >= 0.0 && M <= K;
  return std::abs(M) <= K;
}

GameState make_game(GameVariant v, double K0) {
  if (!(K0 > 0.0) || !std::isfinite(K0)) {
    throw std::invalid_argument("make_game: initial capital must be positive and finite");
  }
  GameState s;
  s.variant = v;
  s.K = s.K0 = K0;
  return s;
}

PlayResult play_round(const GameState& s, double M, double x) {
  PlayResult r{s, {s.n + 1, M, x, s.S, s.A, s.K}, RoundOutcome::Ok};
  if (!move_is_legal(s.variant, x)) {
    r.outcome = RoundOutcome::IllegalMove;
    r.record.n = s.n;  // round not played
    return r;
  }
  r.state.n = s.n + 1;
  r.state.K = s.K + M * x;
  r.state.S = s.S + x;
  r.state.A = s.A + x * x;
  r.record.S = r.state.S;
  r.record.A = r.state.A;
  r.record.K = r.state.K;
  if (r.state.K < 0.0) r.outcome = RoundOutcome::CollateralViolation;
  return r;
}

NormalizedStats self_normalized_stats(double S, double A) {
  NormalizedStats out;
  if (A > 0.0) out.slln = S / A;
  if (A > 1.0) out.sqrtlog = S / std::sqrt(A * std::log(A));
  if (A > 0.0 && std::log(A) > 1.0) out.lil = S / std::sqrt(2.0 * A * std::log(std::log(A)));
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trace_header() { return "n,M,eps,x,S,A,K"; }

std::string trace_row(const RoundRecord& r, std::optional<double> eps) {
  std::string out = std::to_string(r.n);
  out += ',';
  out += format_double(r.M);
  out += ',';
  if (eps) out += format_double(*eps);
  out += ',';
  out += format_double(r.x);
  out += ',';
  out += format_double(r.S);
  out += ',';
  out += format_double(r.A);
  out += ',';
  out += format_double(r.K);
  return out;
}

}  // namespace gtp
