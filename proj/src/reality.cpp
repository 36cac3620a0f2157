#include "gtp/reality.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gtp {

namespace {

// 53-bit uniform in [0,1).
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool coin(std::mt19937_64& rng) { return (rng() >> 63) != 0; }

}  // namespace

// ---------------------------------------------------------------------------
// ScriptedPath

ScriptedPath::ScriptedPath(std::vector<double> moves, GameVariant variant)
    : moves_(std::move(moves)), variant_(variant) {
  for (std::size_t i = 0; i < moves_.size(); ++i) {
    if (!move_is_legal(variant_, moves_[i])) {
      throw std::invalid_argument("ScriptedPath: illegal move at index " +
                                  std::to_string(i));
    }
  }
}

double ScriptedPath::next(const GameState&, double) {
  if (pos_ >= moves_.size()) {
    throw std::out_of_range("ScriptedPath: script exhausted");
  }
  return moves_[pos_++];
}

std::string ScriptedPath::describe() const {
  return "scripted[" + std::to_string(moves_.size()) + " moves]";
}

// ---------------------------------------------------------------------------
// IidSampler

IidSampler::IidSampler(Kind kind, double lo, double hi, std::uint64_t seed,
                       std::string name)
    : kind_(kind), lo_(lo), hi_(hi), rng_(seed), name_(std::move(name)) {}

IidSampler IidSampler::rademacher(std::uint64_t seed) {
  return IidSampler(Kind::Rademacher, -1.0, 1.0, seed, "rademacher");
}

IidSampler IidSampler::shifted_rademacher(double delta, std::uint64_t seed) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("shifted_rademacher: delta must be >= 0");
  }
  std::ostringstream name;
  name << "shifted-rademacher(delta=" << delta << ")";
  return IidSampler(Kind::Shifted, -1.0 + delta, 1.0 + delta, seed, name.str());
}

IidSampler IidSampler::uniform(double hi, std::uint64_t seed) {
  if (!(hi > -1.0) || !std::isfinite(hi)) {
    throw std::invalid_argument("uniform sampler: upper end must exceed -1");
  }
  std::ostringstream name;
  name << "uniform[-1," << hi << "]";
  return IidSampler(Kind::Uniform, -1.0, hi, seed, name.str());
}

double IidSampler::next(const GameState&, double) {
  switch (kind_) {
    case Kind::Rademacher:
    case Kind::Shifted:
      return coin(rng_) ? hi_ : lo_;
    case Kind::Uniform:
    default:
      return lo_ + unit_uniform(rng_) * (hi_ - lo_);
  }
}

std::string IidSampler::describe() const { return name_; }

// ---------------------------------------------------------------------------
// ComplyingAdversary

ComplyingAdversary::ComplyingAdversary(std::function<double(int)> b,
                                       AdversaryMode mode, double K0)
    : b_(std::move(b)), mode_(mode), L_(K0 + 1.0) {
  if (!b_) throw std::invalid_argument("ComplyingAdversary: sequence callback required");
  if (!(K0 > 0.0) || !std::isfinite(K0)) {
    throw std::invalid_argument("ComplyingAdversary: K0 must be positive finite");
  }
}

double ComplyingAdversary::next(const GameState& s, double M) {
  if (s.variant != GameVariant::Unbounded) {
    throw std::invalid_argument("ComplyingAdversary: one-sided game only");
  }
  const int n = static_cast<int>(s.n) + 1;
  const double bn = b_(n);
  if (!std::isfinite(bn) || bn <= 0.0 || bn < prev_b_) {
    throw std::invalid_argument(
        "ComplyingAdversary: b must be finite, positive and nondecreasing (violated at n=" +
        std::to_string(n) + ")");
  }
  prev_b_ = bn;

  // A negative stake loses the collateral protection: a large enough move
  // bankrupts the skeptic outright.
  if (M < 0.0) {
    const double big = std::max(2.0 * bn, (s.K + 1.0) / (-M));
    return big;
  }

  // Windowed check of the b_n >= n-1 growth requirement: if the sequence
  // falls below n-1 a hundred times within a thousand-round window, the
  // potential argument is abandoned and the opponent plays -1 forever
  // (the divergent harmonic sum already defeats S_n/b_n -> 0 on that path).
  if (!degraded_) {
    if ((n - 1) % 1000 == 0) window_small_ = 0;
    if (bn < static_cast<double>(n) - 1.0) {
      if (++window_small_ >= 100) degraded_ = true;
    }
  }
  if (degraded_) {
    L_ = (s.K - M) + std::exp(logC_);  // potential no longer steered
    return -1.0;
  }

  const double p = 1.0 / (1.0 + 2.0 * bn);
  double c_minus, c_plus;
  if (mode_ == AdversaryMode::EvenOdds) {
    c_minus = 1.0 / (2.0 * (1.0 - p));
    c_plus = 1.0 / (2.0 * p);
  } else {
    c_minus = (1.0 - 0.5 * p) / (1.0 - p);
    c_plus = 0.5;
  }

  const double Pc = std::exp(logC_);
  const double L_minus = (s.K - M) + Pc * c_minus;
  const double L_plus = (s.K + 2.0 * bn * M) + Pc * c_plus;
  const double tol = 1e-9 * std::max(1.0, std::abs(L_));
  const bool adm_minus = L_minus <= L_ + tol;
  const bool adm_plus = L_plus <= L_ + tol;

  // Exactly one candidate is strictly admissible when the stake is positive;
  // ties (both admissible) resolve to the down move.
  bool play_minus;
  if (adm_minus && adm_plus) {
    play_minus = L_minus <= L_plus;
  } else if (adm_minus) {
    play_minus = true;
  } else if (adm_plus) {
    play_minus = false;
  } else {
    play_minus = L_minus <= L_plus;  // rounding corner: take the lesser evil
  }

  if (play_minus) {
    logC_ += std::log(c_minus);
    L_ = L_minus;
    return -1.0;
  }
  logC_ += std::log(c_plus);
  L_ = L_plus;
  const double x = 2.0 * bn;
  const double S_new = s.S + x;
  if (S_new / bn >= 1.0) {
    ++witness_count_;
    if (first_witness_ == 0) first_witness_ = n;
  }
  return x;
}

std::string ComplyingAdversary::describe() const {
  return mode_ == AdversaryMode::EvenOdds ? "complying-adversary[even-odds]"
                                          : "complying-adversary[proportional]";
}

}  // namespace gtp
