#include "gtp/skeptic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gtp/kernels.hpp"

namespace gtp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_move(double x) {
  if (!(x >= -1.0) || !std::isfinite(x)) {
    throw std::invalid_argument("observe: move must be finite and >= -1");
  }
}
}  // namespace

// ---------------------------------------------------------------------------
// ConstantProportion

ConstantProportion::ConstantProportion(double eps) : eps_(eps) {
  if (!std::isfinite(eps) || eps < -1.0 || eps > 1.0) {
    throw std::invalid_argument("ConstantProportion: eps must lie in [-1,1]");
  }
}

double ConstantProportion::stake(const GameState& s) { return eps_ * s.K; }

void ConstantProportion::observe(double x) { check_move(x); }

std::string ConstantProportion::describe() const {
  return "constant-proportion(" + format_double(eps_) + ")";
}

// ---------------------------------------------------------------------------
// MixtureStrategy

MixtureStrategy::MixtureStrategy(std::vector<double> eps,
                                 std::vector<double> log_w, std::string name)
    : eps_(std::move(eps)), log_w0_(std::move(log_w)), name_(std::move(name)) {
  if (eps_.empty() || eps_.size() != log_w0_.size()) {
    throw std::invalid_argument("MixtureStrategy: need matching nonempty atom arrays");
  }
  for (std::size_t j = 0; j < eps_.size(); ++j) {
    if (!std::isfinite(eps_[j])) {
      throw std::invalid_argument("MixtureStrategy: atom fractions must be finite");
    }
    if (std::isnan(log_w0_[j]) || log_w0_[j] == std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("MixtureStrategy: log weights must be finite or -inf");
    }
  }
  T_ = log_w0_;
  log_norm_ = kernels::active().log_sum_exp(T_.data(), T_.size());
  if (!std::isfinite(log_norm_)) {
    throw std::invalid_argument("MixtureStrategy: total weight must be positive and finite");
  }
}

void MixtureStrategy::refresh() {
  if (!dirty_) return;
  const auto r = kernels::active().softmax_mean(T_.data(), eps_.data(), T_.size());
  cached_lse_ = r.log_total;
  cached_mean_ = std::isfinite(r.log_total) ? r.mean : 0.0;
  dirty_ = false;
}

double MixtureStrategy::proportion() {
  refresh();
  return cached_mean_;
}

double MixtureStrategy::log_growth() {
  refresh();
  return cached_lse_ - log_norm_;
}

double MixtureStrategy::capital(double K0) { return K0 * std::exp(log_growth()); }

bool MixtureStrategy::ruined() {
  refresh();
  return !std::isfinite(cached_lse_);
}

double MixtureStrategy::stake(const GameState& s) { return proportion() * s.K; }

void MixtureStrategy::observe(double x) {
  check_move(x);
  kernels::active().log1p_scaled_add(T_.data(), eps_.data(), T_.size(), x);
  ++n_;
  dirty_ = true;
}

std::string MixtureStrategy::describe() const { return name_; }

// ---------------------------------------------------------------------------
// Factories

MixtureStrategy make_bayes_mixture(const Prior& prior, const QuadratureSpec& spec) {
  const LogNodes nodes = make_log_nodes(spec);
  std::vector<double> log_w(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    log_w[j] = nodes.log_w[j] + prior.log_density_log(nodes.log_eps[j]);
  }
  return MixtureStrategy(nodes.eps, std::move(log_w),
                         "bayes[" + prior.describe() + "]");
}

MixtureStrategy make_discrete_mixture(const std::vector<double>& eps,
                                      const std::vector<double>& weights,
                                      GameVariant variant) {
  if (eps.size() != weights.size() || eps.empty()) {
    throw std::invalid_argument("make_discrete_mixture: need matching nonempty arrays");
  }
  const double lo = variant == GameVariant::Unbounded ? 0.0 : -1.0;
  std::vector<double> log_w(weights.size());
  for (std::size_t j = 0; j < eps.size(); ++j) {
    if (!(eps[j] >= lo) || !(eps[j] <= 1.0)) {
      throw std::invalid_argument("make_discrete_mixture: atom fraction out of range");
    }
    if (!(weights[j] > 0.0) || !std::isfinite(weights[j])) {
      throw std::invalid_argument("make_discrete_mixture: weights must be positive finite");
    }
    log_w[j] = std::log(weights[j]);
  }
  return MixtureStrategy(eps, std::move(log_w),
                         "discrete-mixture[" + std::to_string(eps.size()) + " atoms]");
}

MixtureStrategy make_dyadic_mixture(int levels) {
  if (levels < 1 || levels > 1000) {
    throw std::invalid_argument("make_dyadic_mixture: levels must lie in [1,1000]");
  }
  std::vector<double> eps(static_cast<std::size_t>(levels));
  std::vector<double> log_w(static_cast<std::size_t>(levels));
  constexpr double kLn2 = 0.6931471805599453094;
  for (int j = 1; j <= levels; ++j) {
    eps[static_cast<std::size_t>(j - 1)] = std::ldexp(1.0, -j);
    log_w[static_cast<std::size_t>(j - 1)] = -(j + 1) * kLn2;
  }
  return MixtureStrategy(std::move(eps), std::move(log_w),
                         "dyadic-mixture[" + std::to_string(levels) + " levels]");
}

double log_mixture_growth(const std::vector<double>& eps,
                          const std::vector<double>& log_w,
                          const std::vector<double>& path) {
  if (eps.size() != log_w.size() || eps.empty()) {
    throw std::invalid_argument("log_mixture_growth: need matching nonempty arrays");
  }
  const auto& k = kernels::active();
  std::vector<double> T = log_w;
  for (double x : path) {
    check_move(x);
    k.log1p_scaled_add(T.data(), eps.data(), T.size(), x);
  }
  return k.log_sum_exp(T.data(), T.size()) - k.log_sum_exp(log_w.data(), log_w.size());
}

// ---------------------------------------------------------------------------
// KroneckerStrategy

KroneckerStrategy::KroneckerStrategy(std::function<double(int)> b, int horizon)
    : horizon_(horizon) {
  if (!b) throw std::invalid_argument("KroneckerStrategy: sequence callback required");
  if (horizon < 1) throw std::invalid_argument("KroneckerStrategy: horizon must be >= 1");
  inv_b_.resize(static_cast<std::size_t>(horizon));
  double prev = 0.0;
  for (int n = 1; n <= horizon; ++n) {
    const double bn = b(n);
    if (!std::isfinite(bn) || bn <= 0.0 || bn < prev) {
      throw std::invalid_argument(
          "KroneckerStrategy: b must be finite, positive and nondecreasing (violated at n=" +
          std::to_string(n) + ")");
    }
    inv_b_[static_cast<std::size_t>(n - 1)] = 1.0 / bn;
    prev = bn;
  }
  // Y_n = sum_{i<=n} (1+x_i)/b_i + sum_{i>n} 1/b_i: both parts are sums of
  // nonnegative terms, so the value process is nonnegative exactly, not just
  // up to rounding.  suffix_[n] holds the second part.
  suffix_.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
  for (int n = horizon - 1; n >= 0; --n) {
    suffix_[static_cast<std::size_t>(n)] =
        suffix_[static_cast<std::size_t>(n) + 1] + inv_b_[static_cast<std::size_t>(n)];
  }
  Z_ = suffix_[0];
}

double KroneckerStrategy::stake(const GameState&) {
  if (n_ >= horizon_) {
    throw std::out_of_range("KroneckerStrategy: horizon exhausted");
  }
  return inv_b_[static_cast<std::size_t>(n_)];
}

void KroneckerStrategy::observe(double x) {
  check_move(x);
  if (n_ >= horizon_) {
    throw std::out_of_range("KroneckerStrategy: horizon exhausted");
  }
  pos_ += (1.0 + x) * inv_b_[static_cast<std::size_t>(n_)];
  ++n_;
}

std::string KroneckerStrategy::describe() const {
  return "kronecker[horizon=" + std::to_string(horizon_) + "]";
}

std::function<double(int)> seq_linear() {
  return [](int n) { return static_cast<double>(n); };
}

std::function<double(int)> seq_quadratic() {
  return [](int n) { return static_cast<double>(n) * static_cast<double>(n); };
}

std::function<double(int)> seq_n_log_sq() {
  return [](int n) {
    const double l = std::log(static_cast<double>(n) + 1.0);
    return static_cast<double>(n) * l * l;
  };
}

}  // namespace gtp
