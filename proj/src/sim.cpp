#include "gtp/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "gtp/prior.hpp"
#include "gtp/reality.hpp"
#include "gtp/skeptic.hpp"

namespace gtp {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxViolationDetails = 10;

// ------------------------------------------------- config -> components ----

std::function<double(int)> make_sequence(SequenceKind k) {
  switch (k) {
    case SequenceKind::Linear: return seq_linear();
    case SequenceKind::Quadratic: return seq_quadratic();
    case SequenceKind::NLogSq: return seq_n_log_sq();
  }
  throw std::logic_error("unreachable sequence kind");
}

// Whether sum 1/b_n diverges, which is what the witness-round claim needs.
bool sequence_sum_diverges(SequenceKind k) { return k == SequenceKind::Linear; }

Prior make_prior(const SkepticSpec& s) {
  if (s.prior == "uniform") return make_uniform();
  if (s.prior == "power") return make_power(s.power_a);
  if (s.prior == "lil") return make_lil();
  return make_efkp(s.efkp_b, s.efkp_gamma);
}

std::unique_ptr<Strategy> make_strategy(const ExperimentConfig& c) {
  switch (c.skeptic.kind) {
    case SkepticKind::Bayes:
      return std::make_unique<MixtureStrategy>(
          make_bayes_mixture(make_prior(c.skeptic), c.skeptic.quadrature));
    case SkepticKind::Constant:
      return std::make_unique<ConstantProportion>(c.skeptic.eps);
    case SkepticKind::Discrete:
      return std::make_unique<MixtureStrategy>(
          make_discrete_mixture(c.skeptic.atoms, c.skeptic.weights, c.variant));
    case SkepticKind::Dyadic:
      return std::make_unique<MixtureStrategy>(
          make_dyadic_mixture(c.skeptic.dyadic_levels));
    case SkepticKind::Kronecker: {
      // The collateral table is precomputed over the whole horizon.
      if (c.horizon > 10000000) {
        throw ConfigError("game.horizon",
                          "harmonic-stake runs are capped at 10^7 rounds");
      }
      return std::make_unique<KroneckerStrategy>(make_sequence(c.skeptic.sequence),
                                                 static_cast<int>(c.horizon));
    }
  }
  throw std::logic_error("unreachable skeptic kind");
}

// Game capital at round 0: the configured value, else 1, except that
// harmonic stakes start from their collateral sum Z (their nonnegativity
// contract); an explicit value below Z cannot honor the stakes.
double resolve_initial_capital(const ExperimentConfig& c, const Strategy* strategy) {
  const auto* kron = dynamic_cast<const KroneckerStrategy*>(strategy);
  if (!c.initial_capital) return kron ? kron->collateral() : 1.0;
  if (kron && *c.initial_capital < kron->collateral()) {
    throw ConfigError("game.initial_capital",
                      "harmonic stakes need at least their collateral Z = " +
                          format_double(kron->collateral()) + " for this horizon");
  }
  return *c.initial_capital;
}

std::unique_ptr<MoveSource> make_source(const ExperimentConfig& c, std::uint64_t seed,
                                        double K0) {
  switch (c.reality.kind) {
    case RealityKind::Rademacher:
      return std::make_unique<IidSampler>(IidSampler::rademacher(seed));
    case RealityKind::ShiftedRademacher:
      return std::make_unique<IidSampler>(
          IidSampler::shifted_rademacher(c.reality.delta, seed));
    case RealityKind::Uniform:
      return std::make_unique<IidSampler>(IidSampler::uniform(c.reality.hi, seed));
    case RealityKind::Script:
      return std::make_unique<ScriptedPath>(c.reality.script, c.variant);
    case RealityKind::Adversary:
      return std::make_unique<ComplyingAdversary>(
          make_sequence(c.reality.sequence),
          c.reality.adversary_even_odds ? AdversaryMode::EvenOdds
                                        : AdversaryMode::Proportional,
          K0);
  }
  throw std::logic_error("unreachable reality kind");
}

BoundConstants make_constants(const BoundsSpec& b) {
  BoundConstants k;
  if (b.mutate_thm41_factor) k.thm41_factor = *b.mutate_thm41_factor;
  if (b.mutate_thm43_factor) k.thm43_factor = *b.mutate_thm43_factor;
  if (b.mutate_prop31_factor) k.prop31_factor = *b.mutate_prop31_factor;
  return k;
}

bool is_mutated(const BoundsSpec& b) {
  return b.mutate_thm41_factor || b.mutate_thm43_factor || b.mutate_prop31_factor;
}

std::string short_num(double v) {
  std::ostringstream out;  // default precision: readable instance names
  out << v;
  return out.str();
}

// One audited bound with its evaluator; `pi`/`tilt` are owned by the caller
// and must outlive the instance.
struct BoundInstance {
  std::string name;
  std::function<BoundValue(double S, double A)> eval;
};

std::vector<BoundInstance> make_bound_instances(const ExperimentConfig& c,
                                                const Prior& pi,
                                                const std::optional<StaircaseTilt>& tilt,
                                                const BoundConstants& k) {
  std::vector<BoundInstance> out;
  for (const std::string& name : c.bounds.enabled) {
    if (name == "thm41") {
      for (double C : c.bounds.thm41_C) {
        out.push_back({"thm41[C=" + short_num(C) + "]",
                       [&pi, C, sharp = c.bounds.thm41_sharp, k](double S, double A) {
                         return thm41(pi, S, A, C, sharp, k);
                       }});
      }
    } else if (name == "thm43") {
      out.push_back(
          {"thm43", [&pi, k](double S, double A) { return thm43(pi, S, A, k); }});
    } else if (name == "remark41") {
      out.push_back({"remark41", [&pi, &tilt, k](double S, double A) {
                       return remark41(pi, *tilt, S, A, k);
                     }});
    } else {
      out.push_back({"prop31[delta=" + short_num(c.bounds.prop31_delta) + "]",
                     [&pi, d = c.bounds.prop31_delta, k](double S, double A) {
                       return prop31(pi, S, A, d, k);
                     }});
    }
  }
  return out;
}

double rel_gap(double a, double b) {
  if (a == b) return 0.0;  // covers 0 == 0 and equal infinities
  const double denom = std::max(std::abs(a), std::abs(b));
  if (!std::isfinite(denom)) return kInf;
  return std::abs(a - b) / denom;
}

void max_opt(std::optional<double>& acc, std::optional<double> v) {
  if (!v) return;
  if (!acc || *v > *acc) acc = *v;
}

std::string trace_file_name(const std::string& base, std::uint64_t seed, bool multi) {
  if (!multi) return base;
  const std::size_t dot = base.rfind('.');
  const std::string stem = dot == std::string::npos ? base : base.substr(0, dot);
  const std::string ext = dot == std::string::npos ? "" : base.substr(dot);
  return stem + "_s" + std::to_string(seed) + ext;
}

// ------------------------------------------------------- per-seed runner ----

SeedResult run_one_seed(const ExperimentConfig& c, std::uint64_t seed,
                        const std::string& trace_path) {
  SeedResult r;
  r.seed = seed;

  std::unique_ptr<Strategy> strategy = make_strategy(c);
  const double K0 = resolve_initial_capital(c, strategy.get());
  std::unique_ptr<MoveSource> source = make_source(c, seed, K0);
  auto* mix = dynamic_cast<MixtureStrategy*>(strategy.get());
  auto* kron = dynamic_cast<KroneckerStrategy*>(strategy.get());

  std::optional<Prior> prior;
  std::optional<StaircaseTilt> tilt;
  const BoundConstants constants = make_constants(c.bounds);
  if (!c.bounds.enabled.empty()) {
    prior = make_prior(c.skeptic);
    if (std::find(c.bounds.enabled.begin(), c.bounds.enabled.end(), "remark41") !=
        c.bounds.enabled.end()) {
      tilt = build_staircase_tilt(*prior, c.bounds.remark41_levels);
    }
  }
  const std::vector<BoundInstance> instances =
      prior ? make_bound_instances(c, *prior, tilt, constants)
            : std::vector<BoundInstance>{};

  r.bounds.resize(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    r.bounds[i].name = instances[i].name;
    r.bounds[i].stats.bound = instances[i].name;
    r.bounds[i].stats.tolerance = c.bounds.tolerance;
  }

  std::ofstream trace;
  if (!trace_path.empty()) {
    trace.open(trace_path, std::ios::binary);  // '\n' only: byte-stable output
    if (!trace) throw ConfigError("output.trace", "cannot open " + trace_path);
    trace << trace_header() << '\n';
    r.trace_path = trace_path;
  }

  std::function<double(int)> kron_b;
  if (kron) kron_b = make_sequence(c.skeptic.sequence);

  std::int64_t total = c.horizon;
  if (c.reality.kind == RealityKind::Script) {
    total = std::min<std::int64_t>(total,
                                   static_cast<std::int64_t>(c.reality.script.size()));
  }

  GameState state = make_game(c.variant, K0);
  r.K_max = r.K_min = state.K;
  double max_id_err = 0.0;
  std::size_t next_cp = 0;
  std::vector<BoundValue> bvs(instances.size());

  for (std::int64_t n = 1; n <= total; ++n) {
    const double K_pre = state.K;
    const double M = strategy->stake(state);
    const double x = source->next(state, M);
    const PlayResult res = play_round(state, M, x);
    strategy->observe(x);
    if (res.outcome == RoundOutcome::IllegalMove) {
      throw std::logic_error("move source produced an illegal move at round " +
                             std::to_string(n));
    }
    state = res.state;
    const std::optional<double> eps =
        K_pre > 0.0 ? std::optional<double>(M / K_pre) : std::nullopt;
    const bool stopping = res.outcome == RoundOutcome::CollateralViolation;
    if (stopping) {
      r.collateral_violation = true;
      r.collateral_round = n;
    }

    if (trace.is_open()) trace << trace_row(res.record, eps) << '\n';

    r.K_max = std::max(r.K_max, state.K);
    r.K_min = std::min(r.K_min, state.K);
    if (!r.ruined && state.K == 0.0) {
      r.ruined = true;
      r.ruin_round = n;
    }

    const NormalizedStats ratios = self_normalized_stats(state.S, state.A);
    max_opt(r.max_slln, ratios.slln);
    max_opt(r.max_sqrtlog, ratios.sqrtlog);
    max_opt(r.max_lil, ratios.lil);

    if (mix && !stopping) {
      const double K_integral = mix->capital(K0);
      max_id_err = std::max(max_id_err, rel_gap(state.K, K_integral));
    }
    if (kron) {
      const double Y = kron->value();
      if (!r.min_Y || Y < *r.min_Y) r.min_Y = Y;
      if (n * 10 > total) {
        const double ratio = std::abs(state.S) / kron_b(static_cast<int>(n));
        if (!r.max_S_over_b_last_decade || ratio > *r.max_S_over_b_last_decade) {
          r.max_S_over_b_last_decade = ratio;
        }
      }
    }

    if (!instances.empty() && !stopping) {
      const double log_K = state.K > 0.0 ? std::log(state.K) : -kInf;
      for (std::size_t i = 0; i < instances.size(); ++i) {
        bvs[i] = instances[i].eval(state.S, state.A);
        r.bounds[i].stats.update(log_K, bvs[i]);
        if (bvs[i].applicable && log_K - bvs[i].log_value < -c.bounds.tolerance &&
            r.bounds[i].violations.size() < kMaxViolationDetails) {
          r.bounds[i].violations.push_back(
              {instances[i].name, seed, n, log_K, bvs[i].log_value});
        }
      }
    }

    const bool cp = next_cp < c.checkpoints.size() && c.checkpoints[next_cp] == n;
    if (cp) ++next_cp;
    if (cp || n == total || stopping) {
      CheckpointRow row;
      row.n = n;
      row.S = state.S;
      row.A = state.A;
      row.K = state.K;
      row.eps = eps;
      row.ratios = ratios;
      if (kron) row.Y = kron->value();
      const double log_K = state.K > 0.0 ? std::log(state.K) : -kInf;
      for (std::size_t i = 0; i < instances.size(); ++i) {
        CheckpointBoundCell cell;
        cell.name = instances[i].name;
        cell.applicable = !stopping && bvs[i].applicable;
        if (cell.applicable) {
          cell.log_value = bvs[i].log_value;
          cell.slack = log_K - bvs[i].log_value;
          cell.violated = cell.slack < -c.bounds.tolerance;
        } else {
          cell.reason = stopping ? "game stopped" : bvs[i].reason;
        }
        row.bounds.push_back(std::move(cell));
      }
      if (r.checkpoints.empty() || r.checkpoints.back().n != n) {
        r.checkpoints.push_back(std::move(row));
      }
    }

    r.rounds = n;
    if (stopping) break;
  }

  r.final_S = state.S;
  r.final_A = state.A;
  r.final_K = state.K;
  if (mix) r.capital_identity_rel_err = max_id_err;
  return r;
}

std::vector<SeedResult> run_seeds(const ExperimentConfig& c,
                                  const std::vector<std::string>& trace_paths) {
  const std::size_t count = c.seeds.size();
  std::vector<SeedResult> results(count);
  std::vector<std::exception_ptr> errors(count);

  unsigned jobs = c.jobs > 0 ? static_cast<unsigned>(c.jobs)
                             : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));

  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        results[i] = run_one_seed(c, c.seeds[i],
                                  trace_paths.empty() ? std::string() : trace_paths[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);  // first failure in seed order
  }
  return results;
}

// --------------------------------------------------------- JSON helpers ----

// nlohmann serializes non-finite doubles as null, which is what the schema
// documents for absent/overflowed values.
void put_opt(json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

json ratios_json(const NormalizedStats& ns) {
  json j = json::object();
  put_opt(j, "slln", ns.slln);
  put_opt(j, "sqrt_log", ns.sqrtlog);
  put_opt(j, "lil", ns.lil);
  return j;
}

json violation_json(const BoundViolation& v) {
  return json{{"bound", v.bound},
              {"seed", v.seed},
              {"round", v.round},
              {"log_K", v.log_K},
              {"log_bound", v.log_bound}};
}

json audit_json(const BoundAudit& a) {
  json j{{"name", a.name},
         {"rounds", a.stats.rounds},
         {"applicable_rounds", a.stats.applicable_rounds},
         {"violations", a.stats.violations},
         {"min_slack", a.stats.min_slack},
         {"max_slack", a.stats.max_slack}};
  json detail = json::array();
  for (const BoundViolation& v : a.violations) detail.push_back(violation_json(v));
  j["violation_detail"] = detail;
  return j;
}

json checkpoint_json(const CheckpointRow& row) {
  json j{{"n", row.n}, {"S", row.S}, {"A", row.A}, {"K", row.K}};
  put_opt(j, "eps", row.eps);
  j["ratios"] = ratios_json(row.ratios);
  put_opt(j, "Y", row.Y);
  json cells = json::array();
  for (const CheckpointBoundCell& c : row.bounds) {
    json cj{{"name", c.name}, {"applicable", c.applicable}};
    if (c.applicable) {
      cj["log_value"] = c.log_value;
      cj["slack"] = c.slack;
      cj["violated"] = c.violated;
    } else {
      cj["reason"] = c.reason;
    }
    cells.push_back(std::move(cj));
  }
  j["bounds"] = cells;
  return j;
}

json seed_json(const SeedResult& r) {
  json j{{"seed", r.seed},
         {"rounds", r.rounds},
         {"final", json{{"S", r.final_S}, {"A", r.final_A}, {"K", r.final_K}}},
         {"K_max", r.K_max},
         {"K_min", r.K_min},
         {"ruined", r.ruined},
         {"collateral_violation", r.collateral_violation}};
  if (r.ruined) j["ruin_round"] = r.ruin_round;
  if (r.collateral_violation) j["collateral_round"] = r.collateral_round;
  json maxima = json::object();
  put_opt(maxima, "slln", r.max_slln);
  put_opt(maxima, "sqrt_log", r.max_sqrtlog);
  put_opt(maxima, "lil", r.max_lil);
  j["max_ratios"] = maxima;
  put_opt(j, "capital_identity_rel_err", r.capital_identity_rel_err);
  put_opt(j, "min_Y", r.min_Y);
  put_opt(j, "max_S_over_b_last_decade", r.max_S_over_b_last_decade);
  if (!r.trace_path.empty()) j["trace"] = r.trace_path;
  json audits = json::array();
  for (const BoundAudit& a : r.bounds) audits.push_back(audit_json(a));
  j["bounds"] = audits;
  json cps = json::array();
  for (const CheckpointRow& row : r.checkpoints) cps.push_back(checkpoint_json(row));
  j["checkpoints"] = cps;
  return j;
}

}  // namespace

// ------------------------------------------------------------- simulate ----

int SimulationReport::exit_code() const {
  return (total_bound_violations > 0 || any_collateral_violation ||
          any_identity_failure || any_negative_Y)
             ? 1
             : 0;
}

SimulationReport run_simulate(const ExperimentConfig& c) {
  SimulationReport rep;
  rep.variant = c.variant == GameVariant::Unbounded ? "unbounded" : "bounded";
  rep.horizon = c.horizon;
  {
    const std::unique_ptr<Strategy> probe = make_strategy(c);
    rep.initial_capital = resolve_initial_capital(c, probe.get());
    rep.skeptic = probe->describe();
    rep.reality = make_source(c, c.seeds.front(), rep.initial_capital)->describe();
  }
  rep.bound_tolerance = c.bounds.tolerance;
  rep.mutated = is_mutated(c.bounds);
  if (rep.mutated) {
    rep.warnings.push_back(
        "bound constants are deliberately overridden (mutation testing); "
        "verdicts do not certify the shipped constants");
  }

  std::vector<std::string> trace_paths;
  if (!c.output.trace.empty()) {
    const std::string dir = resolve_output_dir(c.output);
    std::filesystem::create_directories(dir);
    trace_paths.reserve(c.seeds.size());
    for (std::uint64_t seed : c.seeds) {
      trace_paths.push_back(
          (std::filesystem::path(dir) /
           trace_file_name(c.output.trace, seed, c.seeds.size() > 1))
              .string());
    }
  }

  rep.seeds = run_seeds(c, trace_paths);

  for (const SeedResult& r : rep.seeds) {
    for (const BoundAudit& a : r.bounds) rep.total_bound_violations += a.stats.violations;
    if (r.collateral_violation) {
      rep.any_collateral_violation = true;
      rep.warnings.push_back("seed " + std::to_string(r.seed) +
                             ": collateral violation at round " +
                             std::to_string(r.collateral_round));
    }
    if (r.ruined) {
      rep.warnings.push_back("seed " + std::to_string(r.seed) +
                             ": capital hit 0 at round " + std::to_string(r.ruin_round));
    }
    if (r.capital_identity_rel_err &&
        *r.capital_identity_rel_err > c.bounds.tolerance) {
      rep.any_identity_failure = true;
      rep.warnings.push_back("seed " + std::to_string(r.seed) +
                             ": capital identity gap " +
                             std::to_string(*r.capital_identity_rel_err));
    }
    if (r.min_Y && *r.min_Y < 0.0) {
      rep.any_negative_Y = true;
      rep.warnings.push_back("seed " + std::to_string(r.seed) +
                             ": harmonic-stake value process went negative");
    }
  }
  return rep;
}

// -------------------------------------------------------- verify-bounds ----

int VerificationReport::exit_code() const {
  for (const TheoremCampaign& c : campaigns) {
    if (c.verdict == "violated") return 1;
  }
  return 0;
}

VerificationReport run_verify_bounds(const ExperimentConfig& base,
                                     const std::vector<std::string>& theorems) {
  ExperimentConfig c = base;
  if (!theorems.empty()) {
    c.bounds.enabled.clear();
    for (const std::string& name : theorems) {
      if (name != "thm41" && name != "thm43" && name != "remark41" &&
          name != "prop31") {
        throw ConfigError("--theorems", "unknown bound \"" + name +
                                            "\" (expected thm41, thm43, remark41 or "
                                            "prop31)");
      }
      if (std::find(c.bounds.enabled.begin(), c.bounds.enabled.end(), name) ==
          c.bounds.enabled.end()) {
        c.bounds.enabled.push_back(name);
      }
    }
  }
  if (c.bounds.enabled.empty()) {
    throw ConfigError("bounds.enabled", "verify-bounds needs at least one bound");
  }
  if (c.skeptic.kind != SkepticKind::Bayes) {
    throw ConfigError("skeptic.kind",
                      "capital bounds compare against a Bayes mixture; set "
                      "skeptic.kind = bayes");
  }
  c.output.trace.clear();  // campaigns do not stream traces

  const SimulationReport sim = run_simulate(c);

  VerificationReport rep;
  rep.skeptic = sim.skeptic;
  rep.reality = sim.reality;
  rep.horizon = sim.horizon;
  rep.seed_count = sim.seeds.size();
  rep.tolerance = c.bounds.tolerance;
  rep.mutated = sim.mutated;
  rep.warnings = sim.warnings;

  const std::size_t instances = sim.seeds.front().bounds.size();
  for (std::size_t i = 0; i < instances; ++i) {
    TheoremCampaign camp;
    camp.name = sim.seeds.front().bounds[i].name;
    camp.min_slack = kInf;
    camp.max_slack = -kInf;
    for (const SeedResult& r : sim.seeds) {  // ordered reduce over the seed list
      const BoundAudit& a = r.bounds[i];
      camp.rounds += a.stats.rounds;
      camp.applicable_rounds += a.stats.applicable_rounds;
      camp.violation_count += a.stats.violations;
      camp.min_slack = std::min(camp.min_slack, a.stats.min_slack);
      camp.max_slack = std::max(camp.max_slack, a.stats.max_slack);
      for (const BoundViolation& v : a.violations) {
        if (camp.violations.size() < kMaxViolationDetails) camp.violations.push_back(v);
      }
    }
    if (camp.violation_count > 0) {
      camp.verdict = "violated";
    } else if (camp.applicable_rounds == 0) {
      camp.verdict = "inconclusive";
      rep.warnings.push_back("campaign " + camp.name +
                             ": preconditions never held on any path; verdict "
                             "inconclusive");
    } else {
      camp.verdict = "sound";
    }
    rep.campaigns.push_back(std::move(camp));
  }
  return rep;
}

// ------------------------------------------------------------ adversary ----

int AdversaryReport::exit_code() const {
  if (collateral_violation) return 1;  // the nonnegativity invariant broke
  if (!degraded) {
    if (!potential_monotone) return 1;
    if (sup_K > initial_potential * (1.0 + 1e-9)) return 1;
  }
  if (claim_witness && witness_count == 0) return 1;
  return 0;
}

AdversaryReport run_adversary_demo(const ExperimentConfig& c) {
  if (c.reality.kind != RealityKind::Adversary) {
    throw ConfigError("reality.kind", "adversary demo needs reality.kind = adversary");
  }
  std::unique_ptr<Strategy> strategy = make_strategy(c);
  const double K0 = resolve_initial_capital(c, strategy.get());
  const std::function<double(int)> b = make_sequence(c.reality.sequence);
  ComplyingAdversary adv(b,
                         c.reality.adversary_even_odds ? AdversaryMode::EvenOdds
                                                       : AdversaryMode::Proportional,
                         K0);

  AdversaryReport rep;
  rep.skeptic = strategy->describe();
  rep.b_name = to_string(c.reality.sequence);
  rep.sum_diverges = sequence_sum_diverges(c.reality.sequence);
  rep.initial_potential = adv.potential();
  rep.sup_K = K0;
  rep.sup_log_weight = adv.log_weight();
  rep.max_potential_rise = 0.0;

  GameState state = make_game(GameVariant::Unbounded, K0);
  double L_prev = adv.potential();

  for (std::int64_t n = 1; n <= c.horizon; ++n) {
    const double M = strategy->stake(state);
    const double x = adv.next(state, M);
    const PlayResult res = play_round(state, M, x);
    strategy->observe(x);
    state = res.state;
    rep.rounds = n;

    if (res.outcome == RoundOutcome::CollateralViolation) {
      // Forward-error budget of n sequential capital updates: an overshoot
      // below zero within this budget is the exact-arithmetic "capital hits
      // zero" boundary, i.e. ruin (a legal end), not an illegal stake.
      const double drift_budget = 32.0 * std::numeric_limits<double>::epsilon() *
                                  K0 * static_cast<double>(n);
      if (M >= 0.0 && -res.state.K <= drift_budget) {
        rep.ruined = true;
        rep.ruin_round = n;
        rep.notes.push_back(
            "capital exhausted at round " + std::to_string(n) + ": overshoot " +
            format_double(-res.state.K) + " below zero is within the rounding "
            "drift budget " + format_double(drift_budget) +
            "; treated as ruin at the collateral boundary");
        break;
      }
      rep.collateral_violation = true;
      rep.collateral_round = n;
      if (M < 0.0) {
        rep.bankrupted = true;
        rep.notes.push_back("collateral violation at round " + std::to_string(n) +
                            ": stake M = " + format_double(M) +
                            " < 0 forfeited the nonnegativity guarantee and the "
                            "opponent cashed it in");
      } else {
        rep.notes.push_back("collateral violation at round " + std::to_string(n) +
                            ": stake M = " + format_double(M) +
                            " exceeded the remaining capital");
      }
      break;
    }

    const double L = adv.potential();
    const double rise = (L - L_prev) / std::max(1.0, std::abs(L_prev));
    rep.max_potential_rise = std::max(rep.max_potential_rise, rise);
    L_prev = L;

    rep.sup_K = std::max(rep.sup_K, state.K);
    rep.sup_log_weight = std::max(rep.sup_log_weight, adv.log_weight());
    rep.max_S_over_b = std::max(rep.max_S_over_b, state.S / b(static_cast<int>(n)));
  }

  rep.final_potential = L_prev;
  rep.potential_monotone = rep.max_potential_rise <= 1e-9;
  rep.first_witness = adv.first_witness();
  rep.witness_count = adv.witness_count();
  rep.degraded = adv.degraded();
  rep.claim_witness =
      rep.sum_diverges && !rep.collateral_violation && !rep.degraded;

  if (rep.degraded) {
    rep.notes.push_back(
        "b_n fell below n-1; the potential construction was abandoned and the "
        "opponent now plays -1 forever");
  }
  if (!rep.sum_diverges) {
    rep.notes.push_back("sum 1/b_n converges for b = " + rep.b_name +
                        "; no witness round S_n/b_n >= 1 is claimed (out of scope "
                        "of the forcing statement)");
  } else if (rep.witness_count > 0) {
    rep.notes.push_back("first witness round with S_n/b_n >= 1: " +
                        std::to_string(rep.first_witness));
  }
  return rep;
}

// ---------------------------------------------------------------- rates ----

RatesReport run_rates(const ExperimentConfig& c) {
  if (c.horizon < 1000) {
    throw ConfigError("game.horizon", "rate curves need horizon >= 1000");
  }
  RatesReport rep;
  rep.seed = c.seeds.front();
  rep.power_a = c.rates.power_a;
  rep.efkp_b = c.rates.efkp_b;
  rep.efkp_gamma = c.rates.efkp_gamma;

  std::unique_ptr<Strategy> strategy = make_strategy(c);
  const double K0 = resolve_initial_capital(c, strategy.get());
  std::unique_ptr<MoveSource> source = make_source(c, rep.seed, K0);
  rep.skeptic = strategy->describe();
  rep.reality = source->describe();

  std::int64_t total = c.horizon;
  if (c.reality.kind == RealityKind::Script) {
    total = std::min<std::int64_t>(total,
                                   static_cast<std::int64_t>(c.reality.script.size()));
  }

  GameState state = make_game(c.variant, K0);
  std::size_t next_cp = 0;
  bool any_efkp = false;

  for (std::int64_t n = 1; n <= total; ++n) {
    const double M = strategy->stake(state);
    const double x = source->next(state, M);
    const PlayResult res = play_round(state, M, x);
    strategy->observe(x);
    state = res.state;

    const bool stopping = res.outcome != RoundOutcome::Ok;
    const bool cp = next_cp < c.checkpoints.size() && c.checkpoints[next_cp] == n;
    if (cp) ++next_cp;
    if (cp || n == total || stopping) {
      RatesRow row;
      row.n = n;
      row.S = state.S;
      row.A = state.A;
      const double S = state.S, A = state.A;
      if (A > 1.0) {
        row.sqrt_log = S / std::sqrt(A * std::log(A));
        row.power = S / std::sqrt((1.0 - rep.power_a) * A * std::log(A));
      }
      if (A > 0.0 && std::log(A) > 1.0) {
        row.lil = S / std::sqrt(2.0 * A * std::log(std::log(A)));
      }
      try {
        const double psi = efkp_psi(A, rep.efkp_b, rep.efkp_gamma);
        row.efkp_gap = S - std::sqrt(A) * psi;
        any_efkp = true;
      } catch (const std::domain_error&) {
        // iterated logs ran out: guard fails, cell stays absent
      }
      if (rep.rows.empty() || rep.rows.back().n != n) rep.rows.push_back(row);
    }
    if (stopping) break;
  }

  if (!any_efkp) {
    rep.notes.push_back(
        "threshold-gap column is empty: ln_" + std::to_string(rep.efkp_b + 1) +
        "(A) > 0 never holds for A representable in double precision");
  }
  return rep;
}

std::string rates_csv_header() { return "n,S,A,sqrt_log,power,lil,efkp_gap"; }

std::string rates_csv(const RatesReport& report) {
  std::ostringstream out;
  out << rates_csv_header() << '\n';
  const auto cell = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const RatesRow& r : report.rows) {
    out << r.n << ',' << format_double(r.S) << ',' << format_double(r.A) << ','
        << cell(r.sqrt_log) << ',' << cell(r.power) << ',' << cell(r.lil) << ','
        << cell(r.efkp_gap) << '\n';
  }
  return out.str();
}

// ------------------------------------------------------------- plumbing ----

std::string resolve_output_dir(const OutputSpec& output) {
  if (const char* env = std::getenv("GTP_OUTPUT_DIR"); env && *env) return env;
  return output.dir;
}

std::string to_json(const SimulationReport& report) {
  json j{{"schema", report.schema},
         {"kind", "simulate"},
         {"variant", report.variant},
         {"horizon", report.horizon},
         {"initial_capital", report.initial_capital},
         {"skeptic", report.skeptic},
         {"reality", report.reality},
         {"bound_tolerance", report.bound_tolerance},
         {"mutated", report.mutated},
         {"warnings", report.warnings},
         {"summary",
          json{{"total_bound_violations", report.total_bound_violations},
               {"any_collateral_violation", report.any_collateral_violation},
               {"any_identity_failure", report.any_identity_failure},
               {"any_negative_Y", report.any_negative_Y},
               {"exit_code", report.exit_code()}}}};
  json seeds = json::array();
  for (const SeedResult& r : report.seeds) seeds.push_back(seed_json(r));
  j["seeds"] = seeds;
  return j.dump(2);
}

std::string to_json(const VerificationReport& report) {
  json j{{"schema", report.schema},
         {"kind", "verify_bounds"},
         {"skeptic", report.skeptic},
         {"reality", report.reality},
         {"horizon", report.horizon},
         {"seed_count", report.seed_count},
         {"tolerance", report.tolerance},
         {"mutated", report.mutated},
         {"warnings", report.warnings},
         {"exit_code", report.exit_code()}};
  json campaigns = json::array();
  for (const TheoremCampaign& c : report.campaigns) {
    json cj{{"name", c.name},
            {"rounds", c.rounds},
            {"applicable_rounds", c.applicable_rounds},
            {"violations", c.violation_count},
            {"min_slack", c.min_slack},
            {"max_slack", c.max_slack},
            {"verdict", c.verdict}};
    json detail = json::array();
    for (const BoundViolation& v : c.violations) detail.push_back(violation_json(v));
    cj["violation_detail"] = detail;
    campaigns.push_back(std::move(cj));
  }
  j["campaigns"] = campaigns;
  return j.dump(2);
}

std::string to_json(const AdversaryReport& report) {
  json j{{"schema", report.schema},
         {"kind", "adversary"},
         {"skeptic", report.skeptic},
         {"b", report.b_name},
         {"sum_diverges", report.sum_diverges},
         {"rounds", report.rounds},
         {"first_witness", report.first_witness},
         {"witness_count", report.witness_count},
         {"max_S_over_b", report.max_S_over_b},
         {"initial_potential", report.initial_potential},
         {"final_potential", report.final_potential},
         {"max_potential_rise", report.max_potential_rise},
         {"potential_monotone", report.potential_monotone},
         {"sup_K", report.sup_K},
         {"sup_log_weight", report.sup_log_weight},
         {"degraded", report.degraded},
         {"claim_witness", report.claim_witness},
         {"collateral_violation", report.collateral_violation},
         {"collateral_round", report.collateral_round},
         {"bankrupted", report.bankrupted},
         {"ruined", report.ruined},
         {"ruin_round", report.ruin_round},
         {"notes", report.notes},
         {"exit_code", report.exit_code()}};
  return j.dump(2);
}

std::string to_json(const RatesReport& report) {
  json j{{"schema", report.schema},
         {"kind", "rates"},
         {"skeptic", report.skeptic},
         {"reality", report.reality},
         {"seed", report.seed},
         {"power_a", report.power_a},
         {"efkp_b", report.efkp_b},
         {"efkp_gamma", report.efkp_gamma},
         {"notes", report.notes}};
  json rows = json::array();
  for (const RatesRow& r : report.rows) {
    json rj{{"n", r.n}, {"S", r.S}, {"A", r.A}};
    put_opt(rj, "sqrt_log", r.sqrt_log);
    put_opt(rj, "power", r.power);
    put_opt(rj, "lil", r.lil);
    put_opt(rj, "efkp_gap", r.efkp_gap);
    rows.push_back(std::move(rj));
  }
  j["rows"] = rows;
  return j.dump(2);
}

}  // namespace gtp
