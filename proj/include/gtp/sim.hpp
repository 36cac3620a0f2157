#pragma once
// Experiment orchestration on top of the game/skeptic/reality/bounds
// modules: per-seed simulation with streamed CSV traces, round-by-round
// bound auditing, campaign aggregation over seeds (parallel workers, ordered
// reduce), the complying-opponent demonstration, and rate-curve extraction.
//
// Runners return plain report structs; JSON serialization is separate so
// tests can assert on fields directly.  All JSON carries a schema version.
// Every random draw comes from the explicit seed list, so (config, seed)
// replays byte-identically.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gtp/bounds.hpp"
#include "gtp/config.hpp"
#include "gtp/game.hpp"

namespace gtp {

inline constexpr const char* kReportSchemaVersion = "gtp-report/1";

// One bound comparison that failed K >= bound * (1 - tolerance).
struct BoundViolation {
  std::string bound;
  std::uint64_t seed = 0;
  std::int64_t round = 0;
  double log_K = 0.0;
  double log_bound = 0.0;
};

// A bound instance audited over one path, e.g. "thm41[C=0.2]".
struct BoundAudit {
  std::string name;
  BoundCheckStats stats;
  std::vector<BoundViolation> violations;  // detail capped; stats has the count
};

// Snapshot of one bound instance at a reporting checkpoint.
struct CheckpointBoundCell {
  std::string name;
  bool applicable = false;
  double log_value = 0.0;  // ln bound (when applicable)
  double slack = 0.0;      // ln K - ln bound (when applicable)
  bool violated = false;
  std::string reason;      // violated precondition (when inapplicable)
};

struct CheckpointRow {
  std::int64_t n = 0;
  double S = 0.0, A = 0.0, K = 0.0;
  std::optional<double> eps;  // stake fraction M_n / K_{n-1} for this round
  NormalizedStats ratios;
  std::vector<CheckpointBoundCell> bounds;
  std::optional<double> Y;  // harmonic-stake value process, when applicable
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::int64_t rounds = 0;  // rounds actually played (script may be short)
  std::vector<CheckpointRow> checkpoints;

  double final_S = 0.0, final_A = 0.0, final_K = 0.0;
  double K_max = 0.0, K_min = 0.0;
  // Maxima over every round, not just checkpoints.
  std::optional<double> max_slln, max_sqrtlog, max_lil;

  bool ruined = false;  // K hit 0 exactly (legal; stakes are 0 afterwards)
  std::int64_t ruin_round = 0;
  bool collateral_violation = false;  // K went negative; the game stops
  std::int64_t collateral_round = 0;

  // Mixture skeptics: max over rounds of the relative gap between the
  // recursive capital K_n and the mixture integral K0 * exp(log growth).
  std::optional<double> capital_identity_rel_err;

  // Harmonic-stake skeptics: min of the value process over all rounds, and
  // max |S_n|/b_n over the last decade of rounds (n > horizon/10).
  std::optional<double> min_Y;
  std::optional<double> max_S_over_b_last_decade;

  std::vector<BoundAudit> bounds;
  std::string trace_path;  // empty when trace emission is off
};

struct SimulationReport {
  std::string schema = kReportSchemaVersion;
  std::string variant;
  std::int64_t horizon = 0;
  double initial_capital = 1.0;
  std::string skeptic;  // strategy description
  std::string reality;  // move-source description
  double bound_tolerance = 1e-6;
  bool mutated = false;  // a leading constant was deliberately overridden
  std::vector<SeedResult> seeds;
  std::vector<std::string> warnings;

  std::int64_t total_bound_violations = 0;
  bool any_collateral_violation = false;
  bool any_identity_failure = false;  // capital identity gap above tolerance
  bool any_negative_Y = false;

  // 0 = every enabled invariant held, 1 = a violation was recorded.
  int exit_code() const;
};

// Plays config.horizon rounds for every seed (parallel across seeds), writes
// one trace CSV per seed under the resolved output dir when
// config.output.trace is non-empty, and audits the enabled bounds every
// round.  Throws ConfigError for setups the runner cannot execute.
SimulationReport run_simulate(const ExperimentConfig& config);

// -------------------------------------------------------- verify-bounds ----

struct TheoremCampaign {
  std::string name;
  std::int64_t rounds = 0;
  std::int64_t applicable_rounds = 0;
  std::int64_t violation_count = 0;
  double min_slack = 0.0, max_slack = 0.0;  // over applicable rounds
  std::vector<BoundViolation> violations;   // detail capped
  std::string verdict;  // "sound" | "inconclusive" | "violated"
};

struct VerificationReport {
  std::string schema = kReportSchemaVersion;
  std::string skeptic;
  std::string reality;
  std::int64_t horizon = 0;
  std::size_t seed_count = 0;
  double tolerance = 1e-6;
  bool mutated = false;
  std::vector<TheoremCampaign> campaigns;
  std::vector<std::string> warnings;

  // 1 iff any campaign recorded a violation; inconclusive campaigns
  // (no applicable rounds) exit 0 with a warning.
  int exit_code() const;
};

// Runs the soundness campaign for the named theorems (default: the set
// enabled in the config).  Traces are not written.
VerificationReport run_verify_bounds(const ExperimentConfig& config,
                                     const std::vector<std::string>& theorems = {});

// ------------------------------------------------------------ adversary ----

struct AdversaryReport {
  std::string schema = kReportSchemaVersion;
  std::string skeptic;
  std::string b_name;
  bool sum_diverges = false;  // whether sum 1/b_n diverges for this b
  std::int64_t rounds = 0;

  std::int64_t first_witness = 0;  // first round with S_n/b_n >= 1 (0 = none)
  std::int64_t witness_count = 0;
  double max_S_over_b = 0.0;

  double initial_potential = 0.0;  // L_0 = K_0 + 1
  double final_potential = 0.0;
  double max_potential_rise = 0.0;  // max relative increase of L_n
  bool potential_monotone = false;  // nonincreasing within 1e-9 relative
  double sup_K = 0.0;
  double sup_log_weight = 0.0;  // sup ln prod c_k
  bool degraded = false;        // b_n fell below n-1; construction abandoned

  bool claim_witness = false;  // divergent sum: a witness round is guaranteed
  bool collateral_violation = false;  // capital went negative; the game stopped
  std::int64_t collateral_round = 0;
  bool bankrupted = false;  // the violation came from a stake M < 0
  bool ruined = false;      // capital hit zero within rounding drift; legal end
  std::int64_t ruin_round = 0;

  std::vector<std::string> notes;

  // 1 on audit failure (potential rose, guaranteed witness missing, capital
  // cap broken) or a collateral violation; the no-claim convergent case and
  // the bankruptcy demonstration report what happened.
  int exit_code() const;
};

// Plays the skeptic against the complying opponent (reality.kind must be
// "adversary").  Fully deterministic: the seed list is ignored.
AdversaryReport run_adversary_demo(const ExperimentConfig& config);

// ---------------------------------------------------------------- rates ----

struct RatesRow {
  std::int64_t n = 0;
  double S = 0.0, A = 0.0;
  std::optional<double> sqrt_log;  // S / sqrt(A ln A)          needs A > 1
  std::optional<double> power;     // S / sqrt((1-a) A ln A)    needs A > 1
  std::optional<double> lil;       // S / sqrt(2 A lnln A)      needs ln A > 1
  std::optional<double> efkp_gap;  // S - sqrt(A) psi(A)        needs ln_{b+1} A > 0
};

struct RatesReport {
  std::string schema = kReportSchemaVersion;
  std::string skeptic;
  std::string reality;
  std::uint64_t seed = 0;  // first seed of the list; rates track one path
  double power_a = 0.5;
  int efkp_b = 4;
  double efkp_gamma = 0.5;
  std::vector<RatesRow> rows;  // one per checkpoint
  std::vector<std::string> notes;
};

// Tracks the normalizing-sequence ratios along one path (the first seed).
// Requires horizon >= 1000.
RatesReport run_rates(const ExperimentConfig& config);

// Fixed CSV layout for the rate curves: "n,S,A,sqrt_log,power,lil,efkp_gap",
// with empty cells where a normalizer's domain guard fails.
std::string rates_csv_header();
std::string rates_csv(const RatesReport& report);

// ------------------------------------------------------------- plumbing ----

// Output directory: the GTP_OUTPUT_DIR environment variable when set,
// otherwise config.output.dir.
std::string resolve_output_dir(const OutputSpec& output);

// Deterministic pretty-printed JSON (keys sorted, shortest round-trip
// doubles; non-finite values serialize as null).
std::string to_json(const SimulationReport& report);
std::string to_json(const VerificationReport& report);
std::string to_json(const AdversaryReport& report);
std::string to_json(const RatesReport& report);

}  // namespace gtp
