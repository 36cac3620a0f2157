#pragma once
// Experiment configuration: plain-text "dotted.key = value" files, one
// experiment per file, with command-line overrides applied on top of the
// file.  Every validation error names the full field path (or file:line for
// syntax errors) so a failing run points at the exact key to fix.
//
// Values stay raw strings inside ConfigMap; typed accessors parse on demand
// and record which keys were read, so building an ExperimentConfig can
// reject unknown keys (usually typos) by listing everything never consumed.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtp/game.hpp"
#include "gtp/quadrature.hpp"

namespace gtp {

// Malformed file or invalid field value; `path` is the dotted key (e.g.
// "skeptic.prior.a") or "<source>:<line>" for syntax errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Ordered key/value store.  Accessors throw ConfigError naming the key when
// a value does not parse; reads are tracked for unknown-key detection.
class ConfigMap {
 public:
  void set(const std::string& key, std::string value);
  bool has(const std::string& key) const;
  std::size_t size() const { return values_.size(); }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma-separated doubles: "0.1, 0.2, 0.4".
  std::vector<double> get_double_list(const std::string& key,
                                      std::vector<double> fallback) const;
  // Comma-separated non-negative integers; "a..b" expands to the inclusive
  // range, so "1..3, 9" means {1, 2, 3, 9}.
  std::vector<std::uint64_t> get_uint_list(const std::string& key,
                                           std::vector<std::uint64_t> fallback) const;

  // Keys present in the map but never read by any accessor.
  std::vector<std::string> unread_keys() const;

 private:
  const std::string* find(const std::string& key) const;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> read_;
};

// Parses "key = value" lines; '#' starts a comment, blank lines are skipped.
// `source` labels syntax errors ("demo.cfg:12").  Later occurrences of a key
// override earlier ones.
ConfigMap parse_config_text(const std::string& text, const std::string& source);
ConfigMap parse_config_file(const std::string& path);

// Applies one "key=value" command-line override.
void apply_override(ConfigMap& map, const std::string& assignment);

// ------------------------------------------------------------ sub-specs ----

enum class SkepticKind { Bayes, Constant, Discrete, Dyadic, Kronecker };
enum class RealityKind { Rademacher, ShiftedRademacher, Uniform, Script, Adversary };

// Named b_n sequences for the harmonic-stake strategy and the complying
// opponent, each tagged with whether sum 1/b_n diverges (which is what the
// witness-round claim hinges on).
enum class SequenceKind { Linear, Quadratic, NLogSq };

struct SkepticSpec {
  SkepticKind kind = SkepticKind::Bayes;
  // Bayes: prior family plus its parameters.
  std::string prior = "uniform";  // uniform | power | lil | efkp
  double power_a = 0.5;
  int efkp_b = 4;
  double efkp_gamma = 0.5;
  QuadratureSpec quadrature;
  // Constant proportion.
  double eps = 0.5;
  // Discrete mixture.
  std::vector<double> atoms;
  std::vector<double> weights;
  // Dyadic mixture.
  int dyadic_levels = 60;
  // Harmonic stakes.
  SequenceKind sequence = SequenceKind::Quadratic;
};

struct RealitySpec {
  RealityKind kind = RealityKind::Rademacher;
  double delta = 0.05;              // shifted coin offset
  double hi = 1.0;                  // uniform upper end
  std::vector<double> script;       // scripted moves
  SequenceKind sequence = SequenceKind::Linear;  // adversary b_n
  bool adversary_even_odds = false;              // candidate-weight scheme
};

struct BoundsSpec {
  std::vector<std::string> enabled;  // subset of thm41/thm43/remark41/prop31
  std::vector<double> thm41_C = {0.1, 0.2, 0.4};
  bool thm41_sharp = false;
  double prop31_delta = 0.05;
  int remark41_levels = 60;
  double tolerance = 1e-6;  // relative slack margin for K >= bound
  // Mutation-testing overrides for the leading constants.  Only the
  // self-check campaigns set these; a mutated run is flagged in its report.
  std::optional<double> mutate_thm41_factor;
  std::optional<double> mutate_thm43_factor;
  std::optional<double> mutate_prop31_factor;
};

struct RatesSpec {
  double power_a = 0.5;  // must be < 1; 0 reproduces the plain sqrt-log column
  // Threshold-gap column parameters.  The iterated-log threshold needs
  // ln_{b+1}(A) > 0 and b >= 4, so the column is empty for every A a double
  // can hold; it is emitted anyway with its guard documented.
  int efkp_b = 4;
  double efkp_gamma = 0.5;
};

struct OutputSpec {
  std::string dir = "out";
  std::string trace = "trace.csv";    // empty disables trace emission
  std::string report = "report.json";
  std::string rates = "rates.csv";
};

// -------------------------------------------------------------- top-level --

// A fully validated experiment.  (config, seed) determines every emitted
// number: samplers are seeded from the explicit seed list and nothing reads
// the clock.
struct ExperimentConfig {
  GameVariant variant = GameVariant::Unbounded;
  // Unset: 1 for capital-proportional skeptics; the collateral sum Z for
  // harmonic stakes (whose nonnegativity contract starts from Z).  An
  // explicit value below Z is rejected when the run starts.
  std::optional<double> initial_capital;
  std::int64_t horizon = 10000;
  SkepticSpec skeptic;
  RealitySpec reality;
  std::vector<std::uint64_t> seeds = {1};
  std::vector<std::int64_t> checkpoints;  // sorted, unique, ends at horizon
  BoundsSpec bounds;
  RatesSpec rates;
  OutputSpec output;
  int jobs = 0;  // parallel seeds; 0 = number of hardware threads

  // Builds from a parsed map, validating every field and rejecting unknown
  // keys.  Throws ConfigError with the offending field path.
  static ExperimentConfig from_map(const ConfigMap& map);
};

// The 1-2-5 ladder of round indices up to `horizon`, always ending with
// horizon itself; used when no explicit checkpoint list is given.
std::vector<std::int64_t> default_checkpoints(std::int64_t horizon);

const char* to_string(SkepticKind k);
const char* to_string(RealityKind k);
const char* to_string(SequenceKind k);

}  // namespace gtp
