#include "gtp/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gtp {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  bool prev_dot = false;
  for (char c : key) {
    if (c == '.') {
      if (prev_dot) return false;
      prev_dot = true;
      continue;
    }
    prev_dot = false;
    if (!(std::islower(static_cast<unsigned char>(c)) ||
          std::isdigit(static_cast<unsigned char>(c)) || c == '_')) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> split_commas(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  if (!value.empty() && value.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (!t.empty()) {
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() + t.size()) return v;
  }
  throw ConfigError(key, "expected a number, got \"" + text + "\"");
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(key, "expected an integer, got \"" + text + "\"");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(key, "expected a non-negative integer, got \"" + text + "\"");
  }
  return v;
}

}  // namespace

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::runtime_error("config error at " + path + ": " + message),
      path_(std::move(path)) {}

void ConfigMap::set(const std::string& key, std::string value) {
  values_[key] = std::move(value);
}

bool ConfigMap::has(const std::string& key) const {
  read_.insert(key);
  return values_.count(key) != 0;
}

const std::string* ConfigMap::find(const std::string& key) const {
  read_.insert(key);
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

std::string ConfigMap::get_string(const std::string& key,
                                  const std::string& fallback) const {
  const std::string* v = find(key);
  return v ? *v : fallback;
}

std::string ConfigMap::require_string(const std::string& key) const {
  const std::string* v = find(key);
  if (!v) throw ConfigError(key, "required key is missing");
  return *v;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  const std::string* v = find(key);
  return v ? parse_double(key, *v) : fallback;
}

std::int64_t ConfigMap::get_int(const std::string& key, std::int64_t fallback) const {
  const std::string* v = find(key);
  return v ? parse_int(key, *v) : fallback;
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  const std::string t = trim(*v);
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ConfigError(key, "expected true/false, got \"" + *v + "\"");
}

std::vector<double> ConfigMap::get_double_list(const std::string& key,
                                               std::vector<double> fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const std::string& item : split_commas(*v)) {
    if (item.empty()) throw ConfigError(key, "empty element in list \"" + *v + "\"");
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ConfigError(key, "expected a non-empty list");
  return out;
}

std::vector<std::uint64_t> ConfigMap::get_uint_list(
    const std::string& key, std::vector<std::uint64_t> fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  std::vector<std::uint64_t> out;
  for (const std::string& item : split_commas(*v)) {
    if (item.empty()) throw ConfigError(key, "empty element in list \"" + *v + "\"");
    const std::size_t dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_uint(key, item));
      continue;
    }
    const std::uint64_t lo = parse_uint(key, item.substr(0, dots));
    const std::uint64_t hi = parse_uint(key, item.substr(dots + 2));
    if (hi < lo) {
      throw ConfigError(key, "descending range \"" + item + "\"");
    }
    if (hi - lo >= 1000000) {
      throw ConfigError(key, "range \"" + item + "\" expands to over 10^6 entries");
    }
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw ConfigError(key, "expected a non-empty list");
  return out;
}

std::vector<std::string> ConfigMap::unread_keys() const {
  std::vector<std::string> out;
  for (const auto& [key, value] : values_) {
    if (!read_.count(key)) out.push_back(key);
  }
  return out;
}

ConfigMap parse_config_text(const std::string& text, const std::string& source) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Strip comments: everything from the first '#'.
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno),
                        "expected \"key = value\", got \"" + body + "\"");
    }
    const std::string key = trim(body.substr(0, eq));
    if (!valid_key(key)) {
      throw ConfigError(source + ":" + std::to_string(lineno),
                        "malformed key \"" + key + "\"");
    }
    map.set(key, trim(body.substr(eq + 1)));
  }
  return map;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

void apply_override(ConfigMap& map, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("--set " + assignment, "expected key=value");
  }
  const std::string key = trim(assignment.substr(0, eq));
  if (!valid_key(key)) {
    throw ConfigError("--set " + assignment, "malformed key \"" + key + "\"");
  }
  map.set(key, trim(assignment.substr(eq + 1)));
}

// ------------------------------------------------------------ validation --

namespace {

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

SequenceKind parse_sequence(const std::string& key, const std::string& name) {
  if (name == "linear") return SequenceKind::Linear;
  if (name == "quadratic") return SequenceKind::Quadratic;
  if (name == "nlogsq") return SequenceKind::NLogSq;
  throw ConfigError(key, "unknown sequence \"" + name +
                             "\" (expected linear, quadratic or nlogsq)");
}

SkepticSpec read_skeptic(const ConfigMap& map, GameVariant variant) {
  SkepticSpec s;
  const std::string kind = map.get_string("skeptic.kind", "bayes");
  if (kind == "bayes") {
    s.kind = SkepticKind::Bayes;
  } else if (kind == "constant") {
    s.kind = SkepticKind::Constant;
  } else if (kind == "discrete") {
    s.kind = SkepticKind::Discrete;
  } else if (kind == "dyadic") {
    s.kind = SkepticKind::Dyadic;
  } else if (kind == "kronecker") {
    s.kind = SkepticKind::Kronecker;
  } else {
    throw ConfigError("skeptic.kind",
                      "unknown kind \"" + kind +
                          "\" (expected bayes, constant, discrete, dyadic or kronecker)");
  }

  s.prior = map.get_string("skeptic.prior", "uniform");
  require(s.prior == "uniform" || s.prior == "power" || s.prior == "lil" ||
              s.prior == "efkp",
          "skeptic.prior",
          "unknown prior \"" + s.prior + "\" (expected uniform, power, lil or efkp)");
  s.power_a = map.get_double("skeptic.prior.a", s.power_a);
  require(s.power_a > 0.0 && s.power_a < 1.0, "skeptic.prior.a",
          "power exponent must lie in (0,1)");
  s.efkp_b = static_cast<int>(map.get_int("skeptic.prior.b", s.efkp_b));
  require(s.efkp_b >= 2 && s.efkp_b <= 4, "skeptic.prior.b",
          "iterated-log depth must lie in [2,4] (deeper ladders leave double range)");
  s.efkp_gamma = map.get_double("skeptic.prior.gamma", s.efkp_gamma);
  require(s.efkp_gamma > 0.0, "skeptic.prior.gamma", "gamma must be positive");

  s.quadrature.tmax = map.get_double("skeptic.quadrature.tmax", s.quadrature.tmax);
  require(s.quadrature.tmax > 0.0, "skeptic.quadrature.tmax", "tmax must be positive");
  s.quadrature.panels =
      static_cast<int>(map.get_int("skeptic.quadrature.panels", s.quadrature.panels));
  require(s.quadrature.panels >= 1, "skeptic.quadrature.panels", "need at least 1 panel");
  s.quadrature.points =
      static_cast<int>(map.get_int("skeptic.quadrature.points", s.quadrature.points));
  require(s.quadrature.points >= 2, "skeptic.quadrature.points",
          "need at least 2 points per panel");
  s.quadrature.growth = map.get_double("skeptic.quadrature.growth", s.quadrature.growth);
  require(s.quadrature.growth >= 1.0, "skeptic.quadrature.growth",
          "panel growth must be >= 1");

  s.eps = map.get_double("skeptic.eps", s.eps);
  require(std::isfinite(s.eps) && s.eps >= -1.0 && s.eps <= 1.0, "skeptic.eps",
          "proportion must lie in [-1,1]");

  const double lo = variant == GameVariant::Unbounded ? 0.0 : -1.0;
  s.atoms = map.get_double_list("skeptic.atoms", s.atoms);
  for (std::size_t i = 0; i < s.atoms.size(); ++i) {
    require(std::isfinite(s.atoms[i]) && s.atoms[i] >= lo && s.atoms[i] <= 1.0,
            "skeptic.atoms",
            "atom " + std::to_string(i) + " = " + std::to_string(s.atoms[i]) +
                " outside the variant's proportion range");
  }
  s.weights = map.get_double_list("skeptic.weights", s.weights);
  for (std::size_t i = 0; i < s.weights.size(); ++i) {
    require(std::isfinite(s.weights[i]) && s.weights[i] > 0.0, "skeptic.weights",
            "weight " + std::to_string(i) + " must be positive and finite");
  }
  if (s.kind == SkepticKind::Discrete) {
    require(!s.atoms.empty(), "skeptic.atoms", "discrete mixture needs explicit atoms");
    require(s.weights.size() == s.atoms.size(), "skeptic.weights",
            "need exactly one weight per atom");
  }

  s.dyadic_levels = static_cast<int>(map.get_int("skeptic.levels", s.dyadic_levels));
  require(s.dyadic_levels >= 1 && s.dyadic_levels <= 1000, "skeptic.levels",
          "dyadic levels must lie in [1,1000]");

  if (map.has("skeptic.sequence")) {
    s.sequence = parse_sequence("skeptic.sequence",
                                map.get_string("skeptic.sequence", "quadratic"));
  }
  return s;
}

RealitySpec read_reality(const ConfigMap& map, GameVariant variant) {
  RealitySpec r;
  const std::string kind = map.get_string("reality.kind", "rademacher");
  if (kind == "rademacher") {
    r.kind = RealityKind::Rademacher;
  } else if (kind == "shifted") {
    r.kind = RealityKind::ShiftedRademacher;
  } else if (kind == "uniform") {
    r.kind = RealityKind::Uniform;
  } else if (kind == "script") {
    r.kind = RealityKind::Script;
  } else if (kind == "adversary") {
    r.kind = RealityKind::Adversary;
  } else {
    throw ConfigError("reality.kind",
                      "unknown kind \"" + kind +
                          "\" (expected rademacher, shifted, uniform, script or adversary)");
  }

  r.delta = map.get_double("reality.delta", r.delta);
  require(std::isfinite(r.delta) && r.delta >= 0.0, "reality.delta",
          "shift must be >= 0 to keep the coin's support legal");
  r.hi = map.get_double("reality.hi", r.hi);
  require(std::isfinite(r.hi) && r.hi > -1.0, "reality.hi",
          "upper end must exceed -1");
  if (variant == GameVariant::Bounded) {
    require(r.kind != RealityKind::ShiftedRademacher || r.delta == 0.0,
            "reality.delta", "shifted coin leaves [-1,1] in the bounded variant");
    require(r.kind != RealityKind::Uniform || r.hi <= 1.0, "reality.hi",
            "uniform moves must stay within [-1,1] in the bounded variant");
  }

  r.script = map.get_double_list("reality.script", r.script);
  for (std::size_t i = 0; i < r.script.size(); ++i) {
    require(move_is_legal(variant, r.script[i]), "reality.script",
            "move " + std::to_string(i) + " = " + std::to_string(r.script[i]) +
                " outside the variant's move space");
  }
  if (r.kind == RealityKind::Script) {
    require(!r.script.empty(), "reality.script", "scripted run needs moves");
  }

  if (map.has("reality.sequence")) {
    r.sequence =
        parse_sequence("reality.sequence", map.get_string("reality.sequence", "linear"));
  }
  const std::string mode = map.get_string("reality.mode", "proportional");
  if (mode == "even_odds") {
    r.adversary_even_odds = true;
  } else if (mode == "proportional") {
    r.adversary_even_odds = false;
  } else {
    throw ConfigError("reality.mode", "unknown mode \"" + mode +
                                          "\" (expected proportional or even_odds)");
  }
  if (r.kind == RealityKind::Adversary) {
    require(variant == GameVariant::Unbounded, "reality.kind",
            "the complying opponent plays the one-sided game only");
  }
  return r;
}

BoundsSpec read_bounds(const ConfigMap& map, const SkepticSpec& skeptic) {
  BoundsSpec b;
  const std::string enabled = map.get_string("bounds.enabled", "none");
  if (enabled != "none" && !trim(enabled).empty()) {
    for (const std::string& name : split_commas(enabled)) {
      require(name == "thm41" || name == "thm43" || name == "remark41" ||
                  name == "prop31",
              "bounds.enabled",
              "unknown bound \"" + name +
                  "\" (expected thm41, thm43, remark41 or prop31)");
      if (std::find(b.enabled.begin(), b.enabled.end(), name) == b.enabled.end()) {
        b.enabled.push_back(name);
      }
    }
  }
  if (!b.enabled.empty()) {
    require(skeptic.kind == SkepticKind::Bayes, "bounds.enabled",
            "capital bounds compare against a Bayes mixture; set skeptic.kind = bayes");
  }

  b.thm41_C = map.get_double_list("bounds.thm41.c", b.thm41_C);
  for (double C : b.thm41_C) {
    require(std::isfinite(C) && C > 0.0 && C < 1.0, "bounds.thm41.c",
            "C must lie in (0,1)");
  }
  b.thm41_sharp = map.get_bool("bounds.thm41.sharp", b.thm41_sharp);
  b.prop31_delta = map.get_double("bounds.prop31.delta", b.prop31_delta);
  require(std::isfinite(b.prop31_delta) && b.prop31_delta > 0.0 &&
              b.prop31_delta < 0.5,
          "bounds.prop31.delta", "drift must lie in (0,0.5)");
  b.remark41_levels =
      static_cast<int>(map.get_int("bounds.remark41.levels", b.remark41_levels));
  require(b.remark41_levels >= 1 && b.remark41_levels <= 200, "bounds.remark41.levels",
          "staircase levels must lie in [1,200]");
  b.tolerance = map.get_double("bounds.tolerance", b.tolerance);
  require(std::isfinite(b.tolerance) && b.tolerance > 0.0, "bounds.tolerance",
          "tolerance must be positive");

  if (map.has("bounds.mutate.thm41_factor")) {
    b.mutate_thm41_factor = map.get_double("bounds.mutate.thm41_factor", 0.0);
  }
  if (map.has("bounds.mutate.thm43_factor")) {
    b.mutate_thm43_factor = map.get_double("bounds.mutate.thm43_factor", 0.0);
  }
  if (map.has("bounds.mutate.prop31_factor")) {
    b.mutate_prop31_factor = map.get_double("bounds.mutate.prop31_factor", 0.0);
  }
  for (const auto& [key, value] :
       {std::pair<const char*, std::optional<double>>{"bounds.mutate.thm41_factor",
                                                      b.mutate_thm41_factor},
        {"bounds.mutate.thm43_factor", b.mutate_thm43_factor},
        {"bounds.mutate.prop31_factor", b.mutate_prop31_factor}}) {
    if (value) {
      require(std::isfinite(*value) && *value > 0.0, key,
              "mutated factor must be positive and finite");
    }
  }
  return b;
}

RatesSpec read_rates(const ConfigMap& map) {
  RatesSpec r;
  r.power_a = map.get_double("rates.power_a", r.power_a);
  require(std::isfinite(r.power_a) && r.power_a >= 0.0 && r.power_a < 1.0,
          "rates.power_a", "power exponent must lie in [0,1)");
  r.efkp_b = static_cast<int>(map.get_int("rates.efkp.b", r.efkp_b));
  require(r.efkp_b >= 4, "rates.efkp.b",
          "the iterated-log threshold is defined for depth >= 4");
  r.efkp_gamma = map.get_double("rates.efkp.gamma", r.efkp_gamma);
  require(r.efkp_gamma > 0.0, "rates.efkp.gamma", "gamma must be positive");
  return r;
}

OutputSpec read_output(const ConfigMap& map) {
  OutputSpec o;
  o.dir = map.get_string("output.dir", o.dir);
  o.trace = map.get_string("output.trace", o.trace);
  o.report = map.get_string("output.report", o.report);
  o.rates = map.get_string("output.rates", o.rates);
  require(!o.dir.empty(), "output.dir", "output directory must not be empty");
  return o;
}

}  // namespace

std::vector<std::int64_t> default_checkpoints(std::int64_t horizon) {
  std::vector<std::int64_t> out;
  const std::int64_t steps[] = {1, 2, 5};
  // horizon is capped at 10^8 by validation, so decade cannot overflow.
  for (std::int64_t decade = 1; decade <= horizon; decade *= 10) {
    for (std::int64_t s : steps) {
      const std::int64_t n = s * decade;
      if (n <= horizon) out.push_back(n);
    }
  }
  if (out.empty() || out.back() != horizon) out.push_back(horizon);
  return out;
}

ExperimentConfig ExperimentConfig::from_map(const ConfigMap& map) {
  ExperimentConfig c;

  const std::string variant = map.get_string("game.variant", "unbounded");
  if (variant == "unbounded") {
    c.variant = GameVariant::Unbounded;
  } else if (variant == "bounded") {
    c.variant = GameVariant::Bounded;
  } else {
    throw ConfigError("game.variant", "unknown variant \"" + variant +
                                          "\" (expected unbounded or bounded)");
  }

  c.horizon = map.get_int("game.horizon", c.horizon);
  require(c.horizon >= 1 && c.horizon <= 100000000, "game.horizon",
          "horizon must lie in [1, 10^8]");
  if (map.has("game.initial_capital")) {
    c.initial_capital = map.get_double("game.initial_capital", 1.0);
    require(std::isfinite(*c.initial_capital) && *c.initial_capital > 0.0,
            "game.initial_capital", "initial capital must be positive");
  }

  c.skeptic = read_skeptic(map, c.variant);
  c.reality = read_reality(map, c.variant);

  c.seeds = map.get_uint_list("seeds", c.seeds);
  {
    std::set<std::uint64_t> seen;
    for (std::uint64_t s : c.seeds) {
      require(seen.insert(s).second, "seeds",
              "duplicate seed " + std::to_string(s));
    }
  }

  const std::string checkpoints = map.get_string("checkpoints", "auto");
  if (checkpoints == "auto") {
    c.checkpoints = default_checkpoints(c.horizon);
  } else {
    std::vector<std::int64_t> raw;
    for (const std::string& item : split_commas(checkpoints)) {
      raw.push_back(parse_int("checkpoints", item));
    }
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
    for (std::int64_t n : raw) {
      require(n >= 1, "checkpoints", "round indices start at 1");
      require(n <= c.horizon, "checkpoints",
              std::to_string(n) + " exceeds game.horizon = " + std::to_string(c.horizon));
    }
    c.checkpoints = std::move(raw);
    if (c.checkpoints.empty() || c.checkpoints.back() != c.horizon) {
      c.checkpoints.push_back(c.horizon);
    }
  }

  c.bounds = read_bounds(map, c.skeptic);
  c.rates = read_rates(map);
  c.output = read_output(map);

  c.jobs = static_cast<int>(map.get_int("jobs", c.jobs));
  require(c.jobs >= 0 && c.jobs <= 256, "jobs", "jobs must lie in [0,256]");

  const std::vector<std::string> unread = map.unread_keys();
  if (!unread.empty()) {
    std::string joined;
    for (const std::string& k : unread) {
      if (!joined.empty()) joined += ", ";
      joined += k;
    }
    throw ConfigError(unread.front(), "unknown key" +
                                          std::string(unread.size() > 1 ? "s: " : ": ") +
                                          joined);
  }
  return c;
}

const char* to_string(SkepticKind k) {
  switch (k) {
    case SkepticKind::Bayes: return "bayes";
    case SkepticKind::Constant: return "constant";
    case SkepticKind::Discrete: return "discrete";
    case SkepticKind::Dyadic: return "dyadic";
    case SkepticKind::Kronecker: return "kronecker";
  }
  return "?";
}

const char* to_string(RealityKind k) {
  switch (k) {
    case RealityKind::Rademacher: return "rademacher";
    case RealityKind::ShiftedRademacher: return "shifted";
    case RealityKind::Uniform: return "uniform";
    case RealityKind::Script: return "script";
    case RealityKind::Adversary: return "adversary";
  }
  return "?";
}

const char* to_string(SequenceKind k) {
  switch (k) {
    case SequenceKind::Linear: return "linear";
    case SequenceKind::Quadratic: return "quadratic";
    case SequenceKind::NLogSq: return "nlogsq";
  }
  return "?";
}

}  // namespace gtp
