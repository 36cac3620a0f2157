// Config-layer tests: text parsing (comments, overrides, syntax errors with
// file:line paths), typed accessors that name the offending key, seed-range
// expansion, checkpoint resolution (the 1-2-5 ladder and explicit lists),
// unknown-key rejection, and one probe per validation rule so every error
// path stays wired to the right field path.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gtp/config.hpp"

#include <vector>

using namespace gtp;

namespace {

// Builds the experiment from inline text, as the CLI would.
ExperimentConfig from_text(const std::string& text) {
  return ExperimentConfig::from_map(parse_config_text(text, "inline"));
}

// Asserts that building `text` fails with a ConfigError whose path is
// exactly `path`; returns the message for spot checks.
std::string reject(const std::string& text, const std::string& path) {
  try {
    from_text(text);
  } catch (const ConfigError& e) {
    CHECK(e.path() == path);
    return e.what();
  }
  FAIL("expected ConfigError at ", path, " for:\n", text);
  return "";
}

}  // namespace

TEST_CASE("parser strips comments and keeps the last occurrence of a key") {
  const ConfigMap m = parse_config_text(
      "# full-line comment\n"
      "\n"
      "game.horizon = 50   # trailing comment\n"
      "  skeptic.kind=constant\n"
      "game.horizon = 70\n",
      "demo.cfg");
  CHECK(m.size() == 2);
  CHECK(m.get_string("game.horizon", "") == "70");
  CHECK(m.get_string("skeptic.kind", "") == "constant");
  CHECK(m.get_string("missing", "fallback") == "fallback");
}

TEST_CASE("syntax errors carry source and line number") {
  try {
    parse_config_text("a.b = 1\nno equals sign here\n", "demo.cfg");
    FAIL("expected a syntax error");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "demo.cfg:2");
    CHECK(std::string(e.what()).find("key = value") != std::string::npos);
  }
  try {
    parse_config_text("Bad-Key = 1\n", "demo.cfg");
    FAIL("expected a malformed-key error");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "demo.cfg:1");
    CHECK(std::string(e.what()).find("Bad-Key") != std::string::npos);
  }
  // Dotted keys must have non-empty segments.
  CHECK_THROWS_AS(parse_config_text("a..b = 1\n", "x"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(".a = 1\n", "x"), ConfigError);
}

TEST_CASE("command-line overrides replace file values") {
  ConfigMap m = parse_config_text("game.horizon = 100\n", "f");
  apply_override(m, "game.horizon=250");
  apply_override(m, "seeds = 3");  // spaces around '=' are fine
  CHECK(m.get_string("game.horizon", "") == "250");
  CHECK(m.get_string("seeds", "") == "3");
  CHECK_THROWS_AS(apply_override(m, "no-equals"), ConfigError);
  CHECK_THROWS_AS(apply_override(m, "BAD=1"), ConfigError);
}

TEST_CASE("typed accessors name the key that failed to parse") {
  ConfigMap m;
  m.set("x", "nope");
  m.set("n", "2.5");
  m.set("flag", "maybe");
  try {
    m.get_double("x", 0.0);
    FAIL("expected a number error");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "x");
    CHECK(std::string(e.what()).find("expected a number") != std::string::npos);
  }
  CHECK_THROWS_AS(m.get_int("n", 0), ConfigError);    // 2.5 is not an integer
  CHECK_THROWS_AS(m.get_bool("flag", false), ConfigError);
  CHECK(m.get_double("absent", 1.5) == 1.5);

  ConfigMap b;
  b.set("t", "yes");
  b.set("f", "off");
  CHECK(b.get_bool("t", false));
  CHECK_FALSE(b.get_bool("f", true));
}

TEST_CASE("uint lists expand inclusive ranges") {
  ConfigMap m;
  m.set("seeds", "1..3, 9");
  const std::vector<std::uint64_t> got = m.get_uint_list("seeds", {});
  CHECK(got == std::vector<std::uint64_t>{1, 2, 3, 9});

  ConfigMap bad;
  bad.set("seeds", "5..2");
  CHECK_THROWS_AS(bad.get_uint_list("seeds", {}), ConfigError);
  bad.set("seeds", "1..2000000");
  CHECK_THROWS_AS(bad.get_uint_list("seeds", {}), ConfigError);
}

TEST_CASE("unread keys are reported") {
  ConfigMap m;
  m.set("a.read", "1");
  m.set("b.never", "2");
  (void)m.get_string("a.read", "");
  const std::vector<std::string> unread = m.unread_keys();
  REQUIRE(unread.size() == 1);
  CHECK(unread.front() == "b.never");
}

TEST_CASE("an empty map yields the documented defaults") {
  const ExperimentConfig c = from_text("");
  CHECK(c.variant == GameVariant::Unbounded);
  CHECK_FALSE(c.initial_capital.has_value());
  CHECK(c.horizon == 10000);
  CHECK(c.skeptic.kind == SkepticKind::Bayes);
  CHECK(c.skeptic.prior == "uniform");
  CHECK(c.reality.kind == RealityKind::Rademacher);
  CHECK(c.seeds == std::vector<std::uint64_t>{1});
  CHECK(c.bounds.enabled.empty());
  CHECK(c.bounds.tolerance == 1e-6);
  CHECK(c.jobs == 0);
  REQUIRE_FALSE(c.checkpoints.empty());
  CHECK(c.checkpoints.back() == c.horizon);
}

TEST_CASE("a full config round-trips every section") {
  const ExperimentConfig c = from_text(
      "game.variant = bounded\n"
      "game.horizon = 500\n"
      "game.initial_capital = 2.5\n"
      "skeptic.kind = discrete\n"
      "skeptic.atoms = -0.5, 0.25\n"
      "skeptic.weights = 1, 3\n"
      "reality.kind = uniform\n"
      "reality.hi = 0.5\n"
      "seeds = 11..13\n"
      "checkpoints = 100, 500, 250\n"
      "rates.power_a = 0.25\n"
      "output.dir = results\n"
      "output.trace =\n"  // empty value disables trace emission
      "jobs = 2\n");
  CHECK(c.variant == GameVariant::Bounded);
  REQUIRE(c.initial_capital.has_value());
  CHECK(*c.initial_capital == 2.5);
  CHECK(c.skeptic.kind == SkepticKind::Discrete);
  CHECK(c.skeptic.atoms == std::vector<double>{-0.5, 0.25});
  CHECK(c.skeptic.weights == std::vector<double>{1.0, 3.0});
  CHECK(c.reality.kind == RealityKind::Uniform);
  CHECK(c.reality.hi == 0.5);
  CHECK(c.seeds == std::vector<std::uint64_t>{11, 12, 13});
  // Explicit checkpoint lists are sorted and deduplicated.
  CHECK(c.checkpoints == std::vector<std::int64_t>{100, 250, 500});
  CHECK(c.rates.power_a == 0.25);
  CHECK(c.output.dir == "results");
  CHECK(c.output.trace.empty());
  CHECK(c.jobs == 2);
}

TEST_CASE("unknown keys are rejected by name") {
  const std::string msg = reject("skeptic.knd = bayes\ngame.horzon = 5\n",
                                 "game.horzon");  // first unread in map order
  CHECK(msg.find("game.horzon") != std::string::npos);
  CHECK(msg.find("skeptic.knd") != std::string::npos);
  CHECK(msg.find("unknown keys") != std::string::npos);
}

TEST_CASE("checkpoint resolution") {
  // The automatic ladder is 1-2-5 decades, ending exactly at the horizon.
  CHECK(default_checkpoints(10000) ==
        std::vector<std::int64_t>{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000,
                                  2000, 5000, 10000});
  CHECK(default_checkpoints(7) == std::vector<std::int64_t>{1, 2, 5, 7});
  CHECK(default_checkpoints(1) == std::vector<std::int64_t>{1});

  // An explicit list that stops short gains the horizon as final entry.
  const ExperimentConfig c =
      from_text("game.horizon = 50\ncheckpoints = 10, 20\n");
  CHECK(c.checkpoints == std::vector<std::int64_t>{10, 20, 50});

  reject("checkpoints = 0\n", "checkpoints");
  reject("game.horizon = 10\ncheckpoints = 11\n", "checkpoints");
}

TEST_CASE("every validation rule points at its field") {
  reject("game.variant = frisbee\n", "game.variant");
  reject("game.horizon = 0\n", "game.horizon");
  reject("game.horizon = 200000000\n", "game.horizon");
  reject("game.initial_capital = -1\n", "game.initial_capital");
  reject("skeptic.kind = nonsense\n", "skeptic.kind");
  reject("skeptic.prior = cauchy\n", "skeptic.prior");
  reject("skeptic.prior = power\nskeptic.prior.a = 1.5\n", "skeptic.prior.a");
  reject("skeptic.prior = efkp\nskeptic.prior.b = 5\n", "skeptic.prior.b");
  reject("skeptic.prior = efkp\nskeptic.prior.gamma = 0\n",
         "skeptic.prior.gamma");
  reject("skeptic.kind = constant\nskeptic.eps = 1.5\n", "skeptic.eps");
  reject("skeptic.kind = discrete\n", "skeptic.atoms");
  reject("skeptic.kind = discrete\nskeptic.atoms = 0.5\nskeptic.weights = 1, 2\n",
         "skeptic.weights");
  // Unbounded-game proportions are nonnegative; -0.5 only fits the bounded game.
  reject("skeptic.kind = discrete\nskeptic.atoms = -0.5\nskeptic.weights = 1\n",
         "skeptic.atoms");
  reject("skeptic.kind = dyadic\nskeptic.levels = 0\n", "skeptic.levels");
  reject("reality.kind = elsewhere\n", "reality.kind");
  reject("reality.kind = shifted\nreality.delta = -0.1\n", "reality.delta");
  reject("game.variant = bounded\nreality.kind = shifted\nreality.delta = 0.05\n",
         "reality.delta");
  reject("reality.kind = uniform\nreality.hi = -2\n", "reality.hi");
  reject("game.variant = bounded\nreality.kind = uniform\nreality.hi = 1.5\n",
         "reality.hi");
  reject("reality.kind = script\n", "reality.script");
  reject("reality.kind = script\nreality.script = 0.5, -1.5\n",
         "reality.script");
  reject("reality.kind = adversary\nreality.mode = chaotic\n", "reality.mode");
  reject("game.variant = bounded\nreality.kind = adversary\n", "reality.kind");
  reject("seeds = 3, 3\n", "seeds");
  reject("bounds.enabled = thm99\n", "bounds.enabled");
  reject("skeptic.kind = constant\nbounds.enabled = thm41\n", "bounds.enabled");
  reject("bounds.enabled = thm41\nbounds.thm41.c = 1.0\n", "bounds.thm41.c");
  reject("bounds.enabled = prop31\nbounds.prop31.delta = 0.5\n",
         "bounds.prop31.delta");
  reject("bounds.enabled = remark41\nbounds.remark41.levels = 300\n",
         "bounds.remark41.levels");
  reject("bounds.enabled = thm41\nbounds.tolerance = 0\n", "bounds.tolerance");
  reject("bounds.enabled = thm41\nbounds.mutate.thm41_factor = -2\n",
         "bounds.mutate.thm41_factor");
  reject("rates.power_a = 1\n", "rates.power_a");
  reject("rates.efkp.b = 3\n", "rates.efkp.b");
  reject("output.dir =\n", "output.dir");
  reject("jobs = 300\n", "jobs");
}
