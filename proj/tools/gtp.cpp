// Experiment driver for the betting-game engine.
//
//   gtp simulate <config>        play the game, stream traces, audit bounds
//   gtp verify-bounds <config>   soundness campaign over the seed list
//   gtp adversary <config>       complying-opponent demonstration
//   gtp rates <config>           normalizing-sequence rate curves
//   gtp functional --op ...      prior <-> envelope calculus (F, G, ...)
//
// Config files are "dotted.key = value" lines; --set key=value overrides
// file keys; the GTP_OUTPUT_DIR environment variable (or --out-dir, which
// sets it) overrides output.dir.  Exit codes: 0 = all enabled invariants
// held, 1 = a violation (or runtime fault), 2 = configuration error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gtp/config.hpp"
#include "gtp/prior.hpp"
#include "gtp/sim.hpp"
#include "gtp/upper_class.hpp"

namespace {

using namespace gtp;

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("config", opts.config_path, "experiment file (dotted key = value)")
      ->required();
  cmd->add_option("--set", opts.sets, "override a config key, e.g. --set seeds=1..8");
  cmd->add_option("--out-dir", opts.out_dir, "override the output directory");
}

ExperimentConfig load_config(const CommonOpts& opts) {
  if (!opts.out_dir.empty()) {
    // Highest-precedence output override; the runners read the variable.
    setenv("GTP_OUTPUT_DIR", opts.out_dir.c_str(), 1);
  }
  ConfigMap map = parse_config_file(opts.config_path);
  for (const std::string& assignment : opts.sets) apply_override(map, assignment);
  return ExperimentConfig::from_map(map);
}

std::string write_report(const ExperimentConfig& cfg, const std::string& name,
                         const std::string& body) {
  const std::string dir = resolve_output_dir(cfg.output);
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("output.report", "cannot open " + path);
  out << body << '\n';
  return path;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cout << "warning: " << w << "\n";
}

int cmd_simulate(const CommonOpts& opts) {
  const ExperimentConfig cfg = load_config(opts);
  const SimulationReport report = run_simulate(cfg);
  const std::string path = write_report(cfg, cfg.output.report, to_json(report));

  std::cout << "simulate: " << report.skeptic << " vs " << report.reality
            << ", N=" << report.horizon << ", seeds=" << report.seeds.size() << "\n";
  for (const SeedResult& r : report.seeds) {
    if (!r.trace_path.empty()) std::cout << "trace: " << r.trace_path << "\n";
  }
  std::cout << "report: " << path << "\n";
  print_warnings(report.warnings);
  std::cout << (report.exit_code() == 0 ? "verdict: clean" : "verdict: VIOLATION")
            << "\n";
  return report.exit_code();
}

int cmd_verify_bounds(const CommonOpts& opts, const std::string& theorems_csv) {
  std::vector<std::string> theorems;
  std::istringstream in(theorems_csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) theorems.push_back(item);
  }
  const ExperimentConfig cfg = load_config(opts);
  const VerificationReport report = run_verify_bounds(cfg, theorems);
  const std::string path = write_report(cfg, cfg.output.report, to_json(report));

  std::cout << "verify-bounds: " << report.skeptic << " vs " << report.reality
            << ", N=" << report.horizon << ", seeds=" << report.seed_count << "\n";
  for (const TheoremCampaign& c : report.campaigns) {
    std::cout << c.name << ": " << c.verdict << " (applicable " << c.applicable_rounds
              << ", violations " << c.violation_count << ")\n";
    for (const BoundViolation& v : c.violations) {
      std::cout << "  violated at seed " << v.seed << ", round " << v.round
                << ": ln K = " << v.log_K << " < ln bound = " << v.log_bound << "\n";
    }
  }
  std::cout << "report: " << path << "\n";
  print_warnings(report.warnings);
  return report.exit_code();
}

int cmd_adversary(const CommonOpts& opts) {
  const ExperimentConfig cfg = load_config(opts);
  const AdversaryReport report = run_adversary_demo(cfg);
  const std::string path = write_report(cfg, cfg.output.report, to_json(report));

  std::cout << "adversary: " << report.skeptic << " vs complying opponent (b = "
            << report.b_name << "), N=" << report.rounds << "\n";
  std::cout << "sup K = " << report.sup_K << ", sup ln prod c = "
            << report.sup_log_weight << ", potential "
            << (report.potential_monotone ? "monotone" : "NOT monotone")
            << " (max rise " << report.max_potential_rise << ")\n";
  if (report.witness_count > 0) {
    std::cout << "witness rounds with S/b >= 1: " << report.witness_count
              << " (first at " << report.first_witness << ")\n";
  } else {
    std::cout << "no witness round with S/b >= 1\n";
  }
  for (const std::string& n : report.notes) std::cout << "note: " << n << "\n";
  std::cout << "report: " << path << "\n";
  return report.exit_code();
}

int cmd_rates(const CommonOpts& opts) {
  const ExperimentConfig cfg = load_config(opts);
  const RatesReport report = run_rates(cfg);
  const std::string dir = resolve_output_dir(cfg.output);
  std::filesystem::create_directories(dir);
  const std::string csv_path = (std::filesystem::path(dir) / cfg.output.rates).string();
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw ConfigError("output.rates", "cannot open " + csv_path);
    out << rates_csv(report);
  }
  const std::string json_path = write_report(cfg, cfg.output.report, to_json(report));

  std::cout << "rates: " << report.skeptic << " vs " << report.reality << ", seed "
            << report.seed << ", " << report.rows.size() << " checkpoints\n";
  for (const std::string& n : report.notes) std::cout << "note: " << n << "\n";
  std::cout << "csv: " << csv_path << "\nreport: " << json_path << "\n";
  return 0;
}

// ------------------------------------------------------------ functional ----

Prior parse_prior_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ':')) parts.push_back(item);
  if (parts.empty()) throw ConfigError("--prior", "empty prior spec");
  try {
    if (parts[0] == "uniform" && parts.size() == 1) return make_uniform();
    if (parts[0] == "lil" && parts.size() == 1) return make_lil();
    if (parts[0] == "power" && parts.size() == 2) return make_power(std::stod(parts[1]));
    if (parts[0] == "efkp" && parts.size() == 3) {
      return make_efkp(std::stoi(parts[1]), std::stod(parts[2]));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("--prior", "\"" + spec + "\": " + e.what());
  }
  throw ConfigError("--prior", "unknown spec \"" + spec +
                                   "\" (expected uniform, power:<a>, lil or "
                                   "efkp:<b>:<gamma>)");
}

UpperClassFunction parse_psi_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ':')) parts.push_back(item);
  if (parts.empty()) throw ConfigError("--psi", "empty envelope spec");
  try {
    if (parts[0] == "efkp" && parts.size() == 3) {
      return psi_efkp(std::stoi(parts[1]), std::stod(parts[2]));
    }
    if (parts[0] == "sll" && parts.size() == 2) {
      return psi_sqrt_log_log(std::stod(parts[1]));
    }
    if (parts[0] == "const" && parts.size() == 2) {
      const double v = std::stod(parts[1]);
      if (!(v > 0.0)) throw std::invalid_argument("constant must be positive");
      return UpperClassFunction::custom("const(" + parts[1] + ")", PsiFamily::Custom,
                                        [v](double) { return v * v; }, 0.0);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("--psi", "\"" + spec + "\": " + e.what());
  }
  throw ConfigError("--psi", "unknown spec \"" + spec +
                                 "\" (expected efkp:<b>:<gamma>, sll:<c> or "
                                 "const:<v>)");
}

std::vector<double> log_grid(double lo, double hi, int points, const char* flag) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) {
    throw ConfigError(flag, "need 0 < lo < hi and at least 2 points");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(points));
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < points; ++i) {
    out.push_back(std::exp(llo + (lhi - llo) * i / (points - 1)));
  }
  return out;
}

struct FunctionalOpts {
  std::string op;
  std::string prior_spec, prior2_spec;
  std::string psi_spec, psi2_spec;
  double eps_lo = 1e-20, eps_hi = 0.9;
  double lambda_lo = 0.0, lambda_hi = 0.0;  // 0 = pick from the object's domain
  int points = 200;
  double it_lambda_hi = 1e15;  // integral-test checkpoint
  double it_growth = 10.0;
  bool enforce = false;
  std::string out_path;
};

std::ostream& functional_out(const FunctionalOpts& f, std::ofstream& file) {
  if (f.out_path.empty()) return std::cout;
  file.open(f.out_path, std::ios::binary);
  if (!file) throw ConfigError("--out", "cannot open " + f.out_path);
  return file;
}

// Default lambda grid: two decades above the envelope/prior threshold M.
std::pair<double, double> lambda_range(const FunctionalOpts& f, double M,
                                       const std::string& what) {
  double lo = f.lambda_lo, hi = f.lambda_hi;
  if (lo <= 0.0) {
    if (!std::isfinite(M)) {
      throw ConfigError("--lambda-lo", what +
                                           " has a threshold beyond double range; "
                                           "no representable lambda is in its domain");
    }
    lo = std::max(M, 1.0) * 1.1;
  }
  if (hi <= 0.0) hi = lo * 1e6;
  return {lo, hi};
}

int cmd_functional(const FunctionalOpts& f) {
  std::ofstream file;
  std::ostream& out = functional_out(f, file);

  if (f.op == "F") {
    if (f.psi_spec.empty()) throw ConfigError("--psi", "op F maps an envelope");
    const UpperClassFunction psi = parse_psi_spec(f.psi_spec);
    const Prior pi = apply_F(psi, f.enforce);
    std::cout << "F[" << psi.describe() << "] = " << pi.describe()
              << ", eps_pi = " << pi.eps_pi() << "\n";
    out << "epsilon,pi\n";
    for (double eps : log_grid(f.eps_lo, f.eps_hi, f.points, "--eps-lo")) {
      out << format_double(eps) << ',' << format_double(pi.density(eps)) << '\n';
    }
    return 0;
  }

  if (f.op == "G") {
    if (f.prior_spec.empty()) throw ConfigError("--prior", "op G maps a density");
    const Prior pi = parse_prior_spec(f.prior_spec);
    const UpperClassFunction psi = apply_G(pi);
    std::cout << "G[" << pi.describe() << "] = " << psi.describe()
              << ", u_min = " << psi.u_min() << ", M = " << psi.M() << "\n";
    const auto [lo, hi] = lambda_range(f, psi.M(), psi.describe());
    out << "lambda,psi\n";
    for (double lambda : log_grid(lo, hi, f.points, "--lambda-lo")) {
      out << format_double(lambda) << ',' << format_double(psi(lambda)) << '\n';
    }
    return 0;
  }

  if (f.op == "FG") {
    if (f.prior_spec.empty()) throw ConfigError("--prior", "op FG maps a density");
    const Prior pi = parse_prior_spec(f.prior_spec);
    out << "epsilon,pi,FGpi,ratio\n";
    for (double eps : log_grid(f.eps_lo, f.eps_hi, f.points, "--eps-lo")) {
      const Composition c = compose_FG(pi, eps);
      const double log_pi = pi.log_density(eps);
      out << format_double(eps) << ',' << format_double(std::exp(log_pi)) << ','
          << format_double(c.value) << ','
          << format_double(std::exp(c.log_value - log_pi)) << '\n';
    }
    return 0;
  }

  if (f.op == "GF") {
    if (f.psi_spec.empty()) throw ConfigError("--psi", "op GF maps an envelope");
    const UpperClassFunction psi = parse_psi_spec(f.psi_spec);
    const auto [lo, hi] = lambda_range(f, psi.M(), psi.describe());
    out << "lambda,psi,GFpsi,diff\n";
    for (double lambda : log_grid(lo, hi, f.points, "--lambda-lo")) {
      const Composition c = compose_GF(psi, lambda);
      const double p = psi(lambda);
      out << format_double(lambda) << ',' << format_double(p) << ','
          << format_double(c.value) << ',' << format_double(c.value - p) << '\n';
    }
    return 0;
  }

  if (f.op == "equiv") {
    EquivalenceReport rep;
    std::string label;
    if (!f.prior_spec.empty() && !f.prior2_spec.empty()) {
      rep = equivalent_priors(parse_prior_spec(f.prior_spec),
                              parse_prior_spec(f.prior2_spec));
      label = "densities";
    } else if (!f.psi_spec.empty() && !f.psi2_spec.empty()) {
      rep = equivalent_psis(parse_psi_spec(f.psi_spec), parse_psi_spec(f.psi2_spec));
      label = "envelopes";
    } else {
      throw ConfigError("--op equiv",
                        "needs --prior/--prior2 or --psi/--psi2 to compare");
    }
    out << "{\n  \"compare\": \"" << label << "\",\n  \"equivalent\": "
        << (rep.equivalent ? "true" : "false")
        << ",\n  \"log_ratio_min\": " << rep.log_ratio_min
        << ",\n  \"log_ratio_max\": " << rep.log_ratio_max
        << ",\n  \"drift\": " << rep.drift << ",\n  \"points\": " << rep.points
        << ",\n  \"note\": \"" << rep.note << "\"\n}\n";
    return 0;
  }

  if (f.op == "integral-test") {
    UpperClassFunction psi = [&] {
      if (!f.psi_spec.empty()) return parse_psi_spec(f.psi_spec);
      if (!f.prior_spec.empty()) return apply_G(parse_prior_spec(f.prior_spec));
      throw ConfigError("--op integral-test", "needs --psi (or --prior, tested as G[prior])");
    }();
    const IntegralTestResult r = integral_test(psi, f.it_lambda_hi, f.it_growth);
    const char* verdict = r.verdict == IntegralVerdict::Convergent   ? "convergent"
                          : r.verdict == IntegralVerdict::Divergent ? "divergent"
                                                                    : "inconclusive";
    out << "{\n  \"psi\": \"" << psi.describe() << "\",\n  \"verdict\": \"" << verdict
        << "\",\n  \"value\": " << r.value
        << ",\n  \"tail_estimate\": " << r.tail_estimate
        << ",\n  \"I_at_lambda_hi\": " << r.I_at_lambda_hi
        << ",\n  \"I_at_growth\": " << r.I_at_growth
        << ",\n  \"increment_rel\": " << r.increment_rel
        << ",\n  \"fitted_slope\": " << r.fitted_slope
        << ",\n  \"windows\": " << r.windows << ",\n  \"note\": \"" << r.note
        << "\"\n}\n";
    if (f.enforce && r.verdict == IntegralVerdict::Divergent) return 1;
    return 0;
  }

  throw ConfigError("--op", "unknown op \"" + f.op +
                                "\" (expected F, G, FG, GF, equiv or integral-test)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"betting-game engine: simulation, bound verification and the "
               "prior <-> envelope calculus"};
  app.require_subcommand(1);

  CommonOpts sim_opts, verify_opts, adv_opts, rates_opts;
  std::string theorems = "thm41,thm43,remark41,prop31";
  FunctionalOpts fn;

  CLI::App* sim = app.add_subcommand("simulate", "play the game and audit bounds");
  add_common(sim, sim_opts);

  CLI::App* verify =
      app.add_subcommand("verify-bounds", "bound-soundness campaign over seeds");
  add_common(verify, verify_opts);
  verify->add_option("--theorems", theorems,
                     "comma list of bounds to audit (thm41,thm43,remark41,prop31)");

  CLI::App* adv =
      app.add_subcommand("adversary", "complying-opponent demonstration");
  add_common(adv, adv_opts);

  CLI::App* rates = app.add_subcommand("rates", "normalizing-sequence rate curves");
  add_common(rates, rates_opts);

  CLI::App* fun = app.add_subcommand("functional", "prior <-> envelope calculus");
  fun->add_option("--op", fn.op, "F | G | FG | GF | equiv | integral-test")
      ->required();
  fun->add_option("--prior", fn.prior_spec, "uniform | power:<a> | lil | efkp:<b>:<gamma>");
  fun->add_option("--prior2", fn.prior2_spec, "second density for equiv");
  fun->add_option("--psi", fn.psi_spec, "efkp:<b>:<gamma> | sll:<c> | const:<v>");
  fun->add_option("--psi2", fn.psi2_spec, "second envelope for equiv");
  fun->add_option("--eps-lo", fn.eps_lo, "density grid lower end");
  fun->add_option("--eps-hi", fn.eps_hi, "density grid upper end");
  fun->add_option("--lambda-lo", fn.lambda_lo, "envelope grid lower end");
  fun->add_option("--lambda-hi", fn.lambda_hi, "envelope grid upper end");
  fun->add_option("--points", fn.points, "grid points");
  fun->add_option("--it-lambda-hi", fn.it_lambda_hi, "integral-test checkpoint");
  fun->add_option("--it-growth", fn.it_growth, "integral-test growth factor");
  fun->add_flag("--enforce", fn.enforce,
                "F: reject divergent envelopes; integral-test: exit 1 on divergent");
  fun->add_option("--out", fn.out_path, "write the CSV/JSON here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_opts);
    if (verify->parsed()) return cmd_verify_bounds(verify_opts, theorems);
    if (adv->parsed()) return cmd_adversary(adv_opts);
    if (rates->parsed()) return cmd_rates(rates_opts);
    if (fun->parsed()) return cmd_functional(fn);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;  // unreachable with require_subcommand(1)
}
