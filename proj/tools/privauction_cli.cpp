// Command-line experiment harness: instance generation, seeded batch runs,
// parameter sweeps, attack experiments, and equilibrium verification, all
// emitting flat CSV/JSON files.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "privauction/counter.hpp"
#include "privauction/errors.hpp"
#include "privauction/experiment.hpp"
#include "privauction/rng.hpp"

namespace pa = privauction;

namespace {

void write_file(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw pa::UsageError("cannot write to " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pa::UsageError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CommonOpts {
  pa::ExperimentConfig config;
  std::string config_path;
  std::string noise = "laplace";
  std::string mode = "pmatch";
  std::string kind = "uniform";
  long override_t = -1;
  double override_e = -1.0;
  int override_m = -1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file (flags win)");
  cmd->add_option("--mode", opts.mode, "pmatch|palloc|multiplicative|kelso|counter-bench");
  cmd->add_option("--instance", opts.config.instance_path, "instance JSON file");
  cmd->add_option("--kind", opts.kind, "uniform|unweighted|correlated|gadget");
  cmd->add_option("--n", opts.config.n, "bidders");
  cmd->add_option("--k", opts.config.k, "good types");
  cmd->add_option("--s", opts.config.s, "supply per type");
  cmd->add_option("--alpha", opts.config.alpha, "price increment");
  cmd->add_option("--rho", opts.config.rho, "unsatisfied fraction target");
  cmd->add_option("--epsilon", opts.config.epsilon, "privacy budget");
  cmd->add_option("--gamma", opts.config.gamma, "failure probability");
  cmd->add_option("--lambda", opts.config.lambda_min, "minimum nonzero valuation");
  cmd->add_option("--opt-estimate", opts.config.opt_estimate,
                  "OPT estimate for the multiplicative variant (0: exact)");
  cmd->add_option("--bundle-size", opts.config.max_bundle_size,
                  "per-bidder bundle size cap");
  cmd->add_option("--noise", opts.noise, "laplace|off");
  cmd->add_option("--override-T", opts.override_t, "round-count override");
  cmd->add_option("--override-E", opts.override_e, "error-bound override");
  cmd->add_option("--override-m", opts.override_m, "reserve override");
  cmd->add_option("--trials", opts.config.trials, "number of seeded trials");
  cmd->add_option("--seed", opts.config.seed, "root seed");
  cmd->add_option("--out", opts.config.output_path, "output path (default stdout)");
}

pa::ExperimentConfig finalize(CLI::App* cmd, CommonOpts& opts) {
  pa::ExperimentConfig config;
  if (!opts.config_path.empty())
    config = pa::config_from_json(read_file(opts.config_path));
  // Only flags the user actually passed override the file.
  auto passed = [&](const std::string& flag) { return cmd->count(flag) > 0; };
  pa::ExperimentConfig& c = opts.config;
  if (opts.config_path.empty()) config = c;
  if (passed("--mode") || opts.config_path.empty())
    config.mode = pa::parse_mode(opts.mode);
  if (passed("--kind") || opts.config_path.empty())
    config.kind = pa::parse_instance_kind(opts.kind);
  if (passed("--instance")) config.instance_path = c.instance_path;
  if (passed("--n")) config.n = c.n;
  if (passed("--k")) config.k = c.k;
  if (passed("--s")) config.s = c.s;
  if (passed("--alpha")) config.alpha = c.alpha;
  if (passed("--rho")) config.rho = c.rho;
  if (passed("--epsilon")) config.epsilon = c.epsilon;
  if (passed("--gamma")) config.gamma = c.gamma;
  if (passed("--lambda")) config.lambda_min = c.lambda_min;
  if (passed("--opt-estimate")) config.opt_estimate = c.opt_estimate;
  if (passed("--bundle-size")) config.max_bundle_size = c.max_bundle_size;
  if (passed("--trials")) config.trials = c.trials;
  if (passed("--seed")) config.seed = c.seed;
  if (passed("--out")) config.output_path = c.output_path;
  if (passed("--noise") || opts.config_path.empty()) {
    if (opts.noise == "off")
      config.noise_off = true;
    else if (opts.noise == "laplace")
      config.noise_off = false;
    else
      throw pa::UsageError("--noise must be laplace or off");
  }
  if (opts.override_t >= 0) config.override_rounds = opts.override_t;
  if (opts.override_e >= 0.0) config.override_error_bound = opts.override_e;
  if (opts.override_m >= 0) config.override_reserve = opts.override_m;
  return config;
}

int run_counter_bench(const pa::ExperimentConfig& config) {
  // One counter per trial on a random bit stream; dumps the trace CSV.
  std::ostringstream out;
  out << "trial,t,bit,exact_count,released_count\n";
  long horizon = config.override_rounds.value_or(1024);
  for (int trial = 0; trial < config.trials; ++trial) {
    pa::CounterConfig cc;
    cc.epsilon = config.epsilon;
    cc.horizon = horizon;
    cc.noise_mode = config.noise_off ? pa::NoiseMode::kOff : pa::NoiseMode::kLaplace;
    cc.rng_seed = pa::derive_seed(config.seed, "counter-bench", trial);
    pa::BinaryCounter counter(cc);
    counter.enable_trace();
    pa::Rng stream(pa::derive_seed(config.seed, "counter-bench-stream", trial));
    for (long t = 0; t < horizon; ++t)
      counter.feed(static_cast<int>(stream() & 1ULL));
    for (const auto& row : counter.trace())
      out << trial << ',' << row.t << ',' << row.bit << ',' << row.exact_count
          << ',' << pa::format_double(row.released_count) << '\n';
  }
  write_file(config.output_path, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jointly private allocation experiments"};
  app.require_subcommand(1);

  CommonOpts run_opts, sweep_opts, attack_opts;
  std::string axis = "s";
  std::string values_arg;
  std::string variant = "allocation";
  std::string mechanism = "exact";
  int bits = 32;

  CLI::App* gen = app.add_subcommand("gen", "generate an instance file");
  std::string gen_kind = "uniform";
  int gen_n = 10, gen_k = 2, gen_s = 5;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--kind", gen_kind, "uniform|unweighted|correlated|gadget");
  gen->add_option("--n", gen_n)->required();
  gen->add_option("--k", gen_k);
  gen->add_option("--s", gen_s);
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out);

  CLI::App* run = app.add_subcommand("run", "seeded batch runs, summary CSV");
  add_common(run, run_opts);
  std::string billboard_out, outcome_out;
  run->add_option("--billboard-out", billboard_out,
                  "dump the first trial's billboard CSV here");
  run->add_option("--outcome-out", outcome_out,
                  "dump the first trial's outcome JSON here");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "parameter sweep CSV");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--axis", axis, "s|epsilon|alpha|n");
  sweep_cmd->add_option("--values", values_arg, "comma-separated axis values");

  CLI::App* attack = app.add_subcommand("attack", "reconstruction experiments");
  add_common(attack, attack_opts);
  attack->add_option("--variant", variant, "prices|allocation|joint");
  attack->add_option("--mechanism", mechanism, "pmatch|kelso|exact");
  attack->add_option("--bits", bits, "database length");

  CLI::App* verify = app.add_subcommand("verify", "verify an outcome file");
  std::string v_instance, v_outcome, v_id = "instance";
  double v_alpha = 0.1;
  verify->add_option("--instance", v_instance)->required();
  verify->add_option("--outcome", v_outcome)->required();
  verify->add_option("--alpha", v_alpha);
  verify->add_option("--id", v_id);

  try {
    app.parse(argc, argv);

    if (gen->parsed()) {
      pa::Market market = pa::generate_instance(pa::parse_instance_kind(gen_kind),
                                                gen_n, gen_k, gen_s, gen_seed);
      write_file(gen_out, pa::market_to_json(market) + "\n");
      return 0;
    }
    if (run->parsed()) {
      pa::ExperimentConfig config = finalize(run, run_opts);
      if (config.mode == pa::Mode::kCounterBench) return run_counter_bench(config);
      if (!billboard_out.empty() || !outcome_out.empty()) {
        std::uint64_t trial_seed = pa::derive_seed(config.seed, "run-trial", 0);
        pa::Market market = pa::resolve_instance(config, trial_seed);
        pa::PMatchParams p;
        p.alpha = config.alpha;
        p.rho = config.rho;
        p.epsilon = config.epsilon;
        p.gamma = config.gamma;
        p.noise_off = config.noise_off;
        p.overrides.rounds = config.override_rounds;
        p.overrides.error_bound = config.override_error_bound;
        p.overrides.reserve = config.override_reserve;
        pa::AuctionResult result = pa::pmatch_run(market, p, trial_seed);
        if (!billboard_out.empty())
          write_file(billboard_out, pa::billboard_csv(result.billboard));
        if (!outcome_out.empty())
          write_file(outcome_out, pa::outcome_to_json(result.outcome) + "\n");
      }
      std::vector<pa::RunSummary> rows = pa::run_experiment(config);
      std::ostringstream out;
      out << pa::run_summary_header() << '\n';
      for (const auto& row : rows) out << pa::run_summary_row(row) << '\n';
      write_file(config.output_path, out.str());
      return 0;
    }
    if (sweep_cmd->parsed()) {
      pa::ExperimentConfig config = finalize(sweep_cmd, sweep_opts);
      std::vector<double> values;
      std::stringstream ss(values_arg);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) values.push_back(std::stod(item));
      auto rows = pa::sweep(config, pa::parse_sweep_axis(axis), values);
      write_file(config.output_path, pa::sweep_csv(rows));
      return 0;
    }
    if (attack->parsed()) {
      pa::ExperimentConfig config = finalize(attack, attack_opts);
      pa::AttackExperimentConfig ac;
      if (variant == "prices")
        ac.variant = pa::GadgetVariant::kPrices;
      else if (variant == "allocation")
        ac.variant = pa::GadgetVariant::kAllocation;
      else if (variant == "joint")
        ac.variant = pa::GadgetVariant::kJoint;
      else
        throw pa::UsageError("unknown gadget variant: " + variant);
      if (mechanism == "pmatch")
        ac.mechanism = pa::AttackMechanism::kPMatch;
      else if (mechanism == "kelso")
        ac.mechanism = pa::AttackMechanism::kKelsoCrawford;
      else if (mechanism == "exact")
        ac.mechanism = pa::AttackMechanism::kExactMatching;
      else
        throw pa::UsageError("unknown mechanism: " + mechanism);
      ac.bits = bits;
      ac.supply = config.s;
      ac.alpha = config.alpha;
      ac.rho = config.rho;
      ac.epsilon = config.epsilon;
      ac.gamma = config.gamma;
      ac.noise_off = config.noise_off;
      ac.override_error_bound = config.override_error_bound;
      ac.override_reserve = config.override_reserve;
      auto rows = pa::run_attack_experiment(ac, config.trials, config.seed);
      write_file(config.output_path, pa::attack_csv(rows));
      return 0;
    }
    if (verify->parsed()) {
      std::ifstream in(v_instance);
      if (!in) throw pa::UsageError("cannot open " + v_instance);
      pa::Market market = pa::load_market_json(in);
      pa::Outcome outcome = pa::outcome_from_json(read_file(v_outcome));
      pa::EquilibriumReport report =
          pa::verify_matching_equilibrium(market, outcome, v_alpha);
      std::cout << pa::report_csv_header() << '\n'
                << pa::report_csv_row(v_id, report) << '\n';
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const pa::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const pa::ConfigError& e) {
    std::cerr << "precondition violated: " << e.what() << '\n';
    return 3;
  } catch (const pa::InstanceError& e) {
    std::cerr << "instance error: " << e.what() << '\n';
    return 3;
  } catch (const pa::GuardError& e) {
    std::cerr << "internal guard: " << e.what() << '\n';
    return 4;
  }
  return 2;
}
