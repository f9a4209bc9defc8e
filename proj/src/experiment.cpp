#include "privauction/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "privauction/errors.hpp"
#include "privauction/rng.hpp"

namespace privauction {

std::string format_double(double x) {
  std::ostringstream out;
  out.precision(12);
  out << x;
  return out.str();
}

InstanceKind parse_instance_kind(const std::string& name) {
  if (name == "uniform") return InstanceKind::kUniform;
  if (name == "unweighted") return InstanceKind::kUnweighted;
  if (name == "correlated") return InstanceKind::kCorrelated;
  if (name == "gadget") return InstanceKind::kGadget;
  throw UsageError("unknown instance kind: " + name);
}

std::string instance_kind_name(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::kUniform: return "uniform";
    case InstanceKind::kUnweighted: return "unweighted";
    case InstanceKind::kCorrelated: return "correlated";
    case InstanceKind::kGadget: return "gadget";
  }
  return "?";
}

Market generate_instance(InstanceKind kind, int n, int k, int s,
                         std::uint64_t seed) {
  if (n < 1 || k < 1 || s < 1)
    throw UsageError("instance dimensions must be positive");
  Rng rng(derive_seed(seed, "instance"));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  UnitDemandValuation vals;
  switch (kind) {
    case InstanceKind::kUniform: {
      vals.v.assign(n, std::vector<double>(k, 0.0));
      for (auto& row : vals.v)
        for (double& x : row) x = unif(rng);
      return Market(n, k, s, std::move(vals));
    }
    case InstanceKind::kUnweighted: {
      vals.v.assign(n, std::vector<double>(k, 0.0));
      for (auto& row : vals.v)
        for (double& x : row) x = static_cast<double>(rng() & 1ULL);
      return Market(n, k, s, std::move(vals));
    }
    case InstanceKind::kCorrelated: {
      std::vector<double> quality(k);
      for (double& q : quality) q = unif(rng);
      std::uniform_real_distribution<double> noise(-0.25, 0.25);
      vals.v.assign(n, std::vector<double>(k, 0.0));
      for (auto& row : vals.v)
        for (int j = 0; j < k; ++j)
          row[j] = std::clamp(quality[j] + noise(rng), 0.0, 1.0);
      return Market(n, k, s, std::move(vals));
    }
    case InstanceKind::kGadget: {
      GadgetSpec spec;
      spec.variant = GadgetVariant::kAllocation;
      spec.database.resize(n);
      for (int& b : spec.database) b = static_cast<int>(rng() & 1ULL);
      return build_gadget_market(spec, seed).market;
    }
  }
  throw UsageError("unknown instance kind");
}

Mode parse_mode(const std::string& name) {
  if (name == "pmatch") return Mode::kPMatch;
  if (name == "palloc") return Mode::kPAlloc;
  if (name == "multiplicative") return Mode::kMultiplicative;
  if (name == "kelso") return Mode::kKelso;
  if (name == "attack") return Mode::kAttack;
  if (name == "counter-bench") return Mode::kCounterBench;
  throw UsageError("unknown mode: " + name);
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::kPMatch: return "pmatch";
    case Mode::kPAlloc: return "palloc";
    case Mode::kMultiplicative: return "multiplicative";
    case Mode::kKelso: return "kelso";
    case Mode::kAttack: return "attack";
    case Mode::kCounterBench: return "counter-bench";
  }
  return "?";
}

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::json js;
  js["mode"] = mode_name(c.mode);
  js["instance_path"] = c.instance_path;
  js["kind"] = instance_kind_name(c.kind);
  js["n"] = c.n;
  js["k"] = c.k;
  js["s"] = c.s;
  js["alpha"] = c.alpha;
  js["rho"] = c.rho;
  js["epsilon"] = c.epsilon;
  js["gamma"] = c.gamma;
  js["lambda"] = c.lambda_min;
  js["opt_estimate"] = c.opt_estimate;
  js["max_bundle_size"] = c.max_bundle_size;
  js["noise_off"] = c.noise_off;
  if (c.override_rounds) js["override_T"] = *c.override_rounds;
  if (c.override_error_bound) js["override_E"] = *c.override_error_bound;
  if (c.override_reserve) js["override_m"] = *c.override_reserve;
  js["trials"] = c.trials;
  js["seed"] = c.seed;
  js["output_path"] = c.output_path;
  return js.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  nlohmann::json js;
  try {
    js = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("bad config JSON: ") + e.what());
  }
  ExperimentConfig c;
  if (js.contains("mode")) c.mode = parse_mode(js["mode"].get<std::string>());
  if (js.contains("instance_path")) c.instance_path = js["instance_path"];
  if (js.contains("kind")) c.kind = parse_instance_kind(js["kind"].get<std::string>());
  if (js.contains("n")) c.n = js["n"];
  if (js.contains("k")) c.k = js["k"];
  if (js.contains("s")) c.s = js["s"];
  if (js.contains("alpha")) c.alpha = js["alpha"];
  if (js.contains("rho")) c.rho = js["rho"];
  if (js.contains("epsilon")) c.epsilon = js["epsilon"];
  if (js.contains("gamma")) c.gamma = js["gamma"];
  if (js.contains("lambda")) c.lambda_min = js["lambda"];
  if (js.contains("opt_estimate")) c.opt_estimate = js["opt_estimate"];
  if (js.contains("max_bundle_size")) c.max_bundle_size = js["max_bundle_size"];
  if (js.contains("noise_off")) c.noise_off = js["noise_off"];
  if (js.contains("override_T")) c.override_rounds = js["override_T"].get<long>();
  if (js.contains("override_E"))
    c.override_error_bound = js["override_E"].get<double>();
  if (js.contains("override_m")) c.override_reserve = js["override_m"].get<int>();
  if (js.contains("trials")) c.trials = js["trials"];
  if (js.contains("seed")) c.seed = js["seed"].get<std::uint64_t>();
  if (js.contains("output_path")) c.output_path = js["output_path"];
  return c;
}

Market resolve_instance(const ExperimentConfig& config, std::uint64_t seed) {
  if (!config.instance_path.empty()) {
    std::ifstream in(config.instance_path);
    if (!in) throw UsageError("cannot open instance file " + config.instance_path);
    return load_market_json(in);
  }
  return generate_instance(config.kind, config.n, config.k, config.s, seed);
}

namespace {

PMatchParams pmatch_params(const ExperimentConfig& c) {
  PMatchParams p;
  p.alpha = c.alpha;
  p.rho = c.rho;
  p.epsilon = c.epsilon;
  p.gamma = c.gamma;
  p.noise_off = c.noise_off;
  p.overrides.rounds = c.override_rounds;
  p.overrides.error_bound = c.override_error_bound;
  p.overrides.reserve = c.override_reserve;
  return p;
}

PAllocParams palloc_params(const ExperimentConfig& c) {
  PAllocParams p;
  p.alpha = c.alpha;
  p.rho = c.rho;
  p.epsilon = c.epsilon;
  p.gamma = c.gamma;
  p.noise_off = c.noise_off;
  p.overrides.rounds = c.override_rounds;
  p.overrides.error_bound = c.override_error_bound;
  p.overrides.reserve = c.override_reserve;
  return p;
}

double satisfied_fraction(const Market& market, const Outcome& outcome,
                          double alpha) {
  EquilibriumReport report = verify_matching_equilibrium(market, outcome, alpha);
  return 1.0 - report.measured_rho;
}

}  // namespace

std::string run_summary_header() {
  return "seed,n,k,s,alpha,rho,epsilon,gamma,T,E,m,welfare,opt,"
         "satisfied_fraction,halted_round";
}

std::string run_summary_row(const RunSummary& r) {
  std::ostringstream out;
  out << r.seed << ',' << r.n << ',' << r.k << ',' << r.s << ','
      << format_double(r.alpha) << ',' << format_double(r.rho) << ','
      << format_double(r.epsilon) << ',' << format_double(r.gamma) << ','
      << r.rounds << ',' << format_double(r.error_bound) << ',' << r.reserve
      << ',' << format_double(r.welfare) << ',' << format_double(r.opt) << ','
      << format_double(r.satisfied_fraction) << ',' << r.halted_round;
  return out.str();
}

std::vector<RunSummary> run_experiment(const ExperimentConfig& config) {
  std::vector<RunSummary> rows;
  rows.reserve(config.trials);
  for (int trial = 0; trial < config.trials; ++trial) {
    std::uint64_t trial_seed = derive_seed(config.seed, "run-trial", trial);
    Market market = resolve_instance(config, trial_seed);
    RunSummary row{};
    row.seed = trial_seed;
    row.n = market.bidders();
    row.k = market.types();
    row.s = market.min_supply();
    row.alpha = config.alpha;
    row.rho = config.rho;
    row.epsilon = config.epsilon;
    row.gamma = config.gamma;

    switch (config.mode) {
      case Mode::kPMatch: {
        AuctionResult result = pmatch_run(market, pmatch_params(config), trial_seed);
        auto [opt_outcome, opt] = exact_max_matching(market);
        row.rounds = result.derived.rounds;
        row.error_bound = result.derived.error_bound;
        row.reserve = result.derived.reserve;
        row.welfare = result.outcome.welfare;
        row.opt = opt;
        row.satisfied_fraction =
            satisfied_fraction(market, result.outcome, config.alpha);
        row.halted_round = result.billboard.halted_at;
        break;
      }
      case Mode::kMultiplicative: {
        MultiplicativeParams mp;
        mp.lambda_min = config.lambda_min;
        mp.alpha = config.alpha;
        mp.epsilon = config.epsilon;
        mp.gamma = config.gamma;
        mp.noise_off = config.noise_off;
        mp.overrides.rounds = config.override_rounds;
        mp.overrides.error_bound = config.override_error_bound;
        mp.overrides.reserve = config.override_reserve;
        auto [opt_outcome, opt] = exact_max_matching(market);
        mp.opt_estimate = config.opt_estimate > 0.0 ? config.opt_estimate : opt;
        AuctionResult result =
            pmatch_run_multiplicative(market, mp, trial_seed);
        row.rounds = result.derived.rounds;
        row.error_bound = result.derived.error_bound;
        row.reserve = result.derived.reserve;
        row.welfare = result.outcome.welfare;
        row.opt = opt;
        row.satisfied_fraction =
            satisfied_fraction(market, result.outcome, config.alpha);
        row.halted_round = result.billboard.halted_at;
        break;
      }
      case Mode::kPAlloc: {
        BundleValuationOracle oracle =
            unit_demand_as_bundle_oracle(market.valuations());
        PAllocResult result =
            palloc_run(market, oracle, palloc_params(config), trial_seed);
        auto [opt_outcome, opt] = exact_max_matching(market);
        row.rounds = result.derived.rounds;
        row.error_bound = result.derived.error_bound;
        row.reserve = result.derived.reserve;
        row.welfare = result.outcome.welfare;
        row.opt = opt;
        EquilibriumReport report = verify_allocation_equilibrium(
            market, oracle, result.outcome, config.max_bundle_size, config.alpha);
        row.satisfied_fraction = 1.0 - report.measured_rho;
        row.halted_round = result.billboard.halted_at;
        break;
      }
      case Mode::kKelso: {
        auto [outcome, prices] = kelso_crawford(market, config.alpha);
        auto [opt_outcome, opt] = exact_max_matching(market);
        row.rounds = 0;
        row.error_bound = 0.0;
        row.reserve = 0;
        row.welfare = outcome.welfare;
        row.opt = opt;
        row.satisfied_fraction = satisfied_fraction(market, outcome, config.alpha);
        row.halted_round = 0;
        break;
      }
      default:
        throw UsageError("run_experiment does not handle mode " +
                         mode_name(config.mode));
    }
    rows.push_back(row);
  }
  return rows;
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "s") return SweepAxis::kSupply;
  if (name == "epsilon") return SweepAxis::kEpsilon;
  if (name == "alpha") return SweepAxis::kAlpha;
  if (name == "n") return SweepAxis::kBidders;
  throw UsageError("unknown sweep axis: " + name);
}

std::vector<SweepRow> sweep(const ExperimentConfig& config, SweepAxis axis,
                            const std::vector<double>& values) {
  std::vector<SweepRow> rows;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    double value = values[vi];
    ExperimentConfig point = config;
    switch (axis) {
      case SweepAxis::kSupply: point.s = static_cast<int>(value); break;
      case SweepAxis::kEpsilon: point.epsilon = value; break;
      case SweepAxis::kAlpha: point.alpha = value; break;
      case SweepAxis::kBidders: point.n = static_cast<int>(value); break;
    }
    for (int trial = 0; trial < config.trials; ++trial) {
      std::uint64_t trial_seed = derive_seed(config.seed, "sweep-trial", trial,
                                             static_cast<std::uint64_t>(vi));
      Market market = resolve_instance(point, trial_seed);
      auto start = std::chrono::steady_clock::now();

      Outcome outcome;
      switch (point.mode) {
        case Mode::kPMatch:
          outcome = pmatch_run(market, pmatch_params(point), trial_seed).outcome;
          break;
        case Mode::kPAlloc: {
          BundleValuationOracle oracle =
              unit_demand_as_bundle_oracle(market.valuations());
          outcome = palloc_run(market, oracle, palloc_params(point), trial_seed)
                        .outcome;
          break;
        }
        case Mode::kKelso:
          outcome = kelso_crawford(market, point.alpha).first;
          break;
        default:
          throw UsageError("sweep does not handle mode " + mode_name(point.mode));
      }
      auto end = std::chrono::steady_clock::now();
      auto [opt_outcome, opt] = exact_max_matching(market);
      EquilibriumReport report =
          verify_matching_equilibrium(market, outcome, point.alpha);
      SweepRow row{};
      row.axis_value = value;
      row.trial = trial;
      row.welfare = outcome.welfare;
      row.opt = opt;
      row.gap = opt - outcome.welfare;
      row.measured_alpha = report.measured_alpha;
      row.measured_beta = report.measured_beta;
      row.measured_rho = report.measured_rho;
      row.runtime_ms =
          std::chrono::duration<double, std::milli>(end - start).count();
      rows.push_back(row);
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, bool include_runtime) {
  std::ostringstream out;
  out << "value,trial,welfare,opt,gap,measured_alpha,measured_beta,measured_rho";
  if (include_runtime) out << ",runtime_ms";
  out << '\n';
  for (const SweepRow& r : rows) {
    out << format_double(r.axis_value) << ',' << r.trial << ','
        << format_double(r.welfare) << ',' << format_double(r.opt) << ','
        << format_double(r.gap) << ',' << format_double(r.measured_alpha) << ','
        << r.measured_beta << ',' << format_double(r.measured_rho);
    if (include_runtime) out << ',' << format_double(r.runtime_ms);
    out << '\n';
  }
  return out.str();
}

std::string billboard_csv(const Billboard& billboard) {
  std::ostringstream out;
  out << "round,step,good_type,released_count,price_after,halt_counter_release\n";
  std::vector<int> level(billboard.types, 0);
  const int s_eff = billboard.effective_supply;
  for (std::size_t r = 0; r < billboard.rounds.size(); ++r) {
    const auto& steps = billboard.rounds[r];
    for (std::size_t q = 0; q < steps.size(); ++q) {
      for (int j = 0; j < billboard.types; ++j) {
        double c = steps[q].good_releases[j];
        if (billboard.multiples_price_rule) {
          int multiples = static_cast<int>(std::floor(c / s_eff));
          if (multiples > level[j]) level[j] = multiples;
        } else if (c >= static_cast<double>(level[j] + 1) * s_eff) {
          ++level[j];
        }
        out << r << ',' << q << ',' << j << ',' << format_double(c) << ','
            << format_double(level[j] * billboard.alpha) << ','
            << format_double(steps[q].halt_release) << '\n';
      }
    }
  }
  return out.str();
}

std::string report_csv_header() {
  return "instance_id,measured_alpha,measured_beta,measured_rho,feasible";
}

std::string report_csv_row(const std::string& instance_id,
                           const EquilibriumReport& report) {
  std::ostringstream out;
  out << instance_id << ',' << format_double(report.measured_alpha) << ','
      << report.measured_beta << ',' << format_double(report.measured_rho)
      << ',' << (report.feasible ? 1 : 0);
  return out.str();
}

std::string attack_csv(const std::vector<AttackTrial>& rows) {
  std::ostringstream out;
  out << "trial,welfare_gap,reconstructed_fraction\n";
  for (const AttackTrial& r : rows)
    out << r.trial << ',' << format_double(r.welfare_gap) << ','
        << format_double(r.reconstructed_fraction) << '\n';
  return out.str();
}

std::string outcome_to_json(const Outcome& outcome) {
  nlohmann::json js;
  js["prices"] = outcome.prices.p;
  js["welfare"] = outcome.welfare;
  nlohmann::json assignment = nlohmann::json::array();
  for (const Assignment& a : outcome.assignment) {
    if (is_unmatched(a))
      assignment.push_back(nullptr);
    else if (auto t = assigned_type(a))
      assignment.push_back(*t);
    else
      assignment.push_back(std::get<Bundle>(a).counts);
  }
  js["assignment"] = std::move(assignment);
  return js.dump(2);
}

Outcome outcome_from_json(const std::string& text) {
  nlohmann::json js;
  try {
    js = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("bad outcome JSON: ") + e.what());
  }
  Outcome outcome;
  outcome.prices.p = js.at("prices").get<std::vector<double>>();
  outcome.welfare = js.at("welfare").get<double>();
  for (const auto& a : js.at("assignment")) {
    if (a.is_null())
      outcome.assignment.emplace_back(std::monostate{});
    else if (a.is_number_integer())
      outcome.assignment.emplace_back(a.get<int>());
    else {
      Bundle b;
      b.counts = a.get<std::vector<int>>();
      outcome.assignment.emplace_back(std::move(b));
    }
  }
  return outcome;
}

}  // namespace privauction
