#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "privauction/attacks.hpp"
#include "privauction/market.hpp"
#include "privauction/oracles.hpp"
#include "privauction/palloc.hpp"
#include "privauction/pmatch.hpp"

namespace privauction {

// Floats are printed with 12 significant digits everywhere so reruns diff
// cleanly.
std::string format_double(double x);

enum class InstanceKind { kUniform, kUnweighted, kCorrelated, kGadget };

InstanceKind parse_instance_kind(const std::string& name);
std::string instance_kind_name(InstanceKind kind);

// Random instance generator. uniform: iid U[0,1]; unweighted: iid
// Bernoulli(1/2); correlated: per-type quality q_j ~ U[0,1] plus bidder noise
// U[-0.25, 0.25], clamped to [0,1]; gadget: allocation-variant gadget market
// on n random bits.
Market generate_instance(InstanceKind kind, int n, int k, int s,
                         std::uint64_t seed);

enum class Mode { kPMatch, kPAlloc, kMultiplicative, kKelso, kAttack,
                  kCounterBench };

Mode parse_mode(const std::string& name);
std::string mode_name(Mode mode);

struct ExperimentConfig {
  Mode mode = Mode::kPMatch;
  std::string instance_path;  // empty: use the generator
  InstanceKind kind = InstanceKind::kUniform;
  int n = 10;
  int k = 2;
  int s = 5;
  double alpha = 0.1;
  double rho = 0.1;
  double epsilon = 1.0;
  double gamma = 0.1;
  double lambda_min = 1.0;     // multiplicative mode
  double opt_estimate = 0.0;   // multiplicative mode; 0 = use exact OPT
  int max_bundle_size = 2;     // palloc mode
  bool noise_off = false;
  std::optional<long> override_rounds;
  std::optional<double> override_error_bound;
  std::optional<int> override_reserve;
  int trials = 1;
  std::uint64_t seed = 1;
  std::string output_path;
};

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);

// One summary row per run:
// seed,n,k,s,alpha,rho,epsilon,gamma,T,E,m,welfare,opt,satisfied_fraction,
// halted_round
struct RunSummary {
  std::uint64_t seed;
  int n, k, s;
  double alpha, rho, epsilon, gamma;
  long rounds;
  double error_bound;
  int reserve;
  double welfare;
  double opt;
  double satisfied_fraction;
  long halted_round;
};

std::string run_summary_header();
std::string run_summary_row(const RunSummary& summary);

Market resolve_instance(const ExperimentConfig& config, std::uint64_t seed);

// Executes config.trials runs of the configured mode and returns summary
// rows in trial order.
std::vector<RunSummary> run_experiment(const ExperimentConfig& config);

enum class SweepAxis { kSupply, kEpsilon, kAlpha, kBidders };

SweepAxis parse_sweep_axis(const std::string& name);

struct SweepRow {
  double axis_value;
  int trial;
  double welfare;
  double opt;
  double gap;
  double measured_alpha;
  int measured_beta;
  double measured_rho;
  double runtime_ms;
};

// One row per (value, trial), ordered by (value, trial) regardless of
// scheduling. The runtime column is the only nondeterministic one.
std::vector<SweepRow> sweep(const ExperimentConfig& config, SweepAxis axis,
                            const std::vector<double>& values);

std::string sweep_csv(const std::vector<SweepRow>& rows,
                      bool include_runtime = true);

// Billboard dump: round,step,good_type,released_count,price_after,
// halt_counter_release
std::string billboard_csv(const Billboard& billboard);

// Verifier report CSV: instance_id,measured_alpha,measured_beta,
// measured_rho,feasible
std::string report_csv_header();
std::string report_csv_row(const std::string& instance_id,
                           const EquilibriumReport& report);

std::string attack_csv(const std::vector<AttackTrial>& rows);

// Outcome (de)serialization: prices, per-bidder assignment (null / type /
// counts vector), welfare.
std::string outcome_to_json(const Outcome& outcome);
Outcome outcome_from_json(const std::string& text);

}  // namespace privauction
