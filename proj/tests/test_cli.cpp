#include <cstdlib>
#include <fstream>
#include <sys/wait.h>
#include <sstream>
#include <string>

#include "doctest.h"
#include "privauction/errors.hpp"
#include "privauction/experiment.hpp"
#include "privauction/rng.hpp"

using namespace privauction;

TEST_CASE("instance generation is deterministic in the seed") {
  Market a = generate_instance(InstanceKind::kUniform, 5, 3, 2, 42);
  Market b = generate_instance(InstanceKind::kUniform, 5, 3, 2, 42);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(a.value(i, j) == b.value(i, j));
}

TEST_CASE("unweighted instances have 0/1 entries") {
  Market m = generate_instance(InstanceKind::kUnweighted, 20, 3, 2, 7);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 3; ++j) {
      double v = m.value(i, j);
      CHECK((v == 0.0 || v == 1.0));
    }
}

TEST_CASE("uniform instances have mean near one half") {
  Market m = generate_instance(InstanceKind::kUniform, 1000, 4, 2, 11);
  double sum = 0.0;
  for (int i = 0; i < 1000; ++i)
    for (int j = 0; j < 4; ++j) sum += m.value(i, j);
  double mean = sum / 4000.0;
  CHECK(mean >= 0.48);
  CHECK(mean <= 0.52);
}

TEST_CASE("correlated instances stay in [0,1]") {
  Market m = generate_instance(InstanceKind::kCorrelated, 50, 3, 2, 13);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(m.value(i, j) >= 0.0);
      CHECK(m.value(i, j) <= 1.0);
    }
}

TEST_CASE("unknown kinds and modes are usage errors") {
  CHECK_THROWS_AS(parse_instance_kind("banana"), UsageError);
  CHECK_THROWS_AS(parse_mode("banana"), UsageError);
  CHECK_THROWS_AS(parse_sweep_axis("banana"), UsageError);
  CHECK_THROWS_AS(generate_instance(InstanceKind::kUniform, 0, 1, 1, 1), UsageError);
}

TEST_CASE("config JSON round-trips") {
  ExperimentConfig c;
  c.mode = Mode::kPAlloc;
  c.kind = InstanceKind::kCorrelated;
  c.n = 17;
  c.k = 4;
  c.s = 9;
  c.alpha = 0.125;
  c.rho = 0.0625;
  c.epsilon = 3.5;
  c.gamma = 0.02;
  c.lambda_min = 0.5;
  c.opt_estimate = 2.25;
  c.max_bundle_size = 3;
  c.noise_off = true;
  c.override_rounds = 64;
  c.override_error_bound = 2.5;
  c.override_reserve = 5;
  c.trials = 7;
  c.seed = 0xDEADBEEFULL;
  c.output_path = "out.csv";
  ExperimentConfig back = config_from_json(config_to_json(c));
  CHECK(back.mode == c.mode);
  CHECK(back.kind == c.kind);
  CHECK(back.n == c.n);
  CHECK(back.k == c.k);
  CHECK(back.s == c.s);
  CHECK(back.alpha == c.alpha);
  CHECK(back.rho == c.rho);
  CHECK(back.epsilon == c.epsilon);
  CHECK(back.gamma == c.gamma);
  CHECK(back.lambda_min == c.lambda_min);
  CHECK(back.opt_estimate == c.opt_estimate);
  CHECK(back.max_bundle_size == c.max_bundle_size);
  CHECK(back.noise_off == c.noise_off);
  CHECK(back.override_rounds == c.override_rounds);
  CHECK(back.override_error_bound == c.override_error_bound);
  CHECK(back.override_reserve == c.override_reserve);
  CHECK(back.trials == c.trials);
  CHECK(back.seed == c.seed);
  CHECK(back.output_path == c.output_path);
}

TEST_CASE("floats print with 12 significant digits") {
  CHECK(format_double(1.0 / 3.0) == "0.333333333333");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("empty sweep emits a header-only CSV") {
  ExperimentConfig c;
  c.mode = Mode::kPMatch;
  c.noise_off = true;
  std::vector<SweepRow> rows = sweep(c, SweepAxis::kSupply, {});
  CHECK(rows.empty());
  CHECK(sweep_csv(rows) ==
        "value,trial,welfare,opt,gap,measured_alpha,measured_beta,measured_rho,"
        "runtime_ms\n");
}

TEST_CASE("sweeps are deterministic apart from the runtime column") {
  ExperimentConfig c;
  c.mode = Mode::kPMatch;
  c.kind = InstanceKind::kUniform;
  c.n = 8;
  c.k = 2;
  c.alpha = 0.25;
  c.rho = 0.25;
  c.epsilon = 10.0;
  c.override_error_bound = 1.0;
  c.override_reserve = 1;
  c.trials = 2;
  c.seed = 99;
  std::vector<double> values{4, 8};
  std::string a = sweep_csv(sweep(c, SweepAxis::kSupply, values), false);
  std::string b = sweep_csv(sweep(c, SweepAxis::kSupply, values), false);
  CHECK(a == b);
}

TEST_CASE("noise-off supply sweep: mean welfare gap shrinks with supply") {
  ExperimentConfig c;
  c.mode = Mode::kPMatch;
  c.kind = InstanceKind::kUniform;
  c.n = 12;
  c.k = 3;
  c.alpha = 0.2;
  c.rho = 0.02;
  c.noise_off = true;
  c.override_error_bound = 0.0;
  c.override_reserve = 1;
  c.trials = 10;
  c.seed = 5;
  std::vector<double> values{2, 21};
  std::vector<SweepRow> rows = sweep(c, SweepAxis::kSupply, values);
  double gap_small = 0.0, gap_large = 0.0;
  for (const SweepRow& r : rows)
    (r.axis_value == 2 ? gap_small : gap_large) += r.gap;
  CHECK(gap_large <= gap_small + 1e-9);
}

TEST_CASE("run summaries carry the derived auction parameters") {
  ExperimentConfig c;
  c.mode = Mode::kPMatch;
  c.kind = InstanceKind::kUniform;
  c.n = 6;
  c.k = 2;
  c.s = 4;
  c.alpha = 0.25;
  c.rho = 0.25;
  c.epsilon = 10.0;
  c.noise_off = true;
  c.override_error_bound = 0.0;
  c.override_reserve = 1;
  c.trials = 2;
  c.seed = 31;
  std::vector<RunSummary> rows = run_experiment(c);
  REQUIRE(rows.size() == 2);
  for (const RunSummary& r : rows) {
    CHECK(r.rounds == 128);  // ceil(8 / (0.25 * 0.25))
    CHECK(r.reserve == 1);
    CHECK(r.welfare >= 0.0);
    CHECK(r.opt >= r.welfare - 1e-9);
  }
  std::string row = run_summary_row(rows[0]);
  CHECK(row.find("6,2,4,0.25,0.25,10,0.1,128,0,1,") != std::string::npos);
}

TEST_CASE("outcome JSON round-trips every assignment shape") {
  Outcome outcome;
  outcome.prices.p = {0.25, 0.5};
  Bundle b(2);
  b.counts = {1, 2};
  outcome.assignment = {std::monostate{}, Assignment{1}, Assignment{b}};
  outcome.welfare = 1.75;
  Outcome back = outcome_from_json(outcome_to_json(outcome));
  CHECK(back.prices.p == outcome.prices.p);
  CHECK(back.welfare == outcome.welfare);
  CHECK(is_unmatched(back.assignment[0]));
  CHECK(assigned_type(back.assignment[1]) == 1);
  CHECK(std::get<Bundle>(back.assignment[2]).counts == b.counts);
}

TEST_CASE("report CSV serializes all fields") {
  EquilibriumReport report;
  report.measured_alpha = 0.125;
  report.measured_beta = 2;
  report.measured_rho = 0.5;
  report.feasible = true;
  CHECK(report_csv_row("inst", report) == "inst,0.125,2,0.5,1");
}

#ifdef CLI_PATH
namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("CLI exit codes: success, usage, precondition") {
  CHECK(run_cli("gen --kind uniform --n 4 --k 2 --s 2 --seed 1 --out /tmp/"
                "privauction_test_inst.json") == 0);
  CHECK(run_cli("run --instance /tmp/privauction_test_inst.json --mode pmatch "
                "--alpha 0.25 --rho 0.25 --noise off --override-E 0 "
                "--override-m 1 --trials 1 --seed 1") == 0);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("run --mode banana") == 2);
  // s = 1 <= m = 1: precondition violation.
  CHECK(run_cli("run --kind uniform --n 4 --k 2 --s 1 --mode pmatch "
                "--alpha 0.25 --rho 0.25 --noise off --override-E 0 "
                "--override-m 1 --trials 1 --seed 1") == 3);
}
#endif
