/* ---------------------------------------------------------------------------
 * test_cli.cpp -- end-to-end tests against the installed binary (path taken
 * from the MINORS_CLI environment variable set by the test harness).
 *
 * The output contract under test: JSON payloads with sorted keys and
 * shortest round-trip floats, CSV with '.' decimals and '\n' endings,
 * stderr config echo, exit codes 0 (ok) / 1 (usage, domain) / 2
 * (non-convergence), and strict flag/config-key checking.
 * ------------------------------------------------------------------------- */
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "minors/fredholm.hpp"
#include "test_support.hpp"

using nlohmann::json;
using testsup::CliResult;
using testsup::run_cli;

namespace {

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t nl = s.find('\n', pos);
    if (nl == std::string::npos) {
      out.push_back(s.substr(pos));
      break;
    }
    out.push_back(s.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and version exit cleanly") {
  const CliResult help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);
  CHECK(help.out.find("cdf") != std::string::npos);
  CHECK(run_cli("--version").exit_code == 0);
}

TEST_CASE("unknown flags and commands are rejected with exit 1") {
  const CliResult bad_flag = run_cli("cdf --n 50 --t -1 --frobnicate 3");
  CHECK(bad_flag.exit_code == 1);
  CHECK(!bad_flag.err.empty());
  CHECK(run_cli("frobnicate").exit_code == 1);
  CHECK(run_cli("").exit_code == 1);  // a subcommand is required
}

TEST_CASE("cdf: value, alias, config echo") {
  const CliResult r = run_cli("cdf --n 50 --t -1");
  REQUIRE(r.exit_code == 0);
  const double v = std::strtod(r.out.c_str(), nullptr);
  CHECK(std::fabs(v - 0.8098148642789047) < 1e-12);
  // --u is an alias for --n
  const CliResult alias = run_cli("cdf --u 50 --t -1");
  CHECK(alias.exit_code == 0);
  CHECK(alias.out == r.out);
  // resolved configuration is echoed to stderr, not stdout
  CHECK(r.err.find("config:") != std::string::npos);
  CHECK(r.err.find("\"u\":50") != std::string::npos);
  CHECK(r.out.find("config") == std::string::npos);
}

TEST_CASE("cdf: json payload carries value and resolved config") {
  const CliResult r = run_cli("cdf --n 3 --t 1.2 --format json");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(std::fabs(j.at("value").get<double>() - 0.9990242119403362) < 1e-12);
  CHECK(j.at("config").at("u").get<long>() == 3);
  CHECK(j.at("config").at("t").get<double>() == 1.2);
  CHECK(j.at("config").at("order").get<long>() == 48);
}

TEST_CASE("exit code 2 on non-convergence, 1 on domain errors") {
  const CliResult nc = run_cli("cdf --n 512 --t 0.5 --order 8 --check");
  CHECK(nc.exit_code == 2);
  CHECK(nc.err.find("non-convergence") != std::string::npos);
  CHECK(run_cli("cdf --n 2000 --t 0.0").exit_code == 1);
  CHECK(run_cli("tw --s 20").exit_code == 1);
}

TEST_CASE("config file is honored and overridden by the command line") {
  const std::string cfg_path = "/tmp/minors_test_cfg.json";
  testsup::write_file(cfg_path, "{\"u\": 50, \"t\": -1.0}\n");
  const CliResult from_file = run_cli("cdf --config " + cfg_path);
  REQUIRE(from_file.exit_code == 0);
  CHECK(from_file.out == run_cli("cdf --n 50 --t -1").out);
  // command line wins over the file
  const CliResult overridden = run_cli("cdf --config " + cfg_path + " --t 0.0");
  CHECK(overridden.out == run_cli("cdf --n 50 --t 0").out);
  // unknown keys and ill-typed values are rejected
  testsup::write_file(cfg_path, "{\"uu\": 50}\n");
  CHECK(run_cli("cdf --config " + cfg_path).exit_code == 1);
  testsup::write_file(cfg_path, "{\"u\": \"fifty\"}\n");
  CHECK(run_cli("cdf --config " + cfg_path).exit_code == 1);
  testsup::write_file(cfg_path, "not json\n");
  CHECK(run_cli("cdf --config " + cfg_path).exit_code == 1);
  CHECK(run_cli("cdf --config /tmp/minors_no_such_file.json").exit_code == 1);
  std::remove(cfg_path.c_str());
}

TEST_CASE("joint: anchor, byte-stable reruns, decorrelated factorization") {
  const std::string args = "joint --u1 4 --t1 0.3 --u2 7 --t2 -0.2";
  const CliResult r1 = run_cli(args);
  REQUIRE(r1.exit_code == 0);
  CHECK(std::fabs(std::strtod(r1.out.c_str(), nullptr) -
                  0.9506503443871013) < 5e-6);
  CHECK(run_cli(args).out == r1.out);  // bit-stable output
  const CliResult dec = run_cli(args + " --decorrelate");
  const double prod = minors::single_line_cdf(4, 0.3) *
                      minors::single_line_cdf(7, -0.2);
  CHECK(std::fabs(std::strtod(dec.out.c_str(), nullptr) - prod) < 1e-10);
}

TEST_CASE("tw: cdf and survival") {
  const CliResult c = run_cli("tw --s 0");
  CHECK(std::fabs(std::strtod(c.out.c_str(), nullptr) - 0.9693728283552631) <
        1e-12);
  const CliResult s = run_cli("tw --s -2 --survival");
  CHECK(std::fabs(std::strtod(s.out.c_str(), nullptr) -
                  (1.0 - 0.41322414250512635)) < 1e-12);
}

TEST_CASE("kernel: dual-route agreement and scaled mode") {
  const CliResult both = run_cli(
      "kernel --u1 6 --y1 0.4 --u2 3 --y2 -0.2 --method both --format json");
  REQUIRE(both.exit_code == 0);
  const json j = json::parse(both.out);
  CHECK(std::fabs(j.at("hermite_sum").get<double>() -
                  (-6.7279460065627464497)) < 1e-10);
  CHECK(j.at("rel_diff").get<double>() <= 1e-6);
  const CliResult scaled =
      run_cli("kernel --u1 8 --y1 0.35 --u2 5 --y2 -0.15 --scaled");
  CHECK(std::fabs(std::strtod(scaled.out.c_str(), nullptr) -
                  0.07779576108032512291) < 1e-12);
  // --scaled excludes the contour method
  CHECK(run_cli("kernel --u1 8 --y1 0.35 --u2 5 --y2 -0.15 --scaled "
                "--method both")
            .exit_code == 1);
  // the oracle's domain contract surfaces as exit 1
  CHECK(run_cli("kernel --u1 3 --y1 0 --u2 5 --y2 0 --method contour_oracle")
            .exit_code == 1);
}

TEST_CASE("decorrelate payload") {
  const CliResult r = run_cli("decorrelate --u1 516 --u2 60");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("in_regime").get<bool>() == true);
  CHECK(j.at("E_cdf_form").get<double>() < 1e-2);
  CHECK(std::fabs(j.at("E_cdf_form").get<double>() -
                  j.at("E_survival_form").get<double>()) < 1e-10);
  CHECK(std::fabs(j.at("marginal2").get<double>() -
                  minors::single_line_cdf(60, 0.0)) < 1e-12);
}

TEST_CASE("correlate matches the library") {
  const CliResult r = run_cli("correlate --u1 12 --t1 0.4 --u2 40 --t2 0.1");
  REQUIRE(r.exit_code == 0);
  const double v = std::strtod(r.out.c_str(), nullptr);
  CHECK(v >= 0.0);
  CHECK(std::fabs(v - minors::correlation_F(12, 0.4, 40, 0.1)) < 1e-12);
  CHECK(run_cli("correlate --u1 40 --t1 0 --u2 12 --t2 0").exit_code == 1);
}

TEST_CASE("tails: range syntax and CSV/JSON shapes") {
  const CliResult csv = run_cli("tails --n 50 --t 1:4:1 --format csv");
  REQUIRE(csv.exit_code == 0);
  const std::vector<std::string> lines = split_lines(csv.out);
  REQUIRE(lines.size() == 5);  // header + 4 grid points
  CHECK(lines[0] == "x,p_right,p_left,trace_lower,trace_upper");
  CHECK(lines[1].substr(0, 2) == "1,");
  CHECK(lines[0].find(';') == std::string::npos);  // '.' decimal, ',' field
  const CliResult js = run_cli("tails --n 50 --t 2:5:0.5");
  REQUIRE(js.exit_code == 0);
  const json j = json::parse(js.out);
  CHECK(j.at("results").at(0).at("xs").size() == 7);
  // malformed ranges
  CHECK(run_cli("tails --n 50 --t 5:2:1").exit_code == 1);
  CHECK(run_cli("tails --n 50 --t 1:4:0").exit_code == 1);
  CHECK(run_cli("tails --n 50 --t 1:4").exit_code == 1);
  CHECK(run_cli("tails --n 50 --t abc").exit_code == 1);
}

TEST_CASE("simulate: csv shape, determinism, --out equals stdout") {
  const std::string args = "simulate --nmax 6 --paths 3 --seed 9";
  const CliResult r = run_cli(args);
  REQUIRE(r.exit_code == 0);
  const std::vector<std::string> lines = split_lines(r.out);
  REQUIRE(lines.size() == 1 + 3 * 6);
  CHECK(lines[0] == "path_id,N,lambda_raw,lambda_scaled");
  CHECK(run_cli(args).out == r.out);  // deterministic replay
  const std::string out_path = "/tmp/minors_test_paths.csv";
  const CliResult to_file = run_cli(args + " --out " + out_path);
  CHECK(to_file.exit_code == 0);
  CHECK(to_file.out.empty());
  CHECK(testsup::read_file(out_path) == r.out);
  std::remove(out_path.c_str());
  // sparse schedule: only the requested minor sizes appear
  const CliResult sched =
      run_cli("simulate --nmax 8 --paths 1 --seed 9 --schedule 2:8:3");
  const std::vector<std::string> sl = split_lines(sched.out);
  REQUIRE(sl.size() == 4);
  CHECK(sl[1].substr(0, 4) == "0,2,");
  CHECK(sl[2].substr(0, 4) == "0,5,");
  CHECK(sl[3].substr(0, 4) == "0,8,");
  CHECK(run_cli("simulate --nmax 8 --paths 1 --schedule 8:2:1").exit_code == 1);
}

TEST_CASE("experiment: dispatch, csv format, worker resolution from env") {
  const CliResult bad = run_cli("experiment --name no_such_thing");
  CHECK(bad.exit_code == 1);
  const CliResult csv =
      run_cli("experiment --name correlation_sweep --format csv");
  REQUIRE(csv.exit_code == 0);
  const std::vector<std::string> lines = split_lines(csv.out);
  REQUIRE(lines.size() == 1 + 5);  // default du grid has 5 points
  CHECK(lines[0] == "x,F,bound_fitted,normal_term,in_regime");

  // MINORS_WORKERS applies when --workers is absent and is echoed in the
  // resolved config of worker-aware experiments
  const std::string mc_args =
      "experiment --name mc_vs_fredholm --seed 5 --params "
      "'{\"u\":1,\"n_samples\":1000,\"t_grid\":[-2]}'";
  const CliResult env_run = run_cli(mc_args, "MINORS_WORKERS=3");
  REQUIRE(env_run.exit_code == 0);
  const json payload = json::parse(env_run.out);
  CHECK(payload.at("config").at("workers").get<int>() == 3);
  // explicit flag beats the environment
  const CliResult flag_run = run_cli(mc_args + " --workers 2",
                                     "MINORS_WORKERS=3");
  REQUIRE(flag_run.exit_code == 0);
  CHECK(json::parse(flag_run.out).at("config").at("workers").get<int>() == 2);
  // malformed params JSON is a usage error
  CHECK(run_cli("experiment --name tail_fit --params '{broken'").exit_code ==
        1);
}

}  // TEST_SUITE
