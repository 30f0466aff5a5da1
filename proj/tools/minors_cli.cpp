/* ---------------------------------------------------------------------------
 * minors_cli.cpp -- command line front end.
 *
 * Subcommands: simulate, cdf, joint, tw, kernel, decorrelate, correlate,
 * tails, experiment.  Every run echoes its fully resolved configuration
 * (defaults < --config file < command line) to stderr and embeds it in JSON
 * payloads.  Serialization is bit-stable: JSON with sorted keys and shortest
 * round-trip floats, CSV with '.' decimal separator, '\n' endings and a
 * header row.  Exit codes: 0 success, 1 usage or domain error, 2 declared
 * numerical non-convergence.
 * ------------------------------------------------------------------------- */
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "format_detail.hpp"
#include "minors/experiments.hpp"
#include "minors/fredholm.hpp"
#include "minors/minor_kernel.hpp"
#include "minors/parallel.hpp"
#include "minors/simulator.hpp"
#include "minors/version.hpp"

namespace {

using minors::detail::fmt_double;
using nlohmann::json;

/* --- range syntax: start:stop:step ----------------------------------------- */

std::vector<std::string> split_colon(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(':', pos);
    if (next == std::string::npos) {
      parts.push_back(s.substr(pos));
      return parts;
    }
    parts.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

double parse_number(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("invalid ") + what + ": '" + s +
                                "'");
  }
}

std::vector<double> parse_double_range(const std::string& s) {
  const std::vector<std::string> parts = split_colon(s);
  if (parts.size() == 1) return {parse_number(parts[0], "value")};
  if (parts.size() != 3)
    throw std::invalid_argument("range must be start:stop:step, got '" + s +
                                "'");
  const double start = parse_number(parts[0], "range start");
  const double stop = parse_number(parts[1], "range stop");
  const double step = parse_number(parts[2], "range step");
  if (!(step > 0.0))
    throw std::invalid_argument("range step must be positive in '" + s + "'");
  if (stop < start - 1e-12)
    throw std::invalid_argument("range stop below start in '" + s + "'");
  std::vector<double> out;
  for (double v = start; v <= stop + 1e-12; v += step) out.push_back(v);
  return out;
}

std::vector<long> parse_long_range(const std::string& s) {
  std::vector<long> out;
  for (double v : parse_double_range(s)) {
    const long l = static_cast<long>(std::llround(v));
    if (std::abs(v - static_cast<double>(l)) > 1e-9)
      throw std::invalid_argument("range '" + s + "' must contain integers");
    out.push_back(l);
  }
  return out;
}

/* --- config file plumbing ---------------------------------------------------- */

json load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot open " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  if (!j.is_object())
    throw std::invalid_argument("config: " + path + " must be a JSON object");
  return j;
}

void check_config_keys(const json& cfg,
                       std::initializer_list<const char*> allowed,
                       const std::string& command) {
  if (cfg.is_null()) return;
  for (const auto& item : cfg.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (item.key() == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw std::invalid_argument("config: unknown key '" + item.key() +
                                  "' for " + command);
  }
}

// command line > config file > compiled default
template <class T>
void take(const json& cfg, const char* key, const CLI::Option* opt, T& value) {
  if (cfg.is_null() || opt->count() > 0 || !cfg.contains(key)) return;
  try {
    value = cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("config: key '") + key +
                                "' has the wrong type");
  }
}

/* --- shared flag bundles ------------------------------------------------------ */

struct EngineArgs {
  long order = 48;
  double length = 0.0;
  bool check = false;
  CLI::Option* o_order = nullptr;
  CLI::Option* o_length = nullptr;
  CLI::Option* o_check = nullptr;

  void attach(CLI::App* sub) {
    o_order = sub->add_option("--order", order,
                              "quadrature order per line discretization");
    o_length = sub->add_option(
        "--length", length,
        "integration window length (0 = threshold-dependent default)");
    o_check = sub->add_flag(
        "--check", check, "re-solve at 1.5x order and require agreement");
  }
  void from_config(const json& cfg) {
    take(cfg, "order", o_order, order);
    take(cfg, "length", o_length, length);
    take(cfg, "check", o_check, check);
  }
  minors::FredholmOptions options() const {
    minors::FredholmOptions o;
    o.order = static_cast<int>(order);
    o.length = length;
    o.check_convergence = check;
    return o;
  }
  void echo(json& cfg) const {
    cfg["order"] = order;
    cfg["length"] = length;
    cfg["check"] = check;
  }
};

struct IoArgs {
  std::string out;
  std::string format;
  std::string config_path;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_format = nullptr;

  void attach(CLI::App* sub, const std::string& default_format,
              const std::vector<std::string>& formats) {
    format = default_format;
    o_out = sub->add_option("--out", out, "write the payload to this path");
    o_format = sub->add_option("--format", format, "output format")
                   ->check(CLI::IsMember(formats));
    sub->add_option("--config", config_path,
                    "JSON config file (command line takes precedence)");
  }
  void from_config(const json& cfg) {
    take(cfg, "out", o_out, out);
    take(cfg, "format", o_format, format);
  }
  json config() const { return config_path.empty() ? json(nullptr)
                                                   : load_config_file(config_path); }
};

void emit_payload(const std::string& payload, const std::string& out) {
  if (out.empty()) {
    std::fwrite(payload.data(), 1, payload.size(), stdout);
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output path " + out);
  f.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!f.good()) throw std::runtime_error("write failed for " + out);
}

void echo_config(const json& cfg) {
  std::cerr << "config: " << cfg.dump() << "\n";
}

std::string json_payload(json j) { return j.dump(2) + "\n"; }

/* --- subcommand state --------------------------------------------------------- */

struct SimulateArgs {
  long nmax = 64, paths = 10;
  std::uint64_t seed = 0;
  std::string schedule;  // empty = every N in 1..nmax
  bool tracker = true;
  int workers = 0;
  IoArgs io;
  CLI::Option *o_nmax, *o_paths, *o_seed, *o_schedule, *o_tracker, *o_workers;
};

struct CdfArgs {
  long u = 64;
  double t = 0.0;
  EngineArgs eng;
  IoArgs io;
  CLI::Option *o_u, *o_t;
};

struct JointArgs {
  long u1 = 8, u2 = 16;
  double t1 = 0.0, t2 = 0.0;
  bool decorrelate = false;
  EngineArgs eng;
  IoArgs io;
  CLI::Option *o_u1, *o_u2, *o_t1, *o_t2, *o_dec;
};

struct TwArgs {
  double s = 0.0;
  bool survival = false;
  EngineArgs eng;
  IoArgs io;
  CLI::Option *o_s, *o_surv;
};

struct KernelArgs {
  long u1 = 8, u2 = 5;
  double y1 = 0.3, y2 = -0.2;
  std::string method = "hermite_sum";
  bool scaled = false;
  EngineArgs eng;  // --order reused as contour panel order when > 0
  IoArgs io;
  CLI::Option *o_u1, *o_u2, *o_y1, *o_y2, *o_method, *o_scaled;
};

struct PairArgs {  // decorrelate / correlate
  long u1 = 516, u2 = 60;
  double t1 = 0.0, t2 = 0.0;
  EngineArgs eng;
  IoArgs io;
  CLI::Option *o_u1, *o_u2, *o_t1, *o_t2;
};

struct TailsArgs {
  long u = 256;
  std::string t = "2:5:0.5";
  EngineArgs eng;
  IoArgs io;
  CLI::Option *o_u, *o_t;
};

struct ExperimentArgs {
  std::string name;
  std::string params = "{}";
  std::uint64_t seed = 0;
  int workers = 0;
  EngineArgs eng;
  IoArgs io;
  CLI::Option *o_name, *o_params, *o_seed, *o_workers;
};

/* --- subcommand bodies ---------------------------------------------------------- */

void run_simulate(SimulateArgs& a) {
  const json cfg_file = a.io.config();
  check_config_keys(cfg_file,
                    {"nmax", "paths", "seed", "schedule", "tracker", "workers",
                     "out", "format"},
                    "simulate");
  take(cfg_file, "nmax", a.o_nmax, a.nmax);
  take(cfg_file, "paths", a.o_paths, a.paths);
  take(cfg_file, "seed", a.o_seed, a.seed);
  take(cfg_file, "schedule", a.o_schedule, a.schedule);
  take(cfg_file, "tracker", a.o_tracker, a.tracker);
  take(cfg_file, "workers", a.o_workers, a.workers);
  a.io.from_config(cfg_file);
  if (a.paths < 1) throw std::invalid_argument("simulate: paths must be >= 1");

  minors::EigenPathOptions po;
  if (!a.schedule.empty()) po.schedule = parse_long_range(a.schedule);
  po.use_tracker = a.tracker;
  const int workers = a.workers > 0 ? a.workers : minors::default_workers();

  json cfg;
  cfg["command"] = "simulate";
  cfg["nmax"] = a.nmax;
  cfg["paths"] = a.paths;
  cfg["seed"] = a.seed;
  cfg["schedule"] = a.schedule.empty() ? "1:" + std::to_string(a.nmax) + ":1"
                                       : a.schedule;
  cfg["tracker"] = a.tracker;
  cfg["workers"] = workers;
  cfg["format"] = a.io.format;
  cfg["tool_version"] = minors::kVersion;
  echo_config(cfg);

  std::vector<minors::EigenPath> paths(static_cast<std::size_t>(a.paths));
  minors::parallel_for(a.paths, workers, [&](long i) {
    const minors::GaussianMinorArray arr =
        minors::sample_array(a.seed, static_cast<std::uint64_t>(i), a.nmax);
    paths[static_cast<std::size_t>(i)] = minors::eigen_path(arr, po);
  });
  emit_payload(minors::paths_csv(paths), a.io.out);
}

void run_cdf(CdfArgs& a) {
  const json cfg_file = a.io.config();
  check_config_keys(cfg_file,
                    {"u", "n", "t", "order", "length", "check", "out",
                     "format"},
                    "cdf");
  take(cfg_file, "u", a.o_u, a.u);
  take(cfg_file, "n", a.o_u, a.u);
  take(cfg_file, "t", a.o_t, a.t);
  a.eng.from_config(cfg_file);
  a.io.from_config(cfg_file);

  json cfg;
  cfg["command"] = "cdf";
  cfg["u"] = a.u;
  cfg["t"] = a.t;
  a.eng.echo(cfg);
  cfg["format"] = a.io.format;
  cfg["tool_version"] = minors::kVersion;
  echo_config(cfg);

  const double p = minors::single_line_cdf(a.u, a.t, a.eng.options());
  if (a.io.format == "json") {
    json out;
    out["config"] = cfg;
    out["value"] = p;
    emit_payload(json_payload(std::move(out)), a.io.out);
  } else {
    emit_payload(fmt_double(p) + "\n", a.io.out);
  }
}

void run_joint(JointArgs& a) {
  const json cfg_file = a.io.config();
  check_config_keys(cfg_file,
                    {"u1", "u2", "t1", "t2", "decorrelate", "order", "length",
                     "check", "out", "format"},
                    "joint");
  take(cfg_file, "u1", a.o_u1, a.u1);
  take(cfg_file, "u2", a.o_u2, a.u2);
  take(cfg_file, "t1", a.o_t1, a.t1);
  take(cfg_file, "t2", a.o_t2, a.t2);
  take(cfg_file, "decorrelate", a.o_dec, a.decorrelate);
  a.eng.from_config(cfg_file);
  a.io.from_config(cfg_file);

  json cfg;
  cfg["command"] = "joint";
  cfg["u1"] = a.u1;
  cfg["t1"] = a.t1;
  cfg["u2"] = a.u2;
  cfg["t2"] = a.t2;
  cfg["decorrelate"] = a.decorrelate;
  a.eng.echo(cfg);
  cfg["format"] = a.io.format;
  cfg["tool_version"] = minors::kVersion;
  echo_config(cfg);

  const double p = minors::joint_cdf(a.u1, a.t1, a.u2, a.t2, a.eng.options(),
                                     a.decorrelate);
  if (a.io.format == "json") {
    json out;
    out["config"] = cfg;
    out["value"] = p;
    emit_payload(json_payload(std::move(out)), a.io.out);
  } else {
    emit_payload(fmt_double(p) + "\n", a.io.out);
  }
}

void run_tw(TwArgs& a) {
  const json cfg_file = a.io.config();
  check_config_keys(cfg_file,
                    {"s", "survival", "order", "length", "check", "out",
                     "format"},
                    "tw");
  take(cfg_file, "s", a.o_s, a.s);
  take(cfg_file, "survival", a.o_surv, a.survival);
  a.eng.from_config(cfg_file);
  a.io.from_config(cfg_file);

  json cfg;
  cfg["command"] = "tw";
  cfg["s"] = a.s;
  cfg["survival"] = a.survival;
  a.eng.echo(cfg);
  cfg["format"] = a.io.format;
  cfg["tool_version"] = minors::kVersion;
  echo_config(cfg);

  const minors::TracyWidomResult r = minors::tracy_widom(a.s, a.eng.options());
  if (a.io.format == "json") {
    json out;
    out["config"] = cfg;
    out["cdf"] = r.cdf;
    out["survival"] = r.survival;
    emit_payload(json_payload(std::move(out)), a.io.out);
  } else {
    emit_payload(fmt_double(a.survival ? r.survival : r.cdf) + "\n", a.io.out);
  }
}

// relative difference of two log-scaled values, computed at the shared
// exponent so huge magnitudes stay finite
double log_scaled_rel_diff(const minors::LogScaledValue& a,
                           const minors::LogScaledValue& b) {
  if (a.is_zero() && b.is_zero()) return 0.0;
  if (a.is_zero() || b.is_zero()) return 1.0;
  const double m = std::max(a.log_magnitude, b.log_magnitude);
  const double va = a.sign * std::exp(a.log_magnitude - m);
  const double vb = b.sign * std::exp(b.log_magnitude - m);
  return std::abs(va - vb) / std::max(std::abs(va), std::abs(vb));
}

void run_kernel(KernelArgs& a) {
  const json cfg_file = a.io.config();
  check_config_keys(cfg_file,
                    {"u1", "u2", "y1", "y2", "method", "scaled", "order",
                     "length", "check", "out", "format"},
                    "kernel");
  take(cfg_file, "u1", a.o_u1, a.u1);
  take(cfg_file, "u2", a.o_u2, a.u2);
  take(cfg_file, "y1", a.o_y1, a.y1);
  take(cfg_file, "y2", a.o_y2, a.y2);
  take(cfg_file, "method", a.o_method, a.method);
  take(cfg_file, "scaled", a.o_scaled, a.scaled);
  a.eng.from_config(cfg_file);
  a.io.from_config(cfg_file);
  if (a.method != "hermite_sum" && a.method != "contour_oracle" &&
      a.method != "both")
    throw std::invalid_argument(
        "kernel: method must be hermite_sum, contour_oracle or both");
  if (a.scaled && a.method != "hermite_sum")
    throw std::invalid_argument(
        "kernel: --scaled applies to the hermite_sum method only");

  json cfg;
  cfg["command"] = "kernel";
  cfg["u1"] = a.u1;
  cfg["y1"] = a.y1;
  cfg["u2"] = a.u2;
  cfg["y2"] = a.y2;
  cfg["method"] = a.method;
  cfg["scaled"] = a.scaled;
  a.eng.echo(cfg);
  cfg["format"] = a.io.format;
  cfg["tool_version"] = minors::kVersion;
  echo_config(cfg);

  minors::ContourOptions copt;
  if (a.eng.o_order->count() > 0)
    copt.panel_order = static_cast<int>(a.eng.order);

  json out;
  out["config"] = cfg;
  std::string text;
  if (a.scaled) {
    const double v = minors::kernel_scaled(a.u1, a.y1, a.u2, a.y2);
    out["scaled_kernel"] = v;
    text = fmt_double(v) + "\n";
  } else {
    minors::LogScaledValue kh, ko;
    if (a.method != "contour_oracle") {
      kh = minors::kernel_raw(a.u1, a.y1, a.u2, a.y2);
      out["hermite_sum"] = kh.decode();
      text += "hermite_sum: " + fmt_double(kh.decode()) + "\n";
    }
    if (a.method != "hermite_sum") {
      ko = minors::kernel_contour_oracle(a.u1, a.y1, a.u2, a.y2, copt);
      out["contour_oracle"] = ko.decode();
      text += "contour_oracle: " + fmt_double(ko.decode()) + "\n";
    }
    if (a.method == "both") {
      const double rel = log_scaled_rel_diff(kh, ko);
      out["rel_diff"] = rel;
      text += "rel_diff: " + fmt_double(rel) + "\n";
    }
  }
  if (a.io.format == "json")
    emit_payload(json_payload(std::move(out)), a.io.out);
  else
    emit_payload(text, a.io.out);
}

void run_decorrelate(PairArgs& a) {
  const json cfg_file = a.io.config();
  check_config_keys(cfg_file,
                    {"u1", "u2", "t1", "t2", "order", "length", "check", "out",
                     "format"},
                    "decorrelate");
  take(cfg_file, "u1", a.o_u1, a.u1);
  take(cfg_file, "u2", a.o_u2, a.u2);
  take(cfg_file, "t1", a.o_t1, a.t1);
  take(cfg_file, "t2", a.o_t2, a.t2);
  a.eng.from_config(cfg_file);
  a.io.from_config(cfg_file);

  json cfg;
  cfg["command"] = "decorrelate";
  cfg["u1"] = a.u1;
  cfg["t1"] = a.t1;
  cfg["u2"] = a.u2;
  cfg["t2"] = a.t2;
  a.eng.echo(cfg);
  cfg["format"] = a.io.format;
  cfg["tool_version"] = minors::kVersion;
  echo_config(cfg);

  const minors::DecorrelationResult d =
      minors::decorrelation_E(a.u1, a.t1, a.u2, a.t2, a.eng.options());
  if (a.io.format == "json") {
    json out;
    out["config"] = cfg;
    out["joint"] = d.joint;
    out["marginal1"] = d.marginal1;
    out["marginal2"] = d.marginal2;
    out["E_cdf_form"] = d.E_cdf_form;
    out["E_survival_form"] = d.E_survival_form;
    out["in_regime"] = minors::decorrelation_in_regime(
        std::max(a.u1, a.u2), std::min(a.u1, a.u2));
    emit_payload(json_payload(std::move(out)), a.io.out);
  } else {
    emit_payload(fmt_double(d.E_cdf_form) + "\n", a.io.out);
  }
}

void run_correlate(PairArgs& a) {
  const json cfg_file = a.io.config();
  check_config_keys(cfg_file,
                    {"u1", "u2", "t1", "t2", "order", "length", "check", "out",
                     "format"},
                    "correlate");
  take(cfg_file, "u1", a.o_u1, a.u1);
  take(cfg_file, "u2", a.o_u2, a.u2);
  take(cfg_file, "t1", a.o_t1, a.t1);
  take(cfg_file, "t2", a.o_t2, a.t2);
  a.eng.from_config(cfg_file);
  a.io.from_config(cfg_file);

  json cfg;
  cfg["command"] = "correlate";
  cfg["u1"] = a.u1;
  cfg["t1"] = a.t1;
  cfg["u2"] = a.u2;
  cfg["t2"] = a.t2;
  a.eng.echo(cfg);
  cfg["format"] = a.io.format;
  cfg["tool_version"] = minors::kVersion;
  echo_config(cfg);

  const double f =
      minors::correlation_F(a.u1, a.t1, a.u2, a.t2, a.eng.options());
  if (a.io.format == "json") {
    json out;
    out["config"] = cfg;
    out["value"] = f;
    emit_payload(json_payload(std::move(out)), a.io.out);
  } else {
    emit_payload(fmt_double(f) + "\n", a.io.out);
  }
}

void run_tails(TailsArgs& a) {
  const json cfg_file = a.io.config();
  check_config_keys(
      cfg_file, {"u", "t", "order", "length", "check", "out", "format"},
      "tails");
  take(cfg_file, "u", a.o_u, a.u);
  take(cfg_file, "t", a.o_t, a.t);
  a.eng.from_config(cfg_file);
  a.io.from_config(cfg_file);

  const std::vector<double> t_grid = parse_double_range(a.t);
  minors::ExperimentReport rep =
      minors::tail_bound_scan(a.u, t_grid, a.eng.options());
  rep.config["command"] = "tails";
  rep.config["t"] = a.t;
  rep.config["format"] = a.io.format;
  echo_config(rep.config);
  if (a.io.format == "csv")
    emit_payload(rep.to_csv(), a.io.out);
  else
    emit_payload(json_payload(rep.to_json()), a.io.out);
}

void run_experiment_cmd(ExperimentArgs& a) {
  const json cfg_file = a.io.config();
  check_config_keys(cfg_file,
                    {"name", "params", "seed", "workers", "order", "length",
                     "check", "out", "format"},
                    "experiment");
  take(cfg_file, "name", a.o_name, a.name);
  take(cfg_file, "seed", a.o_seed, a.seed);
  take(cfg_file, "workers", a.o_workers, a.workers);
  a.eng.from_config(cfg_file);
  a.io.from_config(cfg_file);
  if (a.name.empty())
    throw std::invalid_argument("experiment: --name is required");

  json params;
  if (a.o_params->count() > 0) {
    try {
      params = json::parse(a.params);
    } catch (const json::parse_error& e) {
      throw std::invalid_argument(std::string("experiment: --params: ") +
                                  e.what());
    }
  } else if (!cfg_file.is_null() && cfg_file.contains("params")) {
    params = cfg_file.at("params");
  } else {
    params = json::object();
  }

  const int workers = a.workers > 0 ? a.workers : minors::default_workers();
  minors::ExperimentReport rep =
      minors::run_experiment(a.name, params, a.seed, workers, a.eng.options());
  rep.config["command"] = "experiment";
  rep.config["format"] = a.io.format;
  echo_config(rep.config);
  if (a.io.format == "csv")
    emit_payload(rep.to_csv(), a.io.out);
  else
    emit_payload(json_payload(rep.to_json()), a.io.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "minor-process numerics: determinantal kernels, Fredholm probabilities "
      "and Monte-Carlo eigenvalue paths"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", minors::kVersion);

  SimulateArgs sim;
  CLI::App* s = app.add_subcommand(
      "simulate", "sample coupled minor eigenvalue paths to CSV");
  sim.o_nmax = s->add_option("--nmax", sim.nmax, "largest minor size");
  sim.o_paths = s->add_option("--paths", sim.paths, "number of paths");
  sim.o_seed = s->add_option("--seed", sim.seed, "RNG seed (counter-based)");
  sim.o_schedule = s->add_option(
      "--schedule", sim.schedule,
      "minor sizes start:stop:step (default: every N up to nmax)");
  sim.o_tracker = s->add_option("--tracker", sim.tracker,
                                "warm-started Lanczos tracker (true/false)");
  sim.o_workers = s->add_option(
      "--workers", sim.workers,
      "worker threads (0 = MINORS_WORKERS env or machine parallelism)");
  sim.io.attach(s, "csv", {"csv"});
  s->callback([&sim] { run_simulate(sim); });

  CdfArgs cdf;
  CLI::App* c = app.add_subcommand(
      "cdf", "Pr[scaled top eigenvalue of minor n <= t] via Fredholm determinant");
  cdf.o_u = c->add_option("--n,--u", cdf.u, "minor size (line index)");
  cdf.o_t = c->add_option("--t", cdf.t, "threshold in edge-scaled units");
  cdf.eng.attach(c);
  cdf.io.attach(c, "text", {"text", "json"});
  c->callback([&cdf] { run_cdf(cdf); });

  JointArgs joint;
  CLI::App* j = app.add_subcommand(
      "joint", "joint probability Pr[line u1 <= t1 and line u2 <= t2]");
  joint.o_u1 = j->add_option("--u1", joint.u1, "first line index");
  joint.o_t1 = j->add_option("--t1", joint.t1, "first threshold");
  joint.o_u2 = j->add_option("--u2", joint.u2, "second line index");
  joint.o_t2 = j->add_option("--t2", joint.t2, "second threshold");
  joint.o_dec = j->add_flag("--decorrelate", joint.decorrelate,
                            "zero the lower cross block (independence form)");
  joint.eng.attach(j);
  joint.io.attach(j, "text", {"text", "json"});
  j->callback([&joint] { run_joint(joint); });

  TwArgs tw;
  CLI::App* t = app.add_subcommand("tw", "Tracy-Widom GUE distribution F2(s)");
  tw.o_s = t->add_option("--s", tw.s, "evaluation point, s in [-8, 10]");
  tw.o_surv = t->add_flag("--survival", tw.survival,
                          "print the survival probability 1 - F2(s)");
  tw.eng.attach(t);
  tw.io.attach(t, "text", {"text", "json"});
  t->callback([&tw] { run_tw(tw); });

  KernelArgs ker;
  CLI::App* k = app.add_subcommand(
      "kernel", "minor-process kernel K(u1,y1;u2,y2) evaluation");
  ker.o_u1 = k->add_option("--u1", ker.u1, "row line index");
  ker.o_y1 = k->add_option("--y1", ker.y1, "row coordinate");
  ker.o_u2 = k->add_option("--u2", ker.u2, "column line index");
  ker.o_y2 = k->add_option("--y2", ker.y2, "column coordinate");
  ker.o_method =
      k->add_option("--method", ker.method,
                    "hermite_sum | contour_oracle | both (both prints the "
                    "relative difference; oracle needs u1 >= u2)");
  ker.o_scaled = k->add_flag(
      "--scaled", ker.scaled,
      "treat y as edge-scaled coordinates and print the conjugated kernel");
  ker.eng.attach(k);
  ker.io.attach(k, "text", {"text", "json"});
  k->callback([&ker] { run_kernel(ker); });

  PairArgs dec;
  CLI::App* d = app.add_subcommand(
      "decorrelate",
      "decorrelation error E = |joint - product of marginals| for two lines");
  dec.o_u1 = d->add_option("--u1", dec.u1, "first line index");
  dec.o_t1 = d->add_option("--t1", dec.t1, "first threshold");
  dec.o_u2 = d->add_option("--u2", dec.u2, "second line index");
  dec.o_t2 = d->add_option("--t2", dec.t2, "second threshold");
  dec.eng.attach(d);
  dec.io.attach(d, "json", {"text", "json"});
  d->callback([&dec] { run_decorrelate(dec); });

  PairArgs cor;
  cor.u1 = 40;
  cor.u2 = 48;
  cor.t1 = 1.0;
  cor.t2 = 1.0;
  CLI::App* f = app.add_subcommand(
      "correlate",
      "correlation F = Pr[line u1 >= t1 and line u2 < t2], u1 < u2");
  cor.o_u1 = f->add_option("--u1", cor.u1, "lower line index");
  cor.o_t1 = f->add_option("--t1", cor.t1, "first threshold");
  cor.o_u2 = f->add_option("--u2", cor.u2, "higher line index");
  cor.o_t2 = f->add_option("--t2", cor.t2, "second threshold");
  cor.eng.attach(f);
  cor.io.attach(f, "text", {"text", "json"});
  f->callback([&cor] { run_correlate(cor); });

  TailsArgs tails;
  CLI::App* ta = app.add_subcommand(
      "tails", "finite-n tail scan: probabilities, fits, trace sandwich");
  tails.o_u = ta->add_option("--n,--u", tails.u, "minor size (line index)");
  tails.o_t = ta->add_option("--t", tails.t,
                             "threshold grid start:stop:step (t >= 0)");
  tails.eng.attach(ta);
  tails.io.attach(ta, "json", {"json", "csv"});
  ta->callback([&tails] { run_tails(tails); });

  ExperimentArgs exp;
  CLI::App* e = app.add_subcommand(
      "experiment",
      "named verification sweep: tail_fit | tail_bound_scan | "
      "decorrelation_sweep | correlation_sweep | mc_vs_fredholm");
  exp.o_name = e->add_option("--name", exp.name, "experiment name");
  exp.o_params =
      e->add_option("--params", exp.params, "experiment parameters as JSON");
  exp.o_seed = e->add_option("--seed", exp.seed, "RNG seed (counter-based)");
  exp.o_workers = e->add_option(
      "--workers", exp.workers,
      "worker threads (0 = MINORS_WORKERS env or machine parallelism)");
  exp.eng.attach(e);
  exp.io.attach(e, "json", {"json", "csv"});
  e->callback([&exp] { run_experiment_cmd(exp); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForVersion& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);  // prints the offending flag to stderr
    return 1;
  } catch (const minors::NonConvergence& err) {
    std::cerr << "non-convergence: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
