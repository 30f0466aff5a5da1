/* ---------------------------------------------------------------------------
 * experiments.cpp -- verification sweeps over the Fredholm engine and the
 * Monte-Carlo simulator, emitted as reproducible reports.
 *
 * Asymptotic statements come with unspecified constants, so each sweep fits
 * the prefactor and asserts only what survives at desk scale: tail-exponent
 * shape, monotonicity of the decorrelation error in the separation, bound
 * dominance with the fitted constant, and agreement between empirical and
 * determinant probabilities within binomial standard errors.  Anything that
 * depends on the unknown constant itself is emitted as a report-only
 * verdict.  All thresholds live in the echoed config.
 * ------------------------------------------------------------------------- */
#include "minors/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <limits>
#include <stdexcept>

#include "minors/parallel.hpp"
#include "minors/simulator.hpp"
#include "minors/special_functions.hpp"
#include "minors/version.hpp"

#include "format_detail.hpp"

namespace minors {

namespace {

using detail::fmt_double;
using nlohmann::json;

std::string iso_timestamp_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

ExperimentReport make_report(const std::string& name, json config,
                             std::uint64_t seed) {
  ExperimentReport r;
  r.experiment = name;
  r.config = std::move(config);
  r.tool_version = kVersion;
  r.timestamp = iso_timestamp_utc();
  r.seed = seed;
  r.config["seed"] = seed;
  return r;
}

void record_options(json& config, const FredholmOptions& opt) {
  config["order"] = opt.order;
  config["length"] = opt.length;  // 0 => threshold-dependent default
  config["check_convergence"] = opt.check_convergence;
  config["convergence_tol"] = opt.convergence_tol;
}

void add_verdict(ExperimentReport& r, const std::string& name, bool ok,
                 const std::string& detail) {
  r.verdicts.push_back(
      {name, ok ? VerdictStatus::pass : VerdictStatus::fail, detail});
}

void add_report_only(ExperimentReport& r, const std::string& name,
                     const std::string& detail) {
  r.verdicts.push_back({name, VerdictStatus::report_only, detail});
}

const char* status_name(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::pass: return "pass";
    case VerdictStatus::fail: return "fail";
    default: return "report";
  }
}

double exp_threshold_factor(double t1, double t2) {
  return std::exp(-(2.0 / 3.0) *
                  (std::pow(t1, 1.5) + std::pow(t2, 1.5)));
}

}  // namespace

/* --- report serialization --------------------------------------------------- */

json ExperimentReport::to_json() const {
  json j;
  j["experiment"] = experiment;
  j["config"] = config;
  json rs = json::array();
  for (const Series& s : results) {
    json e;
    e["name"] = s.name;
    e["xs"] = s.xs;
    e["ys"] = s.ys;
    rs.push_back(std::move(e));
  }
  j["results"] = std::move(rs);
  json vs = json::array();
  for (const Verdict& v : verdicts) {
    json e;
    e["name"] = v.name;
    e["status"] = status_name(v.status);
    e["detail"] = v.detail;
    vs.push_back(std::move(e));
  }
  j["verdicts"] = std::move(vs);
  j["provenance"] = {{"seed", seed},
                     {"timestamp", timestamp},
                     {"tool_version", tool_version}};
  return j;
}

// Wide CSV: one x column plus one column per declared series.  Every
// experiment emits its series on a single shared grid; a mismatch is a
// programming error, not a user error.
std::string ExperimentReport::to_csv() const {
  std::string out = "x";
  if (results.empty()) {
    out += '\n';
    return out;
  }
  const std::vector<double>& xs = results.front().xs;
  for (const Series& s : results) {
    if (s.xs != xs || s.ys.size() != xs.size())
      throw std::logic_error("ExperimentReport::to_csv: series " + s.name +
                             " is not on the shared x grid");
    out += ',';
    out += s.name;
  }
  out += '\n';
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out += fmt_double(xs[i]);
    for (const Series& s : results) {
      out += ',';
      out += fmt_double(s.ys[i]);
    }
    out += '\n';
  }
  return out;
}

bool ExperimentReport::all_passed() const {
  for (const Verdict& v : verdicts)
    if (v.status == VerdictStatus::fail) return false;
  return true;
}

/* --- least squares ---------------------------------------------------------- */

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("fit_line: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("fit_line: need at least 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0))
    throw std::invalid_argument("fit_line: degenerate x grid");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < n; ++i)
    f.max_residual = std::max(f.max_residual,
                              std::abs(y[i] - (f.intercept + f.slope * x[i])));
  return f;
}

/* --- Tracy-Widom tail exponents ---------------------------------------------- */

ExperimentReport tail_exponent_fit(TailFitSide side, double s_lo, double s_hi,
                                   double step, const FredholmOptions& opt) {
  if (!(step > 0.0))
    throw std::invalid_argument("tail_exponent_fit: step must be positive");
  if (!(s_lo > 0.0))
    throw std::invalid_argument("tail_exponent_fit: s_lo must be positive");
  std::vector<double> ss;
  for (double s = s_lo; s <= s_hi + 1e-12; s += step) ss.push_back(s);
  if (ss.size() < 4)
    throw std::invalid_argument("tail_exponent_fit: need at least 4 points");

  const bool right = (side == TailFitSide::right);
  const double target = right ? -4.0 / 3.0 : -1.0 / 12.0;
  const double rel_tol = right ? 0.05 : 0.10;

  json config;
  config["side"] = right ? "right" : "left";
  config["s_lo"] = s_lo;
  config["s_hi"] = s_hi;
  config["step"] = step;
  config["target_slope"] = target;
  config["slope_rel_tol"] = rel_tol;
  record_options(config, opt);
  ExperimentReport r = make_report("tail_fit", std::move(config), 0);

  const std::size_t n = ss.size();
  std::vector<double> tail(n), logtail(n), power(n), fitted(n);
  for (std::size_t i = 0; i < n; ++i) {
    const TracyWidomResult tw = tracy_widom(right ? ss[i] : -ss[i], opt);
    const double p = right ? tw.survival : tw.cdf;
    if (!(p > 0.0))
      throw std::runtime_error("tail_exponent_fit: tail underflowed at s = " +
                               fmt_double(ss[i]));
    tail[i] = p;
    logtail[i] = std::log(p);
    power[i] = right ? std::pow(ss[i], 1.5) : ss[i] * ss[i] * ss[i];
  }
  const LineFit fit = fit_line(power, logtail);
  for (std::size_t i = 0; i < n; ++i)
    fitted[i] = fit.intercept + fit.slope * power[i];

  r.results.push_back({"tail_probability", ss, tail});
  r.results.push_back({"log_tail", ss, logtail});
  r.results.push_back({"power", ss, power});
  r.results.push_back({"fitted_log_tail", ss, fitted});

  const double rel_dev = std::abs(fit.slope - target) / std::abs(target);
  add_verdict(r, "slope", rel_dev <= rel_tol,
              "fitted slope " + fmt_double(fit.slope) + " vs target " +
                  fmt_double(target) + ", relative deviation " +
                  fmt_double(rel_dev) + " (tol " + fmt_double(rel_tol) + ")");
  add_report_only(r, "fit_quality",
                  "intercept " + fmt_double(fit.intercept) +
                      ", max residual " + fmt_double(fit.max_residual));
  return r;
}

/* --- finite-u tail scan ------------------------------------------------------ */

ExperimentReport tail_bound_scan(long u, const std::vector<double>& t_grid,
                                 const FredholmOptions& opt) {
  if (u < 1 || u > 512)
    throw std::invalid_argument("tail_bound_scan: u must be in [1, 512]");
  if (t_grid.empty())
    throw std::invalid_argument("tail_bound_scan: empty t grid");
  for (double t : t_grid)
    if (!(t >= 0.0) || !(t <= 10.0))
      throw std::invalid_argument(
          "tail_bound_scan: t grid must lie in [0, 10]");

  json config;
  config["u"] = u;
  config["t_grid"] = t_grid;
  config["right_target_slope"] = -4.0 / 3.0;
  config["right_slope_rel_tol"] = 0.15;
  config["left_target_slope"] = -1.0 / 12.0;
  config["sandwich_slack"] = 1e-8;
  record_options(config, opt);
  ExperimentReport r = make_report("tail_bound_scan", std::move(config), 0);

  const std::size_t n = t_grid.size();
  std::vector<double> p_right(n), p_left(n), tr_lo(n), tr_hi(n);
  std::vector<double> fit_x, fit_y, fit_xl, fit_yl;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t_grid[i];
    p_right[i] = single_line(u, t, opt).survival;
    p_left[i] = single_line_cdf(u, -t, opt);
    const auto sandwich = trace_bounds(u, t, opt);
    tr_lo[i] = sandwich.first;
    tr_hi[i] = sandwich.second;
    if (t > 0.0 && p_right[i] > 0.0) {
      fit_x.push_back(std::pow(t, 1.5));
      fit_y.push_back(std::log(p_right[i]));
    }
    if (t > 0.0 && p_left[i] > 0.0) {
      fit_xl.push_back(t * t * t);
      fit_yl.push_back(std::log(p_left[i]));
    }
  }
  r.results.push_back({"p_right", t_grid, p_right});
  r.results.push_back({"p_left", t_grid, p_left});
  r.results.push_back({"trace_lower", t_grid, tr_lo});
  r.results.push_back({"trace_upper", t_grid, tr_hi});

  if (fit_x.size() < 4)
    throw std::invalid_argument(
        "tail_bound_scan: need at least 4 positive-t points for the fit");
  const LineFit right_fit = fit_line(fit_x, fit_y);
  const double rel_dev =
      std::abs(right_fit.slope + 4.0 / 3.0) / (4.0 / 3.0);
  add_verdict(r, "right_tail_shape", rel_dev <= 0.15,
              "log P_right vs t^{3/2}: slope " + fmt_double(right_fit.slope) +
                  ", relative deviation from -4/3 is " + fmt_double(rel_dev) +
                  " (tol 0.15)");
  if (fit_xl.size() >= 4) {
    const LineFit left_fit = fit_line(fit_xl, fit_yl);
    add_report_only(r, "left_tail_shape",
                    "log P_left vs t^3: slope " + fmt_double(left_fit.slope) +
                        " (asymptotic target -1/12; constant-dependent at "
                        "finite u)");
  } else {
    add_report_only(r, "left_tail_shape",
                    "fewer than 4 usable points; fit skipped");
  }

  double worst = 0.0;
  bool sandwich_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double below = tr_lo[i] - p_right[i];  // should be <= slack
    const double above = p_right[i] - tr_hi[i];  // should be <= slack
    worst = std::max(worst, std::max(below, above));
    if (below > 1e-8 || above > 1e-8) sandwich_ok = false;
  }
  add_verdict(r, "trace_sandwich", sandwich_ok,
              "1-e^{-tr} <= P_right <= tr at every t; worst violation " +
                  fmt_double(worst) + " (slack 1e-8)");

  bool left_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(p_left[i] > 0.0 && p_left[i] < 1.0)) left_ok = false;
    if (i > 0 && t_grid[i] > t_grid[i - 1] && !(p_left[i] < p_left[i - 1]))
      left_ok = false;
  }
  add_verdict(r, "left_tail_monotone", left_ok,
              "P_left in (0,1) and strictly decreasing along increasing t");
  return r;
}

/* --- decorrelation in the separation regime ----------------------------------- */

bool decorrelation_in_regime(long u1, long u2) {
  if (u2 < 1 || u1 <= u2) return false;
  const double sep =
      std::pow(static_cast<double>(u2), 2.0 / 3.0) *
      std::exp(std::pow(std::log(static_cast<double>(u1)), 2.0 / 3.0));
  return static_cast<double>(u1) >= static_cast<double>(u2) + sep;
}

long smallest_in_regime_u1(long u2) {
  if (u2 < 1)
    throw std::invalid_argument("smallest_in_regime_u1: u2 must be >= 1");
  for (long u1 = u2 + 1; u1 <= 100000000L; ++u1)
    if (decorrelation_in_regime(u1, u2)) return u1;
  throw std::runtime_error("smallest_in_regime_u1: search exhausted");
}

ExperimentReport decorrelation_sweep(long u2, const std::vector<long>& u1_list,
                                     double t1, double t2,
                                     const FredholmOptions& opt) {
  if (u2 < 1)
    throw std::invalid_argument("decorrelation_sweep: u2 must be >= 1");
  if (u1_list.empty())
    throw std::invalid_argument("decorrelation_sweep: empty u1 list");
  for (std::size_t i = 0; i < u1_list.size(); ++i) {
    if (u1_list[i] <= u2)
      throw std::invalid_argument(
          "decorrelation_sweep: every u1 must exceed u2 (equal lines are a "
          "precondition violation)");
    if (i > 0 && u1_list[i] <= u1_list[i - 1])
      throw std::invalid_argument(
          "decorrelation_sweep: u1 list must be strictly increasing");
  }
  if (!(t1 >= 0.0) || !(t2 >= 0.0))
    throw std::invalid_argument(
        "decorrelation_sweep: thresholds must be >= 0 for the envelope");

  json config;
  config["u2"] = u2;
  config["u1_list"] = u1_list;
  config["t1"] = t1;
  config["t2"] = t2;
  config["envelope"] =
      "C u1^{1/12} u2^{1/12} / (sqrt(u1)-sqrt(u2)) "
      "exp(-(2/3)(t1^{3/2}+t2^{3/2}))";
  config["monotonicity_tol"] = 1e-9;
  config["smallness_threshold"] = 1e-2;
  record_options(config, opt);
  ExperimentReport r = make_report("decorrelation_sweep", std::move(config), 0);

  const std::size_t n = u1_list.size();
  const double tf = exp_threshold_factor(t1, t2);
  std::vector<double> xs(n), evals(n), env(n), regime(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long u1 = u1_list[i];
    xs[i] = static_cast<double>(u1);
    const DecorrelationResult d = decorrelation_E(u1, t1, u2, t2, opt);
    evals[i] = d.E_cdf_form;
    env[i] = std::pow(xs[i], 1.0 / 12.0) *
             std::pow(static_cast<double>(u2), 1.0 / 12.0) /
             (std::sqrt(xs[i]) - std::sqrt(static_cast<double>(u2))) * tf;
    regime[i] = decorrelation_in_regime(u1, u2) ? 1.0 : 0.0;
  }

  // least-squares prefactor E ~ C * envelope (positive because E, env >= 0)
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += evals[i] * env[i];
    den += env[i] * env[i];
  }
  const double c_fit = den > 0.0 ? num / den : 0.0;
  std::vector<double> env_fitted(n);
  for (std::size_t i = 0; i < n; ++i) env_fitted[i] = c_fit * env[i];

  r.results.push_back({"E", xs, evals});
  r.results.push_back({"envelope_fitted", xs, env_fitted});
  r.results.push_back({"in_regime", xs, regime});

  std::vector<std::size_t> in_idx;
  for (std::size_t i = 0; i < n; ++i)
    if (regime[i] == 1.0) in_idx.push_back(i);

  bool monotone = true;
  double worst_increase = 0.0;
  for (std::size_t j = 1; j < in_idx.size(); ++j) {
    const double inc = evals[in_idx[j]] - evals[in_idx[j - 1]];
    worst_increase = std::max(worst_increase, inc);
    if (inc > 1e-9) monotone = false;
  }
  add_verdict(r, "in_regime_nonincreasing", monotone,
              std::to_string(in_idx.size()) +
                  " in-regime points; worst increase " +
                  fmt_double(worst_increase) + " (tol 1e-9)");

  if (!in_idx.empty()) {
    const std::size_t last = in_idx.back();
    add_verdict(r, "smallness_at_max_separation", evals[last] < 1e-2,
                "E = " + fmt_double(evals[last]) + " at u1 = " +
                    fmt_double(xs[last]) + " (threshold 1e-2)");
    add_verdict(r, "below_fitted_envelope",
                evals[last] <= env_fitted[last],
                "E = " + fmt_double(evals[last]) + " vs fitted envelope " +
                    fmt_double(env_fitted[last]) + " at u1 = " +
                    fmt_double(xs[last]));
  } else {
    add_report_only(r, "smallness_at_max_separation",
                    "no in-regime u1 in the sweep");
  }
  add_verdict(r, "fitted_prefactor", c_fit > 0.0,
              "C = " + fmt_double(c_fit) + " (least squares over the sweep)");
  return r;
}

/* --- correlation bound sweep --------------------------------------------------- */

ExperimentReport correlation_sweep(long u, const std::vector<long>& du_grid,
                                   double t1, double t2, double delta_t,
                                   const FredholmOptions& opt) {
  if (u < 1)
    throw std::invalid_argument("correlation_sweep: u must be >= 1");
  if (du_grid.empty())
    throw std::invalid_argument("correlation_sweep: empty du grid");
  for (std::size_t i = 0; i < du_grid.size(); ++i) {
    if (du_grid[i] < 1)
      throw std::invalid_argument("correlation_sweep: du must be >= 1");
    if (i > 0 && du_grid[i] <= du_grid[i - 1])
      throw std::invalid_argument(
          "correlation_sweep: du grid must be strictly increasing");
  }
  if (!(t1 >= 0.0) || !(t2 >= 0.0) || !(delta_t >= 0.0))
    throw std::invalid_argument(
        "correlation_sweep: thresholds and delta_t must be >= 0");

  // beta and delta below are desk-scale surrogates: the asymptotic statement
  // fixes neither the small power correction nor the window edges.
  const double beta = 0.1;
  const double delta = 0.05;

  json config;
  config["u"] = u;
  config["du_grid"] = du_grid;
  config["t1"] = t1;
  config["t2"] = t2;
  config["delta_t"] = delta_t;
  config["beta_surrogate"] = beta;
  config["window_delta_surrogate"] = delta;
  config["bound"] =
      "C [du/u^{2/3-beta} + Pr[Z > delta_t u^{1/3}/sqrt(du)]] "
      "exp(-(2/3)(t1^{3/2}+t2^{3/2}))";
  config["nonnegativity_tol"] = 1e-12;
  record_options(config, opt);
  ExperimentReport r = make_report("correlation_sweep", std::move(config), 0);

  const double tf = exp_threshold_factor(t1, t2);
  const double du_lo = std::pow(static_cast<double>(u), 1.0 / 3.0 + delta);
  const double du_hi = std::pow(static_cast<double>(u), 2.0 / 3.0 - delta);
  const std::size_t n = du_grid.size();
  std::vector<double> xs(n), fs(n), shape(n), normal_term(n), regime(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long du = du_grid[i];
    xs[i] = static_cast<double>(du);
    fs[i] = correlation_F(u, t1, u + du, t2, opt);
    normal_term[i] = normal_sf(delta_t * std::cbrt(static_cast<double>(u)) /
                               std::sqrt(xs[i]));
    shape[i] =
        (xs[i] / std::pow(static_cast<double>(u), 2.0 / 3.0 - beta) +
         normal_term[i]) *
        tf;
    regime[i] = (xs[i] >= du_lo && xs[i] <= du_hi) ? 1.0 : 0.0;
  }

  // the bound targets the in-regime window only: fit C as the smallest
  // constant covering the in-regime points (all points if none are), assert
  // dominance there, and report off-regime behavior without judging it
  double c_fit = 0.0;
  bool have_regime = false;
  for (std::size_t i = 0; i < n; ++i)
    if (regime[i] == 1.0) {
      have_regime = true;
      c_fit = std::max(c_fit, fs[i] / shape[i]);
    }
  if (!have_regime)
    for (std::size_t i = 0; i < n; ++i)
      c_fit = std::max(c_fit, fs[i] / shape[i]);

  std::vector<double> bound(n);
  for (std::size_t i = 0; i < n; ++i) bound[i] = c_fit * shape[i];

  r.results.push_back({"F", xs, fs});
  r.results.push_back({"bound_fitted", xs, bound});
  r.results.push_back({"normal_term", xs, normal_term});
  r.results.push_back({"in_regime", xs, regime});

  double fmin = std::numeric_limits<double>::infinity();
  for (double f : fs) fmin = std::min(fmin, f);
  add_verdict(r, "nonnegative", fmin >= -1e-12,
              "min F = " + fmt_double(fmin) + " (tol -1e-12)");

  double worst_in = 0.0, worst_off = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double excess = fs[i] - bound[i];
    if (regime[i] == 1.0)
      worst_in = std::max(worst_in, excess);
    else
      worst_off = std::max(worst_off, excess);
  }
  add_verdict(r, "bound_dominates", worst_in <= 1e-12,
              "max F - C*shape over " +
                  std::string(have_regime ? "in-regime" : "all") +
                  " points is " + fmt_double(worst_in));
  add_report_only(r, "off_regime_excess",
                  "max F - C*shape over off-regime points is " +
                      fmt_double(worst_off) +
                      " (the bound is asserted in-regime only)");
  add_verdict(r, "fitted_prefactor", c_fit > 0.0,
              "C = " + fmt_double(c_fit));
  return r;
}

/* --- Monte-Carlo vs determinants ----------------------------------------------- */

ExperimentReport mc_vs_fredholm(long u, const std::vector<double>& t_grid,
                                long n_samples, std::uint64_t seed,
                                int workers, const FredholmOptions& opt) {
  if (u < 1 || u > 512)
    throw std::invalid_argument("mc_vs_fredholm: u must be in [1, 512]");
  if (t_grid.empty())
    throw std::invalid_argument("mc_vs_fredholm: empty t grid");
  if (n_samples < 1000)
    throw std::invalid_argument("mc_vs_fredholm: need at least 1000 samples");
  const int resolved_workers = workers > 0 ? workers : default_workers();

  json config;
  config["u"] = u;
  config["t_grid"] = t_grid;
  config["n_samples"] = n_samples;
  config["workers"] = resolved_workers;
  config["z_limit"] = 3.0;
  config["allowance_per_checks"] = 100;
  record_options(config, opt);
  ExperimentReport r = make_report("mc_vs_fredholm", std::move(config), seed);

  // one sampled array per stream id; only the top eigenvalue of minor u
  std::vector<double> lam(static_cast<std::size_t>(n_samples));
  parallel_for(n_samples, resolved_workers, [&](long i) {
    const GaussianMinorArray arr =
        sample_array(seed, static_cast<std::uint64_t>(i), u);
    EigenPathOptions po;
    po.schedule = {u};
    po.use_tracker = false;
    const EigenPath path = eigen_path(arr, po);
    lam[static_cast<std::size_t>(i)] = path.lambda_scaled[0];
  });

  const std::size_t n = t_grid.size();
  std::vector<double> mc(n), fredholm(n), z(n);
  long exceed = 0;
  double max_abs_z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = single_line_cdf(u, t_grid[i], opt);
    fredholm[i] = p;
    mc[i] = empirical_cdf(lam, t_grid[i]).value;
    const double se =
        std::sqrt(std::max(0.0, p * (1.0 - p) / static_cast<double>(n_samples)));
    if (se > 0.0)
      z[i] = (mc[i] - p) / se;
    else
      z[i] = (mc[i] == p) ? 0.0
                          : std::numeric_limits<double>::infinity() *
                                (mc[i] > p ? 1.0 : -1.0);
    max_abs_z = std::max(max_abs_z, std::abs(z[i]));
    if (std::abs(z[i]) > 3.0) ++exceed;
  }
  r.results.push_back({"fredholm_cdf", t_grid, fredholm});
  r.results.push_back({"mc_cdf", t_grid, mc});
  r.results.push_back({"z", t_grid, z});

  const long allowance = (static_cast<long>(n) + 99) / 100;
  add_verdict(r, "z_scores", exceed <= allowance,
              std::to_string(exceed) + " of " + std::to_string(n) +
                  " checks exceed |z| = 3 (allowance " +
                  std::to_string(allowance) + ", max |z| = " +
                  fmt_double(max_abs_z) + ")");
  return r;
}

/* --- CLI dispatcher -------------------------------------------------------------- */

namespace {

void require_keys(const json& params, std::initializer_list<const char*> allowed,
                  const char* name) {
  if (params.is_null()) return;
  if (!params.is_object())
    throw std::invalid_argument(std::string("run_experiment: params for ") +
                                name + " must be a JSON object");
  for (const auto& item : params.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (item.key() == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw std::invalid_argument("run_experiment: unknown parameter key '" +
                                  item.key() + "' for " + name);
  }
}

long get_long(const json& p, const char* key, long dflt) {
  if (p.is_null() || !p.contains(key)) return dflt;
  const json& v = p.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw std::invalid_argument(std::string("run_experiment: parameter '") +
                                key + "' must be an integer");
  return v.get<long>();
}

double get_double(const json& p, const char* key, double dflt) {
  if (p.is_null() || !p.contains(key)) return dflt;
  const json& v = p.at(key);
  if (!v.is_number())
    throw std::invalid_argument(std::string("run_experiment: parameter '") +
                                key + "' must be a number");
  return v.get<double>();
}

std::string get_string(const json& p, const char* key,
                       const std::string& dflt) {
  if (p.is_null() || !p.contains(key)) return dflt;
  const json& v = p.at(key);
  if (!v.is_string())
    throw std::invalid_argument(std::string("run_experiment: parameter '") +
                                key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> get_double_list(const json& p, const char* key,
                                    std::vector<double> dflt) {
  if (p.is_null() || !p.contains(key)) return dflt;
  const json& v = p.at(key);
  if (!v.is_array())
    throw std::invalid_argument(std::string("run_experiment: parameter '") +
                                key + "' must be an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number())
      throw std::invalid_argument(std::string("run_experiment: parameter '") +
                                  key + "' must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<long> get_long_list(const json& p, const char* key,
                                std::vector<long> dflt) {
  if (p.is_null() || !p.contains(key)) return dflt;
  const json& v = p.at(key);
  if (!v.is_array())
    throw std::invalid_argument(std::string("run_experiment: parameter '") +
                                key + "' must be an array of integers");
  std::vector<long> out;
  for (const json& e : v) {
    if (!e.is_number_integer() && !e.is_number_unsigned())
      throw std::invalid_argument(std::string("run_experiment: parameter '") +
                                  key + "' must be an array of integers");
    out.push_back(e.get<long>());
  }
  return out;
}

}  // namespace

namespace {

// deterministic experiments build their reports without a seed; stamp the
// caller's value anyway so provenance is uniform across experiment kinds
ExperimentReport with_seed(ExperimentReport r, std::uint64_t seed) {
  r.seed = seed;
  r.config["seed"] = seed;
  return r;
}

}  // namespace

ExperimentReport run_experiment(const std::string& name, const json& params,
                                std::uint64_t seed, int workers,
                                const FredholmOptions& opt) {
  if (name == "tail_fit") {
    require_keys(params, {"side", "s_lo", "s_hi", "step"}, "tail_fit");
    const std::string side_s = get_string(params, "side", "right");
    TailFitSide side;
    if (side_s == "right")
      side = TailFitSide::right;
    else if (side_s == "left")
      side = TailFitSide::left;
    else
      throw std::invalid_argument(
          "run_experiment: side must be 'right' or 'left'");
    const bool right = side == TailFitSide::right;
    const double s_lo = get_double(params, "s_lo", 3.0);
    const double s_hi = get_double(params, "s_hi", right ? 7.0 : 5.5);
    const double step = get_double(params, "step", 0.25);
    return with_seed(tail_exponent_fit(side, s_lo, s_hi, step, opt), seed);
  }
  if (name == "tail_bound_scan") {
    require_keys(params, {"u", "t_grid"}, "tail_bound_scan");
    const long u = get_long(params, "u", 256);
    const std::vector<double> t_grid = get_double_list(
        params, "t_grid", {2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0});
    return with_seed(tail_bound_scan(u, t_grid, opt), seed);
  }
  if (name == "decorrelation_sweep") {
    require_keys(params, {"u2", "u1_list", "t1", "t2"}, "decorrelation_sweep");
    const long u2 = get_long(params, "u2", 60);
    const std::vector<long> u1_list =
        get_long_list(params, "u1_list", {516, 640, 800, 1024});
    const double t1 = get_double(params, "t1", 0.0);
    const double t2 = get_double(params, "t2", 0.0);
    return with_seed(decorrelation_sweep(u2, u1_list, t1, t2, opt), seed);
  }
  if (name == "correlation_sweep") {
    require_keys(params, {"u", "du_grid", "t1", "t2", "delta_t"},
                 "correlation_sweep");
    const long u = get_long(params, "u", 64);
    const std::vector<long> du_grid =
        get_long_list(params, "du_grid", {4, 6, 8, 12, 16});
    const double t1 = get_double(params, "t1", 1.0);
    const double t2 = get_double(params, "t2", 1.0);
    const double delta_t = get_double(params, "delta_t", 0.0);
    return with_seed(correlation_sweep(u, du_grid, t1, t2, delta_t, opt), seed);
  }
  if (name == "mc_vs_fredholm") {
    require_keys(params, {"u", "t_grid", "n_samples"}, "mc_vs_fredholm");
    const long u = get_long(params, "u", 50);
    const std::vector<double> t_grid =
        get_double_list(params, "t_grid", {-2.0, -1.0, 0.0, 1.0, 2.0});
    const long n_samples = get_long(params, "n_samples", 10000);
    return mc_vs_fredholm(u, t_grid, n_samples, seed, workers, opt);
  }
  throw std::invalid_argument("run_experiment: unknown experiment '" + name +
                              "'");
}

}  // namespace minors
