#include "oldroyd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <cstdio>
#include <thread>

#include <json.hpp>

#include "oldroyd/csv.hpp"
#include "oldroyd/errors.hpp"
#include "oldroyd/spectral_ops.hpp"

namespace oldroyd {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

// Generic test vector for the mode comparison: every component nonzero and
// with a nontrivial phase.
ModeState probe_mode(double xi) {
  ModeState m;
  m.u_hat = {Complex(1.0, 0.0), Complex(-0.5, 0.25)};
  m.sigma_hat = {Complex(0.3, 0.0), Complex(0.0, 0.7)};
  m.xi_mag = xi;
  return m;
}

double mode_norm(const ModeState& m) {
  double s = 0.0;
  for (const auto& c : m.u_hat) s += std::norm(c);
  for (const auto& c : m.sigma_hat) s += std::norm(c);
  return std::sqrt(s);
}

ModeState mode_diff(const ModeState& a, const ModeState& b) {
  ModeState d = a;
  for (int i = 0; i < 2; ++i) {
    d.u_hat[i] -= b.u_hat[i];
    d.sigma_hat[i] -= b.sigma_hat[i];
  }
  return d;
}

bool in_double_root_regime(const PhysParams& p, double xi) {
  const auto [lp, lm] = eigenvalues(p, xi);
  const double b = p.beta + p.mu * xi * xi;
  return std::abs(lp - lm) < 1e-6 * b;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed: " + path.string());
}

fs::path prepare_run_dir(const CommandOptions& opt, RunRecord& rec) {
  rec.dir = opt.out_root / rec.run_id;
  std::error_code ec;
  fs::create_directories(rec.dir, ec);
  if (ec) throw ConfigError("cannot create run directory " + rec.dir.string() + ": " + ec.message());
  write_text(rec.dir / "config.echo", rec.config_echo);
  return rec.dir;
}

void finish(RunRecord& rec, int code, const std::string& status) {
  rec.exit_code = code;
  rec.status = status;
  write_text(rec.dir / "status", status + "\n");
}

RunRecord new_record(const std::string& command, const Config& cfg) {
  RunRecord rec;
  rec.config_echo = cfg.canonical();
  rec.run_id = make_run_id(command, cfg);
  return rec;
}

std::string status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::BlowUp: return "blow_up";
    case RunStatus::CflViolation: return "cfl_violation";
  }
  return "unknown";
}

std::string series_csv(const std::vector<Sample>& samples) {
  std::string out = energy_csv_header() + "\n";
  for (const auto& s : samples) out += to_csv_row(s.report) + "\n";
  return out;
}

double trapezoid(const std::vector<Sample>& samples,
                 const std::function<double(const EnergyReport&)>& f) {
  double acc = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i)
    acc += 0.5 * (samples[i].t - samples[i - 1].t) * (f(samples[i].report) + f(samples[i - 1].report));
  return acc;
}

double sq(double x) { return x * x; }

}  // namespace

// ---- Green-function validation -------------------------------------------

GreenSweep default_green_sweep(const PhysParams& p, int xi_points, std::vector<double> times) {
  p.validate();
  if (xi_points < 2) throw InvalidInput("green sweep needs at least 2 xi points");
  if (times.empty()) throw InvalidInput("green sweep needs at least one time");
  for (double t : times)
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("green sweep times must be >= 0");
  const SpectralConstants sc = constants(p);
  GreenSweep s;
  for (int i = 0; i < xi_points; ++i) s.xis.push_back(2.0 * sc.R * i / (xi_points - 1));
  s.xis.push_back(sc.xi_c);
  std::sort(s.xis.begin(), s.xis.end());
  std::sort(times.begin(), times.end());
  s.times = std::move(times);
  return s;
}

GreenValidation validate_green(const PhysParams& p, const GreenSweep& sweep,
                               const ModePropagator& prop) {
  p.validate();
  if (!(sweep.oracle_dt_fraction > 0.0 && sweep.oracle_dt_fraction <= 1.0))
    throw InvalidInput("oracle dt fraction must lie in (0, 1]");
  if (!std::is_sorted(sweep.times.begin(), sweep.times.end()))
    throw InvalidInput("green sweep times must be sorted");
  GreenValidation v;
  v.max_gap = 0.0;
  for (double xi : sweep.xis) {
    if (in_double_root_regime(p, xi)) v.double_root_exercised = true;
    const ModeState m0 = probe_mode(xi);
    const double dt = sweep.oracle_dt_fraction * oracle_max_dt(p, xi);
    // The oracle is chained from one sample time to the next.
    ModeState oracle = m0;
    double t_prev = 0.0;
    for (double t : sweep.times) {
      oracle = mode_ode_oracle(p, oracle, t - t_prev, dt);
      t_prev = t;
      const ModeState closed = prop(p, m0, t);
      const double scale = mode_norm(closed);
      double gap = mode_norm(mode_diff(closed, oracle)) / scale;
      if (!std::isfinite(gap)) gap = std::numeric_limits<double>::infinity();
      v.rows.push_back({xi, t, gap});
      if (!(gap <= v.max_gap)) {
        v.max_gap = gap;
        v.worst_xi = xi;
        v.worst_t = t;
      }
    }
  }
  return v;
}

// ---- Linear decay ----------------------------------------------------------

LinearDecayResult linear_decay(const PhysParams& p, const InitialProfile& ic,
                               const DecayOptions& opt) {
  p.validate();
  if (!(opt.t_lo > 0.0 && opt.t_hi > opt.t_lo))
    throw ConfigError("decay window must satisfy 0 < t_lo < t_hi");
  if (opt.lower_bound && !(ic.c2 > 0.0))
    throw ConfigError("lower-bound mode needs initial data with nonzero mean");
  const SpectralConstants sc = constants(p);

  LinearDecayResult res;
  res.non_asymptotic = opt.t_lo < 100.0;
  res.ratio_start = opt.ratio_start > 0.0 ? opt.ratio_start : std::max(sc.t1, 100.0);
  if (opt.lower_bound && res.ratio_start >= opt.t_hi)
    throw ConfigError("lower-bound window starts after the end of the series");

  std::vector<double> times;
  if (opt.lower_bound && res.ratio_start < opt.t_lo) {
    times = log_spaced(res.ratio_start, opt.t_lo, 11);
    times.pop_back();
  }
  for (double t : log_spaced(opt.t_lo, opt.t_hi, opt.samples)) times.push_back(t);

  bool all = true;
  for (Branch b : {Branch::U, Branch::Sigma}) {
    for (int k = 0; k <= 3; ++k) {
      DecaySeries s = make_decay_series(p, ic, k, b, times, opt.quad);
      BranchResult r{};
      r.k = k;
      r.branch = b;
      r.fit = fit_decay_exponent(s, opt.t_lo, opt.t_hi);
      r.expected = expected_exponent(b, k);
      r.slope_ok = std::abs(r.fit.slope - r.expected) <= opt.slope_tolerance;
      if (opt.lower_bound) {
        const auto [lo, hi] = lower_bound_ratio(s, r.expected, res.ratio_start);
        r.ratio_min = lo;
        r.ratio_max = hi;
        r.ratio_ok = lo > 0.0 && hi / lo <= opt.ratio_bound;
      } else {
        r.ratio_min = r.ratio_max = std::numeric_limits<double>::quiet_NaN();
        r.ratio_ok = true;
      }
      all = all && r.slope_ok && r.ratio_ok;
      res.series.push_back(std::move(s));
      res.branches.push_back(r);
    }
  }
  res.passed = all;
  return res;
}

// ---- Nonlinear runs --------------------------------------------------------

SimulationSummary summarize(const RunOutcome& run, const PhysParams& p,
                            const SummaryLimits& lim) {
  SimulationSummary s;
  if (run.samples.empty()) return s;
  s.initial_h3 = run.samples.front().report.h3_norm();
  for (const auto& smp : run.samples) {
    s.sup_h3 = std::max(s.sup_h3, smp.report.h3_norm());
    const SandwichCheck c = check_sandwich(smp.report, p);
    s.sandwich_ok = s.sandwich_ok && c.total_ok && c.h5_ok;
  }
  for (std::size_t i = 1; i < run.samples.size(); ++i) {
    const EnergyReport& a = run.samples[i - 1].report;
    const EnergyReport& b = run.samples[i].report;
    for (int h = 0; h < 3; ++h) s.max_increase[h] = std::max(s.max_increase[h], b.H[h] - a.H[h]);
    if (a.t >= lim.ratio_after && a.u_norm[0] > 0.0 && b.u_norm[0] > 0.0) {
      const double ra = a.tau_norm[0] / a.u_norm[0];
      const double rb = b.tau_norm[0] / b.u_norm[0];
      s.ratio_max_increase = std::max(s.ratio_max_increase, rb - ra);
    }
  }
  if (run.balance.size() >= 3) s.max_balance_residual = balance_residual(run.balance);
  s.h3_bounded = s.sup_h3 <= lim.h3_growth_bound * s.initial_h3;
  s.monotone = std::all_of(s.max_increase.begin(), s.max_increase.end(),
                           [&](double d) { return d <= lim.monotone_tol; });
  s.ratio_monotone = s.ratio_max_increase <= lim.monotone_tol;
  s.balance_ok = run.balance.size() >= 3 && s.max_balance_residual < lim.balance_tolerance;
  return s;
}

MuSweepResult sweep_mu(const SimState& init, const std::vector<double>& mus,
                       const StepConfig& cfg, double horizon, double sample_every,
                       const EtaCoefficients& etas, double spread_tolerance, int threads,
                       std::vector<RunOutcome>* runs) {
  if (mus.empty()) throw InvalidInput("mu sweep needs at least one value");
  for (double mu : mus)
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw InvalidInput("mu values must be >= 0");
  for (std::size_t i = 1; i < mus.size(); ++i)
    if (!(mus[i] < mus[i - 1])) throw InvalidInput("mu values must be strictly decreasing");
  if (threads < 1) throw InvalidInput("thread count must be >= 1");

  std::vector<std::optional<RunOutcome>> outcomes(mus.size());
  std::vector<std::string> errors(mus.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < mus.size(); i = next++) {
      try {
        SimState s = init;
        s.params.mu = mus[i];
        outcomes[i] = run(s, cfg, horizon, sample_every, etas);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int jobs = std::min<int>(threads, static_cast<int>(mus.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < mus.size(); ++i)
    if (!errors[i].empty()) throw InvalidInput("mu = " + fmt17(mus[i]) + ": " + errors[i]);

  MuSweepResult r;
  r.mus = mus;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    const RunOutcome& o = *outcomes[i];
    double sup = 0.0;
    for (const auto& smp : o.samples) sup = std::max(sup, smp.report.h3_norm());
    r.sup_h3.push_back(sup);
    r.dissipation.push_back(trapezoid(o.samples, [](const EnergyReport& e) {
      return sq(e.u_norm[1]) + sq(e.u_norm[2]) + sq(e.u_norm[3]) + sq(e.tau_norm[0]) +
             sq(e.tau_norm[1]) + sq(e.tau_norm[2]) + sq(e.tau_norm[3]);
    }));
    const double mu = mus[i];
    r.mu_dissipation.push_back(trapezoid(o.samples, [mu](const EnergyReport& e) {
      return mu * (sq(e.tau_norm[1]) + sq(e.tau_norm[2]) + sq(e.tau_norm[3]) + sq(e.grad_tau4));
    }));
    r.status.push_back(o.status);
  }
  for (std::size_t i = 0; i + 1 < mus.size(); ++i) {
    const SpectralVectorField& a = outcomes[i]->final_state.u;
    const SpectralVectorField& b = outcomes[i + 1]->final_state.u;
    SpectralVectorField d = a;
    for (int c = 0; c < 2; ++c)
      for (std::size_t m = 0; m < d.comp[c].size(); ++m) d.comp[c][m] -= b.comp[c][m];
    r.gaps.push_back(sobolev_norm(d, 0));
  }
  const auto [lo, hi] = std::minmax_element(r.sup_h3.begin(), r.sup_h3.end());
  r.spread = *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
  const bool completed = std::all_of(r.status.begin(), r.status.end(),
                                     [](RunStatus s) { return s == RunStatus::Completed; });
  r.spread_ok = completed && r.spread <= spread_tolerance;
  r.gaps_decreasing = completed;
  for (std::size_t i = 1; i < r.gaps.size(); ++i)
    r.gaps_decreasing = r.gaps_decreasing && r.gaps[i] < r.gaps[i - 1];
  if (runs) {
    runs->clear();
    for (auto& o : outcomes) runs->push_back(std::move(*o));
  }
  return r;
}

// ---- Config plumbing -------------------------------------------------------

std::string make_run_id(const std::string& command, const Config& cfg) {
  return command + "-" + fnv1a_hex(command + "\n" + cfg.canonical());
}

PhysParams physics_from(const Config& cfg) {
  PhysParams p{cfg.get_double("physics.alpha"), cfg.get_double("physics.beta"),
               cfg.get_double("physics.K"), cfg.get_double("physics.mu")};
  try {
    p.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("[physics] ") + e.what());
  }
  return p;
}

StepConfig step_config_from(const Config& cfg) {
  StepConfig c;
  c.dt = cfg.get_double("solver.dt");
  c.dealias_fraction = cfg.get_double("solver.dealias_fraction");
  c.scheme = static_cast<int>(cfg.get_int("solver.scheme"));
  c.nonlinear = cfg.get_bool("solver.nonlinear");
  try {
    c.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("[solver] ") + e.what());
  }
  return c;
}

EtaCoefficients etas_from(const Config& cfg) {
  return EtaCoefficients::from_eta1(cfg.get_double("monitor.eta1"));
}

SimState initial_state_from(const Config& cfg) {
  const PhysParams p = physics_from(cfg);
  const long long n = cfg.get_int("grid.n");
  if (n < 8 || n > (1 << 14)) throw ConfigError("[grid] n out of range");
  const Grid g(static_cast<int>(n), cfg.get_double("grid.L"));
  const std::string kind = cfg.get_string("init.kind");
  if (kind == "random") {
    RandomInit ri;
    const long long seed = cfg.get_int("init.seed");
    if (seed < 0) throw ConfigError("[init] seed must be >= 0");
    ri.seed = static_cast<std::uint64_t>(seed);
    ri.h3_norm = cfg.get_double("init.h3_norm");
    ri.band_lo = static_cast<double>(cfg.get_int("init.band_lo"));
    ri.band_hi = static_cast<double>(cfg.get_int("init.band_hi"));
    return random_state(g, p, ri, cfg.get_double("solver.dealias_fraction"));
  }
  if (kind == "taylor_green")
    return taylor_green_state(g, p, static_cast<int>(cfg.get_int("init.tg_mode")),
                              cfg.get_double("init.tg_u_amp"), cfg.get_double("init.tg_tau_amp"));
  if (kind == "zero") return SimState(g, p);
  if (kind == "file") {
    const std::string path = cfg.get_string("init.file");
    if (path.empty()) throw ConfigError("[init] kind = file needs init.file");
    SimState s = read_checkpoint(path);
    if (!(s.grid() == g)) throw ConfigError("checkpoint grid does not match [grid]");
    s.params = p;
    return s;
  }
  throw ConfigError("[init] unknown kind '" + kind + "'");
}

// ---- Commands --------------------------------------------------------------

RunRecord cmd_validate_green(const Config& cfg, const CommandOptions& opt) {
  RunRecord rec = new_record("validate-green", cfg);
  const PhysParams p = physics_from(cfg);
  GreenSweep sweep = default_green_sweep(p, static_cast<int>(cfg.get_int("green.xi_points")),
                                         cfg.get_list("green.times"));
  sweep.oracle_dt_fraction = cfg.get_double("green.oracle_dt_fraction");
  const double tol = cfg.get_double("green.tolerance");
  prepare_run_dir(opt, rec);

  const GreenValidation v =
      validate_green(p, sweep, opt.propagator ? opt.propagator : ModePropagator(propagate_mode));
  std::string csv = "xi,t,gap\n";
  for (const auto& r : v.rows) csv += fmt17(r.xi) + "," + fmt17(r.t) + "," + fmt17(r.gap) + "\n";
  write_text(rec.dir / "series.csv", csv);

  const bool ok = v.max_gap < tol;
  Json j;
  j["run_id"] = rec.run_id;
  j["max_gap"] = v.max_gap;
  j["worst_xi"] = v.worst_xi;
  j["worst_t"] = v.worst_t;
  j["tolerance"] = tol;
  j["double_root_exercised"] = v.double_root_exercised;
  j["passed"] = ok;
  write_text(rec.dir / "fits.json", j.dump(2) + "\n");
  finish(rec, ok ? kExitOk : kExitAssertion, ok ? "completed" : "assertion_failed: max gap");
  return rec;
}

RunRecord cmd_linear_decay(const Config& cfg, const CommandOptions& opt) {
  RunRecord rec = new_record("linear-decay", cfg);
  const PhysParams p = physics_from(cfg);
  const InitialProfile ic =
      gaussian_profile(p, cfg.get_double("decay.u_amplitude"), cfg.get_double("decay.u_width"),
                       cfg.get_double("decay.sigma_amplitude"), cfg.get_double("decay.sigma_width"));
  DecayOptions d;
  d.t_lo = cfg.get_double("decay.t_lo");
  d.t_hi = cfg.get_double("decay.t_hi");
  d.samples = static_cast<int>(cfg.get_int("decay.samples"));
  const std::string rs = cfg.get_string("decay.ratio_start");
  if (rs != "auto") {
    try {
      d.ratio_start = std::stod(rs);
    } catch (const std::exception&) {
      throw ConfigError("[decay] ratio_start must be 'auto' or a number");
    }
    if (!(d.ratio_start > 0.0)) throw ConfigError("[decay] ratio_start must be > 0");
  }
  d.slope_tolerance = cfg.get_double("decay.slope_tolerance");
  d.ratio_bound = cfg.get_double("decay.ratio_bound");
  d.lower_bound = cfg.get_bool("decay.lower_bound");
  d.quad.rel_tol = cfg.get_double("decay.rel_tol");
  if (d.samples < 10) throw ConfigError("[decay] samples must be >= 10");
  prepare_run_dir(opt, rec);

  const LinearDecayResult res = linear_decay(p, ic, d);
  std::string csv = "t,value,k,branch\n";
  for (const auto& s : res.series)
    for (std::size_t i = 0; i < s.times.size(); ++i)
      csv += fmt17(s.times[i]) + "," + fmt17(s.values[i]) + "," + std::to_string(s.k) + "," +
             std::string(to_string(s.branch)) + "\n";
  write_text(rec.dir / "series.csv", csv);

  Json j;
  j["run_id"] = rec.run_id;
  j["window"] = {d.t_lo, d.t_hi};
  j["non_asymptotic"] = res.non_asymptotic;
  j["ratio_start"] = res.ratio_start;
  Json fits = Json::array();
  for (const auto& b : res.branches) {
    Json f;
    f["k"] = b.k;
    f["branch"] = std::string(to_string(b.branch));
    f["slope"] = b.fit.slope;
    f["stderr"] = b.fit.stderr_;
    f["window"] = {d.t_lo, d.t_hi};
    f["samples"] = b.fit.samples;
    f["expected"] = b.expected;
    f["slope_ok"] = b.slope_ok;
    if (d.lower_bound) {
      f["ratio_min"] = b.ratio_min;
      f["ratio_max"] = b.ratio_max;
    }
    f["ratio_ok"] = b.ratio_ok;
    fits.push_back(f);
  }
  j["fits"] = fits;
  j["passed"] = res.passed;
  write_text(rec.dir / "fits.json", j.dump(2) + "\n");
  finish(rec, res.passed ? kExitOk : kExitAssertion,
         res.passed ? "completed" : "assertion_failed: decay rates");
  return rec;
}

namespace {

double checked_multiple(const Config& cfg, const std::string& key, double dt) {
  const double v = cfg.get_double(key);
  if (!(v > 0.0)) throw ConfigError(key + " must be > 0");
  const double m = std::round(v / dt);
  if (m < 1.0 || std::abs(m * dt - v) > 1e-9 * v)
    throw ConfigError(key + " must be a positive integer multiple of solver.dt");
  return v;
}

SummaryLimits limits_from(const Config& cfg) {
  SummaryLimits l;
  l.h3_growth_bound = cfg.get_double("monitor.h3_growth_bound");
  l.monotone_tol = cfg.get_double("monitor.monotone_tol");
  l.ratio_after = cfg.get_double("monitor.ratio_after");
  l.balance_tolerance = cfg.get_double("monitor.balance_tolerance");
  return l;
}

/// Exit code of a finished run: CFL failure on the very first step is a
/// configuration problem, anything later is a blow-up.
int run_exit_code(const RunOutcome& o, double t0) {
  if (o.status == RunStatus::CflViolation && o.last_good_time == t0) return kExitConfig;
  if (o.status != RunStatus::Completed) return kExitBlowUp;
  return kExitOk;
}

Json summary_json(const SimulationSummary& s) {
  Json j;
  j["initial_h3"] = s.initial_h3;
  j["sup_h3"] = s.sup_h3;
  j["max_increase_H"] = {s.max_increase[0], s.max_increase[1], s.max_increase[2]};
  j["ratio_max_increase"] = s.ratio_max_increase;
  j["max_balance_residual"] = s.max_balance_residual;
  j["h3_bounded"] = s.h3_bounded;
  j["monotone"] = s.monotone;
  j["ratio_monotone"] = s.ratio_monotone;
  j["balance_ok"] = s.balance_ok;
  j["sandwich_ok"] = s.sandwich_ok;
  return j;
}

}  // namespace

RunRecord cmd_simulate(const Config& cfg, const CommandOptions& opt) {
  RunRecord rec = new_record("simulate", cfg);
  const StepConfig sc = step_config_from(cfg);
  const EtaCoefficients etas = etas_from(cfg);
  SimState s0 = initial_state_from(cfg);
  try {
    etas.validate(s0.params);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("[monitor] ") + e.what());
  }
  const double horizon = cfg.get_double("solver.T");
  if (!(horizon > 0.0)) throw ConfigError("solver.T must be > 0");
  const double sample_every = checked_multiple(cfg, "solver.sample_every", sc.dt);
  const double balance_every = checked_multiple(cfg, "solver.balance_every", sc.dt);
  const double ck = cfg.get_double("solver.checkpoint_every");
  if (ck < 0.0) throw ConfigError("solver.checkpoint_every must be >= 0");
  if (ck > 0.0) checked_multiple(cfg, "solver.checkpoint_every", sample_every);
  prepare_run_dir(opt, rec);
  fs::create_directories(rec.dir / "checkpoints");
  const std::string hash = fnv1a_hex(rec.config_echo);

  // Run in checkpoint-sized chunks; each chunk's first sample repeats the
  // previous chunk's last one and is dropped when stitching.
  const double t0 = s0.t;
  const double chunk = ck > 0.0 ? ck : horizon;
  RunOutcome total{.samples = {}, .balance = {}, .final_state = s0,
                   .status = RunStatus::Completed, .abort_reason = {}, .last_good_time = t0};
  double done = 0.0;
  int index = 0;
  while (done < horizon - 1e-9 * horizon) {
    const double len = std::min(chunk, horizon - done);
    RunOutcome part = run(total.final_state, sc, len, std::min(sample_every, len), etas, balance_every);
    const std::size_t skip = total.samples.empty() ? 0 : 1;
    total.samples.insert(total.samples.end(), part.samples.begin() + skip, part.samples.end());
    const std::size_t bskip = total.balance.empty() ? 0 : 1;
    total.balance.insert(total.balance.end(), part.balance.begin() + bskip, part.balance.end());
    total.final_state = part.final_state;
    total.status = part.status;
    total.abort_reason = part.abort_reason;
    total.last_good_time = part.last_good_time;
    if (part.status != RunStatus::Completed) break;
    done += len;
    ++index;
    if (ck > 0.0 && done < horizon - 1e-9 * horizon) {
      char name[32];
      std::snprintf(name, sizeof name, "step_%04d.bin", index);
      write_checkpoint(rec.dir / "checkpoints" / name, total.final_state, hash);
    }
  }
  if (total.balance.size() >= 3) {
    const std::vector<double> res = balance_residual_series(total.balance);
    const auto ratio = static_cast<std::size_t>(std::llround(sample_every / balance_every));
    for (std::size_t i = 0; i < total.samples.size(); ++i)
      if (i * ratio < res.size()) total.samples[i].report.balance_residual = res[i * ratio];
  }
  write_text(rec.dir / "series.csv", series_csv(total.samples));
  write_checkpoint(rec.dir / "checkpoints" / "final.bin", total.final_state, hash);

  const SimulationSummary sum = summarize(total, s0.params, limits_from(cfg));
  Json j;
  j["run_id"] = rec.run_id;
  j["status"] = status_name(total.status);
  if (!total.abort_reason.empty()) j["abort_reason"] = total.abort_reason;
  j["last_good_time"] = total.last_good_time;
  j["summary"] = summary_json(sum);
  write_text(rec.dir / "summary.json", j.dump(2) + "\n");

  const int code = run_exit_code(total, t0);
  if (code != kExitOk) {
    finish(rec, code, status_name(total.status) + ": " + total.abort_reason);
  } else if (!(sum.h3_bounded && sum.monotone && sum.ratio_monotone && sum.balance_ok)) {
    finish(rec, kExitAssertion, "assertion_failed: see summary.json");
  } else {
    finish(rec, kExitOk, "completed");
  }
  return rec;
}

RunRecord cmd_sweep_mu(const Config& cfg, const CommandOptions& opt) {
  RunRecord rec = new_record("sweep-mu", cfg);
  const StepConfig sc = step_config_from(cfg);
  const EtaCoefficients etas = etas_from(cfg);
  const SimState s0 = initial_state_from(cfg);
  const double horizon = cfg.get_double("sweep.T");
  if (!(horizon > 0.0)) throw ConfigError("sweep.T must be > 0");
  const double sample_every = checked_multiple(cfg, "solver.sample_every", sc.dt);
  const std::vector<double> mus = cfg.get_list("sweep.mus");
  for (std::size_t i = 0; i < mus.size(); ++i) {
    if (mus[i] < 0.0) throw ConfigError("[sweep] mus must be >= 0");
    if (i > 0 && !(mus[i] < mus[i - 1])) throw ConfigError("[sweep] mus must be strictly decreasing");
  }
  prepare_run_dir(opt, rec);

  std::vector<RunOutcome> runs;
  const MuSweepResult r = sweep_mu(s0, mus, sc, horizon, sample_every, etas,
                                   cfg.get_double("sweep.spread_tolerance"), opt.threads, &runs);
  int code = kExitOk;
  Json members = Json::array();
  for (std::size_t i = 0; i < mus.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "mu_%02zu", i);
    const fs::path dir = rec.dir / name;
    fs::create_directories(dir);
    write_text(dir / "series.csv", series_csv(runs[i].samples));
    write_text(dir / "status", status_name(runs[i].status) + "\n");
    if (run_exit_code(runs[i], s0.t) != kExitOk) code = kExitBlowUp;
    Json m;
    m["mu"] = mus[i];
    m["dir"] = name;
    m["status"] = status_name(runs[i].status);
    m["sup_h3"] = r.sup_h3[i];
    m["dissipation"] = r.dissipation[i];
    m["mu_dissipation"] = r.mu_dissipation[i];
    members.push_back(m);
  }
  Json j;
  j["run_id"] = rec.run_id;
  j["members"] = members;
  j["gaps"] = r.gaps;
  j["spread"] = r.spread;
  j["spread_ok"] = r.spread_ok;
  j["gaps_decreasing"] = r.gaps_decreasing;
  write_text(rec.dir / "sweep.json", j.dump(2) + "\n");
  write_text(rec.dir / "fits.json", j.dump(2) + "\n");

  if (code != kExitOk) {
    finish(rec, code, "blow_up: a sweep member aborted");
  } else if (!(r.spread_ok && r.gaps_decreasing)) {
    finish(rec, kExitAssertion, "assertion_failed: see sweep.json");
  } else {
    finish(rec, kExitOk, "completed");
  }
  return rec;
}

RunRecord cmd_green_table(const Config& cfg, const CommandOptions& opt) {
  RunRecord rec = new_record("green-table", cfg);
  const PhysParams p = physics_from(cfg);
  const GreenSweep sweep = default_green_sweep(
      p, static_cast<int>(cfg.get_int("green.xi_points")), cfg.get_list("green.times"));
  prepare_run_dir(opt, rec);
  std::string csv = "xi,t,G1,G2,G3,lambda_plus_re,lambda_plus_im,lambda_minus_re,lambda_minus_im\n";
  for (double xi : sweep.xis) {
    for (double t : sweep.times) {
      const GreenEval g = green_eval(p, xi, t);
      csv += fmt17(xi) + "," + fmt17(t) + "," + fmt17(g.G1) + "," + fmt17(g.G2) + "," +
             fmt17(g.G3) + "," + fmt17(g.lambda_plus.real()) + "," +
             fmt17(g.lambda_plus.imag()) + "," + fmt17(g.lambda_minus.real()) + "," +
             fmt17(g.lambda_minus.imag()) + "\n";
    }
  }
  write_text(rec.dir / "series.csv", csv);
  finish(rec, kExitOk, "completed");
  return rec;
}

}  // namespace oldroyd
