// End-to-end acceptance run. One PASS/FAIL line per criterion; exit status is
// nonzero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "oldroyd/decay_lab.hpp"
#include "oldroyd/energy_monitors.hpp"
#include "oldroyd/experiments.hpp"
#include "oldroyd/linear_propagator.hpp"
#include "oldroyd/nonlinear_solver.hpp"
#include "oldroyd/spectral_ops.hpp"
#include "oldroyd/transform.hpp"

using namespace oldroyd;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_failures = 0;

void verdict(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- 1 ---------------------------------------------------------------------
void green_fidelity() {
  const auto t0 = Clock::now();
  const PhysParams sets[] = {{1, 1, 1, 0}, {2, 0.5, 1, 0}, {1, 1, 1, 0.01}};
  double worst = 0.0;
  std::string where;
  for (const PhysParams& p : sets) {
    const GreenSweep sweep = default_green_sweep(p, 65, {0.1, 1.0, 5.0, 10.0, 50.0});
    const GreenValidation v = validate_green(p, sweep);
    if (v.max_gap >= worst) {
      worst = v.max_gap;
      where = fmt("alpha=%g beta=%g K=%g mu=%g xi=%.4g t=%g", p.alpha, p.beta, p.K, p.mu,
                  v.worst_xi, v.worst_t);
    }
  }
  const double secs = seconds_since(t0);
  verdict(1, "Green-function fidelity", worst < 1e-8 && secs < 60.0,
          fmt("max gap %.3e at %s; %.1f s", worst, where.c_str(), secs));
}

// ---- 2, 3 ------------------------------------------------------------------
void linear_decay_checks() {
  const auto t0 = Clock::now();
  const PhysParams p;
  DecayOptions d;  // window [1e2, 1e4], ratio window from max(t1, 1e2)
  const LinearDecayResult r = linear_decay(p, gaussian_profile(p, 1.0, 1.0, 1.0, 1.0), d);
  const double secs = seconds_since(t0);

  bool slopes = secs < 300.0;
  double drift = 0.0;
  std::string fits;
  for (const BranchResult& b : r.branches) {
    slopes = slopes && b.slope_ok;
    drift = std::max(drift, std::abs(b.fit.slope - b.expected));
    fits += fmt(" %s%d=%.4f", std::string(to_string(b.branch)).c_str(), b.k, b.fit.slope);
  }
  verdict(2, "linear decay exponents", slopes,
          fmt("max |slope - expected| %.4f;%s; %.1f s", drift, fits.c_str(), secs));

  bool ratios = true;
  std::string spans;
  for (const BranchResult& b : r.branches) {
    if (b.branch != Branch::U) continue;
    const double span = b.ratio_max / b.ratio_min;
    ratios = ratios && span <= 10.0;
    spans += fmt(" k%d=%.3f", b.k, span);
  }
  verdict(3, "two-sided linear optimality", ratios,
          fmt("max/min over [%g, 1e4]:%s", r.ratio_start, spans.c_str()));
}

// ---- 4 ---------------------------------------------------------------------
std::vector<BalanceSample> every(const std::vector<BalanceSample>& s, std::size_t m) {
  std::vector<BalanceSample> out;
  for (std::size_t i = 0; i < s.size(); i += m) out.push_back(s[i]);
  return out;
}

void energy_balance() {
  const Grid g(128, kTwoPi * 64.0);
  bool ok = true;
  std::string detail;
  for (double mu : {0.0, 0.01}) {
    const PhysParams p{1.0, 1.0, 1.0, mu};
    RandomInit ri;  // seed 1, H3 norm 1e-2, band 1..16
    const SimState s0 = random_state(g, p, ri, 2.0 / 3.0);
    StepConfig c;
    c.dt = 1e-3;
    const RunOutcome o = run(s0, c, 1.0, 0.1, EtaCoefficients{}, c.dt);
    const double r1 = balance_residual(o.balance);
    const double r2 = balance_residual(every(o.balance, 2));
    const double r4 = balance_residual(every(o.balance, 4));
    const double q = r2 / r1;
    const bool this_ok = o.status == RunStatus::Completed && r1 < 1e-6 && q >= 3.2 && q <= 4.8;
    ok = ok && this_ok;
    detail += fmt("mu=%g: residual(dt) %.3e, residual(2dt) %.3e, residual(4dt) %.3e, ratio %.3f; ",
                  mu, r1, r2, r4, q);
  }
  verdict(4, "exact energy balance", ok, detail);
}

// ---- 5 ---------------------------------------------------------------------
void linear_cross_validation() {
  const Grid g(64, kTwoPi * 8.0);
  const PhysParams p{1.0, 1.0, 1.0, 0.01};
  RandomInit ri;
  ri.seed = 7;
  ri.h3_norm = 1.0;
  ri.band_hi = 12.0;
  const SimState s0 = random_state(g, p, ri, 2.0 / 3.0);
  StepConfig c;
  c.dt = 1e-3;
  c.nonlinear = false;
  Solver solver(g, c);

  const SpectralVectorField sig0 = sigma_from_tau(s0.tau);
  double scale = 0.0;
  for (int k = 0; k < 2; ++k)
    for (std::size_t i = 0; i < g.size(); ++i)
      scale = std::max({scale, std::abs(s0.u.comp[k][i]), std::abs(sig0.comp[k][i])});

  SimState cur = s0, next = s0;
  double worst = 0.0, worst_t = 0.0;
  for (int step = 1; step <= 10000; ++step) {
    solver.step_into(cur, next);
    std::swap(cur, next);
    if (step % 1000 != 0) continue;
    const double t = step * c.dt;
    const SpectralVectorField sig = sigma_from_tau(cur.tau);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!solver.retained()[i]) continue;
      ModeState m;
      m.u_hat = {s0.u.comp[0][i], s0.u.comp[1][i]};
      m.sigma_hat = {sig0.comp[0][i], sig0.comp[1][i]};
      m.xi_mag = g.kmag()[i];
      const ModeState e = propagate_mode(p, m, t);
      for (int k = 0; k < 2; ++k) {
        const double d = std::max(std::abs(e.u_hat[k] - cur.u.comp[k][i]),
                                  std::abs(e.sigma_hat[k] - sig.comp[k][i])) / scale;
        if (d > worst) {
          worst = d;
          worst_t = t;
        }
      }
    }
  }
  verdict(5, "linear cross-validation", worst < 1e-6,
          fmt("max mode error / max initial coefficient %.3e (at t=%g), n=64, dt=1e-3", worst,
              worst_t));
}

// ---- 6 ---------------------------------------------------------------------
void small_data_boundedness() {
  const auto t0 = Clock::now();
  const Grid g(128, kTwoPi * 64.0);
  const PhysParams p;
  RandomInit ri;  // seed 1, H3 norm 1e-2
  const SimState s0 = random_state(g, p, ri, 2.0 / 3.0);
  StepConfig c;
  c.dt = 1e-2;
  const RunOutcome o = run(s0, c, 50.0, 0.1, EtaCoefficients{}, c.dt);
  SummaryLimits lim;  // 2x bound, 1e-10 tolerance, ratio after t = 5
  const SimulationSummary s = summarize(o, p, lim);

  // Where does the tau/u ratio go up?
  double first_up = -1.0, last_up = -1.0;
  for (std::size_t i = 1; i < o.samples.size(); ++i) {
    const auto& a = o.samples[i - 1];
    const auto& b = o.samples[i];
    if (a.t < lim.ratio_after) continue;
    const double ra = a.report.tau_norm[0] / a.report.u_norm[0];
    const double rb = b.report.tau_norm[0] / b.report.u_norm[0];
    if (rb - ra > lim.monotone_tol) {
      if (first_up < 0.0) first_up = a.t;
      last_up = b.t;
    }
  }
  const bool ok = o.status == RunStatus::Completed && s.h3_bounded && s.monotone &&
                  s.ratio_monotone;
  std::string detail = fmt(
      "sup/initial H3 %.6f; max increase H1 %.2e H2 %.2e H3 %.2e; tau/u ratio max increase "
      "after t=5 %.3e",
      s.sup_h3 / s.initial_h3, s.max_increase[0], s.max_increase[1], s.max_increase[2],
      s.ratio_max_increase);
  if (first_up >= 0.0) detail += fmt(" (ratio rises on t in [%.1f, %.1f])", first_up, last_up);
  detail += fmt("; dt=1e-2; %.0f s", seconds_since(t0));
  verdict(6, "small-data boundedness", ok, detail);
}

// ---- 7 ---------------------------------------------------------------------
void mu_sweep() {
  const auto t0 = Clock::now();
  const Grid g(64, kTwoPi * 64.0);
  const PhysParams p;
  RandomInit ri;
  const SimState s0 = random_state(g, p, ri, 2.0 / 3.0);
  StepConfig c;
  c.dt = 1e-2;
  const int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const MuSweepResult r =
      sweep_mu(s0, {1e-1, 1e-2, 1e-3, 1e-4, 0.0}, c, 20.0, 0.1, EtaCoefficients{}, 0.1, threads);
  bool completed = true;
  for (RunStatus st : r.status) completed = completed && st == RunStatus::Completed;
  std::string gaps;
  for (double x : r.gaps) gaps += fmt(" %.3e", x);
  verdict(7, "uniform-in-mu bound", completed && r.spread_ok && r.gaps_decreasing,
          fmt("sup H3 spread %.3e; gaps%s; %.0f s", r.spread, gaps.c_str(), seconds_since(t0)));
}

// ---- 8 ---------------------------------------------------------------------
bool divergence_free(const SpectralVectorField& v) {
  const Grid& g = v.grid;
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    worst = std::max(worst, std::abs(g.kx()[i] * v.comp[0][i] + g.ky()[i] * v.comp[1][i]));
    scale = std::max(scale, g.kmag()[i] * std::max(std::abs(v.comp[0][i]), std::abs(v.comp[1][i])));
  }
  return worst <= 1e-14 * std::max(scale, 1e-300);
}

void structural_invariants() {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  int failures = 0;
  std::string first;
  auto fail = [&](int trial, const char* what) {
    if (failures++ == 0) first = fmt("trial %d: %s", trial, what);
  };
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 16 << (trial % 3);
    const Grid g(n, kTwoPi * (1.0 + 0.25 * trial));
    Transform fft(g);
    auto field = [&] {
      std::vector<double> f(g.size());
      for (double& x : f) x = normal(rng);
      return f;
    };

    // Parseval
    const std::vector<double> f = field();
    const Spectrum fh = fft.forward(f);
    const double phys = physical_l2_norm(f, g);
    if (std::abs(phys - sobolev_norm(fh, g, 0)) > 1e-12 * phys) fail(trial, "Parseval");

    // Leray idempotence, divergence, contraction
    SpectralVectorField v(g);
    v.comp[0] = fft.forward(field());
    v.comp[1] = fft.forward(field());
    const SpectralVectorField pv = leray_project(v);
    const SpectralVectorField ppv = leray_project(pv);
    // Exact up to rounding: a few ulps of the input mode |v(xi)|.
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double d = std::hypot(std::abs(ppv.comp[0][i] - pv.comp[0][i]),
                                  std::abs(ppv.comp[1][i] - pv.comp[1][i]));
      if (d > 1e-15 * std::hypot(std::abs(v.comp[0][i]), std::abs(v.comp[1][i]))) {
        fail(trial, "Leray idempotence");
        break;
      }
    }
    if (!divergence_free(pv)) fail(trial, "Leray divergence");
    if (sobolev_norm(pv, 0) > sobolev_norm(v, 0) * (1.0 + 1e-15)) fail(trial, "Leray contraction");

    // sigma mode-wise bound
    SymmetricTensorField tau(g);
    for (auto& comp : tau.comp) comp = fft.forward(field());
    const SpectralVectorField sig = sigma_from_tau(tau);
    if (!divergence_free(sig)) fail(trial, "sigma divergence");
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double sn = std::norm(sig.comp[0][i]) + std::norm(sig.comp[1][i]);
      double tn = 0.0;
      for (int c = 0; c < 3; ++c) tn += SymmetricTensorField::kWeight[c] * std::norm(tau.comp[c][i]);
      if (sn > tn * (1.0 + 1e-14)) {
        fail(trial, "sigma bound");
        break;
      }
    }

    // cutoff partition of unity
    const double radius = g.k0() * (2.0 + 0.1 * (trial % 40));
    const FrequencyCutoff cut(radius);
    const auto [lo, hi] = freq_split(fh, g, cut);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const bool bad = std::abs(lo[i] + hi[i] - fh[i]) > 1e-15 * std::max(1.0, std::abs(fh[i])) ||
                       (g.kmag()[i] >= radius && lo[i] != Complex(0.0)) ||
                       (g.kmag()[i] <= 0.5 * radius && hi[i] != Complex(0.0));
      if (bad) {
        fail(trial, "cutoff partition");
        break;
      }
    }

    // sandwich inequalities on a random small state
    RandomInit ri;
    ri.seed = 1000 + static_cast<std::uint64_t>(trial);
    ri.band_hi = n / 4.0;
    const PhysParams p{1.0 + 0.01 * trial, 1.0, 1.0, 0.0};
    const SimState s = random_state(g, p, ri, 2.0 / 3.0);
    const SandwichCheck sw = check_sandwich(evaluate(s, EtaCoefficients{}), p);
    if (!sw.total_ok || !sw.h5_ok) fail(trial, "sandwich");
  }
  verdict(8, "structural invariants", failures == 0,
          failures == 0 ? "100 random trials, 0 failures"
                        : fmt("%d failures; first %s", failures, first.c_str()));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  green_fidelity();
  linear_decay_checks();
  energy_balance();
  linear_cross_validation();
  small_data_boundedness();
  mu_sweep();
  structural_invariants();
  std::printf("%d of 8 criteria failed; total %.0f s\n", g_failures, seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}
