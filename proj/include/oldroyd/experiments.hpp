#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "oldroyd/config.hpp"
#include "oldroyd/decay_lab.hpp"
#include "oldroyd/linear_propagator.hpp"
#include "oldroyd/nonlinear_solver.hpp"

namespace oldroyd {

/// Process exit codes of the experiment commands.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitAssertion = 2,
  kExitBlowUp = 3,
};

// ---- Green-function validation -------------------------------------------

struct GreenSweep {
  /// xi values: xi_points uniform on [0, 2R] plus xi_c.
  std::vector<double> xis;
  std::vector<double> times;
  /// Oracle step as a fraction of oracle_max_dt().
  double oracle_dt_fraction = 0.1;
};

GreenSweep default_green_sweep(const PhysParams& p, int xi_points, std::vector<double> times);

struct GreenGap {
  double xi;
  double t;
  double gap;  // ||closed form - oracle|| / ||closed form||
};

struct GreenValidation {
  std::vector<GreenGap> rows;
  double max_gap = 0.0;
  double worst_xi = 0.0;
  double worst_t = 0.0;
  /// Some sampled xi fell in the double-root regime.
  bool double_root_exercised = false;
};

using ModePropagator = std::function<ModeState(const PhysParams&, const ModeState&, double)>;

/// Relative gap between prop and the RK4 oracle on a fixed generic mode state.
GreenValidation validate_green(const PhysParams& p, const GreenSweep& sweep,
                               const ModePropagator& prop = propagate_mode);

// ---- Linear decay ----------------------------------------------------------

struct DecayOptions {
  double t_lo = 100.0;
  double t_hi = 1e4;
  int samples = 41;
  /// Start of the lower-bound window; <= 0 selects max(t1, 100).
  double ratio_start = 0.0;
  double slope_tolerance = 0.05;
  double ratio_bound = 10.0;
  bool lower_bound = true;
  QuadratureOptions quad{};
};

struct BranchResult {
  int k;
  Branch branch;
  DecayFit fit;
  double expected;
  double ratio_min;
  double ratio_max;
  bool slope_ok;
  bool ratio_ok;
};

struct LinearDecayResult {
  std::vector<DecaySeries> series;
  std::vector<BranchResult> branches;
  double ratio_start = 0.0;
  /// The fit window begins before t = 100, where the rates are not yet asymptotic.
  bool non_asymptotic = false;
  bool passed = false;
};

/// Series, slopes and lower-bound ratios for k = 0..3 and both branches.
/// Lower-bound mode is refused (ConfigError) for data with zero mean.
LinearDecayResult linear_decay(const PhysParams& p, const InitialProfile& ic,
                               const DecayOptions& opt);

// ---- Nonlinear runs --------------------------------------------------------

struct SimulationSummary {
  double initial_h3 = 0.0;
  double sup_h3 = 0.0;
  /// Largest increase H(t_{i+1}) - H(t_i), i = 1..3.
  std::array<double, 3> max_increase{};
  /// Largest increase of ||tau|| / ||u|| after ratio_after.
  double ratio_max_increase = 0.0;
  double max_balance_residual = 0.0;
  bool sandwich_ok = true;
  bool h3_bounded = false;
  bool monotone = false;
  bool ratio_monotone = false;
  bool balance_ok = false;
};

struct SummaryLimits {
  double h3_growth_bound = 2.0;
  double monotone_tol = 1e-10;
  double ratio_after = 5.0;
  double balance_tolerance = 1e-6;
};

SimulationSummary summarize(const RunOutcome& run, const PhysParams& p,
                            const SummaryLimits& lim);

struct MuSweepResult {
  std::vector<double> mus;
  std::vector<double> sup_h3;
  /// int_0^T ||grad u||_{H2}^2 + ||tau||_{H3}^2 dt (trapezoid on samples).
  std::vector<double> dissipation;
  /// mu int_0^T ||grad tau||_{H3}^2 dt.
  std::vector<double> mu_dissipation;
  /// ||u^{mu_i}(T) - u^{mu_{i+1}}(T)||_{L2} for consecutive mus.
  std::vector<double> gaps;
  std::vector<RunStatus> status;
  double spread = 0.0;
  bool spread_ok = false;
  bool gaps_decreasing = false;
};

/// Runs the same initial state for each mu (strictly decreasing, >= 0) (in parallel with up to threads
/// jobs). Results do not depend on the thread count.
MuSweepResult sweep_mu(const SimState& init, const std::vector<double>& mus,
                       const StepConfig& cfg, double horizon, double sample_every,
                       const EtaCoefficients& etas, double spread_tolerance, int threads,
                       std::vector<RunOutcome>* runs = nullptr);

// ---- Commands --------------------------------------------------------------

struct RunRecord {
  std::string run_id;
  std::string config_echo;
  std::filesystem::path dir;
  std::string status;
  int exit_code = kExitOk;
};

struct CommandOptions {
  std::filesystem::path out_root = "runs";
  int threads = 1;
  /// Optional override for validate-green (fixtures).
  ModePropagator propagator;
};

/// Run id: command name plus the FNV-1a hash of the resolved config.
std::string make_run_id(const std::string& command, const Config& cfg);

PhysParams physics_from(const Config& cfg);
StepConfig step_config_from(const Config& cfg);
EtaCoefficients etas_from(const Config& cfg);
SimState initial_state_from(const Config& cfg);

RunRecord cmd_validate_green(const Config& cfg, const CommandOptions& opt);
RunRecord cmd_linear_decay(const Config& cfg, const CommandOptions& opt);
RunRecord cmd_simulate(const Config& cfg, const CommandOptions& opt);
RunRecord cmd_sweep_mu(const Config& cfg, const CommandOptions& opt);
/// (xi, t, G1, G2, G3, lambda+-) table over the green sweep.
RunRecord cmd_green_table(const Config& cfg, const CommandOptions& opt);

}  // namespace oldroyd
