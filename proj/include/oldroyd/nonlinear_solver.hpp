#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oldroyd/energy_monitors.hpp"
#include "oldroyd/state.hpp"
#include "oldroyd/transform.hpp"

namespace oldroyd {

struct StepConfig {
  double dt = 1e-3;
  /// Retained fraction of the Nyquist wavenumber per axis (2/3 rule).
  double dealias_fraction = 2.0 / 3.0;
  /// Integrating-factor Runge-Kutta order: 2 or 4.
  int scheme = 4;
  /// false drops both transport terms (linear cross-validation mode).
  bool nonlinear = true;

  void validate() const;
};

struct NonlinearTerms {
  SpectralVectorField F_u;     // -P(u . grad u)
  SymmetricTensorField F_tau;  // -(u . grad) tau
};

/// Pseudo-spectral integrator for
///   u_t + P(u . grad u) = K P div tau
///   tau_t + u . grad tau + (beta - mu Delta) tau = alpha D(u)
///
/// The stress damping/diffusion is integrated exactly through the factor
/// exp(-(beta + mu |xi|^2) dt); coupling and transport are explicit. Products
/// are formed on the 2/3-truncated state, so the retained modes are alias-free.
class Solver {
 public:
  Solver(const Grid& grid, const StepConfig& cfg);

  const StepConfig& config() const { return cfg_; }
  const std::vector<unsigned char>& retained() const { return retained_; }
  /// Largest |xi| among retained modes.
  double max_wavenumber() const { return kmax_; }

  NonlinearTerms nonlinear_terms(const SimState& s);
  /// One integrating-factor RK step. Throws CflViolation or BlowUp.
  SimState step(const SimState& s);
  /// Same as step() but writes into next (reusing its storage); next must
  /// not alias s.
  void step_into(const SimState& s, SimState& next);
  /// max_x |u(x)| of the current state.
  double max_velocity(const SimState& s);

  /// Zero all modes outside the retained set, project u, symmetrize.
  void enforce_invariants(SimState& s) const;

 private:
  struct Rhs {
    std::array<Spectrum, 2> u;
    std::array<Spectrum, 3> tau;
  };
  void rhs(const SimState& s, Rhs& out, bool check_cfl, bool coupling, bool transport);
  double velocity_sup(std::span<const double> u1, std::span<const double> u2) const;

  Grid grid_;
  StepConfig cfg_;
  Transform fft_;
  std::vector<unsigned char> retained_;
  double kmax_ = 0.0;
  std::array<std::vector<double>, 2> phys_u_;
  std::array<std::vector<double>, 3> phys_tau_;
  std::vector<double> prod_;
  Spectrum prod_hat_;
  std::array<Rhs, 4> k_;
  std::optional<SimState> stage_;
  std::array<double, 3> factor_key_{-1.0, -1.0, -1.0};
  std::vector<double> e_full_, e_half_;
};

/// Pressure from -Delta p = div(u . grad u) - K div div tau (diagnostic only).
Spectrum diagnostic_pressure(const SimState& s, Transform& fft);

struct Sample {
  double t;
  EnergyReport report;
};

enum class RunStatus { Completed, BlowUp, CflViolation };

struct RunOutcome {
  std::vector<Sample> samples;
  /// L2 balance quantities every balance_every (fine series behind the
  /// balance residual column of the samples).
  std::vector<BalanceSample> balance;
  SimState final_state;
  RunStatus status = RunStatus::Completed;
  std::string abort_reason;
  /// Time of the last state that passed all checks.
  double last_good_time = 0.0;
};

/// Advance s0 to horizon T, sampling monitors every sample_every and the
/// balance law every balance_every (0 means sample_every). All intervals must
/// be integer multiples of dt, and sample_every a multiple of balance_every.
/// Step failures end the run early; the partial series is returned with the
/// status set.
RunOutcome run(const SimState& s0, const StepConfig& c, double horizon, double sample_every,
               const EtaCoefficients& etas, double balance_every = 0.0);

/// Initial-data families.
struct RandomInit {
  std::uint64_t seed = 1;
  double h3_norm = 1e-2;
  /// Radial band of integer mode indices |(j, k)| in [band_lo, band_hi].
  double band_lo = 1.0;
  double band_hi = 16.0;
};

SimState random_state(const Grid& g, const PhysParams& p, const RandomInit& init,
                      double dealias_fraction);
/// u = A (sin(mx) cos(my), -cos(mx) sin(my)), tau11 = -tau22 = B cos(mx) cos(my),
/// tau12 = B sin(mx) sin(my), m = 2 pi mode / L.
SimState taylor_green_state(const Grid& g, const PhysParams& p, int mode, double u_amp,
                            double tau_amp);

/// ||(u, tau)||_{H3} of a state.
double h3_norm(const SimState& s);

/// Binary checkpoint: "OBCKPT01", uint64 n, f64 L, f64 t, then the spectra of
/// (u1, u2, tau11, tau12, tau22) as interleaved (re, im) f64 pairs, modes
/// row-major, all little-endian. A JSON sidecar <path>.json carries params,
/// time and the config hash.
void write_checkpoint(const std::filesystem::path& path, const SimState& s,
                      const std::string& config_hash);
SimState read_checkpoint(const std::filesystem::path& path);

}  // namespace oldroyd
