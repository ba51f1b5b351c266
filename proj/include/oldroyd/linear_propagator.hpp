#pragma once

#include <array>
#include <complex>
#include <span>
#include <utility>

#include "oldroyd/params.hpp"

namespace oldroyd {

/// One Fourier mode of the linearized (u, sigma) system.
struct ModeState {
  std::array<std::complex<double>, 2> u_hat{};
  std::array<std::complex<double>, 2> sigma_hat{};
  double xi_mag = 0.0;
};

/// Derived constants of the per-mode linear problem.
///
///   R     = beta / (2 sqrt(alpha K))     low-frequency radius
///   theta = alpha K / (2 beta)           upper-bound Gaussian rate
///   eta   = alpha K / beta               lower-bound Gaussian rate
///   t1    = sqrt(2) ln 2 / beta          lower-bound onset time
///   xi_c  = beta / sqrt(2 alpha K)       critical wavenumber
struct SpectralConstants {
  double R;
  double theta;
  double eta;
  double t1;
  double xi_c;
};

SpectralConstants constants(const PhysParams& p);

struct GreenEval {
  double G1;
  double G2;
  double G3;
  std::complex<double> lambda_plus;
  std::complex<double> lambda_minus;
};

/// Roots of lambda^2 + b lambda + (alpha K / 2) xi^2 = 0 with b = beta + mu xi^2.
std::pair<std::complex<double>, std::complex<double>> eigenvalues(const PhysParams& p,
                                                                  double xi_mag);

/// Green functions G1, G2, G3 at (|xi|, t).
///
/// Evaluated without complex arithmetic: the overdamped branch uses
/// exp(lambda+ t) times expm1-based factors, the oscillatory branch the
/// damped sin/cos form, and |lambda+ - lambda-| < 1e-6 b switches to the
/// double-root limit.
GreenEval green_eval(const PhysParams& p, double xi_mag, double t);

/// Exact evolution of one mode:
///   u(t)     = G3 u0 + K |xi| G1 sigma0
///   sigma(t) = -(alpha/2) |xi| G1 u0 + G2 sigma0
ModeState propagate_mode(const PhysParams& p, const ModeState& m, double t);

/// Largest step the RK4 oracle accepts: 0.01 / max(beta, sqrt(alpha K) xi, mu xi^2).
double oracle_max_dt(const PhysParams& p, double xi_mag);

/// Classical RK4 integration of the 2x2 mode system up to time t with steps
/// no larger than dt. Refuses dt > oracle_max_dt().
ModeState mode_ode_oracle(const PhysParams& p, const ModeState& m, double t, double dt);

/// Empirical constants C for the Green-function bounds on |xi| <= R.
struct BoundWitness {
  /// max of |G1|, |G3| / exp(-theta xi^2 t) over the samples.
  double upper_g13;
  /// max of |G2| / (xi^2 exp(-theta xi^2 t) + exp(-beta t / 2)).
  double upper_g2;
  /// max of exp(-eta xi^2 t) / |G1| and / |G3| over samples with t >= t1.
  double lower_g13;
};

BoundWitness fit_bound_constants(const PhysParams& p, std::span<const double> xis,
                                 std::span<const double> times);

}  // namespace oldroyd
