#pragma once

namespace oldroyd {

/// Physical constants of the Oldroyd-B system with stress diffusivity mu.
///
/// alpha couples the stretching source alpha*D(u), beta is the stress damping
/// rate, K scales div(tau) in the momentum equation. mu = 0 is the
/// non-diffusive model; mu > 0 the regularized approximation.
struct PhysParams {
  double alpha = 1.0;
  double beta = 1.0;
  double K = 1.0;
  double mu = 0.0;

  /// Throws InvalidInput unless alpha, beta, K > 0 and mu >= 0 (all finite).
  void validate() const;

  /// beta / sqrt(2 alpha K): real/complex transition of the mode eigenvalues.
  double critical_wavenumber() const;
};

}  // namespace oldroyd
