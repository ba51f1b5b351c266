#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "oldroyd/state.hpp"

namespace oldroyd {

/// Weights of the cross terms in the Lyapunov functionals.
///
/// Structural relations: eta2 = eta1 / 4, eta3 = eta2 / 4, eta1 <= 4 beta,
/// all positive; eta4 is independent.
struct EtaCoefficients {
  double eta1 = 0.01;
  double eta2 = 0.0025;
  double eta3 = 0.000625;
  double eta4 = 0.000625;

  /// eta2 = eta1/4, eta3 = eta2/4, eta4 = eta3.
  static EtaCoefficients from_eta1(double eta1);
  /// Throws InvalidInput if a constraint fails.
  void validate(const PhysParams& p) const;
};

struct SplittingDiagnostics {
  double g1;
  double g2;
  double lowfreq_mass;
  /// t >= 24/eta1 - 1, i.e. g1^2 <= 1.
  bool g1_onset;
  /// t >= 160/eta2 - 1, i.e. g2^2 <= 1.
  bool g2_onset;
};

struct EnergyReport {
  double t = 0.0;
  /// ||grad^k u||, k = 0..3.
  std::array<double, 4> u_norm{};
  /// ||grad^k tau||, k = 0..3 (Frobenius).
  std::array<double, 4> tau_norm{};
  /// H1 .. H5.
  std::array<double, 5> H{};
  /// <Lambda^k u, Lambda^{k-1} sigma> for k = 1, 2, 3, then <Lambda^3 u, Lambda^2 sigma^h>.
  std::array<double, 4> cross{};
  /// Normalized energy-balance residual; filled by the time-series driver.
  double balance_residual = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  double lowfreq_mass = 0.0;

  /// Extra pieces used by the sandwich checks and balance law.
  double grad_tau4 = 0.0;    // ||grad^4 tau||
  double u_high3 = 0.0;      // ||grad^3 u^h||
  double total_functional = 0.0;  // alpha||u||_{H3}^2 + K||tau||_{H3}^2 + sum eta_i cross_i

  /// ||(u, tau)||_{H3} = (||u||_{H3}^2 + ||tau||_{H3}^2)^{1/2}.
  double h3_norm() const;
};

/// Snapshot evaluation of norms, H1..H5, cross terms and splitting radii.
EnergyReport evaluate(const SimState& s, const EtaCoefficients& etas);

SplittingDiagnostics splitting_diagnostics(const SimState& s, const EtaCoefficients& etas);

struct SandwichCheck {
  bool total_ok;
  bool h5_ok;
};

/// Equivalence inequalities of the H3-level functional and of H5.
SandwichCheck check_sandwich(const EnergyReport& r, const PhysParams& p);

/// One sample of the L2 balance law.
struct BalanceSample {
  double t;
  double alpha_u2;       // alpha ||u||^2
  double K_tau2;         // K ||tau||^2
  double beta_K_tau2;    // beta K ||tau||^2
  double mu_K_gradtau2;  // mu K ||grad tau||^2
};

BalanceSample balance_sample(const EnergyReport& r, const PhysParams& p);
/// Same, computed directly from a state (three norms only).
BalanceSample balance_sample(const SimState& s);

/// Pointwise residual 1/2 dE/dt + beta K||tau||^2 + mu K||grad tau||^2 divided
/// by the initial energy E(0); centered differences inside, second-order
/// one-sided differences at the two ends. Requires >= 3 uniform samples.
std::vector<double> balance_residual_series(std::span<const BalanceSample> samples);

/// max |residual| over interior (centered) samples.
double balance_residual(std::span<const BalanceSample> samples);

/// CSV header matching to_csv_row().
std::string energy_csv_header();
std::string to_csv_row(const EnergyReport& r);

}  // namespace oldroyd
