#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "oldroyd/params.hpp"

namespace oldroyd {

enum class Branch { U, Sigma };

std::string_view to_string(Branch b);

/// Radially symmetric initial data on R^2 (one vector component).
struct InitialProfile {
  std::function<std::complex<double>(double)> u_hat0;
  std::function<std::complex<double>(double)> sigma_hat0;
  /// |u_hat0(0)|, i.e. |integral of u0|.
  double c2 = 0.0;
  /// Radius, capped at R, on which |u_hat0| >= c2 / 2.
  double r_prime = 0.0;
  /// Beyond this radius both profiles are below 1e-30 of their peak.
  double support = 0.0;
};

/// u_hat0 = a_u exp(-w_u r^2), sigma_hat0 = a_s exp(-w_s r^2).
InitialProfile gaussian_profile(const PhysParams& p, double a_u, double w_u, double a_s,
                                double w_s);

enum class QuadratureRule { GK15, GK31 };

struct QuadratureOptions {
  double rel_tol = 1e-9;
  QuadratureRule rule = QuadratureRule::GK15;
  unsigned max_depth = 18;
};

/// (2 pi int_0^inf r^{2k+1} |b(r, t)|^2 dr)^{1/2} where b is the chosen branch
/// of propagate_mode applied to the profile. The radial range is cut at
/// 8 xi_c, at the profile support, and where exp(Re lambda+ t) < 1e-30.
/// Throws QuadratureError if the requested tolerance is not reached.
double linear_norm_quadrature(const PhysParams& p, const InitialProfile& ic, int k, Branch branch,
                              double t, const QuadratureOptions& opt = {});

struct DecaySeries {
  std::vector<double> times;
  std::vector<double> values;
  int k = 0;
  Branch branch = Branch::U;

  /// Throws InvalidInput unless times strictly increase and values are positive.
  void validate() const;
};

DecaySeries make_decay_series(const PhysParams& p, const InitialProfile& ic, int k, Branch branch,
                              std::span<const double> times, const QuadratureOptions& opt = {});

/// count points geometrically spaced on [lo, hi], endpoints included.
std::vector<double> log_spaced(double lo, double hi, int count);

struct DecayFit {
  double slope;
  double stderr_;
  int samples;
};

/// OLS of log v against log(1 + t) over samples with t in [t_lo, t_hi].
/// Refuses fewer than 10 samples in the window.
DecayFit fit_decay_exponent(const DecaySeries& s, double t_lo, double t_hi);

/// (min, max) of v(t) (1 + t)^{-exponent} over samples with t >= t1.
std::pair<double, double> lower_bound_ratio(const DecaySeries& s, double exponent, double t1);

/// Asymptotic exponents: -1/2 - k/2 for u, -1 - k/2 for sigma.
double expected_exponent(Branch b, int k);

}  // namespace oldroyd
