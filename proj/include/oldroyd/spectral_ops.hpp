#pragma once

#include <span>
#include <utility>

#include "oldroyd/fields.hpp"

namespace oldroyd {

/// Pairwise (tree) summation; result is independent of thread count.
double pairwise_sum(std::span<const double> terms);

/// Leray projection I - xi xi^T / |xi|^2 applied mode-wise; xi = 0 passes through.
SpectralVectorField leray_project(const SpectralVectorField& v);
void leray_project_inplace(SpectralVectorField& v);

/// Multiply each coefficient by |xi|^s.
///
/// For s > 0 the mean mode becomes 0. For s < 0 the mean mode must already be
/// zero (|c(0)| <= 1e-12) and stays zero; otherwise ZeroModeSingularity.
Spectrum lambda_power(std::span<const Complex> f, const Grid& g, double s);

/// sigma = Lambda^{-1} P div tau, i.e.
/// sigma_j(xi) = i (delta_jk - xi_j xi_k / |xi|^2) (xi_l / |xi|) tau_lk(xi).
/// sigma(0) = 0 and modes on the Nyquist lines are set to zero (odd symbol).
SpectralVectorField sigma_from_tau(const SymmetricTensorField& tau);

/// Smooth radial cutoff phi0: 1 on |xi| <= R/2, 0 on |xi| >= R, with the
/// exponential-bump bridge psi(R - r) / (psi(R - r) + psi(r - R/2)),
/// psi(s) = exp(-1/s) for s > 0 and 0 otherwise.
class FrequencyCutoff {
 public:
  explicit FrequencyCutoff(double radius);
  double radius() const { return radius_; }
  double operator()(double r) const;

 private:
  double radius_;
};

/// (f^l, f^h) with f^l = phi0 f and f^h = f - f^l.
std::pair<Spectrum, Spectrum> freq_split(std::span<const Complex> f, const Grid& g,
                                         const FrequencyCutoff& cut);
std::pair<SpectralVectorField, SpectralVectorField> freq_split(const SpectralVectorField& v,
                                                               const FrequencyCutoff& cut);
/// High part with the squared weight (1 - phi0)^2 (the "tilde-h" variant).
SpectralVectorField squared_high_part(const SpectralVectorField& v, const FrequencyCutoff& cut);

/// Homogeneous norm ||grad^k f||_{L2} = (L^2 sum |xi|^{2k} |c|^2)^{1/2}, 0 <= k <= 4.
///
/// L^2 is the torus area: norms are true domain integrals, matching the
/// physical-space L2 norm (Parseval with constant 1).
double sobolev_norm(std::span<const Complex> f, const Grid& g, int k);
double sobolev_norm(const SpectralVectorField& v, int k);
double sobolev_norm(const SymmetricTensorField& t, int k);
/// Full H^k norm (sum of homogeneous pieces 0..k).
double sobolev_norm_full(std::span<const Complex> f, const Grid& g, int k);
double sobolev_norm_full(const SpectralVectorField& v, int k);
double sobolev_norm_full(const SymmetricTensorField& t, int k);

/// <Lambda^a v, Lambda^b w> summed over components (real L2 inner product).
double lambda_inner(const SpectralVectorField& v, int a, const SpectralVectorField& w, int b);

/// (L^2 / n^2 * sum f^2)^{1/2}.
double physical_l2_norm(std::span<const double> f, const Grid& g);

}  // namespace oldroyd
