#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "oldroyd/grid.hpp"

namespace oldroyd {

using Complex = std::complex<double>;

/// Fourier-series coefficients of a real periodic scalar, one per grid mode.
///
/// Coefficients are mean-normalized: f(x) = sum_xi c(xi) exp(i xi.x), so the
/// constant field 1 has c(0) = 1 and cos(2 pi x / L) has two modes of 1/2.
using Spectrum = std::vector<Complex>;

/// Velocity-like field (u1, u2) in spectral form.
struct SpectralVectorField {
  Grid grid;
  std::array<Spectrum, 2> comp;

  explicit SpectralVectorField(const Grid& g)
      : grid(g), comp{Spectrum(g.size()), Spectrum(g.size())} {}
};

/// Symmetric 2x2 tensor field stored as (t11, t12, t22); t21 = t12.
struct SymmetricTensorField {
  Grid grid;
  std::array<Spectrum, 3> comp;

  explicit SymmetricTensorField(const Grid& g)
      : grid(g), comp{Spectrum(g.size()), Spectrum(g.size()), Spectrum(g.size())} {}

  /// Multiplicity of a stored component in the Frobenius norm (2 for t12).
  static constexpr std::array<double, 3> kWeight{1.0, 2.0, 1.0};
};

/// Largest |c(xi) - conj(c(-xi))| over all modes.
double hermitian_defect(std::span<const Complex> f, const Grid& g);
/// Replace c(xi) by (c(xi) + conj(c(-xi))) / 2.
void hermitian_symmetrize(std::span<Complex> f, const Grid& g);
void hermitian_symmetrize(SpectralVectorField& v);
void hermitian_symmetrize(SymmetricTensorField& t);

/// max over modes of |xi . v(xi)| / |v(xi)| (modes with |v| == 0 skipped).
double divergence_defect(const SpectralVectorField& v);
/// True if |xi . v(xi)| <= tol * |v(xi)| at every mode.
bool is_divergence_free(const SpectralVectorField& v, double tol = 1e-12);

void require_shape(std::span<const Complex> f, const Grid& g);

}  // namespace oldroyd
