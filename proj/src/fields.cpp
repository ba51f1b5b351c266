#include "oldroyd/fields.hpp"

#include <algorithm>
#include <cmath>

#include "oldroyd/errors.hpp"

namespace oldroyd {

void require_shape(std::span<const Complex> f, const Grid& g) {
  if (f.size() != g.size()) throw InvalidInput("spectrum size does not match grid");
}

double hermitian_defect(std::span<const Complex> f, const Grid& g) {
  require_shape(f, g);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    worst = std::max(worst, std::abs(f[i] - std::conj(f[g.conjugate_index(i)])));
  return worst;
}

void hermitian_symmetrize(std::span<Complex> f, const Grid& g) {
  require_shape(f, g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::size_t c = g.conjugate_index(i);
    if (c < i) continue;
    const Complex avg = 0.5 * (f[i] + std::conj(f[c]));
    f[i] = avg;
    f[c] = std::conj(avg);
  }
}

void hermitian_symmetrize(SpectralVectorField& v) {
  for (auto& c : v.comp) hermitian_symmetrize(c, v.grid);
}

void hermitian_symmetrize(SymmetricTensorField& t) {
  for (auto& c : t.comp) hermitian_symmetrize(c, t.grid);
}

double divergence_defect(const SpectralVectorField& v) {
  const auto& kx = v.grid.kx();
  const auto& ky = v.grid.ky();
  double worst = 0.0;
  for (std::size_t i = 0; i < v.grid.size(); ++i) {
    const double mag = std::hypot(std::abs(v.comp[0][i]), std::abs(v.comp[1][i]));
    if (mag == 0.0) continue;
    const double div = std::abs(kx[i] * v.comp[0][i] + ky[i] * v.comp[1][i]);
    worst = std::max(worst, div / mag);
  }
  return worst;
}

bool is_divergence_free(const SpectralVectorField& v, double tol) {
  return divergence_defect(v) <= tol;
}

}  // namespace oldroyd
