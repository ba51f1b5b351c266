#include "oldroyd/grid.hpp"

#include <cmath>
#include <numbers>

#include "oldroyd/errors.hpp"

namespace oldroyd {

Grid::Grid(int n, double length) : n_(n), length_(length) {
  if (n < 8 || n % 2 != 0) throw InvalidInput("grid size n must be even and >= 8");
  if (!std::isfinite(length) || length <= 0.0) throw InvalidInput("period length must be > 0");
  k0_ = 2.0 * std::numbers::pi / length;

  auto t = std::make_shared<Tables>();
  const std::size_t total = size();
  t->kx.resize(total);
  t->ky.resize(total);
  t->kmag.resize(total);
  t->ksq.resize(total);
  for (int j = 0; j < n; ++j) {
    const double fx = k0_ * signed_freq(j);
    for (int k = 0; k < n; ++k) {
      const double fy = k0_ * signed_freq(k);
      const std::size_t i = index(j, k);
      t->kx[i] = fx;
      t->ky[i] = fy;
      t->ksq[i] = fx * fx + fy * fy;
      t->kmag[i] = std::sqrt(t->ksq[i]);
    }
  }
  tables_ = std::move(t);
}

std::size_t Grid::conjugate_index(std::size_t idx) const {
  const int j = static_cast<int>(idx / n_);
  const int k = static_cast<int>(idx % n_);
  return index((n_ - j) % n_, (n_ - k) % n_);
}

bool Grid::on_nyquist(std::size_t idx) const {
  const int j = static_cast<int>(idx / n_);
  const int k = static_cast<int>(idx % n_);
  return j == n_ / 2 || k == n_ / 2;
}

}  // namespace oldroyd
