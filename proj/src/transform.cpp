#include "oldroyd/transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "oldroyd/errors.hpp"

namespace oldroyd {

namespace {
// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Transform::Plans {
  int n;
  int half;  // n/2 + 1
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  explicit Plans(int n_) : n(n_), half(n_ / 2 + 1) {
    const std::size_t nr = static_cast<std::size_t>(n) * n;
    const std::size_t nc = static_cast<std::size_t>(n) * half;
    real = fftw_alloc_real(nr);
    cplx = fftw_alloc_complex(nc);
    std::lock_guard lock(planner_mutex());
    r2c = fftw_plan_dft_r2c_2d(n, n, real, cplx, FFTW_ESTIMATE);
    c2r = fftw_plan_dft_c2r_2d(n, n, cplx, real, FFTW_ESTIMATE);
  }
  ~Plans() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(r2c);
      fftw_destroy_plan(c2r);
    }
    fftw_free(real);
    fftw_free(cplx);
  }
};

Transform::Transform(const Grid& grid) : grid_(grid), plans_(std::make_unique<Plans>(grid.n())) {}
Transform::~Transform() = default;
Transform::Transform(Transform&&) noexcept = default;
Transform& Transform::operator=(Transform&&) noexcept = default;

void Transform::forward(std::span<const double> phys, std::span<Complex> spec) {
  const std::size_t total = grid_.size();
  if (phys.size() != total || spec.size() != total)
    throw InvalidInput("transform input does not match grid dimensions");
  const int n = plans_->n;
  const int half = plans_->half;
  std::copy(phys.begin(), phys.end(), plans_->real);
  fftw_execute(plans_->r2c);

  const double scale = 1.0 / static_cast<double>(total);
  const fftw_complex* h = plans_->cplx;
  for (int j = 0; j < n; ++j) {
    const int jc = (n - j) % n;
    for (int k = 0; k < half; ++k) {
      const fftw_complex& c = h[j * half + k];
      spec[grid_.index(j, k)] = Complex(c[0] * scale, c[1] * scale);
    }
    for (int k = half; k < n; ++k) {
      const fftw_complex& c = h[jc * half + (n - k)];
      spec[grid_.index(j, k)] = Complex(c[0] * scale, -c[1] * scale);
    }
  }
}

void Transform::inverse(std::span<const Complex> spec, std::span<double> phys) {
  const std::size_t total = grid_.size();
  if (phys.size() != total || spec.size() != total)
    throw InvalidInput("transform input does not match grid dimensions");
  const int n = plans_->n;
  const int half = plans_->half;
  fftw_complex* h = plans_->cplx;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < half; ++k) {
      const Complex c = spec[grid_.index(j, k)];
      h[j * half + k][0] = c.real();
      h[j * half + k][1] = c.imag();
    }
  }
  fftw_execute(plans_->c2r);
  std::copy(plans_->real, plans_->real + total, phys.begin());
}

Spectrum Transform::forward(std::span<const double> phys) {
  Spectrum out(grid_.size());
  forward(phys, out);
  return out;
}

std::vector<double> Transform::inverse(std::span<const Complex> spec) {
  std::vector<double> out(grid_.size());
  inverse(spec, out);
  return out;
}

}  // namespace oldroyd
