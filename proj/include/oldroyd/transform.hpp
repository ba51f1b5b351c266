#pragma once

#include <memory>
#include <span>
#include <vector>

#include "oldroyd/fields.hpp"

namespace oldroyd {

/// Real 2D discrete Fourier analysis/synthesis on a Grid (FFTW backend).
///
/// forward() returns mean-normalized coefficients on the full n x n mode
/// array (the redundant half is filled by conjugation, so the output is
/// Hermitian-symmetric to the last bit). inverse() reads only the
/// non-redundant half and therefore always returns a real field.
///
/// Instances own scratch buffers and are not safe for concurrent use; give
/// each thread its own. Plans use FFTW_ESTIMATE so results are reproducible.
class Transform {
 public:
  explicit Transform(const Grid& grid);
  ~Transform();
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;
  Transform(Transform&&) noexcept;
  Transform& operator=(Transform&&) noexcept;

  const Grid& grid() const { return grid_; }

  void forward(std::span<const double> phys, std::span<Complex> spec);
  void inverse(std::span<const Complex> spec, std::span<double> phys);

  Spectrum forward(std::span<const double> phys);
  std::vector<double> inverse(std::span<const Complex> spec);

 private:
  struct Plans;
  Grid grid_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace oldroyd
