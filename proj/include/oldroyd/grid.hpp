#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace oldroyd {

/// Square periodic grid of n x n points on a torus of side L.
///
/// Modes are stored row-major: index = j * n + k where j is the x-frequency
/// slot and k the y-frequency slot. Slot i carries the signed integer
/// frequency in (-n/2, n/2], i.e. i for i <= n/2 and i - n otherwise.
/// Physical samples use the same layout with x = j L / n, y = k L / n.
class Grid {
 public:
  Grid(int n, double length);

  int n() const { return n_; }
  double length() const { return length_; }
  /// Fundamental wavenumber 2 pi / L.
  double k0() const { return k0_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

  int signed_freq(int slot) const { return slot <= n_ / 2 ? slot : slot - n_; }
  std::size_t index(int j, int k) const {
    return static_cast<std::size_t>(j) * n_ + static_cast<std::size_t>(k);
  }
  /// Index of the mode at -xi.
  std::size_t conjugate_index(std::size_t idx) const;
  /// True if either frequency component sits on the self-conjugate n/2 line.
  bool on_nyquist(std::size_t idx) const;

  const std::vector<double>& kx() const { return tables_->kx; }
  const std::vector<double>& ky() const { return tables_->ky; }
  const std::vector<double>& kmag() const { return tables_->kmag; }
  const std::vector<double>& ksq() const { return tables_->ksq; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n_ == b.n_ && a.length_ == b.length_;
  }

 private:
  struct Tables {
    std::vector<double> kx, ky, kmag, ksq;
  };

  int n_;
  double length_;
  double k0_;
  std::shared_ptr<const Tables> tables_;
};

}  // namespace oldroyd
