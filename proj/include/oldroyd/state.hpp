#pragma once

#include "oldroyd/fields.hpp"
#include "oldroyd/params.hpp"

namespace oldroyd {

/// Snapshot of the Oldroyd-B system on the torus.
///
/// u is kept divergence-free and tau Hermitian; the solver restores both after
/// every step. The pressure is eliminated by projection and never stored.
struct SimState {
  SpectralVectorField u;
  SymmetricTensorField tau;
  double t = 0.0;
  PhysParams params;

  SimState(const Grid& g, const PhysParams& p) : u(g), tau(g), params(p) {}
  const Grid& grid() const { return u.grid; }
};

}  // namespace oldroyd
