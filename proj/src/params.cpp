#include "oldroyd/params.hpp"

#include <cmath>
#include <string>

#include "oldroyd/errors.hpp"

namespace oldroyd {

void PhysParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(alpha) || !positive(beta) || !positive(K))
    throw InvalidInput("alpha, beta and K must be finite and > 0");
  if (!std::isfinite(mu) || mu < 0.0) throw InvalidInput("mu must be finite and >= 0");
  const double xc = critical_wavenumber();
  if (!std::isfinite(xc) || xc <= 0.0)
    throw InvalidInput("critical wavenumber beta/sqrt(2 alpha K) is not finite");
}

double PhysParams::critical_wavenumber() const { return beta / std::sqrt(2.0 * alpha * K); }

}  // namespace oldroyd
