#include "oldroyd/linear_propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oldroyd/errors.hpp"

namespace oldroyd {

SpectralConstants constants(const PhysParams& p) {
  p.validate();
  const double ak = p.alpha * p.K;
  return SpectralConstants{
      .R = p.beta / (2.0 * std::sqrt(ak)),
      .theta = ak / (2.0 * p.beta),
      .eta = ak / p.beta,
      .t1 = std::numbers::sqrt2 * std::numbers::ln2 / p.beta,
      .xi_c = p.beta / std::sqrt(2.0 * ak),
  };
}

namespace {

struct Roots {
  double b;        // effective damping beta + mu xi^2
  double disc;     // b^2 - 2 alpha K xi^2
  double lp, lm;   // real roots (overdamped branch)
  double omega;    // sqrt(-disc) / 2 (oscillatory branch)
};

Roots roots(const PhysParams& p, double xi) {
  Roots r{};
  const double xi2 = xi * xi;
  r.b = p.beta + p.mu * xi2;
  const double c = 2.0 * p.alpha * p.K * xi2;
  r.disc = r.b * r.b - c;
  if (r.disc >= 0.0) {
    const double s = std::sqrt(r.disc);
    // lambda+ = (-b + s)/2 written without cancellation.
    r.lp = -0.5 * c / (r.b + s);
    r.lm = -0.5 * (r.b + s);
  } else {
    r.omega = 0.5 * std::sqrt(-r.disc);
  }
  return r;
}

}  // namespace

std::pair<std::complex<double>, std::complex<double>> eigenvalues(const PhysParams& p,
                                                                  double xi_mag) {
  if (!(xi_mag >= 0.0)) throw InvalidInput("wavenumber magnitude must be >= 0");
  const Roots r = roots(p, xi_mag);
  if (r.disc >= 0.0) return {{r.lp, 0.0}, {r.lm, 0.0}};
  return {{-0.5 * r.b, r.omega}, {-0.5 * r.b, -r.omega}};
}

GreenEval green_eval(const PhysParams& p, double xi_mag, double t) {
  if (!(t >= 0.0)) throw InvalidInput("green_eval requires t >= 0");
  if (!(xi_mag >= 0.0)) throw InvalidInput("wavenumber magnitude must be >= 0");
  const Roots r = roots(p, xi_mag);
  GreenEval g{};
  const double gap = r.disc >= 0.0 ? std::sqrt(r.disc) : 2.0 * r.omega;

  if (gap < 1e-6 * r.b) {
    const double lam = -0.5 * r.b;
    const double e = std::exp(lam * t);
    g.G1 = t * e;
    g.G2 = (1.0 + lam * t) * e;
    g.G3 = (1.0 - lam * t) * e;
    if (r.disc >= 0.0) {
      g.lambda_plus = r.lp;
      g.lambda_minus = r.lm;
    } else {
      g.lambda_plus = {lam, r.omega};
      g.lambda_minus = {lam, -r.omega};
    }
    return g;
  }

  if (r.disc >= 0.0) {
    const double s = gap;
    if (t == 0.0) {
      g.G2 = g.G3 = 1.0;
      g.lambda_plus = r.lp;
      g.lambda_minus = r.lm;
      return g;
    }
    const double ep = std::exp(r.lp * t);
    // (1 - exp(-s t)) / s  ==  (e^{l+ t} - e^{l- t}) / (s e^{l+ t})
    const double q = -std::expm1(-s * t) / s;
    g.G1 = ep * q;
    // 1 + l- q cancels for large t; use (l+ - l- e^{-st}) / s instead.
    g.G2 = ep * (r.lp - r.lm * std::exp(-s * t)) / s;
    g.G3 = ep * (1.0 - r.lp * q);
    g.lambda_plus = r.lp;
    g.lambda_minus = r.lm;
  } else {
    const double e = std::exp(-0.5 * r.b * t);
    const double wt = r.omega * t;
    const double sw = std::sin(wt) / r.omega;
    const double cw = std::cos(wt);
    g.G1 = e * sw;
    g.G2 = e * (cw - 0.5 * r.b * sw);
    g.G3 = e * (cw + 0.5 * r.b * sw);
    g.lambda_plus = {-0.5 * r.b, r.omega};
    g.lambda_minus = {-0.5 * r.b, -r.omega};
  }
  return g;
}

ModeState propagate_mode(const PhysParams& p, const ModeState& m, double t) {
  const GreenEval g = green_eval(p, m.xi_mag, t);
  ModeState out;
  out.xi_mag = m.xi_mag;
  const double cu = p.K * m.xi_mag * g.G1;
  const double cs = -0.5 * p.alpha * m.xi_mag * g.G1;
  for (int j = 0; j < 2; ++j) {
    out.u_hat[j] = g.G3 * m.u_hat[j] + cu * m.sigma_hat[j];
    out.sigma_hat[j] = cs * m.u_hat[j] + g.G2 * m.sigma_hat[j];
  }
  return out;
}

double oracle_max_dt(const PhysParams& p, double xi_mag) {
  const double rate = std::max({p.beta, std::sqrt(p.alpha * p.K) * xi_mag, p.mu * xi_mag * xi_mag});
  return 0.01 / rate;
}

ModeState mode_ode_oracle(const PhysParams& p, const ModeState& m, double t, double dt) {
  if (!(t >= 0.0)) throw InvalidInput("oracle requires t >= 0");
  if (!(dt > 0.0) || dt > oracle_max_dt(p, m.xi_mag))
    throw InvalidInput("oracle step too large: dt must be <= 0.01/max(beta, sqrt(aK) xi, mu xi^2)");
  ModeState y = m;
  if (t == 0.0) return y;

  const auto steps = static_cast<long long>(std::ceil(t / dt));
  const double h = t / static_cast<double>(steps);
  const double xi = m.xi_mag;
  const double b = p.beta + p.mu * xi * xi;
  const double a_u = p.K * xi;
  const double a_s = 0.5 * p.alpha * xi;

  using C = std::complex<double>;
  for (int j = 0; j < 2; ++j) {
    C u = y.u_hat[j];
    C s = y.sigma_hat[j];
    auto fu = [&](C, C ss) { return a_u * ss; };
    auto fs = [&](C uu, C ss) { return -b * ss - a_s * uu; };
    for (long long n = 0; n < steps; ++n) {
      const C k1u = fu(u, s), k1s = fs(u, s);
      const C u2 = u + 0.5 * h * k1u, s2 = s + 0.5 * h * k1s;
      const C k2u = fu(u2, s2), k2s = fs(u2, s2);
      const C u3 = u + 0.5 * h * k2u, s3 = s + 0.5 * h * k2s;
      const C k3u = fu(u3, s3), k3s = fs(u3, s3);
      const C u4 = u + h * k3u, s4 = s + h * k3s;
      const C k4u = fu(u4, s4), k4s = fs(u4, s4);
      u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
      s += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
    }
    y.u_hat[j] = u;
    y.sigma_hat[j] = s;
  }
  return y;
}

BoundWitness fit_bound_constants(const PhysParams& p, std::span<const double> xis,
                                 std::span<const double> times) {
  const SpectralConstants sc = constants(p);
  BoundWitness w{0.0, 0.0, 0.0};
  for (double xi : xis) {
    if (xi > sc.R) throw InvalidInput("bound witnesses are defined for |xi| <= R");
    for (double t : times) {
      const GreenEval g = green_eval(p, xi, t);
      const double up = std::exp(-sc.theta * xi * xi * t);
      w.upper_g13 = std::max({w.upper_g13, std::abs(g.G1) / up, std::abs(g.G3) / up});
      const double up2 = xi * xi * up + std::exp(-0.5 * p.beta * t);
      w.upper_g2 = std::max(w.upper_g2, std::abs(g.G2) / up2);
      if (t >= sc.t1) {
        const double low = std::exp(-sc.eta * xi * xi * t);
        w.lower_g13 = std::max({w.lower_g13, low / std::abs(g.G1), low / std::abs(g.G3)});
      }
    }
  }
  return w;
}

}  // namespace oldroyd
