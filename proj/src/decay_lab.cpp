#include "oldroyd/decay_lab.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "oldroyd/errors.hpp"
#include "oldroyd/linear_propagator.hpp"

namespace oldroyd {

std::string_view to_string(Branch b) { return b == Branch::U ? "u" : "sigma"; }

double expected_exponent(Branch b, int k) {
  return (b == Branch::U ? -0.5 : -1.0) - 0.5 * k;
}

InitialProfile gaussian_profile(const PhysParams& p, double a_u, double w_u, double a_s,
                                double w_s) {
  if (!(w_u > 0.0) || !(w_s > 0.0)) throw InvalidInput("Gaussian widths must be > 0");
  const SpectralConstants sc = constants(p);
  InitialProfile ic;
  ic.u_hat0 = [a_u, w_u](double r) { return std::complex<double>(a_u * std::exp(-w_u * r * r)); };
  ic.sigma_hat0 = [a_s, w_s](double r) {
    return std::complex<double>(a_s * std::exp(-w_s * r * r));
  };
  ic.c2 = std::abs(a_u);
  ic.r_prime = a_u != 0.0 ? std::min(std::sqrt(std::numbers::ln2 / w_u), sc.R) : 0.0;
  // exp(-w r^2) < 1e-30 beyond sqrt(30 ln 10 / w)
  const double depth = 30.0 * std::numbers::ln10;
  double support = 0.0;
  if (a_u != 0.0) support = std::max(support, std::sqrt(depth / w_u));
  if (a_s != 0.0) support = std::max(support, std::sqrt(depth / w_s));
  ic.support = support;
  return ic;
}

namespace {

template <unsigned Points, typename F>
double integrate_panel(F&& f, double a, double b, const QuadratureOptions& opt, double& err) {
  double e = 0.0;
  double l1 = 0.0;
  const double q = boost::math::quadrature::gauss_kronrod<double, Points>::integrate(
      f, a, b, opt.max_depth, opt.rel_tol, &e, &l1);
  err += e;
  return q;
}

double real_lambda_plus(const PhysParams& p, double r) {
  return eigenvalues(p, r).first.real();
}

}  // namespace

double linear_norm_quadrature(const PhysParams& p, const InitialProfile& ic, int k, Branch branch,
                              double t, const QuadratureOptions& opt) {
  if (k < 0 || k > 3) throw InvalidInput("derivative order k must be in 0..3");
  if (!(t >= 0.0)) throw InvalidInput("quadrature time must be >= 0");
  const SpectralConstants sc = constants(p);

  double r_max = std::min(8.0 * sc.xi_c, ic.support);
  if (r_max <= 0.0) return 0.0;

  // Cut where the damped envelope exp(Re lambda+ t) drops below 1e-30.
  const double floor_log = -30.0 * std::numbers::ln10;
  if (t > 0.0 && real_lambda_plus(p, r_max) * t < floor_log) {
    double lo = 0.0, hi = r_max;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * r_max; ++it) {
      const double mid = 0.5 * (lo + hi);
      (real_lambda_plus(p, mid) * t < floor_log ? hi : lo) = mid;
    }
    r_max = hi;
  }

  auto integrand = [&](double r) {
    ModeState m;
    m.xi_mag = r;
    m.u_hat = {ic.u_hat0(r), 0.0};
    m.sigma_hat = {ic.sigma_hat0(r), 0.0};
    const ModeState out = propagate_mode(p, m, t);
    const std::complex<double> b = branch == Branch::U ? out.u_hat[0] : out.sigma_hat[0];
    return std::pow(r, 2 * k + 1) * std::norm(b);
  };

  // Panels: geometric refinement toward r = 0 on the diffusive scale, plus xi_c.
  std::vector<double> edges{0.0};
  double first = std::min(r_max, 0.25 / std::sqrt(1.0 + sc.eta * t));
  for (double e = first; e < r_max; e *= 2.0) edges.push_back(e);
  edges.push_back(r_max);
  if (sc.xi_c < r_max) edges.push_back(sc.xi_c);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  double total = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (opt.rule == QuadratureRule::GK15)
      total += integrate_panel<15>(integrand, edges[i], edges[i + 1], opt, err);
    else
      total += integrate_panel<31>(integrand, edges[i], edges[i + 1], opt, err);
  }
  if (!std::isfinite(total)) throw QuadratureError("quadrature produced a non-finite value", err);
  if (total > 0.0 && err > opt.rel_tol * total)
    throw QuadratureError("quadrature did not converge: achieved relative error " +
                              std::to_string(err / total),
                          err / total);
  return std::sqrt(2.0 * std::numbers::pi * total);
}

void DecaySeries::validate() const {
  if (times.size() != values.size()) throw InvalidInput("series times/values length mismatch");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(values[i] > 0.0)) throw InvalidInput("decay series values must be positive");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw InvalidInput("decay series times must strictly increase");
  }
}

DecaySeries make_decay_series(const PhysParams& p, const InitialProfile& ic, int k, Branch branch,
                              std::span<const double> times, const QuadratureOptions& opt) {
  DecaySeries s;
  s.k = k;
  s.branch = branch;
  s.times.assign(times.begin(), times.end());
  s.values.reserve(times.size());
  for (double t : times) s.values.push_back(linear_norm_quadrature(p, ic, k, branch, t, opt));
  return s;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw InvalidInput("bad log-spaced range");
  std::vector<double> out(count);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

DecayFit fit_decay_exponent(const DecaySeries& s, double t_lo, double t_hi) {
  s.validate();
  std::vector<double> x, y;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    if (s.times[i] < t_lo || s.times[i] > t_hi) continue;
    x.push_back(std::log1p(s.times[i]));
    y.push_back(std::log(s.values[i]));
  }
  const int n = static_cast<int>(x.size());
  if (n < 10) throw InvalidInput("fit window holds fewer than 10 samples");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double icept = my - slope * mx;
  double ssr = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - (icept + slope * x[i]);
    ssr += r * r;
  }
  return DecayFit{slope, std::sqrt(ssr / (n - 2) / sxx), n};
}

std::pair<double, double> lower_bound_ratio(const DecaySeries& s, double exponent, double t1) {
  s.validate();
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    if (s.times[i] < t1) continue;
    const double r = s.values[i] * std::pow(1.0 + s.times[i], -exponent);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    any = true;
  }
  if (!any) throw InvalidInput("lower-bound window is empty");
  return {lo, hi};
}

}  // namespace oldroyd
