#include "oldroyd/energy_monitors.hpp"

#include <cmath>
#include <sstream>

#include "oldroyd/csv.hpp"
#include "oldroyd/errors.hpp"
#include "oldroyd/linear_propagator.hpp"
#include "oldroyd/spectral_ops.hpp"

namespace oldroyd {

EtaCoefficients EtaCoefficients::from_eta1(double eta1) {
  EtaCoefficients e;
  e.eta1 = eta1;
  e.eta2 = eta1 / 4.0;
  e.eta3 = e.eta2 / 4.0;
  e.eta4 = e.eta3;
  return e;
}

void EtaCoefficients::validate(const PhysParams& p) const {
  if (!(eta1 > 0.0 && eta2 > 0.0 && eta3 > 0.0 && eta4 > 0.0))
    throw InvalidInput("eta coefficients must be positive");
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::abs(b); };
  if (!close(eta2, eta1 / 4.0)) throw InvalidInput("eta2 must equal eta1 / 4");
  if (!close(eta3, eta2 / 4.0)) throw InvalidInput("eta3 must equal eta2 / 4");
  if (eta1 > 4.0 * p.beta) throw InvalidInput("eta1 must not exceed 4 beta");
}

double EnergyReport::h3_norm() const {
  double s = 0.0;
  for (int k = 0; k < 4; ++k) s += u_norm[k] * u_norm[k] + tau_norm[k] * tau_norm[k];
  return std::sqrt(s);
}

SplittingDiagnostics splitting_diagnostics(const SimState& s, const EtaCoefficients& etas) {
  SplittingDiagnostics d{};
  const double decay = 1.0 / (1.0 + s.t);
  d.g1 = std::sqrt(24.0 / etas.eta1 * decay);
  d.g2 = std::sqrt(160.0 / etas.eta2 * decay);
  d.g1_onset = s.t >= 24.0 / etas.eta1 - 1.0;
  d.g2_onset = s.t >= 160.0 / etas.eta2 - 1.0;

  const Grid& g = s.grid();
  const auto& km = g.kmag();
  std::vector<double> terms(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (km[i] <= d.g1) terms[i] = std::norm(s.u.comp[0][i]) + std::norm(s.u.comp[1][i]);
  d.lowfreq_mass = g.length() * g.length() * pairwise_sum(terms);
  return d;
}

EnergyReport evaluate(const SimState& s, const EtaCoefficients& etas) {
  const PhysParams& p = s.params;
  etas.validate(p);
  EnergyReport r;
  r.t = s.t;
  for (int k = 0; k < 4; ++k) {
    r.u_norm[k] = sobolev_norm(s.u, k);
    r.tau_norm[k] = sobolev_norm(s.tau, k);
  }
  r.grad_tau4 = sobolev_norm(s.tau, 4);

  const SpectralVectorField sigma = sigma_from_tau(s.tau);
  const FrequencyCutoff cut(constants(p).R);
  const SpectralVectorField u_high = freq_split(s.u, cut).second;
  const SpectralVectorField sigma_high = freq_split(sigma, cut).second;

  for (int k = 1; k <= 3; ++k) r.cross[k - 1] = lambda_inner(s.u, k, sigma, k - 1);
  r.cross[3] = lambda_inner(s.u, 3, sigma_high, 2);
  r.u_high3 = sobolev_norm(u_high, 3);

  auto sq = [](double v) { return v * v; };
  const auto& u = r.u_norm;
  const auto& t = r.tau_norm;
  const double a = p.alpha, K = p.K;
  r.H[0] = a * (sq(u[0]) + sq(u[1])) + K * (sq(t[0]) + sq(t[1])) + etas.eta1 * r.cross[0];
  r.H[1] = a * (sq(u[1]) + sq(u[2])) + K * (sq(t[1]) + sq(t[2])) + etas.eta2 * r.cross[1];
  r.H[2] = a * (sq(u[2]) + sq(u[3])) + K * (sq(t[2]) + sq(t[3])) + etas.eta3 * r.cross[2];
  r.H[3] = a * sq(u[3]) + K * sq(t[3]) + etas.eta4 * r.cross[3];
  r.H[4] = a * sq(r.u_high3) + K * sq(t[3]) +
           etas.eta3 * lambda_inner(u_high, 3, sigma_high, 2);

  double base = 0.0;
  for (int k = 0; k < 4; ++k) base += a * sq(u[k]) + K * sq(t[k]);
  r.total_functional =
      base + etas.eta1 * r.cross[0] + etas.eta2 * r.cross[1] + etas.eta3 * r.cross[2];

  const SplittingDiagnostics d = splitting_diagnostics(s, etas);
  r.g1 = d.g1;
  r.g2 = d.g2;
  r.lowfreq_mass = d.lowfreq_mass;
  return r;
}

SandwichCheck check_sandwich(const EnergyReport& r, const PhysParams& p) {
  auto sq = [](double v) { return v * v; };
  double base = 0.0;
  for (int k = 0; k < 4; ++k) base += p.alpha * sq(r.u_norm[k]) + p.K * sq(r.tau_norm[k]);
  const double h5base = p.alpha * sq(r.u_high3) + p.K * sq(r.tau_norm[3]);
  return SandwichCheck{
      .total_ok = 0.5 * base <= r.total_functional && r.total_functional <= 2.0 * base,
      .h5_ok = 0.5 * h5base <= r.H[4] && r.H[4] <= 2.0 * h5base,
  };
}

BalanceSample balance_sample(const EnergyReport& r, const PhysParams& p) {
  const double u2 = r.u_norm[0] * r.u_norm[0];
  const double t2 = r.tau_norm[0] * r.tau_norm[0];
  const double gt2 = r.tau_norm[1] * r.tau_norm[1];
  return BalanceSample{r.t, p.alpha * u2, p.K * t2, p.beta * p.K * t2, p.mu * p.K * gt2};
}

BalanceSample balance_sample(const SimState& s) {
  const PhysParams& p = s.params;
  const double u = sobolev_norm(s.u, 0);
  const double t = sobolev_norm(s.tau, 0);
  const double gt = sobolev_norm(s.tau, 1);
  return BalanceSample{s.t, p.alpha * u * u, p.K * t * t, p.beta * p.K * t * t,
                       p.mu * p.K * gt * gt};
}

std::vector<double> balance_residual_series(std::span<const BalanceSample> s) {
  const std::size_t n = s.size();
  if (n < 3) throw InvalidInput("balance residual needs at least 3 samples");
  const double h = s[1].t - s[0].t;
  if (!(h > 0.0)) throw InvalidInput("balance samples must have increasing times");
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs((s[i].t - s[i - 1].t) - h) > 1e-6 * h)
      throw InvalidInput("balance samples must be uniformly spaced");

  auto energy = [&](std::size_t i) { return s[i].alpha_u2 + s[i].K_tau2; };
  const double e0 = energy(0);
  const double norm = e0 > 0.0 ? e0 : 1.0;
  std::vector<double> res(n);
  for (std::size_t i = 0; i < n; ++i) {
    double de;
    if (i == 0)
      de = (-3.0 * energy(0) + 4.0 * energy(1) - energy(2)) / (2.0 * h);
    else if (i == n - 1)
      de = (3.0 * energy(n - 1) - 4.0 * energy(n - 2) + energy(n - 3)) / (2.0 * h);
    else
      de = (energy(i + 1) - energy(i - 1)) / (2.0 * h);
    res[i] = (0.5 * de + s[i].beta_K_tau2 + s[i].mu_K_gradtau2) / norm;
  }
  return res;
}

double balance_residual(std::span<const BalanceSample> samples) {
  const std::vector<double> res = balance_residual_series(samples);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < res.size(); ++i) worst = std::max(worst, std::abs(res[i]));
  return worst;
}

std::string energy_csv_header() {
  return "t,grad0_u,grad1_u,grad2_u,grad3_u,grad0_tau,grad1_tau,grad2_tau,grad3_tau,"
         "H1,H2,H3,H4,H5,cross1,cross2,cross3,cross3_high,balance_residual,g1,g2,lowfreq_mass";
}

std::string to_csv_row(const EnergyReport& r) {
  std::ostringstream os;
  os << fmt17(r.t);
  for (double v : r.u_norm) os << ',' << fmt17(v);
  for (double v : r.tau_norm) os << ',' << fmt17(v);
  for (double v : r.H) os << ',' << fmt17(v);
  for (double v : r.cross) os << ',' << fmt17(v);
  os << ',' << fmt17(r.balance_residual) << ',' << fmt17(r.g1) << ',' << fmt17(r.g2) << ','
     << fmt17(r.lowfreq_mass);
  return os.str();
}

}  // namespace oldroyd
