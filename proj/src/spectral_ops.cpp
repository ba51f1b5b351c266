#include "oldroyd/spectral_ops.hpp"

#include <cmath>
#include <vector>

#include "oldroyd/errors.hpp"

namespace oldroyd {

namespace {

double pairwise_range(const double* p, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_range(p, h) + pairwise_range(p + h, n - h);
}

double area(const Grid& g) { return g.length() * g.length(); }

// |xi|^{2k} via repeated multiplication so k = 0 gives exactly 1 at xi = 0.
double ksq_pow(double ksq, int k) {
  double w = 1.0;
  for (int i = 0; i < k; ++i) w *= ksq;
  return w;
}

void check_order(int k) {
  if (k < 0 || k > 4) throw InvalidInput("Sobolev order must be in 0..4");
}

double sum_sq_weighted(std::span<const Spectrum> comps, std::span<const double> weights,
                       const Grid& g, int k) {
  check_order(k);
  const auto& ksq = g.ksq();
  std::vector<double> terms(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double m = 0.0;
    for (std::size_t c = 0; c < comps.size(); ++c) m += weights[c] * std::norm(comps[c][i]);
    terms[i] = ksq_pow(ksq[i], k) * m;
  }
  return area(g) * pairwise_sum(terms);
}

}  // namespace

double pairwise_sum(std::span<const double> terms) {
  return pairwise_range(terms.data(), terms.size());
}

void leray_project_inplace(SpectralVectorField& v) {
  const Grid& g = v.grid;
  const auto& kx = g.kx();
  const auto& ky = g.ky();
  const auto& ksq = g.ksq();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (ksq[i] == 0.0) continue;
    const Complex dot = (kx[i] * v.comp[0][i] + ky[i] * v.comp[1][i]) / ksq[i];
    v.comp[0][i] -= kx[i] * dot;
    v.comp[1][i] -= ky[i] * dot;
  }
}

SpectralVectorField leray_project(const SpectralVectorField& v) {
  SpectralVectorField out = v;
  leray_project_inplace(out);
  return out;
}

Spectrum lambda_power(std::span<const Complex> f, const Grid& g, double s) {
  require_shape(f, g);
  if (s < 0.0 && std::abs(f[0]) > 1e-12)
    throw ZeroModeSingularity("negative power of Lambda applied to a field with nonzero mean");
  Spectrum out(f.begin(), f.end());
  if (s == 0.0) return out;
  const auto& km = g.kmag();
  out[0] = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) out[i] *= std::pow(km[i], s);
  return out;
}

SpectralVectorField sigma_from_tau(const SymmetricTensorField& tau) {
  const Grid& g = tau.grid;
  SpectralVectorField sigma(g);
  const auto& kx = g.kx();
  const auto& ky = g.ky();
  const auto& km = g.kmag();
  const Complex I(0.0, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (km[i] == 0.0 || g.on_nyquist(i)) continue;
    const double nx = kx[i] / km[i];
    const double ny = ky[i] / km[i];
    const Complex t11 = tau.comp[0][i];
    const Complex t12 = tau.comp[1][i];
    const Complex t22 = tau.comp[2][i];
    // w_k = (xi_l / |xi|) tau_lk, then project off the xi direction.
    const Complex w1 = nx * t11 + ny * t12;
    const Complex w2 = nx * t12 + ny * t22;
    const Complex dot = nx * w1 + ny * w2;
    sigma.comp[0][i] = I * (w1 - nx * dot);
    sigma.comp[1][i] = I * (w2 - ny * dot);
  }
  return sigma;
}

FrequencyCutoff::FrequencyCutoff(double radius) : radius_(radius) {
  if (!std::isfinite(radius) || radius <= 0.0) throw InvalidInput("cutoff radius must be > 0");
}

double FrequencyCutoff::operator()(double r) const {
  const double half = 0.5 * radius_;
  if (r <= half) return 1.0;
  if (r >= radius_) return 0.0;
  auto psi = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  const double a = psi(radius_ - r);
  const double b = psi(r - half);
  return a / (a + b);
}

std::pair<Spectrum, Spectrum> freq_split(std::span<const Complex> f, const Grid& g,
                                         const FrequencyCutoff& cut) {
  require_shape(f, g);
  const auto& km = g.kmag();
  Spectrum low(g.size()), high(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = cut(km[i]);
    low[i] = w * f[i];
    high[i] = f[i] - low[i];
  }
  return {std::move(low), std::move(high)};
}

std::pair<SpectralVectorField, SpectralVectorField> freq_split(const SpectralVectorField& v,
                                                               const FrequencyCutoff& cut) {
  SpectralVectorField low(v.grid), high(v.grid);
  for (int c = 0; c < 2; ++c) {
    auto [l, h] = freq_split(v.comp[c], v.grid, cut);
    low.comp[c] = std::move(l);
    high.comp[c] = std::move(h);
  }
  return {std::move(low), std::move(high)};
}

SpectralVectorField squared_high_part(const SpectralVectorField& v, const FrequencyCutoff& cut) {
  SpectralVectorField out(v.grid);
  const auto& km = v.grid.kmag();
  for (std::size_t i = 0; i < v.grid.size(); ++i) {
    const double w = 1.0 - cut(km[i]);
    for (int c = 0; c < 2; ++c) out.comp[c][i] = w * w * v.comp[c][i];
  }
  return out;
}

double sobolev_norm(std::span<const Complex> f, const Grid& g, int k) {
  require_shape(f, g);
  const Spectrum copy(f.begin(), f.end());
  const double w = 1.0;
  return std::sqrt(sum_sq_weighted(std::span<const Spectrum>(&copy, 1), std::span(&w, 1), g, k));
}

double sobolev_norm(const SpectralVectorField& v, int k) {
  const std::array<double, 2> w{1.0, 1.0};
  return std::sqrt(sum_sq_weighted(v.comp, w, v.grid, k));
}

double sobolev_norm(const SymmetricTensorField& t, int k) {
  return std::sqrt(sum_sq_weighted(t.comp, SymmetricTensorField::kWeight, t.grid, k));
}

namespace {
template <typename F>
double full_norm(int k, F&& piece) {
  check_order(k);
  double s = 0.0;
  for (int j = 0; j <= k; ++j) {
    const double p = piece(j);
    s += p * p;
  }
  return std::sqrt(s);
}
}  // namespace

double sobolev_norm_full(std::span<const Complex> f, const Grid& g, int k) {
  return full_norm(k, [&](int j) { return sobolev_norm(f, g, j); });
}

double sobolev_norm_full(const SpectralVectorField& v, int k) {
  return full_norm(k, [&](int j) { return sobolev_norm(v, j); });
}

double sobolev_norm_full(const SymmetricTensorField& t, int k) {
  return full_norm(k, [&](int j) { return sobolev_norm(t, j); });
}

double lambda_inner(const SpectralVectorField& v, int a, const SpectralVectorField& w, int b) {
  const Grid& g = v.grid;
  if (!(g == w.grid)) throw InvalidInput("inner product of fields on different grids");
  const auto& km = g.kmag();
  if (a < 0 || b < 0) throw InvalidInput("lambda_inner expects nonnegative powers");
  const int power = a + b;
  std::vector<double> terms(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double weight = 1.0;
    for (int p = 0; p < power; ++p) weight *= km[i];
    double s = 0.0;
    for (int c = 0; c < 2; ++c) s += (std::conj(v.comp[c][i]) * w.comp[c][i]).real();
    terms[i] = weight * s;
  }
  return area(g) * pairwise_sum(terms);
}

double physical_l2_norm(std::span<const double> f, const Grid& g) {
  if (f.size() != g.size()) throw InvalidInput("physical array does not match grid");
  std::vector<double> sq(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
  return std::sqrt(area(g) / static_cast<double>(g.size()) * pairwise_sum(sq));
}

}  // namespace oldroyd
