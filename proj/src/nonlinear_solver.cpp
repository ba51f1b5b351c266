#include "oldroyd/nonlinear_solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include <json.hpp>

#include "oldroyd/errors.hpp"
#include "oldroyd/spectral_ops.hpp"

namespace oldroyd {

namespace {

const Complex I(0.0, 1.0);

// i k z without a general complex product.
inline Complex ik(double k, Complex z) { return {-k * z.imag(), k * z.real()}; }

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

bool all_finite(std::span<const Complex> v) {
  return std::all_of(v.begin(), v.end(),
                     [](Complex x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

// View of the five evolved components (u1, u2, t11, t12, t22).
std::array<Spectrum*, 5> parts(SimState& s) {
  return {&s.u.comp[0], &s.u.comp[1], &s.tau.comp[0], &s.tau.comp[1], &s.tau.comp[2]};
}

std::array<const Spectrum*, 5> parts(const SimState& s) {
  return {&s.u.comp[0], &s.u.comp[1], &s.tau.comp[0], &s.tau.comp[1], &s.tau.comp[2]};
}

}  // namespace

void StepConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("time step must be > 0");
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
    throw InvalidInput("dealias fraction must be in (0, 1]");
  if (scheme != 2 && scheme != 4) throw InvalidInput("scheme order must be 2 or 4");
}

Solver::Solver(const Grid& grid, const StepConfig& cfg) : grid_(grid), cfg_(cfg), fft_(grid) {
  cfg_.validate();
  const int n = grid.n();
  const double cutoff = cfg_.dealias_fraction * n / 2.0;
  retained_.assign(grid.size(), 0);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const bool keep = std::abs(grid.signed_freq(j)) < cutoff &&
                        std::abs(grid.signed_freq(k)) < cutoff && j != n / 2 && k != n / 2;
      const std::size_t i = grid.index(j, k);
      retained_[i] = keep ? 1 : 0;
      if (keep) kmax_ = std::max(kmax_, grid.kmag()[i]);
    }
  }
  for (auto& v : phys_u_) v.resize(grid.size());
  for (auto& v : phys_tau_) v.resize(grid.size());
  prod_.resize(grid.size());
  prod_hat_.resize(grid.size());
}

void Solver::enforce_invariants(SimState& s) const {
  for (Spectrum* c : parts(s))
    for (std::size_t i = 0; i < grid_.size(); ++i)
      if (!retained_[i]) (*c)[i] = 0.0;
  leray_project_inplace(s.u);
  hermitian_symmetrize(s.u);
  hermitian_symmetrize(s.tau);
}

double Solver::velocity_sup(std::span<const double> u1, std::span<const double> u2) const {
  double m = 0.0;
  for (std::size_t i = 0; i < u1.size(); ++i) m = std::max(m, std::hypot(u1[i], u2[i]));
  return m;
}

double Solver::max_velocity(const SimState& s) {
  fft_.inverse(s.u.comp[0], phys_u_[0]);
  fft_.inverse(s.u.comp[1], phys_u_[1]);
  return velocity_sup(phys_u_[0], phys_u_[1]);
}

void Solver::rhs(const SimState& s, Rhs& out, bool check_cfl, bool coupling, bool transport) {
  const std::size_t total = grid_.size();
  const auto& kx = grid_.kx();
  const auto& ky = grid_.ky();
  const auto& ksq = grid_.ksq();
  const PhysParams& p = s.params;
  for (auto& c : out.u) c.assign(total, 0.0);
  for (auto& c : out.tau) c.assign(total, 0.0);

  const auto& u1 = s.u.comp[0];
  const auto& u2 = s.u.comp[1];
  const auto& t11 = s.tau.comp[0];
  const auto& t12 = s.tau.comp[1];
  const auto& t22 = s.tau.comp[2];

  // Coupling: K div tau and alpha D(u).
  for (std::size_t i = 0; i < total && coupling; ++i) {
    if (!retained_[i]) continue;
    out.u[0][i] = p.K * (ik(kx[i], t11[i]) + ik(ky[i], t12[i]));
    out.u[1][i] = p.K * (ik(kx[i], t12[i]) + ik(ky[i], t22[i]));
    out.tau[0][i] = p.alpha * ik(kx[i], u1[i]);
    out.tau[1][i] = 0.5 * p.alpha * (ik(ky[i], u1[i]) + ik(kx[i], u2[i]));
    out.tau[2][i] = p.alpha * ik(ky[i], u2[i]);
  }

  if (transport) {
    fft_.inverse(u1, phys_u_[0]);
    fft_.inverse(u2, phys_u_[1]);
    for (int c = 0; c < 3; ++c) fft_.inverse(s.tau.comp[c], phys_tau_[c]);
    for (const auto& v : phys_u_)
      if (!all_finite(v)) throw BlowUp("non-finite velocity", s.t);
    for (const auto& v : phys_tau_)
      if (!all_finite(v)) throw BlowUp("non-finite stress", s.t);

    if (check_cfl) {
      const double umax = velocity_sup(phys_u_[0], phys_u_[1]);
      const double cfl = cfg_.dt * umax * kmax_;
      if (cfl > 0.5)
        throw CflViolation("advective CFL number " + std::to_string(cfl) + " exceeds 0.5",
                           0.45 / (umax * kmax_));
    }

    // Transport in conservative form: (a . grad) b = div(a b) since div a = 0.
    auto product_hat = [&](const std::vector<double>& a, const std::vector<double>& b) {
      for (std::size_t i = 0; i < total; ++i) prod_[i] = a[i] * b[i];
      fft_.forward(prod_, prod_hat_);
    };
    // u1 u1, u1 u2, u2 u2 are enough for both momentum components.
    product_hat(phys_u_[0], phys_u_[0]);
    for (std::size_t i = 0; i < total; ++i)
      if (retained_[i]) out.u[0][i] -= ik(kx[i], prod_hat_[i]);
    product_hat(phys_u_[0], phys_u_[1]);
    for (std::size_t i = 0; i < total; ++i) {
      if (!retained_[i]) continue;
      out.u[0][i] -= ik(ky[i], prod_hat_[i]);
      out.u[1][i] -= ik(kx[i], prod_hat_[i]);
    }
    product_hat(phys_u_[1], phys_u_[1]);
    for (std::size_t i = 0; i < total; ++i)
      if (retained_[i]) out.u[1][i] -= ik(ky[i], prod_hat_[i]);
    for (int c = 0; c < 3; ++c) {
      for (int j = 0; j < 2; ++j) {
        const auto& kj = j == 0 ? kx : ky;
        product_hat(phys_u_[j], phys_tau_[c]);
        for (std::size_t i = 0; i < total; ++i)
          if (retained_[i]) out.tau[c][i] -= ik(kj[i], prod_hat_[i]);
      }
    }
  }

  // Leray projection of the momentum right-hand side.
  for (std::size_t i = 0; i < total; ++i) {
    if (ksq[i] == 0.0) continue;
    const Complex dot = (kx[i] * out.u[0][i] + ky[i] * out.u[1][i]) / ksq[i];
    out.u[0][i] -= kx[i] * dot;
    out.u[1][i] -= ky[i] * dot;
  }
}

NonlinearTerms Solver::nonlinear_terms(const SimState& s) {
  Rhs r;
  rhs(s, r, false, false, true);
  NonlinearTerms nt{SpectralVectorField(grid_), SymmetricTensorField(grid_)};
  for (int c = 0; c < 2; ++c) nt.F_u.comp[c] = std::move(r.u[c]);
  for (int c = 0; c < 3; ++c) nt.F_tau.comp[c] = std::move(r.tau[c]);
  return nt;
}

SimState Solver::step(const SimState& s) {
  SimState next = s;
  step_into(s, next);
  return next;
}

void Solver::step_into(const SimState& s, SimState& next) {
  const std::size_t total = grid_.size();
  const double h = cfg_.dt;
  const PhysParams& p = s.params;
  const auto& ksq = grid_.ksq();

  if (!(factor_key_ == std::array<double, 3>{p.beta, p.mu, h})) {
    e_full_.resize(total);
    e_half_.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
      const double rate = p.beta + p.mu * ksq[i];
      e_full_[i] = std::exp(-rate * h);
      e_half_[i] = std::exp(-0.5 * rate * h);
    }
    factor_key_ = {p.beta, p.mu, h};
  }
  const auto& e_full = e_full_;
  const auto& e_half = e_half_;
  // Factor for component c at mode i: tau carries the exact damping, u none.
  auto fac = [](int c, const std::vector<double>& e, std::size_t i) {
    return c < 2 ? 1.0 : e[i];
  };
  auto rhs_parts = [](Rhs& r) {
    return std::array<Spectrum*, 5>{&r.u[0], &r.u[1], &r.tau[0], &r.tau[1], &r.tau[2]};
  };

  if (!stage_) stage_.emplace(s);
  SimState& ys = *stage_;
  ys.params = s.params;
  next.params = s.params;
  const auto y = parts(s);
  auto Ys = parts(ys);
  auto yn = parts(next);
  for (int m = 0; m < 5; ++m) {
    Ys[m]->resize(total);
    yn[m]->resize(total);
  }

  if (cfg_.scheme == 4) {
    Rhs& a = k_[0];
    Rhs& b = k_[1];
    Rhs& c = k_[2];
    Rhs& d = k_[3];
    rhs(s, a, true, true, cfg_.nonlinear);
    auto A = rhs_parts(a);

    for (int m = 0; m < 5; ++m)
      for (std::size_t i = 0; i < total; ++i)
        (*Ys[m])[i] = fac(m, e_half, i) * ((*y[m])[i] + 0.5 * h * (*A[m])[i]);
    ys.t = s.t + 0.5 * h;
    rhs(ys, b, false, true, cfg_.nonlinear);
    auto B = rhs_parts(b);

    for (int m = 0; m < 5; ++m)
      for (std::size_t i = 0; i < total; ++i)
        (*Ys[m])[i] = fac(m, e_half, i) * (*y[m])[i] + 0.5 * h * (*B[m])[i];
    rhs(ys, c, false, true, cfg_.nonlinear);
    auto C = rhs_parts(c);

    for (int m = 0; m < 5; ++m)
      for (std::size_t i = 0; i < total; ++i)
        (*Ys[m])[i] = fac(m, e_full, i) * (*y[m])[i] + h * fac(m, e_half, i) * (*C[m])[i];
    ys.t = s.t + h;
    rhs(ys, d, false, true, cfg_.nonlinear);
    auto D = rhs_parts(d);

    for (int m = 0; m < 5; ++m)
      for (std::size_t i = 0; i < total; ++i)
        (*yn[m])[i] = fac(m, e_full, i) * (*y[m])[i] +
                      h / 6.0 *
                          (fac(m, e_full, i) * (*A[m])[i] +
                           2.0 * fac(m, e_half, i) * ((*B[m])[i] + (*C[m])[i]) + (*D[m])[i]);
  } else {
    Rhs& a = k_[0];
    Rhs& b = k_[1];
    rhs(s, a, true, true, cfg_.nonlinear);
    auto A = rhs_parts(a);
    for (int m = 0; m < 5; ++m)
      for (std::size_t i = 0; i < total; ++i)
        (*Ys[m])[i] = fac(m, e_full, i) * ((*y[m])[i] + h * (*A[m])[i]);
    ys.t = s.t + h;
    rhs(ys, b, false, true, cfg_.nonlinear);
    auto B = rhs_parts(b);
    for (int m = 0; m < 5; ++m)
      for (std::size_t i = 0; i < total; ++i)
        (*yn[m])[i] = fac(m, e_full, i) * (*y[m])[i] +
                      0.5 * h * (fac(m, e_full, i) * (*A[m])[i] + (*B[m])[i]);
  }

  next.t = s.t + h;
  enforce_invariants(next);
  for (const Spectrum* c : parts(std::as_const(next)))
    if (!all_finite(*c)) throw BlowUp("non-finite spectrum after step", s.t);
}

Spectrum diagnostic_pressure(const SimState& s, Transform& fft) {
  const Grid& g = s.grid();
  const auto& kx = g.kx();
  const auto& ky = g.ky();
  const auto& ksq = g.ksq();
  const std::vector<double> u1 = fft.inverse(s.u.comp[0]);
  const std::vector<double> u2 = fft.inverse(s.u.comp[1]);
  std::vector<double> prod(g.size());
  auto product_hat = [&](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < g.size(); ++i) prod[i] = a[i] * b[i];
    return fft.forward(prod);
  };
  const Spectrum p11 = product_hat(u1, u1);
  const Spectrum p12 = product_hat(u1, u2);
  const Spectrum p22 = product_hat(u2, u2);
  Spectrum pressure(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (ksq[i] == 0.0) continue;
    const double xx = kx[i] * kx[i], xy = kx[i] * ky[i], yy = ky[i] * ky[i];
    const Complex conv = xx * p11[i] + 2.0 * xy * p12[i] + yy * p22[i];
    const Complex stress =
        xx * s.tau.comp[0][i] + 2.0 * xy * s.tau.comp[1][i] + yy * s.tau.comp[2][i];
    pressure[i] = (-conv + s.params.K * stress) / ksq[i];
  }
  return pressure;
}

RunOutcome run(const SimState& s0, const StepConfig& c, double horizon, double sample_every,
               const EtaCoefficients& etas, double balance_every) {
  c.validate();
  if (balance_every == 0.0) balance_every = sample_every;
  if (!(horizon >= 0.0)) throw InvalidInput("horizon must be >= 0");
  if (!(sample_every > 0.0)) throw InvalidInput("sampling interval must be > 0");
  const auto steps = static_cast<long long>(std::llround(horizon / c.dt));
  const auto stride = static_cast<long long>(std::llround(sample_every / c.dt));
  if (std::abs(steps * c.dt - horizon) > 1e-9 * std::max(horizon, c.dt))
    throw InvalidInput("horizon must be an integer multiple of dt");
  if (stride < 1 || std::abs(stride * c.dt - sample_every) > 1e-9 * sample_every)
    throw InvalidInput("sampling interval must be a positive integer multiple of dt");
  const auto bstride = static_cast<long long>(std::llround(balance_every / c.dt));
  if (bstride < 1 || std::abs(bstride * c.dt - balance_every) > 1e-9 * balance_every)
    throw InvalidInput("balance interval must be a positive integer multiple of dt");
  if (stride % bstride != 0)
    throw InvalidInput("sampling interval must be a multiple of the balance interval");

  Solver solver(s0.grid(), c);
  RunOutcome out{.samples = {}, .balance = {}, .final_state = s0, .status = RunStatus::Completed,
                 .abort_reason = {}, .last_good_time = s0.t};
  // Times are counted in global steps when t0 sits on the dt lattice, so chunked
  // and restarted runs reproduce a single run bit for bit.
  double t0 = s0.t;
  long long n0 = 0;
  if (const double q = std::round(s0.t / c.dt); std::abs(q * c.dt - s0.t) <= 1e-9 * c.dt) {
    n0 = static_cast<long long>(q);
    t0 = 0.0;
  }
  SimState scratch = s0;
  out.samples.push_back({s0.t, evaluate(s0, etas)});
  out.balance.push_back(balance_sample(s0));
  out.last_good_time = s0.t;

  for (long long n = 1; n <= steps; ++n) {
    try {
      solver.step_into(out.final_state, scratch);
      std::swap(out.final_state, scratch);
    } catch (const BlowUp& e) {
      out.status = RunStatus::BlowUp;
      out.abort_reason = e.what();
      break;
    } catch (const CflViolation& e) {
      out.status = RunStatus::CflViolation;
      out.abort_reason = std::string(e.what()) + "; suggested dt " + std::to_string(e.suggested_dt());
      break;
    }
    out.final_state.t = t0 + static_cast<double>(n0 + n) * c.dt;
    out.last_good_time = out.final_state.t;
    if (n % bstride == 0) out.balance.push_back(balance_sample(out.final_state));
    if (n % stride == 0) {
      EnergyReport r = evaluate(out.final_state, etas);
      if (!std::isfinite(r.h3_norm())) {
        out.status = RunStatus::BlowUp;
        out.abort_reason = "non-finite H3 norm";
        break;
      }
      out.samples.push_back({out.final_state.t, r});
    }
  }

  if (out.balance.size() >= 3) {
    const std::vector<double> res = balance_residual_series(out.balance);
    const auto ratio = static_cast<std::size_t>(stride / bstride);
    for (std::size_t i = 0; i < out.samples.size(); ++i)
      if (i * ratio < res.size()) out.samples[i].report.balance_residual = res[i * ratio];
  }
  return out;
}

double h3_norm(const SimState& s) {
  const double a = sobolev_norm_full(s.u, 3);
  const double b = sobolev_norm_full(s.tau, 3);
  return std::sqrt(a * a + b * b);
}

SimState random_state(const Grid& g, const PhysParams& p, const RandomInit& init,
                      double dealias_fraction) {
  p.validate();
  if (!(init.h3_norm >= 0.0)) throw InvalidInput("target H3 norm must be >= 0");
  if (!(init.band_hi >= init.band_lo) || init.band_lo < 0.0)
    throw InvalidInput("random band must satisfy 0 <= band_lo <= band_hi");
  SimState s(g, p);
  std::mt19937_64 rng(init.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto st = parts(s);
  for (int j = 0; j < g.n(); ++j) {
    for (int k = 0; k < g.n(); ++k) {
      const double r = std::hypot(g.signed_freq(j), g.signed_freq(k));
      const std::size_t i = g.index(j, k);
      for (Spectrum* c : st) {
        const double re = normal(rng);
        const double im = normal(rng);
        if (r >= init.band_lo && r <= init.band_hi) (*c)[i] = Complex(re, im);
      }
    }
  }
  StepConfig cfg;
  cfg.dealias_fraction = dealias_fraction;
  Solver(g, cfg).enforce_invariants(s);
  const double norm = h3_norm(s);
  if (norm > 0.0) {
    const double scale = init.h3_norm / norm;
    for (Spectrum* c : st)
      for (auto& v : *c) v *= scale;
  }
  return s;
}

SimState taylor_green_state(const Grid& g, const PhysParams& p, int mode, double u_amp,
                            double tau_amp) {
  p.validate();
  if (mode < 1 || mode >= g.n() / 3) throw InvalidInput("Taylor-Green mode must be in [1, n/3)");
  SimState s(g, p);
  Transform fft(g);
  const double m = g.k0() * mode;
  const double dx = g.length() / g.n();
  std::array<std::vector<double>, 5> f;
  for (auto& v : f) v.resize(g.size());
  for (int j = 0; j < g.n(); ++j) {
    for (int k = 0; k < g.n(); ++k) {
      const double x = j * dx, y = k * dx;
      const std::size_t i = g.index(j, k);
      const double cx = std::cos(m * x), sx = std::sin(m * x);
      const double cy = std::cos(m * y), sy = std::sin(m * y);
      f[0][i] = u_amp * sx * cy;
      f[1][i] = -u_amp * cx * sy;
      f[2][i] = tau_amp * cx * cy;
      f[3][i] = tau_amp * sx * sy;
      f[4][i] = -tau_amp * cx * cy;
    }
  }
  auto st = parts(s);
  for (int c = 0; c < 5; ++c) fft.forward(f[c], *st[c]);
  leray_project_inplace(s.u);
  return s;
}

namespace {

constexpr char kMagic[8] = {'O', 'B', 'C', 'K', 'P', 'T', '0', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap64(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ostream& os, double d) { put_u64(os, std::bit_cast<std::uint64_t>(d)); }

std::uint64_t get_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw InvalidInput("truncated checkpoint file");
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap64(v);
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

std::filesystem::path sidecar(const std::filesystem::path& p) {
  return std::filesystem::path(p.string() + ".json");
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const SimState& s,
                      const std::string& config_hash) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidInput("cannot open checkpoint for writing: " + path.string());
  os.write(kMagic, sizeof kMagic);
  put_u64(os, static_cast<std::uint64_t>(s.grid().n()));
  put_f64(os, s.grid().length());
  put_f64(os, s.t);
  for (const Spectrum* c : parts(s))
    for (const Complex& v : *c) {
      put_f64(os, v.real());
      put_f64(os, v.imag());
    }
  if (!os) throw InvalidInput("failed writing checkpoint: " + path.string());

  nlohmann::ordered_json meta;
  meta["format"] = "OBCKPT01";
  meta["n"] = s.grid().n();
  meta["L"] = s.grid().length();
  meta["t"] = s.t;
  meta["params"] = {{"alpha", s.params.alpha},
                    {"beta", s.params.beta},
                    {"K", s.params.K},
                    {"mu", s.params.mu}};
  meta["components"] = {"u1", "u2", "tau11", "tau12", "tau22"};
  meta["config_hash"] = config_hash;
  std::ofstream js(sidecar(path));
  js << meta.dump(2) << '\n';
}

SimState read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInput("cannot open checkpoint: " + path.string());
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw InvalidInput("not a checkpoint file: " + path.string());
  const auto n = static_cast<int>(get_u64(is));
  const double L = get_f64(is);
  const double t = get_f64(is);

  std::ifstream js(sidecar(path));
  if (!js) throw InvalidInput("missing checkpoint sidecar: " + sidecar(path).string());
  const nlohmann::json meta = nlohmann::json::parse(js);
  PhysParams p;
  p.alpha = meta.at("params").at("alpha").get<double>();
  p.beta = meta.at("params").at("beta").get<double>();
  p.K = meta.at("params").at("K").get<double>();
  p.mu = meta.at("params").at("mu").get<double>();
  p.validate();

  SimState s(Grid(n, L), p);
  s.t = t;
  for (Spectrum* c : parts(s))
    for (Complex& v : *c) {
      const double re = get_f64(is);
      const double im = get_f64(is);
      v = Complex(re, im);
    }
  return s;
}

}  // namespace oldroyd
