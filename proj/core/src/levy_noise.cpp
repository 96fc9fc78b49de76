#include "levymix/levy_noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "levymix/quadrature.hpp"
#include "levymix/stats.hpp"

namespace levymix {

namespace {
constexpr double kPi = std::numbers::pi;

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}
}  // namespace

void LevyConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("levy.alpha must lie in the open interval (0,2)");
  if (D < 1) throw std::invalid_argument("levy.D must be >= 1");
  if (!(K > 0.0)) throw std::invalid_argument("levy.K must be > 0");
  if (!(c_nu > 0.0)) throw std::invalid_argument("levy.c_nu must be > 0");
  if (!(eps_small > 0.0 && eps_small < K))
    throw std::invalid_argument("levy.eps_small must lie in (0, K)");
}

std::string to_string(TVMethod m) {
  switch (m) {
    case TVMethod::quadrature: return "quadrature";
    case TVMethod::monte_carlo: return "monte_carlo";
    case TVMethod::spherical_reduction: return "spherical_reduction";
  }
  return "?";
}

double sphere_surface_area(int dim) {
  if (dim < 1) throw std::invalid_argument("sphere_surface_area: dim >= 1");
  return 2.0 * std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

double gamma_K(const LevyConfig& cfg) {
  cfg.validate();
  return cfg.c_nu * sphere_surface_area(cfg.D) * std::pow(cfg.K, -cfg.alpha) / cfg.alpha;
}

double pk_density_radius(const LevyConfig& cfg, double r) {
  if (r < cfg.K) return 0.0;
  const double c = cfg.alpha * std::pow(cfg.K, cfg.alpha) / sphere_surface_area(cfg.D);
  return c * std::pow(r, -(cfg.D + cfg.alpha));
}

double pk_density(const LevyConfig& cfg, std::span<const double> z) {
  if (static_cast<int>(z.size()) != cfg.D) throw std::invalid_argument("pk_density: bad dimension");
  return pk_density_radius(cfg, norm2(z));
}

std::vector<double> sample_big_jump(const LevyConfig& cfg, RngStream& rng) {
  std::vector<double> z(cfg.D);
  const double u = rng.uniform();
  const double r = cfg.K * std::exp(-std::log(u) / cfg.alpha);  // K * U^{-1/alpha}
  rng.unit_vector(cfg.D, z.data());
  for (double& v : z) v *= r;
  return z;
}

double small_band_rate(const LevyConfig& cfg) {
  return cfg.c_nu * sphere_surface_area(cfg.D) *
         (std::pow(cfg.eps_small, -cfg.alpha) - std::pow(cfg.K, -cfg.alpha)) / cfg.alpha;
}

double gaussian_correction_variance(const LevyConfig& cfg) {
  return cfg.c_nu * sphere_surface_area(cfg.D) * std::pow(cfg.eps_small, 2.0 - cfg.alpha) /
         (cfg.D * (2.0 - cfg.alpha));
}

namespace {

// Cached constants for the band sampler; one radius draw is one log+exp.
struct BandDraw {
  double eps_pow;    // eps^{-alpha}
  double span;       // eps^{-alpha} - K^{-alpha}
  double inv_alpha;  // 1/alpha
  explicit BandDraw(const LevyConfig& cfg)
      : eps_pow(std::pow(cfg.eps_small, -cfg.alpha)),
        span(eps_pow - std::pow(cfg.K, -cfg.alpha)),
        inv_alpha(1.0 / cfg.alpha) {}
  double radius(RngStream& rng) const {
    const double u = rng.uniform();
    return std::exp(-inv_alpha * std::log(eps_pow - u * span));
  }
};

}  // namespace

std::vector<double> sample_small_increment(const LevyConfig& cfg, double dt, RngStream& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_small_increment: dt must be > 0");
  std::vector<double> out(cfg.D, 0.0);
  const double rate = small_band_rate(cfg);
  if (rate > 0.0) {
    std::poisson_distribution<long> pois(rate * dt);
    const long n = pois(rng.engine());
    const BandDraw band(cfg);
    std::vector<double> dir(cfg.D);
    for (long j = 0; j < n; ++j) {
      const double r = band.radius(rng);
      rng.unit_vector(cfg.D, dir.data());
      for (int i = 0; i < cfg.D; ++i) out[i] += r * dir[i];
    }
  }
  if (cfg.gaussian_correction) {
    const double sd = std::sqrt(gaussian_correction_variance(cfg) * dt);
    for (int i = 0; i < cfg.D; ++i) out[i] += sd * rng.normal();
  }
  return out;
}

void sample_big_jump_into(const LevyConfig& cfg, RngStream& rng, double* out) {
  const double u = rng.uniform();
  const double r = cfg.K * std::exp(-std::log(u) / cfg.alpha);
  rng.unit_vector(cfg.D, out);
  for (int i = 0; i < cfg.D; ++i) out[i] *= r;
}

SmallIncrementSampler::SmallIncrementSampler(const LevyConfig& cfg)
    : D_(cfg.D),
      rate_(small_band_rate(cfg)),
      eps_pow_(std::pow(cfg.eps_small, -cfg.alpha)),
      span_(eps_pow_ - std::pow(cfg.K, -cfg.alpha)),
      inv_alpha_(1.0 / cfg.alpha),
      corr_sd_unit_(cfg.gaussian_correction ? std::sqrt(gaussian_correction_variance(cfg)) : 0.0),
      dir_(cfg.D) {}

void SmallIncrementSampler::add(double dt, RngStream& rng, double* out) {
  if (rate_ > 0.0) {
    std::poisson_distribution<long> pois(rate_ * dt);
    const long n = pois(rng.engine());
    if (D_ == 1) {
      // one generator call per jump: low bit is the sign, upper bits the radius
      for (long j = 0; j < n; ++j) {
        const std::uint64_t w = rng.next_u64();
        const double u = (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
        const double r = std::exp(-inv_alpha_ * std::log(eps_pow_ - u * span_));
        out[0] += (w & 1) ? r : -r;
      }
    } else {
      for (long j = 0; j < n; ++j) {
        const double u = rng.uniform();
        const double r = std::exp(-inv_alpha_ * std::log(eps_pow_ - u * span_));
        rng.unit_vector(D_, dir_.data());
        for (int i = 0; i < D_; ++i) out[i] += r * dir_[i];
      }
    }
  }
  if (corr_sd_unit_ > 0.0) {
    const double sd = corr_sd_unit_ * std::sqrt(dt);
    for (int i = 0; i < D_; ++i) out[i] += sd * rng.normal();
  }
}

double sample_positive_stable(double rho, RngStream& rng) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("sample_positive_stable: rho must lie in (0,1)");
  // Kanter's representation for Laplace transform exp(-u^rho).
  const double theta = kPi * rng.uniform();
  const double w = rng.exponential(1.0);
  const double a = std::sin((1.0 - rho) * theta) *
                   std::pow(std::sin(rho * theta), rho / (1.0 - rho)) /
                   std::pow(std::sin(theta), 1.0 / (1.0 - rho));
  return std::pow(a / w, (1.0 - rho) / rho);
}

namespace {

// Jump-kernel constant of the process with characteristic exponent -|xi|^alpha:
// C(D, alpha) = alpha 2^{alpha-1} Gamma((D+alpha)/2) / (pi^{D/2} Gamma(1-alpha/2)).
double symbol_kernel_constant(double alpha, int D) {
  return alpha * std::pow(2.0, alpha - 1.0) * std::tgamma(0.5 * (D + alpha)) /
         (std::pow(kPi, 0.5 * D) * std::tgamma(1.0 - 0.5 * alpha));
}

}  // namespace

std::vector<double> sample_exact_increment(const LevyConfig& cfg, double t, RngStream& rng) {
  cfg.validate();
  if (!(t > 0.0)) throw std::invalid_argument("sample_exact_increment: t must be > 0");
  // nu(dz) = c_nu |z|^{-D-alpha} dz has exponent -m |xi|^alpha with
  // m = c_nu / C(D, alpha); the subordinator scale b solves b 2^{-alpha/2} = m.
  const double m = cfg.c_nu / symbol_kernel_constant(cfg.alpha, cfg.D);
  const double b = std::pow(2.0, 0.5 * cfg.alpha) * m;
  const double s1 = sample_positive_stable(0.5 * cfg.alpha, rng);
  const double clock = std::pow(t * b, 2.0 / cfg.alpha) * s1;
  const double sd = std::sqrt(clock);
  std::vector<double> out(cfg.D);
  for (int i = 0; i < cfg.D; ++i) out[i] = sd * rng.normal();
  return out;
}

double sample_coupling_gap(const LevyConfig& cfg, double T_refractory, RngStream& rng) {
  if (T_refractory < 0.0) throw std::invalid_argument("sample_coupling_gap: T must be >= 0");
  return T_refractory + rng.exponential(gamma_K(cfg));
}

namespace {

// 1-D overlap integral with analytic tails and kink-aware pieces.
TVResult tv_quadrature_1d(const LevyConfig& cfg, double s) {
  TVResult out;
  out.method = TVMethod::quadrature;
  if (s == 0.0) return out;
  const double a = cfg.alpha, K = cfg.K;
  const double c = a * std::pow(K, a) / 2.0;
  auto p0 = [&](double z) { return std::abs(z) >= K ? c * std::pow(std::abs(z), -1.0 - a) : 0.0; };
  auto f = [&](double z) { return std::abs(p0(z) - p0(z - s)); };

  std::vector<double> bps = {-K, K, s - K, s + K, 0.5 * s};
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  // Left of -K the center-0 density dominates; right of s+K the shifted one does.
  const double tail_left = c * (std::pow(K, -a) - std::pow(s + K, -a)) / a;
  const double tail_right = tail_left;
  out.value = tail_left + tail_right;

  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    const QuadResult q = integrate_adaptive(f, bps[i], bps[i + 1], 1e-12);
    out.value += q.value;
    out.error_estimate += q.error;
  }
  return out;
}

// Reduction of the overlap integral to (r, theta) for D >= 2 with centers
// 0 and s e1. tv = 2 - 4 g(s) where g integrates the shifted density over
// the half-space {z1 <= s/2} intersected with {|z| >= K}.
TVResult tv_spherical(const LevyConfig& cfg, double s) {
  TVResult out;
  out.method = TVMethod::spherical_reduction;
  if (s == 0.0) return out;
  const double a = cfg.alpha, K = cfg.K;
  const int D = cfg.D;
  const double SD1 = sphere_surface_area(D);      // S_{D-1}
  const double SD2 = sphere_surface_area(D - 1);  // S_{D-2}
  const double C = a * std::pow(K, a) / SD1;

  const double inner_tol = 1e-13;
  double inner_err = 0.0;
  auto theta_integral = [&](double r) -> double {
    const double tmin = std::acos(std::min(1.0, s / (2.0 * r)));
    auto h = [&](double th) {
      const double st = std::sin(th), ct = std::cos(th);
      const double q = (r * ct - s) * (r * ct - s) + r * r * st * st;
      return std::pow(st, D - 2) * std::pow(q, -0.5 * (D + a));
    };
    const QuadResult q = integrate_adaptive(h, tmin, kPi, inner_tol);
    inner_err += q.error;
    return q.value;
  };

  // Outer integral over u in [0,1], r = K u^{-1/alpha}; the integrand tends
  // to a finite limit at u = 0.
  const double limit0 = std::pow(K, -a) / a * SD1 / (2.0 * SD2);
  auto w = [&](double u) -> double {
    if (u <= 0.0) return limit0;
    const double r = K * std::pow(u, -1.0 / a);
    return (K / a) * std::pow(u, -1.0 - 1.0 / a) * std::pow(r, D - 1) * theta_integral(r);
  };
  const QuadResult q = integrate_adaptive(w, 0.0, 1.0, 1e-11);
  const double g = C * SD2 * q.value;
  out.value = 2.0 - 4.0 * g;
  out.error_estimate = 4.0 * C * SD2 * (q.error + inner_err);
  if (out.value < 0.0 && out.value > -1e-9) out.value = 0.0;
  return out;
}

TVResult tv_monte_carlo(const LevyConfig& cfg, std::span<const double> x1,
                        std::span<const double> x2, RngStream& rng, long n) {
  TVResult out;
  out.method = TVMethod::monte_carlo;
  const long half = std::max<long>(1, n / 2);
  std::vector<double> z(cfg.D);
  double sums[2] = {0.0, 0.0}, sumsq[2] = {0.0, 0.0};
  for (int side = 0; side < 2; ++side) {
    std::span<const double> from = side == 0 ? x1 : x2;
    std::span<const double> to = side == 0 ? x2 : x1;
    for (long i = 0; i < half; ++i) {
      z = sample_big_jump(cfg, rng);
      double r_from = 0.0, r_to = 0.0;
      for (int d = 0; d < cfg.D; ++d) {
        const double zf = z[d];  // z is centered at `from` after the shift below
        const double dt = zf + from[d] - to[d];
        r_from += zf * zf;
        r_to += dt * dt;
      }
      const double p_from = pk_density_radius(cfg, std::sqrt(r_from));
      const double p_to = pk_density_radius(cfg, std::sqrt(r_to));
      const double v = std::min(1.0, p_to / p_from);
      sums[side] += v;
      sumsq[side] += v * v;
    }
  }
  double var = 0.0;
  double total = 0.0;
  for (int side = 0; side < 2; ++side) {
    const double mean = sums[side] / half;
    total += mean;
    const double v = (sumsq[side] / half - mean * mean) / std::max<long>(1, half - 1);
    var += v;
  }
  out.value = 2.0 - total;
  out.error_estimate = std::sqrt(var);
  return out;
}

}  // namespace

TVResult tv_overlap_separation(const LevyConfig& cfg, double separation, TVMethod method,
                               RngStream* rng, long mc_samples) {
  cfg.validate();
  if (!(separation >= 0.0) || !std::isfinite(separation))
    throw std::invalid_argument("tv_overlap: separation must be finite and >= 0");
  switch (method) {
    case TVMethod::quadrature:
      if (cfg.D != 1) throw std::invalid_argument("tv_overlap: quadrature requires D == 1");
      return tv_quadrature_1d(cfg, separation);
    case TVMethod::spherical_reduction:
      if (cfg.D < 2) throw std::invalid_argument("tv_overlap: spherical_reduction requires D >= 2");
      return tv_spherical(cfg, separation);
    case TVMethod::monte_carlo: {
      if (rng == nullptr) throw std::invalid_argument("tv_overlap: monte_carlo needs a stream");
      std::vector<double> x1(cfg.D, 0.0), x2(cfg.D, 0.0);
      x2[0] = separation;
      return tv_monte_carlo(cfg, x1, x2, *rng, mc_samples);
    }
  }
  throw std::invalid_argument("tv_overlap: unknown method");
}

TVResult tv_overlap(const LevyConfig& cfg, std::span<const double> x1, std::span<const double> x2,
                    TVMethod method, RngStream* rng, long mc_samples) {
  cfg.validate();
  if (static_cast<int>(x1.size()) != cfg.D || static_cast<int>(x2.size()) != cfg.D)
    throw std::invalid_argument("tv_overlap: centers must be D-vectors");
  for (int i = 0; i < cfg.D; ++i)
    if (!std::isfinite(x1[i]) || !std::isfinite(x2[i]))
      throw std::invalid_argument("tv_overlap: non-finite center");
  if (method == TVMethod::monte_carlo) {
    if (rng == nullptr) throw std::invalid_argument("tv_overlap: monte_carlo needs a stream");
    bool equal = true;
    for (int i = 0; i < cfg.D; ++i) equal = equal && x1[i] == x2[i];
    if (equal) return TVResult{0.0, TVMethod::monte_carlo, 0.0};
    return tv_monte_carlo(cfg, x1, x2, *rng, mc_samples);
  }
  double s2 = 0.0;
  for (int i = 0; i < cfg.D; ++i) {
    const double d = x1[i] - x2[i];
    s2 += d * d;
  }
  return tv_overlap_separation(cfg, std::sqrt(s2), method, rng, mc_samples);
}

AssumptionConstants estimate_assumption_constants(const LevyConfig& cfg, double M) {
  cfg.validate();
  if (!(M > 0.0)) throw std::invalid_argument("estimate_assumption_constants: M must be > 0");
  const TVMethod method = cfg.D == 1 ? TVMethod::quadrature : TVMethod::spherical_reduction;
  auto tv = [&](double s) { return tv_overlap_separation(cfg, s, method); };

  AssumptionConstants out;
  out.beta2 = 1.0;

  // beta0: both centers in the M-ball means separation <= M; sweep a grid and
  // keep the maximum together with its quadrature error.
  const int n0 = 16;
  for (int i = 1; i <= n0; ++i) {
    const TVResult r = tv(M * i / n0);
    if (r.value > out.beta0) {
      out.beta0 = r.value;
      out.beta0_error = r.error_estimate;
    }
  }
  if (!(out.beta0 + out.beta0_error < 2.0))
    throw DiagnosticError(
        "estimate_assumption_constants: cannot certify overlap bound beta0 < 2 at M=" +
        std::to_string(M) + " (value " + std::to_string(out.beta0) + ")");

  // beta1: bound on tv(s)/s over separations up to 2M, refined toward s -> 0
  // with one Richardson step.
  std::vector<double> seps = {1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0};
  for (double frac : {1.25, 1.5, 1.75, 2.0}) seps.push_back(frac);
  for (double& s : seps) s *= M;
  double r_h = 0.0, r_2h = 0.0;
  for (double s : seps) {
    const TVResult r = tv(s);
    const double ratio = r.value / s;
    if (ratio > out.beta1) {
      out.beta1 = ratio;
      out.max_ratio_separation = s;
    }
  }
  {
    const double h = 1e-3 * M;
    r_h = tv(h).value / h;
    r_2h = tv(2.0 * h).value / (2.0 * h);
    const double extrap = 2.0 * r_h - r_2h;
    if (extrap > out.beta1) {
      out.beta1 = extrap;
      out.max_ratio_separation = 0.0;
    }
  }
  return out;
}

}  // namespace levymix
