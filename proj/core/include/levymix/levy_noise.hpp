#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "levymix/rng.hpp"

namespace levymix {

// Raised when a sampler or estimator hits a numerical guard (rejection caps,
// uncertifiable grids). The CLI maps it to its own exit code.
class DiagnosticError : public std::runtime_error {
 public:
  explicit DiagnosticError(const std::string& what) : std::runtime_error(what) {}
};

// Rotationally symmetric heavy-tailed jump law with intensity
//   nu(dz) = c_nu |z|^{-D-alpha} dz  on R^D,
// split at |z| = K into the big-jump law p_K and the small-jump remainder.
struct LevyConfig {
  double alpha = 1.5;   // stability index, in (0,2)
  int D = 1;            // noise dimension
  double c_nu = 1.0;    // intensity multiplier
  double K = 1.0;       // big-jump threshold
  double eps_small = 0.05;           // inner cutoff of the simulated band
  bool gaussian_correction = true;   // substitute for jumps below eps_small

  void validate() const;  // throws std::invalid_argument
};

struct JumpEvent {
  double time = 0.0;
  std::vector<double> delta;      // D-vector
  bool is_big = false;            // |delta| >= K
  bool is_coupling_time = false;  // big jump selected by the refractory rule
};

enum class TVMethod { quadrature, monte_carlo, spherical_reduction };

std::string to_string(TVMethod m);

struct TVResult {
  double value = 0.0;  // integral of |p1 - p2| over R^D, in [0, 2]
  TVMethod method = TVMethod::quadrature;
  double error_estimate = 0.0;
};

// Surface area of the unit sphere S^{dim-1} in R^dim (dim >= 1; S^0 = 2).
double sphere_surface_area(int dim);

// Rate of jumps with |z| >= K: c_nu * S_{D-1} * K^{-alpha} / alpha.
double gamma_K(const LevyConfig& cfg);

// Density of the normalized big-jump law: (alpha K^alpha / S_{D-1}) |z|^{-D-alpha}
// for |z| >= K, zero inside the ball.
double pk_density(const LevyConfig& cfg, std::span<const double> z);
double pk_density_radius(const LevyConfig& cfg, double r);  // same, by |z|

// One draw from p_K: radius K * U^{-1/alpha}, direction uniform on the sphere.
std::vector<double> sample_big_jump(const LevyConfig& cfg, RngStream& rng);

// Rate of jumps in the simulated band {eps_small <= |z| < K}.
double small_band_rate(const LevyConfig& cfg);

// Per-coordinate variance per unit time of the sub-eps_small remainder:
// c_nu * S_{D-1} * eps^{2-alpha} / (D * (2-alpha)).
double gaussian_correction_variance(const LevyConfig& cfg);

// Compound-Poisson increment of the band over dt, plus the optional Gaussian
// substitute for the part below eps_small.
std::vector<double> sample_small_increment(const LevyConfig& cfg, double dt, RngStream& rng);

// In-place variant of sample_big_jump for the path engines.
void sample_big_jump_into(const LevyConfig& cfg, RngStream& rng, double* out);

// Allocation-free band sampler for tight stepping loops. `add` accumulates
// one increment over dt into out[0..D).
class SmallIncrementSampler {
 public:
  explicit SmallIncrementSampler(const LevyConfig& cfg);
  void add(double dt, RngStream& rng, double* out);
  double band_rate() const { return rate_; }

 private:
  int D_;
  double rate_;
  double eps_pow_;
  double span_;
  double inv_alpha_;
  double corr_sd_unit_;  // Gaussian-correction sd per unit sqrt(dt); 0 if disabled
  std::vector<double> dir_;
};

// One-sided stable variable with Laplace transform exp(-u^rho), 0 < rho < 1.
double sample_positive_stable(double rho, RngStream& rng);

// Fixed-time oracle for the full increment law: Brownian motion evaluated at
// an alpha/2-stable random clock scaled to match nu. Used only to validate
// the decomposition sampler.
std::vector<double> sample_exact_increment(const LevyConfig& cfg, double t, RngStream& rng);

// Gap between consecutive refractory coupling times: T + Exp(gamma_K).
double sample_coupling_gap(const LevyConfig& cfg, double T_refractory, RngStream& rng);

// Total-variation overlap of p_K shifted to the two centers. quadrature is
// 1-D only; spherical_reduction reduces collinear centers for D >= 2;
// monte_carlo works in any dimension and needs a stream.
TVResult tv_overlap(const LevyConfig& cfg, std::span<const double> x1, std::span<const double> x2,
                    TVMethod method, RngStream* rng = nullptr, long mc_samples = 200000);

// Overlap as a function of center separation only (rotational symmetry).
TVResult tv_overlap_separation(const LevyConfig& cfg, double separation, TVMethod method,
                               RngStream* rng = nullptr, long mc_samples = 200000);

struct AssumptionConstants {
  double beta0 = 0.0;  // max overlap with both centers in the M-ball; must be < 2
  double beta1 = 0.0;  // grid bound on overlap / separation
  double beta2 = 1.0;  // stable case
  double beta0_error = 0.0;
  double max_ratio_separation = 0.0;  // separation where the beta1 grid peaked
};

// Grid estimates of the overlap constants over separations up to 2M.
// Throws DiagnosticError if beta0 < 2 cannot be certified at quadrature
// accuracy.
AssumptionConstants estimate_assumption_constants(const LevyConfig& cfg, double M);

}  // namespace levymix
