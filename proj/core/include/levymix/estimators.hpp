#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "levymix/coupling.hpp"
#include "levymix/spde_model.hpp"

namespace levymix {

// Bounded Lipschitz test functions with certified norm constants.
class ObservableSpec {
 public:
  // f(x) = tanh(gain * x_mode); mode is 1-based.
  static ObservableSpec tanh_mode(int mode, double gain);
  // f(x) = min(||x||, 1)
  static ObservableSpec capped_norm();
  // caller certifies the constants
  static ObservableSpec custom(std::function<double(const State&)> fn, double f_sup, double f_lip,
                               std::string name);

  double eval(const State& s) const { return fn_(s); }
  double f_sup() const { return f_sup_; }
  double f_lip() const { return f_lip_; }
  double f_one() const { return f_sup_ + f_lip_; }
  const std::string& name() const { return name_; }
  std::function<double(const State&)> fn() const { return fn_; }

 private:
  std::function<double(const State&)> fn_;
  double f_sup_ = 0.0, f_lip_ = 0.0;
  std::string name_;
};

enum class CheckStatus { pass, fail, censored, skipped };

std::string to_string(CheckStatus s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  std::string provenance;  // closed_form | quadrature | mc_oracle | grid
  std::string note;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  bool all_ok() const;
  void add(CheckResult c) { checks.push_back(std::move(c)); }
  void append(const VerificationReport& other);
};

struct MixingEstimate {
  std::vector<double> times, gaps, ses;
  std::vector<std::uint8_t> in_fit;
  double fitted_C = 0.0;
  double fitted_c = 0.0;
  double c_se = 0.0, c_ci_lo = 0.0, c_ci_hi = 0.0;
  double r_squared = 0.0;
  long n_fit = 0;
  std::string verdict;  // ok | identical_start | no_significant_range
};

struct EnsembleOptions {
  int replicas = 1000;
  int threads = 1;
  std::uint64_t seed = 12345;
};

// Scheme tolerance for almost-sure pathwise inequalities: first-order
// integrator error with a fixed safety margin.
double scheme_tolerance(const ModelConfig& model);

// Checks (A1)-(A4): closed-form jump rate against the Lipschitz budget,
// overlap constants on the M-ball grid, moment order below alpha.
VerificationReport validate_assumptions(const ModelConfig& model);

// Coupled-pair estimate of |E f(X^x_t) - E f(X^y_t)| on a time grid with an
// exponential fit over the range where the gap clears 3 standard errors.
MixingEstimate estimate_mixing_rate(const ModelConfig& model, const State& x, const State& y,
                                    const ObservableSpec& obs, std::span<const double> time_grid,
                                    const EnsembleOptions& opts);

// Almost-sure inequalities along synchronous segments of coupled pairs plus
// the moment-envelope check; zero violations allowed beyond the scheme
// tolerance.
VerificationReport verify_pathwise_bounds(const ModelConfig& model, const EnsembleOptions& opts);

// One-step expansion probability against kappa * gap0^{beta2} and beta0/2.
VerificationReport verify_contraction(const ModelConfig& model, double gap0,
                                      const EnsembleOptions& opts);

enum class StoppingKind { sigma_tilde, sigma, sigma_hat, sigma_bar };

std::string to_string(StoppingKind k);

struct StoppingMomentEstimate {
  StoppingKind which = StoppingKind::sigma_tilde;
  double theta = 0.0;
  double estimate = 0.0;       // mean of e^{theta k} over hit replicas (others 0)
  double censored_fraction = 0.0;
  double never_hit_fraction = 0.0;  // alias of censored_fraction, for sigma_hat
  long k_max = 0;
  long replicas = 0;
};

StoppingMomentEstimate estimate_stopping_moments(std::span<const StoppingTimeRecord> records,
                                                 double theta, StoppingKind which);

// Refractory gap law: tail of the l-th coupling time against the explicit
// bound (2 e^{gamma_K T/2})^l e^{-gamma_K t/2}.
VerificationReport verify_tail_bound(const ModelConfig& model, int l, double t,
                                     const EnsembleOptions& opts);

// Quantile comparison of the decomposition increment sampler against the
// subordinated exact sampler at time t.
VerificationReport crosscheck_noise(const ModelConfig& model, double t,
                                    const EnsembleOptions& opts);

}  // namespace levymix
