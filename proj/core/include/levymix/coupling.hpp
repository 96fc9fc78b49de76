#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "levymix/levy_noise.hpp"
#include "levymix/spde_model.hpp"

namespace levymix {

// Pair of copies driven by shared noise except at coupling times, where the
// leading D components are redrawn from the maximal coupling.
struct CoupledState {
  State sx, sy;
  bool first_components_merged = false;  // informational: Sx_1 == Sy_1 exactly
};

CoupledState make_coupled(State x, State y);

struct FirstHit {
  long k = -1;  // chain index of the first hit, -1 = censored at k_max
  bool hit() const { return k >= 0; }
};

// Chain bookkeeping along coupling times. Vectors are 0-indexed by i with
// chain index k = i+1; delta[i] is the contraction factor over the interval
// ending at tau_tilde[i] (the first interval starts at time 0).
struct StoppingTimeRecord {
  std::vector<double> tau_tilde;
  std::vector<double> delta;
  std::vector<std::uint8_t> coupled_flags;
  std::vector<double> norm_sum;      // ||Sx(k)|| + ||Sy(k)||
  std::vector<double> pair_dist;     // ||Sx(k) - Sy(k)||
  std::vector<double> pair_dist_h2;  // distance restricted to modes > D
  double initial_dist = 0.0;
  long k_max = 0;

  // First-hit summaries, filled by track_stopping_times.
  FirstHit sigma_tilde, sigma, sigma_hat, sigma_dagger, sigma_bar;
  std::vector<FirstHit> sigma_bar_seq;

  long n() const { return static_cast<long>(tau_tilde.size()); }
};

struct CouplingConstants {
  double kappa = 0.0;  // beta1 * exp(beta2 * f_lip * T)
  double beta0 = 0.0, beta1 = 0.0, beta2 = 1.0;
};

CouplingConstants derive_coupling_constants(const AssumptionConstants& ac, double f_lip,
                                            double T_refractory);

struct MaxCouplingResult {
  std::vector<double> zx, zy;
  bool coupled = false;
};

// Maximal coupling of the big-jump law shifted to the two centers:
// marginals p_K(.-cx) and p_K(.-cy), equality fails with probability
// (1/2) integral |p_K(.-cx) - p_K(.-cy)|. The residual is drawn by
// rejection from the normalized positive part of the density difference.
MaxCouplingResult maximal_coupling_draw(std::span<const double> center_x,
                                        std::span<const double> center_y, const LevyConfig& cfg,
                                        RngStream& rng);

// Contraction factor over an inter-coupling gap:
// exp(-lambda_{D+1} gap) + f_lip exp(gap f_lip) / (lambda_{D+1} + f_lip).
double compute_delta_k(double gap, double lambda_Dp1, double f_lip);

// Advances both copies to `until` under fully shared noise: shared band
// increments each substep and shared big jumps at Poisson(gamma_K) times.
CoupledState run_coupled_segment(CoupledState cs, double until, const ModelConfig& model,
                                 RngStream& shared_noise);

// Replaces the leading components by a maximal-coupling draw centered at the
// pre-jump leading components; modes above D are untouched.
std::pair<CoupledState, bool> apply_coupled_big_jump(const CoupledState& cs,
                                                     const LevyConfig& cfg,
                                                     RngStream& coupling_rng);

struct CoupledHooks {
  std::function<void(const CoupledState&)> on_grid;  // after every substep
  std::function<void(const CoupledState&, const CoupledState&, bool)> on_coupling;  // pre, post
  std::function<void(const CoupledState&, const JumpEvent&)> on_shared_jump;
};

struct CoupledPathSample {
  std::vector<double> times;
  std::vector<double> fx, fy;        // observable values when one is supplied
  std::vector<double> dist;          // ||Sx - Sy|| at the recorded times
  std::vector<double> dist_h2;
  std::vector<std::uint8_t> h1_equal;
  StoppingTimeRecord record;
  CoupledState final_state;
};

// Full coupled driver: refractory-window shared big jumps, maximal coupling
// at the selected coupling times, chain statistics up to k_max couplings or
// the horizon, observables at the requested record times.
CoupledPathSample run_coupled_path(const State& x, const State& y, const ModelConfig& model,
                                   double horizon, long k_max,
                                   std::span<const double> record_times,
                                   const std::function<double(const State&)>* observable,
                                   RngStream& shared_noise, RngStream& coupling_rng,
                                   const CoupledHooks* hooks = nullptr);

struct ChainResult {
  std::vector<CoupledState> chain_states;  // at coupling times, post-jump
  StoppingTimeRecord record;
};

// Chain view: exactly k_max coupling steps (no horizon cut).
ChainResult run_coupled_chain(const State& x, const State& y, const ModelConfig& model,
                              long k_max, RngStream& shared_noise, RngStream& coupling_rng);

// Deterministic recomputation of every first-hit index from the stored chain
// statistics; idempotent, unhit values censored at k_max.
void track_stopping_times(StoppingTimeRecord& record, double M, double d);

}  // namespace levymix
