#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "levymix/levy_noise.hpp"
#include "levymix/rng.hpp"

namespace levymix {

// Diagonal drift spectrum: mode i relaxes at rate lambdas[i]. The first D
// modes form the noise-driven block.
struct SpectrumSpec {
  std::vector<double> lambdas;  // ascending, positive
  int D = 1;
  std::string source = "explicit";

  int N() const { return static_cast<int>(lambdas.size()); }
  double lambda1() const { return lambdas.front(); }
  double lambda_Dp1() const;  // throws if N < D+1
  void validate(bool need_lambda_Dp1) const;
};

// The N smallest Dirichlet-Laplacian eigenvalues |k|^2 over k in {1,2,...}^d,
// ascending with multiplicity.
SpectrumSpec build_example_spectrum(int d, int N);

// Bounded Lipschitz drift nonlinearity with certified norm constants.
class Nonlinearity {
 public:
  enum class Kind { zero, mode_tanh, table };

  static Nonlinearity zero();
  // x_i -> a tanh(g x_i) on the given modes (1-based; empty = all of 1..N).
  static Nonlinearity mode_tanh(double a, double g, std::vector<int> modes, int N);
  // F_i(x) = a tanh(g (Wx)_i) with W given as sparse (row, col, weight)
  // triples (1-based). The Lipschitz constant is certified through the
  // Schur bound ||W||_2 <= sqrt(||W||_1 ||W||_inf).
  struct TableEntry {
    int row = 1, col = 1;
    double weight = 1.0;
  };
  static Nonlinearity table(double a, double g, std::vector<TableEntry> entries, int N);

  void eval(std::span<const double> x, std::span<double> out) const;
  double f_sup() const { return f_sup_; }
  double f_lip() const { return f_lip_; }
  Kind kind() const { return kind_; }
  std::string describe() const;

 private:
  Kind kind_ = Kind::zero;
  double a_ = 0.0, g_ = 0.0;
  double f_sup_ = 0.0, f_lip_ = 0.0;
  std::vector<int> modes_;            // mode_tanh, 0-based
  std::vector<TableEntry> entries_;   // table, 1-based as given
  std::string description_ = "zero";
};

struct State {
  std::vector<double> coeffs;
  double time = 0.0;
};

double vec_norm(std::span<const double> v);
double state_norm(const State& s);
double state_dist(const State& a, const State& b);
// Euclidean distance restricted to coordinates [from, coeffs.size()).
double state_dist_tail(const State& a, const State& b, int from);

// (first D coefficients, remaining N-D coefficients)
std::pair<std::vector<double>, std::vector<double>> split_H1_H2(const State& s, int D);

struct VerificationConfig {
  double p = 0.75;        // moment order, must be < levy.alpha
  double M = 1.0;         // ball radius for the return stopping time
  double d_small = 0.05;  // proximity radius for the closeness stopping time
  double horizon = 10.0;
  int replicas = 1000;
  std::uint64_t seed = 12345;
};

struct ModelConfig {
  LevyConfig levy;
  SpectrumSpec spectrum;
  Nonlinearity nonlinearity;
  double T_refractory = 1.0;
  double dt = 1e-3;
  VerificationConfig verification;

  // need_contraction additionally requires N >= D+1 so lambda_{D+1} exists.
  void validate(bool need_contraction = false) const;
};

// One exponential-Euler step of length h with the nonlinearity frozen at the
// start state: x_i <- e^{-l_i h} x_i + (1-e^{-l_i h})/l_i F_i(x) + noise_i
// (noise only on the first D modes). Pass an empty span for no noise.
State evolve_step(const State& s, double h, std::span<const double> noise_increment,
                  const ModelConfig& model);

// Adds the jump to the first D coefficients; modes above D are untouched.
State apply_jump(const State& s, const JumpEvent& event);

struct PathSample {
  std::vector<double> times;
  std::vector<State> states;    // at the requested times
  std::vector<JumpEvent> jumps; // big jumps only, coupling times flagged
};

// Single-path simulation: exponential-Euler stepping on the dt grid, band
// noise per substep, big jumps at Poisson(gamma_K) times applied at their
// exact sampled times, coupling times marked by the refractory rule.
PathSample simulate_path(const State& x0, double horizon, const ModelConfig& model,
                         std::span<const double> record_times, RngStream& noise);

// Shared stepping core used by the single and coupled drivers.
class PathEngine {
 public:
  explicit PathEngine(const ModelConfig& model);

  // Advances the state in place by h using one already-sampled noise
  // increment (nullptr = none).
  void step(State& s, double h, const double* noise) const;

  // Draws one shared band increment over h into the scratch buffer and
  // returns a pointer to it.
  const double* draw_small(double h, RngStream& rng);

  const ModelConfig& model() const { return *model_; }

 private:
  const ModelConfig* model_;
  mutable std::vector<double> f_buf_;
  SmallIncrementSampler small_;
  std::vector<double> noise_buf_;
};

}  // namespace levymix
