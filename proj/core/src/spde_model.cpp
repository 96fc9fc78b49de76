#include "levymix/spde_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levymix {

double SpectrumSpec::lambda_Dp1() const {
  if (N() < D + 1)
    throw std::invalid_argument("spectrum: lambda_{D+1} requested but N < D+1");
  return lambdas[D];
}

void SpectrumSpec::validate(bool need_lambda_Dp1) const {
  if (lambdas.empty()) throw std::invalid_argument("spectrum: empty eigenvalue list");
  if (D < 1) throw std::invalid_argument("spectrum: D must be >= 1");
  if (N() < D) throw std::invalid_argument("spectrum: N must be >= D");
  double prev = 0.0;
  for (double l : lambdas) {
    if (!(l > 0.0)) throw std::invalid_argument("spectrum: eigenvalues must be positive");
    if (l < prev) throw std::invalid_argument("spectrum: eigenvalues must be ascending");
    prev = l;
  }
  if (need_lambda_Dp1 && N() < D + 1)
    throw std::invalid_argument(
        "spectrum: contraction diagnostics need N >= D+1 (lambda_{D+1} undefined)");
}

SpectrumSpec build_example_spectrum(int d, int N) {
  if (d < 1 || N < 1) throw std::invalid_argument("build_example_spectrum: d >= 1 and N >= 1");
  SpectrumSpec spec;
  spec.source = "example_dirichlet:" + std::to_string(d);
  // Enumerate |k|^2 over a box large enough that the N-th smallest value is
  // certainly inside it: if the N-th value were > B^2 a bigger box is needed.
  int B = std::max(2, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(N)))) + 1);
  for (;;) {
    std::vector<double> vals;
    std::vector<int> k(d, 1);
    for (;;) {
      long sq = 0;
      for (int i = 0; i < d; ++i) sq += static_cast<long>(k[i]) * k[i];
      vals.push_back(static_cast<double>(sq));
      int pos = 0;
      while (pos < d) {
        if (++k[pos] <= B) break;
        k[pos] = 1;
        ++pos;
      }
      if (pos == d) break;
    }
    std::sort(vals.begin(), vals.end());
    if (static_cast<int>(vals.size()) >= N && vals[N - 1] <= static_cast<double>(B) * B) {
      spec.lambdas.assign(vals.begin(), vals.begin() + N);
      return spec;
    }
    B *= 2;
  }
}

Nonlinearity Nonlinearity::zero() { return Nonlinearity{}; }

Nonlinearity Nonlinearity::mode_tanh(double a, double g, std::vector<int> modes, int N) {
  if (!(a >= 0.0) || !(g >= 0.0)) throw std::invalid_argument("mode_tanh: a, g must be >= 0");
  Nonlinearity f;
  f.kind_ = Kind::mode_tanh;
  f.a_ = a;
  f.g_ = g;
  if (modes.empty())
    for (int i = 1; i <= N; ++i) modes.push_back(i);
  for (int m : modes)
    if (m < 1 || m > N) throw std::invalid_argument("mode_tanh: mode index out of range");
  std::sort(modes.begin(), modes.end());
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
  f.modes_.reserve(modes.size());
  for (int m : modes) f.modes_.push_back(m - 1);
  f.f_sup_ = a * std::sqrt(static_cast<double>(f.modes_.size()));
  f.f_lip_ = a * g;
  f.description_ = "mode_tanh(a=" + std::to_string(a) + ",g=" + std::to_string(g) +
                   ",modes=" + std::to_string(f.modes_.size()) + ")";
  return f;
}

Nonlinearity Nonlinearity::table(double a, double g, std::vector<TableEntry> entries, int N) {
  if (!(a >= 0.0) || !(g >= 0.0)) throw std::invalid_argument("table: a, g must be >= 0");
  if (entries.empty()) throw std::invalid_argument("table: needs at least one entry");
  Nonlinearity f;
  f.kind_ = Kind::table;
  f.a_ = a;
  f.g_ = g;
  std::vector<double> row_abs(N, 0.0), col_abs(N, 0.0);
  std::vector<char> row_used(N, 0);
  for (const TableEntry& e : entries) {
    if (e.row < 1 || e.row > N || e.col < 1 || e.col > N)
      throw std::invalid_argument("table: index out of range");
    row_abs[e.row - 1] += std::abs(e.weight);
    col_abs[e.col - 1] += std::abs(e.weight);
    row_used[e.row - 1] = 1;
  }
  f.entries_ = std::move(entries);
  int rows = 0;
  for (int i = 0; i < N; ++i)
    if (row_used[i]) {
      ++rows;
      f.modes_.push_back(i);  // distinct rows, 0-based, for the tanh pass
    }
  const double winf = *std::max_element(row_abs.begin(), row_abs.end());
  const double w1 = *std::max_element(col_abs.begin(), col_abs.end());
  f.f_sup_ = a * std::sqrt(static_cast<double>(rows));
  f.f_lip_ = a * g * std::sqrt(w1 * winf);
  f.description_ = "table(a=" + std::to_string(a) + ",g=" + std::to_string(g) +
                   ",entries=" + std::to_string(f.entries_.size()) + ")";
  return f;
}

void Nonlinearity::eval(std::span<const double> x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  switch (kind_) {
    case Kind::zero:
      return;
    case Kind::mode_tanh:
      for (int m : modes_) out[m] = a_ * std::tanh(g_ * x[m]);
      return;
    case Kind::table: {
      for (const TableEntry& e : entries_) out[e.row - 1] += e.weight * x[e.col - 1];
      for (int r : modes_) out[r] = a_ * std::tanh(g_ * out[r]);
      return;
    }
  }
}

std::string Nonlinearity::describe() const { return description_; }

double vec_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double state_norm(const State& s) { return vec_norm(s.coeffs); }

double state_dist(const State& a, const State& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
    const double d = a.coeffs[i] - b.coeffs[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double state_dist_tail(const State& a, const State& b, int from) {
  double s = 0.0;
  for (std::size_t i = from; i < a.coeffs.size(); ++i) {
    const double d = a.coeffs[i] - b.coeffs[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::pair<std::vector<double>, std::vector<double>> split_H1_H2(const State& s, int D) {
  if (D < 0 || D > static_cast<int>(s.coeffs.size()))
    throw std::invalid_argument("split_H1_H2: bad D");
  return {std::vector<double>(s.coeffs.begin(), s.coeffs.begin() + D),
          std::vector<double>(s.coeffs.begin() + D, s.coeffs.end())};
}

void ModelConfig::validate(bool need_contraction) const {
  levy.validate();
  spectrum.validate(need_contraction);
  if (spectrum.D != levy.D)
    throw std::invalid_argument("config: spectrum.D and levy.D must agree");
  if (!(dt > 0.0)) throw std::invalid_argument("numerics.dt must be > 0");
  if (T_refractory < 0.0) throw std::invalid_argument("numerics.T_refractory must be >= 0");
  if (!(verification.p > 0.0 && verification.p < levy.alpha))
    throw std::invalid_argument("verification.p must lie in (0, alpha)");
  if (!(verification.M > 0.0)) throw std::invalid_argument("verification.M must be > 0");
  if (!(verification.d_small > 0.0)) throw std::invalid_argument("verification.d_small must be > 0");
  if (!(verification.horizon > 0.0)) throw std::invalid_argument("verification.horizon must be > 0");
  if (verification.replicas < 1) throw std::invalid_argument("verification.replicas must be >= 1");
}

PathEngine::PathEngine(const ModelConfig& model)
    : model_(&model), f_buf_(model.spectrum.N(), 0.0), small_(model.levy),
      noise_buf_(model.levy.D, 0.0) {}

void PathEngine::step(State& s, double h, const double* noise) const {
  const auto& lambdas = model_->spectrum.lambdas;
  const int N = static_cast<int>(lambdas.size());
  const int D = model_->levy.D;
  model_->nonlinearity.eval(s.coeffs, f_buf_);
  for (int i = 0; i < N; ++i) {
    const double lh = lambdas[i] * h;
    const double decay = std::exp(-lh);
    const double phi = -std::expm1(-lh) / lambdas[i];
    double v = decay * s.coeffs[i] + phi * f_buf_[i];
    if (noise != nullptr && i < D) v += noise[i];
    s.coeffs[i] = v;
  }
  s.time += h;
}

const double* PathEngine::draw_small(double h, RngStream& rng) {
  std::fill(noise_buf_.begin(), noise_buf_.end(), 0.0);
  small_.add(h, rng, noise_buf_.data());
  return noise_buf_.data();
}

State evolve_step(const State& s, double h, std::span<const double> noise_increment,
                  const ModelConfig& model) {
  if (!(h > 0.0)) throw std::invalid_argument("evolve_step: h must be > 0");
  if (!noise_increment.empty() && static_cast<int>(noise_increment.size()) != model.levy.D)
    throw std::invalid_argument("evolve_step: noise increment must be a D-vector");
  State out = s;
  PathEngine engine(model);
  engine.step(out, h, noise_increment.empty() ? nullptr : noise_increment.data());
  return out;
}

State apply_jump(const State& s, const JumpEvent& event) {
  State out = s;
  const int D = static_cast<int>(event.delta.size());
  if (D > static_cast<int>(out.coeffs.size()))
    throw std::invalid_argument("apply_jump: jump dimension exceeds state dimension");
  for (int i = 0; i < D; ++i) out.coeffs[i] += event.delta[i];
  return out;
}

PathSample simulate_path(const State& x0, double horizon, const ModelConfig& model,
                         std::span<const double> record_times, RngStream& noise) {
  model.validate();
  if (!(horizon > 0.0)) throw std::invalid_argument("simulate_path: horizon must be > 0");
  if (static_cast<int>(x0.coeffs.size()) != model.spectrum.N())
    throw std::invalid_argument("simulate_path: state dimension != N");

  PathSample out;
  PathEngine engine(model);
  const double rate = gamma_K(model.levy);
  const double t0 = x0.time;

  std::vector<double> rec(record_times.begin(), record_times.end());
  std::sort(rec.begin(), rec.end());

  State s = x0;
  double next_big = t0 + noise.exponential(rate);
  double last_coupling = t0;  // refractory origin
  std::size_t ri = 0;
  long gi = 1;  // next grid index relative to t0

  while (rec.size() > ri && rec[ri] <= t0 + 1e-15) {
    out.times.push_back(s.time);
    out.states.push_back(s);
    ++ri;
  }

  const double t_end = t0 + horizon;
  while (s.time < t_end - 1e-15) {
    const double t_grid = t0 + static_cast<double>(gi) * model.dt;
    double t_next = std::min(t_grid, t_end);
    if (ri < rec.size()) t_next = std::min(t_next, rec[ri]);
    const bool jump_now = next_big <= t_next;
    if (jump_now) t_next = next_big;

    const double h = t_next - s.time;
    if (h > 0.0) engine.step(s, h, engine.draw_small(h, noise));
    s.time = t_next;  // avoid drift from accumulated h additions

    if (ri < rec.size() && rec[ri] <= t_next + 1e-15 && !jump_now) {
      out.times.push_back(s.time);
      out.states.push_back(s);
      ++ri;
    }
    if (jump_now) {
      JumpEvent ev;
      ev.time = t_next;
      ev.delta = sample_big_jump(model.levy, noise);
      ev.is_big = true;
      if (t_next > last_coupling + model.T_refractory) {
        ev.is_coupling_time = true;
        last_coupling = t_next;
      }
      for (int i = 0; i < model.levy.D; ++i) s.coeffs[i] += ev.delta[i];
      out.jumps.push_back(std::move(ev));
      next_big = t_next + noise.exponential(rate);
    } else if (t_next >= t_grid - 1e-15) {
      ++gi;
    }
  }
  while (ri < rec.size()) {
    out.times.push_back(s.time);
    out.states.push_back(s);
    ++ri;
  }
  return out;
}

}  // namespace levymix
