#include "levymix/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace levymix {

namespace {
constexpr long kRejectionCap = 1000000;

bool spans_equal(std::span<const double> a, std::span<const double> b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}
}  // namespace

CoupledState make_coupled(State x, State y) {
  if (x.coeffs.size() != y.coeffs.size())
    throw std::invalid_argument("make_coupled: state dimensions differ");
  if (x.time != y.time) throw std::invalid_argument("make_coupled: state times differ");
  CoupledState cs{std::move(x), std::move(y), false};
  cs.first_components_merged = spans_equal(cs.sx.coeffs, cs.sy.coeffs);
  return cs;
}

CouplingConstants derive_coupling_constants(const AssumptionConstants& ac, double f_lip,
                                            double T_refractory) {
  CouplingConstants out;
  out.beta0 = ac.beta0;
  out.beta1 = ac.beta1;
  out.beta2 = ac.beta2;
  out.kappa = ac.beta1 * std::exp(ac.beta2 * f_lip * T_refractory);
  return out;
}

MaxCouplingResult maximal_coupling_draw(std::span<const double> center_x,
                                        std::span<const double> center_y, const LevyConfig& cfg,
                                        RngStream& rng) {
  if (static_cast<int>(center_x.size()) != cfg.D || static_cast<int>(center_y.size()) != cfg.D)
    throw std::invalid_argument("maximal_coupling_draw: centers must be D-vectors");
  for (int i = 0; i < cfg.D; ++i)
    if (!std::isfinite(center_x[i]) || !std::isfinite(center_y[i]))
      throw std::invalid_argument("maximal_coupling_draw: non-finite center");

  MaxCouplingResult out;
  out.zx.resize(cfg.D);
  sample_big_jump_into(cfg, rng, out.zx.data());
  for (int i = 0; i < cfg.D; ++i) out.zx[i] += center_x[i];

  if (spans_equal(center_x, center_y)) {
    out.zy = out.zx;
    out.coupled = true;
    return out;
  }

  double rx = 0.0, ry = 0.0;
  for (int i = 0; i < cfg.D; ++i) {
    const double dx = out.zx[i] - center_x[i];
    const double dy = out.zx[i] - center_y[i];
    rx += dx * dx;
    ry += dy * dy;
  }
  const double p1 = pk_density_radius(cfg, std::sqrt(rx));
  const double p2 = pk_density_radius(cfg, std::sqrt(ry));
  if (rng.uniform() * p1 <= p2) {
    out.zy = out.zx;
    out.coupled = true;
    return out;
  }

  // Residual branch: rejection from p_K(.-center_y) against (p2-p1)+/p2.
  out.zy.resize(cfg.D);
  for (long it = 1; it <= kRejectionCap; ++it) {
    sample_big_jump_into(cfg, rng, out.zy.data());
    for (int i = 0; i < cfg.D; ++i) out.zy[i] += center_y[i];
    double qx = 0.0, qy = 0.0;
    for (int i = 0; i < cfg.D; ++i) {
      const double dx = out.zy[i] - center_x[i];
      const double dy = out.zy[i] - center_y[i];
      qx += dx * dx;
      qy += dy * dy;
    }
    const double q1 = pk_density_radius(cfg, std::sqrt(qx));
    const double q2 = pk_density_radius(cfg, std::sqrt(qy));
    if (rng.uniform() * q2 <= q2 - q1) {
      out.coupled = false;
      return out;
    }
  }
  throw DiagnosticError(
      "maximal_coupling_draw: residual rejection cap exceeded (acceptance rate below " +
      std::to_string(1.0 / kRejectionCap) + "; center separation likely near zero)");
}

double compute_delta_k(double gap, double lambda_Dp1, double f_lip) {
  if (!(gap >= 0.0)) throw std::invalid_argument("compute_delta_k: gap must be >= 0");
  return std::exp(-lambda_Dp1 * gap) + f_lip * std::exp(gap * f_lip) / (lambda_Dp1 + f_lip);
}

// Big-jump arrivals follow one Poisson(gamma_K) clock on the shared stream;
// arrivals inside the refractory window are applied to both copies, and the
// first arrival past the window is the next coupling time.
CoupledPathSample run_coupled_path(const State& x, const State& y, const ModelConfig& model,
                                   double horizon, long k_max,
                                   std::span<const double> record_times,
                                   const std::function<double(const State&)>* observable,
                                   RngStream& shared_noise, RngStream& coupling_rng,
                                   const CoupledHooks* hooks) {
  model.validate(/*need_contraction=*/true);
  if (!(horizon > 0.0)) throw std::invalid_argument("run_coupled_path: horizon must be > 0");
  if (k_max < 1) throw std::invalid_argument("run_coupled_path: k_max must be >= 1");

  PathEngine engine(model);
  const double gamma = gamma_K(model.levy);
  const double lambda_dp1 = model.spectrum.lambda_Dp1();
  const int D = model.levy.D;
  const double f_lip = model.nonlinearity.f_lip();

  CoupledPathSample out;
  CoupledState cs = make_coupled(x, y);
  out.record.initial_dist = state_dist(cs.sx, cs.sy);

  std::vector<double> rec(record_times.begin(), record_times.end());
  std::sort(rec.begin(), rec.end());
  std::size_t ri = 0;

  const double t0 = x.time;
  const double t_end = t0 + horizon;
  double prev_tau = t0;
  double next_arr = t0 + shared_noise.exponential(gamma);
  long gi = 1;
  long k = 0;

  auto record_at = [&](const CoupledState& c) {
    out.times.push_back(c.sx.time);
    if (observable != nullptr) {
      out.fx.push_back((*observable)(c.sx));
      out.fy.push_back((*observable)(c.sy));
    }
    out.dist.push_back(state_dist(c.sx, c.sy));
    out.dist_h2.push_back(state_dist_tail(c.sx, c.sy, D));
    out.h1_equal.push_back(
        spans_equal(std::span(c.sx.coeffs).first(D), std::span(c.sy.coeffs).first(D)) ? 1 : 0);
  };

  while (ri < rec.size() && rec[ri] <= t0 + 1e-15) {
    record_at(cs);
    ++ri;
  }

  while (cs.sx.time < t_end - 1e-15 && k < k_max) {
    const double t_grid = t0 + static_cast<double>(gi) * model.dt;
    double t_next = std::min(t_grid, t_end);
    if (ri < rec.size()) t_next = std::min(t_next, rec[ri]);
    const bool arrival = next_arr <= t_next;
    if (arrival) t_next = next_arr;

    const double h = t_next - cs.sx.time;
    if (h > 0.0) {
      const double* noise = engine.draw_small(h, shared_noise);
      engine.step(cs.sx, h, noise);
      engine.step(cs.sy, h, noise);
    }
    cs.sx.time = cs.sy.time = t_next;
    if (h > 0.0 && hooks != nullptr && hooks->on_grid) hooks->on_grid(cs);

    if (!arrival && ri < rec.size() && rec[ri] <= t_next + 1e-15) {
      record_at(cs);
      ++ri;
    }

    if (arrival) {
      if (t_next > prev_tau + model.T_refractory) {
        const CoupledState pre = cs;
        auto [post, coupled] = apply_coupled_big_jump(cs, model.levy, coupling_rng);
        cs = std::move(post);
        ++k;
        const double gap = t_next - prev_tau;
        out.record.tau_tilde.push_back(t_next);
        out.record.delta.push_back(compute_delta_k(gap, lambda_dp1, f_lip));
        out.record.coupled_flags.push_back(coupled ? 1 : 0);
        out.record.norm_sum.push_back(state_norm(cs.sx) + state_norm(cs.sy));
        out.record.pair_dist.push_back(state_dist(cs.sx, cs.sy));
        out.record.pair_dist_h2.push_back(state_dist_tail(cs.sx, cs.sy, D));
        prev_tau = t_next;
        if (hooks != nullptr && hooks->on_coupling) hooks->on_coupling(pre, cs, coupled);
      } else {
        JumpEvent ev;
        ev.time = t_next;
        ev.delta.resize(D);
        sample_big_jump_into(model.levy, shared_noise, ev.delta.data());
        ev.is_big = true;
        for (int i = 0; i < D; ++i) {
          cs.sx.coeffs[i] += ev.delta[i];
          cs.sy.coeffs[i] += ev.delta[i];
        }
        if (hooks != nullptr && hooks->on_shared_jump) hooks->on_shared_jump(cs, ev);
      }
      next_arr = t_next + shared_noise.exponential(gamma);
    } else if (t_next >= t_grid - 1e-15) {
      ++gi;
    }
  }

  while (ri < rec.size()) {
    record_at(cs);
    ++ri;
  }
  out.record.k_max = out.record.n();
  track_stopping_times(out.record, model.verification.M, model.verification.d_small);
  out.final_state = std::move(cs);
  return out;
}

CoupledState run_coupled_segment(CoupledState cs, double until, const ModelConfig& model,
                                 RngStream& shared_noise) {
  model.validate();
  if (!(until > cs.sx.time)) throw std::invalid_argument("run_coupled_segment: until <= time");
  PathEngine engine(model);
  const double gamma = gamma_K(model.levy);
  const int D = model.levy.D;
  const double t0 = cs.sx.time;
  double next_arr = t0 + shared_noise.exponential(gamma);
  long gi = 1;
  while (cs.sx.time < until - 1e-15) {
    const double t_grid = t0 + static_cast<double>(gi) * model.dt;
    double t_next = std::min(t_grid, until);
    const bool arrival = next_arr <= t_next;
    if (arrival) t_next = next_arr;
    const double h = t_next - cs.sx.time;
    if (h > 0.0) {
      const double* noise = engine.draw_small(h, shared_noise);
      engine.step(cs.sx, h, noise);
      engine.step(cs.sy, h, noise);
    }
    cs.sx.time = cs.sy.time = t_next;
    if (arrival) {
      std::vector<double> delta(D);
      sample_big_jump_into(model.levy, shared_noise, delta.data());
      for (int i = 0; i < D; ++i) {
        cs.sx.coeffs[i] += delta[i];
        cs.sy.coeffs[i] += delta[i];
      }
      next_arr = t_next + shared_noise.exponential(gamma);
    } else if (t_next >= t_grid - 1e-15) {
      ++gi;
    }
  }
  cs.first_components_merged =
      spans_equal(std::span(cs.sx.coeffs).first(D), std::span(cs.sy.coeffs).first(D));
  return cs;
}

std::pair<CoupledState, bool> apply_coupled_big_jump(const CoupledState& cs,
                                                     const LevyConfig& cfg,
                                                     RngStream& coupling_rng) {
  const int D = cfg.D;
  if (static_cast<int>(cs.sx.coeffs.size()) < D)
    throw std::invalid_argument("apply_coupled_big_jump: state dimension < D");
  const MaxCouplingResult draw = maximal_coupling_draw(
      std::span(cs.sx.coeffs).first(D), std::span(cs.sy.coeffs).first(D), cfg, coupling_rng);
  CoupledState out = cs;
  for (int i = 0; i < D; ++i) {
    out.sx.coeffs[i] = draw.zx[i];
    out.sy.coeffs[i] = draw.zy[i];
  }
  out.first_components_merged = draw.coupled;
  return {std::move(out), draw.coupled};
}

ChainResult run_coupled_chain(const State& x, const State& y, const ModelConfig& model,
                              long k_max, RngStream& shared_noise, RngStream& coupling_rng) {
  ChainResult out;
  CoupledHooks hooks;
  hooks.on_coupling = [&](const CoupledState&, const CoupledState& post, bool) {
    out.chain_states.push_back(post);
  };
  // Mean coupling gap is T + 1/gamma; size the horizon so the k_max-th
  // coupling is reached with overwhelming probability, and retry larger if a
  // heavy-tailed realization still falls short.
  const double mean_gap = model.T_refractory + 1.0 / gamma_K(model.levy);
  double horizon = (model.T_refractory == 0.0 ? 1.0 : 0.0) + 4.0 * mean_gap * (k_max + 4);
  for (int attempt = 0; attempt < 12; ++attempt) {
    out.chain_states.clear();
    RngStream noise = shared_noise;      // retry re-runs the same realization longer
    RngStream couple = coupling_rng;
    CoupledPathSample path = run_coupled_path(x, y, model, horizon, k_max, {}, nullptr, noise,
                                              couple, &hooks);
    if (path.record.n() >= k_max) {
      shared_noise = noise;
      coupling_rng = couple;
      out.record = std::move(path.record);
      return out;
    }
    horizon *= 2.0;
  }
  throw DiagnosticError("run_coupled_chain: horizon growth failed to reach k_max couplings");
}

namespace {

// dist at chain position k (0 = initial pair).
double dist_at(const StoppingTimeRecord& r, long k) {
  return k == 0 ? r.initial_dist : r.pair_dist[k - 1];
}

// First i >= 1 with pred(start + i) true, scanning to the end of the chain.
template <typename Pred>
FirstHit first_offset(long start, long n, Pred pred) {
  for (long k = start + 1; k <= n; ++k)
    if (pred(k)) return FirstHit{k - start};
  return FirstHit{};
}

FirstHit sigma_tilde_from(const StoppingTimeRecord& r, long start, double M) {
  return first_offset(start, r.n(), [&](long k) { return r.norm_sum[k - 1] <= M; });
}

FirstHit sigma_from(const StoppingTimeRecord& r, long start, double d) {
  return first_offset(start, r.n(), [&](long k) { return r.pair_dist[k - 1] <= d; });
}

FirstHit sigma_hat_from(const StoppingTimeRecord& r, long start) {
  const double base = dist_at(r, start);
  double prod = 1.0;
  for (long k = start + 1; k <= r.n(); ++k) {
    prod *= r.delta[k - 1];
    if (dist_at(r, k) > prod * base) return FirstHit{k - start};
  }
  return FirstHit{};
}

// sigma-bar composition from `start`: closeness, then envelope survival,
// then return to the M-ball. Censored as soon as one leg is censored.
FirstHit sigma_bar_from(const StoppingTimeRecord& r, long start, double M, double d) {
  const FirstHit s = sigma_from(r, start, d);
  if (!s.hit()) return FirstHit{};
  const long at_sigma = start + s.k;
  const FirstHit sh = sigma_hat_from(r, at_sigma);
  if (!sh.hit()) return FirstHit{};
  const long at_dag = at_sigma + sh.k;
  const FirstHit st = sigma_tilde_from(r, at_dag, M);
  if (!st.hit()) return FirstHit{};
  return FirstHit{s.k + sh.k + st.k};
}

}  // namespace

void track_stopping_times(StoppingTimeRecord& record, double M, double d) {
  const long n = record.n();
  if (record.delta.size() != static_cast<std::size_t>(n) ||
      record.coupled_flags.size() != static_cast<std::size_t>(n) ||
      record.norm_sum.size() != static_cast<std::size_t>(n) ||
      record.pair_dist.size() != static_cast<std::size_t>(n) ||
      record.pair_dist_h2.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("track_stopping_times: inconsistent record lengths");
  record.k_max = n;
  record.sigma_tilde = sigma_tilde_from(record, 0, M);
  record.sigma = sigma_from(record, 0, d);
  record.sigma_hat = sigma_hat_from(record, 0);
  if (record.sigma.hit()) {
    const FirstHit sh = sigma_hat_from(record, record.sigma.k);
    record.sigma_dagger = sh.hit() ? FirstHit{record.sigma.k + sh.k} : FirstHit{};
  } else {
    record.sigma_dagger = FirstHit{};
  }
  if (record.sigma_dagger.hit()) {
    const FirstHit st = sigma_tilde_from(record, record.sigma_dagger.k, M);
    record.sigma_bar = st.hit() ? FirstHit{record.sigma_dagger.k + st.k} : FirstHit{};
  } else {
    record.sigma_bar = FirstHit{};
  }
  record.sigma_bar_seq.clear();
  long pos = 0;
  for (int j = 0; j < 8; ++j) {
    const FirstHit leg = sigma_bar_from(record, pos, M, d);
    if (!leg.hit()) {
      record.sigma_bar_seq.push_back(FirstHit{});
      break;
    }
    pos += leg.k;
    record.sigma_bar_seq.push_back(FirstHit{pos});
    if (pos >= n) break;
  }
}

}  // namespace levymix
