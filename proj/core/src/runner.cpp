#include "levymix/runner.hpp"

#include <algorithm>
#include <cmath>

#include "levymix/config.hpp"
#include "levymix/estimators.hpp"
#include "levymix/output.hpp"
#include "levymix/stats.hpp"

namespace levymix {

namespace {

std::string fd(double v) { return format_double(v); }

std::vector<double> time_grid(double horizon, int points) {
  std::vector<double> g(points + 1);
  for (int i = 0; i <= points; ++i) g[i] = horizon * i / points;
  return g;
}

State zero_state(int N) { return State{std::vector<double>(N, 0.0), 0.0}; }

void write_report_csv(RunWriter& w, const std::string& filename, const VerificationReport& rep) {
  auto csv = w.open_csv(filename, {
      {"check", "name of the check"},
      {"status", "pass | fail | censored | skipped"},
      {"measured", "measured value"},
      {"target", "target or bound the measurement is compared against"},
      {"tolerance", "allowed slack around the target"},
      {"provenance", "origin of the target: closed_form | quadrature_grid | mc_oracle | ..."},
      {"note", "free-form detail"},
  });
  for (const CheckResult& c : rep.checks) {
    std::string note = c.note;
    std::replace(note.begin(), note.end(), ',', ';');
    csv.row({c.name, to_string(c.status), fd(c.measured), fd(c.target), fd(c.tolerance),
             c.provenance, note});
  }
}

EnsembleOptions ensemble_opts(const ModelConfig& m, const RunOptions& opts) {
  EnsembleOptions e;
  e.replicas = opts.replicas.value_or(m.verification.replicas);
  e.threads = opts.threads;
  e.seed = opts.seed.value_or(m.verification.seed);
  return e;
}

int run_validate(const ParsedConfig& cfg, const RunOptions& opts) {
  const ModelConfig model = cfg.build(false);
  RunWriter w(opts.out_dir, "validate");
  const VerificationReport rep = validate_assumptions(model);
  write_report_csv(w, "validate_report.csv", rep);
  w.set_kv("checks", std::to_string(rep.checks.size()));
  w.set_kv("all_ok", rep.all_ok() ? "true" : "false");
  w.finish(cfg.echo());
  return rep.all_ok() ? kExitOk : kExitVerificationFailure;
}

int run_simulate(const ParsedConfig& cfg, const RunOptions& opts) {
  const ModelConfig model = cfg.build(false);
  const EnsembleOptions e = ensemble_opts(model, opts);
  RunWriter w(opts.out_dir, "simulate");
  const double horizon = model.verification.horizon;
  const std::vector<double> grid = time_grid(horizon, 40);
  const int N = model.spectrum.N();
  const int R = e.replicas;
  const double p = model.verification.p;

  const std::size_t nt = grid.size();
  std::vector<double> norms(static_cast<std::size_t>(R) * nt);
  std::vector<double> norms_h1(static_cast<std::size_t>(R) * nt);
  std::vector<double> norms_h2(static_cast<std::size_t>(R) * nt);
  std::vector<long> big_counts(R, 0);
  std::vector<PathSample> first_path(1);

  parallel_replicas(R, e.threads, [&](int r) {
    RngStream noise(e.seed, "simulate.path", static_cast<std::uint64_t>(r));
    PathSample ps = simulate_path(zero_state(N), horizon, model, grid, noise);
    for (std::size_t j = 0; j < nt; ++j) {
      const State& s = ps.states[j];
      norms[r * nt + j] = state_norm(s);
      norms_h1[r * nt + j] = vec_norm(std::span(s.coeffs).first(model.levy.D));
      norms_h2[r * nt + j] = vec_norm(std::span(s.coeffs).subspan(model.levy.D));
    }
    big_counts[r] = static_cast<long>(ps.jumps.size());
    if (r == 0) first_path[0] = std::move(ps);
  });

  auto stats = w.open_csv("path_stats.csv", {
      {"time", "grid time"},
      {"mean_norm", "ensemble mean of ||X(t)||"},
      {"se_norm", "standard error of mean_norm"},
      {"mean_norm_p", "ensemble mean of ||X(t)||^p, p from [verification]"},
      {"mean_norm_h1", "ensemble mean of the driven-block norm"},
      {"mean_norm_h2", "ensemble mean of the undriven-block norm"},
      {"max_norm", "ensemble max of ||X(t)||"},
  });
  for (std::size_t j = 0; j < nt; ++j) {
    std::vector<double> col(R), colp(R), c1(R), c2(R);
    double mx = 0.0;
    for (int r = 0; r < R; ++r) {
      col[r] = norms[r * nt + j];
      colp[r] = std::pow(col[r], p);
      c1[r] = norms_h1[r * nt + j];
      c2[r] = norms_h2[r * nt + j];
      mx = std::max(mx, col[r]);
    }
    const MeanSE ms = mean_se(col);
    stats.row({fd(grid[j]), fd(ms.mean), fd(ms.se), fd(mean_se(colp).mean), fd(mean_se(c1).mean),
               fd(mean_se(c2).mean), fd(mx)});
  }

  auto jumps = w.open_csv("jumps.csv", {
      {"time", "jump time (replica 0)"},
      {"magnitude", "|jump|"},
      {"is_big", "1 for jumps with |z| >= K (only those are logged)"},
      {"is_coupling_time", "1 when selected by the refractory rule"},
  });
  for (const JumpEvent& ev : first_path[0].jumps)
    jumps.row({fd(ev.time), fd(vec_norm(ev.delta)), ev.is_big ? "1" : "0",
               ev.is_coupling_time ? "1" : "0"});

  double total_jumps = 0.0;
  for (int r = 0; r < R; ++r) total_jumps += static_cast<double>(big_counts[r]);
  w.set_kv("replicas", std::to_string(R));
  w.set_kv("empirical_big_jump_rate", fd(total_jumps / (R * horizon)));
  w.set_kv("gamma_K_closed_form", fd(gamma_K(model.levy)));
  if (opts.plots)
    w.write_plot_script("path_stats.gp",
                        "set datafile separator ','\n"
                        "set key autotitle columnhead\n"
                        "plot 'path_stats.csv' using 1:2 with lines title 'mean norm'\n");
  w.finish(cfg.echo());
  return kExitOk;
}

int run_couple(const ParsedConfig& cfg, const RunOptions& opts) {
  const ModelConfig model = cfg.build(true);
  const EnsembleOptions e = ensemble_opts(model, opts);
  RunWriter w(opts.out_dir, "couple");
  const int N = model.spectrum.N();
  const int R = e.replicas;
  const double mean_gap = model.T_refractory + 1.0 / gamma_K(model.levy);
  const long k_max = std::max<long>(3, std::lround(model.verification.horizon / mean_gap));

  State x = zero_state(N);
  State y = x;
  y.coeffs[0] = 1.0;

  std::vector<StoppingTimeRecord> records(R);
  parallel_replicas(R, e.threads, [&](int r) {
    RngStream shared(e.seed, "couple.shared", static_cast<std::uint64_t>(r));
    RngStream couple(e.seed, "couple.couple", static_cast<std::uint64_t>(r));
    records[r] = run_coupled_chain(x, y, model, k_max, shared, couple).record;
  });

  auto chain = w.open_csv("chain.csv", {
      {"replica", "replica index"},
      {"k", "coupling index, 1-based"},
      {"tau_tilde", "k-th coupling time"},
      {"gap", "tau_tilde_k - tau_tilde_{k-1}"},
      {"delta", "contraction factor over the gap ending at k"},
      {"coupled", "1 when the maximal coupling merged the leading blocks"},
      {"pair_dist", "||Sx(k) - Sy(k)|| just after the coupling jump"},
      {"pair_dist_h2", "distance restricted to modes above D"},
      {"norm_sum", "||Sx(k)|| + ||Sy(k)||"},
  });
  for (int r = 0; r < R; ++r) {
    const StoppingTimeRecord& rec = records[r];
    for (long i = 0; i < rec.n(); ++i) {
      const double prev = i == 0 ? 0.0 : rec.tau_tilde[i - 1];
      chain.row({std::to_string(r), std::to_string(i + 1), fd(rec.tau_tilde[i]),
                 fd(rec.tau_tilde[i] - prev), fd(rec.delta[i]),
                 rec.coupled_flags[i] ? "1" : "0", fd(rec.pair_dist[i]),
                 fd(rec.pair_dist_h2[i]), fd(rec.norm_sum[i])});
    }
  }

  auto hit_cell = [](const FirstHit& h, long k_cens) {
    return h.hit() ? std::to_string(h.k) : std::to_string(k_cens);
  };
  auto cens_cell = [](const FirstHit& h) { return h.hit() ? "0" : "1"; };
  auto stopping = w.open_csv("stopping.csv", {
      {"replica", "replica index"},
      {"k_max", "chain length the record was censored at"},
      {"sigma_tilde", "first return of ||Sx||+||Sy|| below M (censored at k_max)"},
      {"sigma_tilde_censored", "1 when sigma_tilde was not hit within k_max"},
      {"sigma", "first k with pair distance <= d"},
      {"sigma_censored", "1 when sigma was not hit"},
      {"sigma_hat", "first k where the distance exceeds the delta-product envelope"},
      {"sigma_hat_censored", "1 when sigma_hat was not hit"},
      {"sigma_dagger", "sigma + sigma_hat restarted at sigma"},
      {"sigma_dagger_censored", "1 when censored"},
      {"sigma_bar", "sigma_dagger + return to the M-ball"},
      {"sigma_bar_censored", "1 when censored"},
      {"sigma_bar_1", "first iterated composite stop (= sigma_bar)"},
      {"sigma_bar_1_censored", "1 when censored"},
      {"sigma_bar_2", "second iterated composite stop"},
      {"sigma_bar_2_censored", "1 when censored"},
      {"sigma_bar_3", "third iterated composite stop"},
      {"sigma_bar_3_censored", "1 when censored"},
  });
  for (int r = 0; r < R; ++r) {
    const StoppingTimeRecord& rec = records[r];
    std::vector<std::string> row = {std::to_string(r), std::to_string(rec.k_max),
                                    hit_cell(rec.sigma_tilde, rec.k_max), cens_cell(rec.sigma_tilde),
                                    hit_cell(rec.sigma, rec.k_max), cens_cell(rec.sigma),
                                    hit_cell(rec.sigma_hat, rec.k_max), cens_cell(rec.sigma_hat),
                                    hit_cell(rec.sigma_dagger, rec.k_max), cens_cell(rec.sigma_dagger),
                                    hit_cell(rec.sigma_bar, rec.k_max), cens_cell(rec.sigma_bar)};
    for (int j = 0; j < 3; ++j) {
      FirstHit h;
      if (j < static_cast<int>(rec.sigma_bar_seq.size())) h = rec.sigma_bar_seq[j];
      row.push_back(hit_cell(h, rec.k_max));
      row.push_back(cens_cell(h));
    }
    stopping.row(row);
  }

  auto moments = w.open_csv("moments.csv", {
      {"which", "stopping time the estimate refers to"},
      {"theta", "exponential-moment rate"},
      {"estimate", "mean of e^{theta k} over hit replicas (censored contribute 0)"},
      {"censored_fraction", "fraction of replicas censored at k_max"},
      {"k_max", "censoring chain length"},
      {"replicas", "ensemble size"},
  });
  for (StoppingKind kind : {StoppingKind::sigma_tilde, StoppingKind::sigma, StoppingKind::sigma_hat,
                            StoppingKind::sigma_bar}) {
    for (double theta : {0.0, 0.05, 0.1, 0.2, 0.4, 0.8}) {
      const StoppingMomentEstimate m = estimate_stopping_moments(records, theta, kind);
      moments.row({to_string(kind), fd(theta), fd(m.estimate), fd(m.censored_fraction),
                   std::to_string(m.k_max), std::to_string(m.replicas)});
    }
  }

  w.set_kv("replicas", std::to_string(R));
  w.set_kv("k_max", std::to_string(k_max));
  w.set_kv("M", fd(model.verification.M));
  w.set_kv("d_small", fd(model.verification.d_small));
  w.finish(cfg.echo());
  return kExitOk;
}

int run_mix(const ParsedConfig& cfg, const RunOptions& opts) {
  const ModelConfig model = cfg.build(true);
  const EnsembleOptions e = ensemble_opts(model, opts);
  RunWriter w(opts.out_dir, "mix");
  const int N = model.spectrum.N();
  State x = zero_state(N);
  State y = x;
  y.coeffs[0] = opts.gap0;
  const ObservableSpec obs = ObservableSpec::tanh_mode(1, 1.0);
  const std::vector<double> grid = time_grid(model.verification.horizon, 40);
  const MixingEstimate est = estimate_mixing_rate(model, x, y, obs, grid, e);

  auto csv = w.open_csv("mixing.csv", {
      {"time", "grid time"},
      {"gap", "|mean f(Sx(t)) - mean f(Sy(t))| over coupled replicas"},
      {"se", "standard error of the gap"},
      {"in_fit", "1 when the point enters the exponential fit"},
  });
  for (std::size_t j = 0; j < est.times.size(); ++j)
    csv.row({fd(est.times[j]), fd(est.gaps[j]), fd(est.ses[j]), est.in_fit[j] ? "1" : "0"});

  auto fit = w.open_csv("mixing_fit.csv", {
      {"verdict", "ok | identical_start | no_significant_range"},
      {"fitted_C", "prefactor of the exponential fit C e^{-c t}"},
      {"fitted_c", "decay rate"},
      {"c_se", "standard error of the rate"},
      {"c_ci_lo", "95% confidence interval, lower end"},
      {"c_ci_hi", "95% confidence interval, upper end"},
      {"r_squared", "fit quality over the significant range"},
      {"n_fit", "number of points in the fit"},
      {"observable", "test function used"},
  });
  fit.row({est.verdict, fd(est.fitted_C), fd(est.fitted_c), fd(est.c_se), fd(est.c_ci_lo),
           fd(est.c_ci_hi), fd(est.r_squared), std::to_string(est.n_fit), obs.name()});

  if (opts.plots)
    w.write_plot_script("mixing.gp",
                        "set datafile separator ','\n"
                        "set key autotitle columnhead\n"
                        "set logscale y\n"
                        "plot 'mixing.csv' using 1:2 with linespoints title 'gap'\n");
  w.set_kv("replicas", std::to_string(e.replicas));
  w.set_kv("gap0", fd(opts.gap0));
  w.set_kv("verdict", est.verdict);
  w.finish(cfg.echo());
  return kExitOk;
}

int run_verify(const ParsedConfig& cfg, const RunOptions& opts) {
  const ModelConfig model = cfg.build(true);
  const EnsembleOptions e = ensemble_opts(model, opts);
  RunWriter w(opts.out_dir, "verify");

  VerificationReport rep = validate_assumptions(model);
  rep.append(crosscheck_noise(model, 1.0, e));
  rep.append(verify_tail_bound(model, 3, model.verification.horizon, e));
  rep.append(verify_pathwise_bounds(model, e));
  rep.append(verify_contraction(model, opts.contraction_gap0, e));

  {
    const int N = model.spectrum.N();
    State x = zero_state(N);
    State y = x;
    y.coeffs[0] = 1.0;
    const ObservableSpec obs = ObservableSpec::tanh_mode(1, 1.0);
    const MixingEstimate est =
        estimate_mixing_rate(model, x, y, obs, time_grid(model.verification.horizon, 40), e);
    CheckResult c;
    c.name = "mixing_rate_positive";
    c.measured = est.fitted_c;
    c.target = 0.0;
    c.tolerance = 0.0;
    c.provenance = "mc_oracle";
    if (est.verdict != "ok") {
      c.status = CheckStatus::censored;
      c.note = est.verdict;
    } else {
      c.status = est.c_ci_lo > 0.0 && est.r_squared >= 0.9 ? CheckStatus::pass : CheckStatus::fail;
      c.note = "ci=[" + fd(est.c_ci_lo) + "," + fd(est.c_ci_hi) + "] r2=" + fd(est.r_squared);
    }
    rep.add(std::move(c));
  }

  write_report_csv(w, "verification_report.csv", rep);
  w.set_kv("checks", std::to_string(rep.checks.size()));
  w.set_kv("all_ok", rep.all_ok() ? "true" : "false");
  w.finish(cfg.echo());
  return rep.all_ok() ? kExitOk : kExitVerificationFailure;
}

int run_tv(const ParsedConfig& cfg, const RunOptions& opts) {
  const ModelConfig model = cfg.build(false);
  const EnsembleOptions e = ensemble_opts(model, opts);
  RunWriter w(opts.out_dir, "tv");
  const TVMethod method = model.levy.D == 1 ? TVMethod::quadrature : TVMethod::spherical_reduction;
  auto csv = w.open_csv("tv.csv", {
      {"separation", "center separation |x1 - x2|"},
      {"value", "integral of |p_K(.-x1) - p_K(.-x2)|, deterministic method"},
      {"error_estimate", "absolute error bound of the deterministic method"},
      {"method", "quadrature (D=1) or spherical_reduction (D>=2)"},
      {"mc_value", "independent Monte Carlo estimate of the same integral"},
      {"mc_se", "standard error of mc_value"},
  });
  const double M = model.verification.M;
  for (int i = 1; i <= 16; ++i) {
    const double s = 2.0 * M * i / 16.0;
    const TVResult det = tv_overlap_separation(model.levy, s, method);
    RngStream rng(e.seed, "tv.mc", static_cast<std::uint64_t>(i));
    const TVResult mc = tv_overlap_separation(model.levy, s, TVMethod::monte_carlo, &rng, 100000);
    csv.row({fd(s), fd(det.value), fd(det.error_estimate), to_string(det.method), fd(mc.value),
             fd(mc.error_estimate)});
  }
  if (opts.plots)
    w.write_plot_script("tv.gp",
                        "set datafile separator ','\n"
                        "set key autotitle columnhead\n"
                        "plot 'tv.csv' using 1:2 with linespoints title 'overlap'\n");
  w.set_kv("M", fd(M));
  w.finish(cfg.echo());
  return kExitOk;
}

}  // namespace

int run_subcommand(const std::string& name, const std::filesystem::path& config_path,
                   const RunOptions& opts) {
  ParsedConfig cfg = ParsedConfig::from_file(config_path);
  for (const std::string& s : opts.overrides) cfg.apply_override(s);
  if (opts.seed) cfg.apply_override("verification.seed=" + std::to_string(*opts.seed));
  if (opts.replicas) cfg.apply_override("verification.replicas=" + std::to_string(*opts.replicas));

  if (name == "validate") return run_validate(cfg, opts);
  if (name == "simulate") return run_simulate(cfg, opts);
  if (name == "couple") return run_couple(cfg, opts);
  if (name == "mix") return run_mix(cfg, opts);
  if (name == "verify") return run_verify(cfg, opts);
  if (name == "tv") return run_tv(cfg, opts);
  throw ConfigError("unknown subcommand '" + name + "'");
}

}  // namespace levymix
