// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Statistical tolerances are pinned in code next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "levymix/config.hpp"
#include "levymix/coupling.hpp"
#include "levymix/estimators.hpp"
#include "levymix/output.hpp"
#include "levymix/runner.hpp"
#include "levymix/stats.hpp"

using namespace levymix;
namespace fs = std::filesystem;

namespace {

int g_threads = 2;
int g_failures = 0;

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  bool ok = true;
  std::vector<std::string> notes;

  void check(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back("FAILED: " + what);
    }
  }
  void note(const std::string& what) { notes.push_back(what); }
};

void report(const Criterion& c, double seconds) {
  std::printf("[%s] criterion %d: %s (%.1f s%s)\n", c.ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
              seconds, seconds <= c.budget_seconds ? "" : ", over budget");
  for (const std::string& n : c.notes) std::printf("       - %s\n", n.c_str());
  if (!c.ok) ++g_failures;
  std::fflush(stdout);
}

template <typename Fn>
void run_criterion(int id, const std::string& name, double budget_seconds, Fn fn) {
  Criterion c;
  c.id = id;
  c.name = name;
  c.budget_seconds = budget_seconds;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fn(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.notes.push_back(std::string("exception: ") + e.what());
  }
  report(c, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// --- independent quadrature oracle (Romberg + dyadic tail blocks) ---------

double romberg(const std::function<double(double)>& f, double a, double b, int levels = 18) {
  std::vector<double> row(levels, 0.0), prev(levels, 0.0);
  double h = b - a;
  prev[0] = 0.5 * h * (f(a) + f(b));
  for (int i = 1; i < levels; ++i) {
    h *= 0.5;
    double sum = 0.0;
    const long n = 1L << (i - 1);
    for (long k = 0; k < n; ++k) sum += f(a + (2 * k + 1) * h);
    row[0] = 0.5 * prev[0] + h * sum;
    double p4 = 4.0;
    for (int j = 1; j <= i; ++j) {
      row[j] = (p4 * row[j - 1] - prev[j - 1]) / (p4 - 1.0);
      p4 *= 4.0;
    }
    if (i > 3 && std::abs(row[i] - prev[i - 1]) < 1e-14 * (1.0 + std::abs(row[i])))
      return row[i];
    std::swap(row, prev);
  }
  return prev[levels - 1];
}

double dyadic_tail(const std::function<double(double)>& f, double a) {
  double total = 0.0, lo = a;
  for (int j = 0; j < 120; ++j) {
    const double hi = lo * 2.0;
    const double block = romberg(f, lo, hi);
    total += block;
    if (j > 4 && std::abs(block) < 1e-12 * std::abs(total)) break;
    lo = hi;
  }
  return total;
}

double sphere_area_oracle(int D) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * D) / std::tgamma(0.5 * D);
}

// --- shared configurations -------------------------------------------------

ModelConfig reference_config() {
  ModelConfig m;
  m.levy.alpha = 1.5;
  m.levy.D = 8;
  m.levy.K = 1.0;
  m.levy.eps_small = 0.05;
  m.spectrum = build_example_spectrum(1, 16);
  m.spectrum.D = 8;
  m.nonlinearity = Nonlinearity::mode_tanh(0.1, 1.0, {}, 16);
  m.T_refractory = 1.0;
  m.dt = 1e-3;
  m.verification.p = 0.75;
  m.verification.M = 1.0;
  m.verification.d_small = 0.05;
  m.verification.horizon = 10.0;
  return m;
}

Nonlinearity shift_table(double a, double g, int N) {
  std::vector<Nonlinearity::TableEntry> entries;
  for (int i = 1; i <= N; ++i) entries.push_back({i, (i + N - 2) % N + 1, 1.0});
  return Nonlinearity::table(a, g, entries, N);
}

State zero_state(int N) { return State{std::vector<double>(N, 0.0), 0.0}; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- criteria ----------------------------------------------------------------

void criterion1(Criterion& c) {
  for (double alpha : {0.5, 1.0, 1.5}) {
    for (int D : {1, 2, 3}) {
      for (double K : {0.5, 1.0, 3.0}) {
        LevyConfig cfg;
        cfg.alpha = alpha;
        cfg.D = D;
        cfg.K = K;
        cfg.c_nu = 0.8;
        cfg.eps_small = K / 20.0;
        const double quad = sphere_area_oracle(D) * cfg.c_nu *
                            dyadic_tail([&](double r) { return std::pow(r, -1.0 - alpha); }, K);
        const double closed = gamma_K(cfg);
        c.check(std::abs(closed - quad) <= 1e-8 * quad,
                "gamma_K closed form vs quadrature at alpha=" + fmt(alpha) +
                    " D=" + std::to_string(D) + " K=" + fmt(K));
        const double mass =
            sphere_area_oracle(D) *
            dyadic_tail([&](double r) { return std::pow(r, D - 1.0) * pk_density_radius(cfg, r); },
                        K);
        c.check(std::abs(mass - 1.0) <= 1e-6, "big-jump density normalization at alpha=" +
                                                  fmt(alpha) + " D=" + std::to_string(D) +
                                                  " K=" + fmt(K));
      }
    }
  }
  c.note("27 (alpha, D, K) combinations, rel. tolerance 1e-8 (rate) and 1e-6 (mass)");
}

void criterion2(Criterion& c) {
  LevyConfig cfg;
  cfg.alpha = 1.5;
  cfg.D = 1;
  cfg.K = 3.0;
  cfg.eps_small = 0.1;
  const std::vector<double> cx{0.0}, cy{2.0};
  const TVResult tv = tv_overlap(cfg, cx, cy, TVMethod::quadrature);
  const double target = 1.0 - 0.5 * tv.value;

  const int n = 100000;
  RngStream rng(2024, "acc2", 0);
  int coupled = 0;
  std::vector<double> zx(n), zy(n);
  for (int i = 0; i < n; ++i) {
    const MaxCouplingResult r = maximal_coupling_draw(cx, cy, cfg, rng);
    coupled += r.coupled ? 1 : 0;
    zx[i] = r.zx[0];
    zy[i] = r.zy[0];
  }
  const double phat = static_cast<double>(coupled) / n;
  const double se = std::sqrt(target * (1.0 - target) / n);
  c.check(std::abs(phat - target) <= 3.0 * se,
          "coupling frequency " + fmt(phat) + " vs 1 - tv/2 = " + fmt(target) + " (3 se = " +
              fmt(3.0 * se) + ")");
  c.note("quadrature overlap = " + fmt(tv.value) + " +- " + fmt(tv.error_estimate));

  RngStream rng2(2025, "acc2", 0);
  std::vector<double> dx(n), dy(n);
  for (int i = 0; i < n; ++i) {
    dx[i] = sample_big_jump(cfg, rng2)[0] + cx[0];
    dy[i] = sample_big_jump(cfg, rng2)[0] + cy[0];
  }
  auto sx = sorted_copy(zx), sdx = sorted_copy(dx);
  auto sy = sorted_copy(zy), sdy = sorted_copy(dy);
  const KSResult k1 = ks_two_sample(sx, sdx);
  const KSResult k2 = ks_two_sample(sy, sdy);
  c.check(k1.p_value > 0.01, "x-marginal two-sample KS p=" + fmt(k1.p_value));
  c.check(k2.p_value > 0.01, "y-marginal two-sample KS p=" + fmt(k2.p_value));
  c.note("P(coupled) = " + fmt(phat) + ", marginal KS p-values " + fmt(k1.p_value) + ", " +
         fmt(k2.p_value));
}

void criterion3(Criterion& c) {
  for (double alpha : {0.8, 1.0, 1.5}) {
    ModelConfig m;
    m.levy.alpha = alpha;
    m.levy.D = 1;
    m.levy.K = 1.0;
    m.levy.eps_small = 1e-3;
    m.spectrum = build_example_spectrum(1, 2);
    m.spectrum.D = 1;
    m.nonlinearity = Nonlinearity::zero();
    m.dt = 1e-2;
    m.verification.p = alpha / 2.0;
    EnsembleOptions opts;
    opts.replicas = 100000;
    opts.threads = g_threads;
    opts.seed = 33000 + static_cast<int>(10 * alpha);
    const VerificationReport rep = crosscheck_noise(m, 1.0, opts);
    int passed = 0;
    for (const CheckResult& r : rep.checks) {
      if (r.status == CheckStatus::pass) ++passed;
      c.check(r.status == CheckStatus::pass,
              "alpha=" + fmt(alpha) + " " + r.name + ": decomposition " + fmt(r.measured) +
                  " vs exact " + fmt(r.target) + " (3 se = " + fmt(r.tolerance) + ")");
    }
    c.note("alpha=" + fmt(alpha) + ": " + std::to_string(passed) + "/5 quantiles within 3 se");
  }
}

void criterion4(Criterion& c) {
  const ModelConfig m = reference_config();
  EnsembleOptions opts;
  opts.replicas = 1000;
  opts.threads = g_threads;
  opts.seed = 44;
  const VerificationReport rep = verify_pathwise_bounds(m, opts);
  for (const CheckResult& r : rep.checks) {
    c.check(r.status == CheckStatus::pass, r.name + " (violations: " + fmt(r.measured) + ")");
    c.note(r.name + ": " + to_string(r.status) +
           (r.note.empty() ? "" : " [" + r.note + "]"));
  }
  c.note("scheme tolerance factor " + fmt(scheme_tolerance(m)));
}

void criterion5(Criterion& c) {
  const ModelConfig m = reference_config();
  EnsembleOptions opts;
  opts.replicas = 10000;
  opts.threads = g_threads;
  opts.seed = 55;
  const VerificationReport rep = verify_contraction(m, 1e-3, opts);
  for (const CheckResult& r : rep.checks) {
    c.check(r.status == CheckStatus::pass,
            r.name + ": measured " + fmt(r.measured) + " vs bound " + fmt(r.target) + " + " +
                fmt(r.tolerance));
    c.note(r.name + ": expansion prob " + fmt(r.measured) + " <= " + fmt(r.target) + " + " +
           fmt(r.tolerance) + (r.note.empty() ? "" : " [" + r.note + "]"));
  }
}

void criterion6(Criterion& c) {
  // Refractory gap law from the coupled-chain driver.
  {
    ModelConfig m;
    m.levy.alpha = 1.5;
    m.levy.D = 2;
    m.levy.K = 1.0;
    m.levy.eps_small = 0.1;
    m.spectrum = build_example_spectrum(1, 3);
    m.spectrum.D = 2;
    m.nonlinearity = Nonlinearity::mode_tanh(0.1, 1.0, {}, 3);
    m.T_refractory = 0.5;
    m.dt = 1e-2;
    m.verification.p = 0.75;
    m.verification.M = 6.0;
    const double g = gamma_K(m.levy);
    const int R = 2500;
    std::vector<double> all_gaps(static_cast<std::size_t>(R) * 4);
    parallel_replicas(R, g_threads, [&](int r) {
      RngStream shared(66, "acc6.shared", r), couple(66, "acc6.couple", r);
      const ChainResult cr = run_coupled_chain(zero_state(3), State{{1, 0, 0}, 0.0}, m, 4,
                                               shared, couple);
      double prev = 0.0;
      for (int i = 0; i < 4; ++i) {
        all_gaps[static_cast<std::size_t>(r) * 4 + i] = cr.record.tau_tilde[i] - prev;
        prev = cr.record.tau_tilde[i];
      }
    });
    auto sorted = sorted_copy(all_gaps);
    const KSResult ks = ks_one_sample(sorted, [&](double t) {
      return t <= m.T_refractory ? 0.0 : 1.0 - std::exp(-g * (t - m.T_refractory));
    });
    c.check(ks.p_value > 0.01,
            "chain gap KS against T + Exp(gamma_K): p = " + fmt(ks.p_value));
    c.note("gap KS: n = " + std::to_string(sorted.size()) + ", p = " + fmt(ks.p_value));
  }
  // Explicit tail bound at (T=1, gamma_K=2, l=3, t=10), 1e5 gap replicas.
  {
    ModelConfig m;
    m.levy.alpha = 1.0;
    m.levy.D = 1;
    m.levy.K = 1.0;
    m.levy.eps_small = 0.05;
    m.spectrum = build_example_spectrum(1, 2);
    m.spectrum.D = 1;
    m.nonlinearity = Nonlinearity::zero();
    m.T_refractory = 1.0;
    m.dt = 1e-2;
    m.verification.p = 0.5;
    EnsembleOptions opts;
    opts.replicas = 100000;
    opts.threads = g_threads;
    opts.seed = 67;
    const VerificationReport rep = verify_tail_bound(m, 3, 10.0, opts);
    for (const CheckResult& r : rep.checks) {
      c.check(r.status == CheckStatus::pass,
              r.name + ": " + fmt(r.measured) + " vs " + fmt(r.target));
      c.note(r.name + ": measured " + fmt(r.measured) + ", bound " + fmt(r.target));
    }
  }
}

void criterion7_run(Criterion& c, const ModelConfig& m, int N, const std::string& label,
                    std::uint64_t seed) {
  const VerificationReport val = validate_assumptions(m);
  c.check(val.all_ok(), label + ": configuration passes validate_assumptions");

  const int R = 2000;
  const long k_max = 40;
  std::vector<StoppingTimeRecord> records(R);
  State y = zero_state(N);
  y.coeffs[0] = 1.0;
  parallel_replicas(R, g_threads, [&](int r) {
    RngStream shared(seed, "acc7.shared", r), couple(seed, "acc7.couple", r);
    records[r] = run_coupled_chain(zero_state(N), y, m, k_max, shared, couple).record;
  });

  for (int k = 1; k <= 3; ++k) {
    long finite = 0, censored = 0;
    for (const StoppingTimeRecord& rec : records) {
      if (k <= static_cast<int>(rec.sigma_bar_seq.size()) && rec.sigma_bar_seq[k - 1].hit())
        ++finite;
      else
        ++censored;
    }
    const double phat = static_cast<double>(finite) / R;
    const double bound = std::pow(0.5, k);
    const double se = std::sqrt(std::max(phat * (1.0 - phat), 1.0 / R) / R);
    c.check(phat <= bound + 3.0 * se, label + ": P(sigma_bar_" + std::to_string(k) +
                                          " finite) = " + fmt(phat) + " vs 2^-k = " + fmt(bound));
    c.note(label + " k=" + std::to_string(k) + ": finite fraction " + fmt(phat) + " <= " +
           fmt(bound) + " + " + fmt(3.0 * se) + "; censored fraction " +
           fmt(static_cast<double>(censored) / R) + " (k_max=" + std::to_string(k_max) + ")");
  }
}

void criterion7(Criterion& c) {
  // Large undriven-block rate (the stated config): couplings merge the pair
  // to near machine level, so the composite stop essentially never completes
  // within the horizon; the censoring fraction reports that honestly.
  {
    ModelConfig m = reference_config();
    m.spectrum = build_example_spectrum(1, 32);
    m.spectrum.D = 8;
    m.nonlinearity = shift_table(0.1, 1.0, 32);
    m.verification.M = 30.0;
    m.verification.d_small = 0.05;
    criterion7_run(c, m, 32, "lambda9=81", 77);
  }
  // Reduced undriven-block rate: merges stay imperfect, the composite stop
  // completes on an observable fraction of replicas, and the geometric bound
  // is exercised non-vacuously.
  {
    ModelConfig m = reference_config();
    m.spectrum.lambdas = std::vector<double>(9, 1.0);
    m.spectrum.lambdas[8] = 1.05;
    m.spectrum.source = "explicit";
    m.spectrum.D = 8;
    m.nonlinearity = shift_table(0.1, 1.0, 9);
    m.verification.M = 30.0;
    m.verification.d_small = 0.05;
    criterion7_run(c, m, 9, "lambda9=1.05", 78);
  }
}

void criterion8(Criterion& c) {
  const std::vector<double> grid = [] {
    std::vector<double> g;
    for (int i = 0; i <= 40; ++i) g.push_back(10.0 * i / 40.0);
    return g;
  }();
  EnsembleOptions opts;
  opts.replicas = 10000;
  opts.threads = g_threads;
  opts.seed = 88;

  // (a) reference configuration: positive rate, CI excluding 0, r^2 >= 0.9
  {
    const ModelConfig m = reference_config();
    State x = zero_state(16), y = x;
    y.coeffs[0] = 1.0;
    const MixingEstimate est =
        estimate_mixing_rate(m, x, y, ObservableSpec::tanh_mode(1, 1.0), grid, opts);
    c.check(est.verdict == "ok", "reference fit verdict: " + est.verdict);
    if (est.verdict == "ok") {
      c.check(est.fitted_c > 0.0, "fitted rate positive");
      c.check(est.c_ci_lo > 0.0, "95% CI excludes 0 (lo = " + fmt(est.c_ci_lo) + ")");
      c.check(est.r_squared >= 0.9, "r^2 = " + fmt(est.r_squared));
      c.note("reference: c = " + fmt(est.fitted_c) + " [" + fmt(est.c_ci_lo) + ", " +
             fmt(est.c_ci_hi) + "], r^2 = " + fmt(est.r_squared) + ", n_fit = " +
             std::to_string(est.n_fit));
    }
  }

  // (b) directional check of the undriven-block-rate mechanism. A pair
  // difference on the first undriven mode decays at exactly the rate that
  // mode's relaxation sets (jumps act on the driven block only, and the
  // per-mode nonlinearity cannot re-route a leading-block difference into
  // the undriven block), so the fitted rate tracks lambda_{D+1} directly.
  // The reduced run flattens the whole leading block: the ascending-spectrum
  // constraint admits no other way to bring lambda_{D+1} down.
  {
    std::vector<double> dual_grid;
    for (int i = 0; i <= 16; ++i) dual_grid.push_back(0.0125 * i);
    for (int i = 1; i <= 40; ++i) dual_grid.push_back(0.25 * i);

    ModelConfig hi = reference_config();
    State x = zero_state(16), y = x;
    y.coeffs[8] = 1.0;  // mode 9, the first undriven mode
    const MixingEstimate est_hi =
        estimate_mixing_rate(hi, x, y, ObservableSpec::tanh_mode(9, 1.0), dual_grid, opts);

    ModelConfig lo = reference_config();
    lo.spectrum.lambdas = std::vector<double>(9, 1.0);
    lo.spectrum.lambdas[8] = 1.05;  // lambda_{D+1} barely above lambda_D
    lo.spectrum.source = "explicit";
    lo.spectrum.D = 8;
    lo.nonlinearity = Nonlinearity::mode_tanh(0.1, 1.0, {}, 9);
    State xl = zero_state(9), yl = xl;
    yl.coeffs[8] = 1.0;
    const MixingEstimate est_lo =
        estimate_mixing_rate(lo, xl, yl, ObservableSpec::tanh_mode(9, 1.0), dual_grid, opts);

    c.check(est_hi.verdict == "ok", "large-rate fit verdict: " + est_hi.verdict);
    c.check(est_lo.verdict == "ok", "reduced-rate fit verdict: " + est_lo.verdict);
    if (est_hi.verdict == "ok" && est_lo.verdict == "ok") {
      c.check(est_lo.fitted_c < est_hi.fitted_c,
              "directional: c(lambda_{D+1}=1.05) = " + fmt(est_lo.fitted_c) +
                  " < c(lambda_{D+1}=81) = " + fmt(est_hi.fitted_c));
      c.note("directional: c_lo = " + fmt(est_lo.fitted_c) + " [" + fmt(est_lo.c_ci_lo) + ", " +
             fmt(est_lo.c_ci_hi) + "] vs c_hi = " + fmt(est_hi.fitted_c) + " [" +
             fmt(est_hi.c_ci_lo) + ", " + fmt(est_hi.c_ci_hi) + "]");
    }
  }
}

void criterion9(Criterion& c) {
  const fs::path dir = fs::temp_directory_path() / "levymix_acceptance";
  fs::create_directories(dir);
  const fs::path cfg = dir / "det.cfg";
  {
    std::ofstream out(cfg);
    out << "[levy]\nalpha = 1.5\nD = 2\nK = 1\neps_small = 0.1\n"
        << "[spectrum]\nN = 3\n"
        << "[nonlinearity]\nkind = mode_tanh\na = 0.1\ng = 1\n"
        << "[numerics]\ndt = 0.01\nT_refractory = 0.5\n"
        << "[verification]\nhorizon = 2\nreplicas = 40\nM = 6\np = 0.75\n";
  }
  auto run = [&](const std::string& sub, const std::string& extra, const fs::path& out) {
    const std::string cmd = std::string(LEVYMIX_BIN) + " " + sub + " --config " + cfg.string() +
                            " --seed 9 " + extra + " --out " + out.string() + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  for (const std::string sub : {"validate", "simulate", "couple", "mix", "verify", "tv"}) {
    const fs::path o1 = dir / (sub + "_a"), o2 = dir / (sub + "_b"), o3 = dir / (sub + "_t");
    const int r1 = run(sub, "--threads 1", o1);
    const int r2 = run(sub, "--threads 1", o2);
    const int r3 = run(sub, "--threads 2", o3);
    c.check(r1 == r2 && r1 == r3, sub + ": exit codes agree across reruns");
    c.check(r1 == 0 || r1 == 2, sub + ": clean exit (got " + std::to_string(r1) + ")");
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(o1)) {
      const std::string name = entry.path().filename().string();
      if (name == "manifest.txt") continue;  // carries wall-clock metadata
      const std::string a = slurp(entry.path());
      c.check(a == slurp(o2 / name), sub + "/" + name + ": rerun is byte-identical");
      c.check(a == slurp(o3 / name), sub + "/" + name + ": thread count leaves bytes unchanged");
      ++compared;
    }
    c.check(compared >= 1, sub + ": produced at least one data output");
    // manifests agree outside the wall-clock lines
    std::istringstream ma(slurp(o1 / "manifest.txt")), mb(slurp(o2 / "manifest.txt"));
    std::string la, lb;
    bool manifests_ok = true;
    while (std::getline(ma, la) && std::getline(mb, lb)) {
      if (la.rfind("wall_clock", 0) == 0 && lb.rfind("wall_clock", 0) == 0) continue;
      if (la != lb) manifests_ok = false;
    }
    c.check(manifests_ok, sub + ": manifests agree outside wall-clock metadata");
  }
  c.note("six subcommands, rerun + thread-count comparison on every data output");
}

}  // namespace

int main(int argc, char** argv) {
  g_threads = static_cast<int>(std::thread::hardware_concurrency());
  if (g_threads < 1) g_threads = 1;
  if (argc > 1) g_threads = std::atoi(argv[1]);
  std::printf("acceptance suite (%d worker threads)\n", g_threads);

  run_criterion(1, "density and rate correctness", 10, criterion1);
  run_criterion(2, "maximal coupling law", 30, criterion2);
  run_criterion(3, "noise-decomposition fidelity", 120, criterion3);
  run_criterion(4, "pathwise almost-sure inequalities", 300, criterion4);
  run_criterion(5, "one-step contraction bounds", 600, criterion5);
  run_criterion(6, "refractory stopping-time law", 60, criterion6);
  run_criterion(7, "iterated-stop censoring geometry", 900, criterion7);
  run_criterion(8, "exponential mixing signature", 1200, criterion8);
  run_criterion(9, "byte-level determinism", 120, criterion9);

  if (g_failures == 0) {
    std::printf("all 9 criteria passed\n");
    return 0;
  }
  std::printf("%d criteria FAILED\n", g_failures);
  return 1;
}
