#include "levymix/quadrature.hpp"

#include <cmath>

namespace levymix {

namespace {

struct Ctx {
  const std::function<double(double)>& f;
  long evals = 0;
  double eval(double x) {
    ++evals;
    return f(x);
  }
};

// Classic adaptive Simpson with the (S2-S1)/15 correction term.
double simpson_rec(Ctx& ctx, double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth, double& err_acc) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = ctx.eval(lm), frm = ctx.eval(rm);
  const double h6 = (b - a) / 12.0;
  const double left = h6 * (fa + 4.0 * flm + fm);
  const double right = h6 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    err_acc += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return simpson_rec(ctx, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err_acc) +
         simpson_rec(ctx, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err_acc);
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, int max_depth) {
  QuadResult out;
  if (!(b > a)) return out;
  Ctx ctx{f};
  const double m = 0.5 * (a + b);
  const double fa = ctx.eval(a), fm = ctx.eval(m), fb = ctx.eval(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double err = 0.0;
  out.value = simpson_rec(ctx, a, b, fa, fm, fb, whole, abs_tol, max_depth, err);
  out.error = err;
  out.evals = ctx.evals;
  return out;
}

QuadResult integrate_to_inf(const std::function<double(double)>& f, double a, double abs_tol) {
  // z = a + t/(1-t), dz = dt/(1-t)^2, t in [0,1). The integrand must vanish
  // fast enough at infinity for the transformed function to stay bounded.
  auto g = [&](double t) -> double {
    if (t >= 1.0) return 0.0;
    const double om = 1.0 - t;
    return f(a + t / om) / (om * om);
  };
  return integrate_adaptive(g, 0.0, 1.0 - 1e-14, abs_tol);
}

}  // namespace levymix
