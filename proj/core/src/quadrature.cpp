#include "addlab/quadrature.hpp"

#include <cmath>

namespace addlab {

namespace {

template <typename T, typename F>
struct AdaptiveSimpson {
  const F& f;
  double tol;
  int max_depth;
  std::size_t evals = 0;
  double error = 0.0;

  T simpson(double a, double b, T fa, T fm, T fb) const {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  }

  T run(double a, double b, T fa, T fm, T fb, T whole, double local_tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const T flm = f(lm);
    const T frm = f(rm);
    evals += 2;
    const T left = simpson(a, m, fa, flm, fm);
    const T right = simpson(m, b, fm, frm, fb);
    const T delta = left + right - whole;
    if (depth >= max_depth || std::abs(delta) <= 15.0 * local_tol) {
      error += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return run(a, m, fa, flm, fm, left, 0.5 * local_tol, depth + 1) +
           run(m, b, fm, frm, fb, right, 0.5 * local_tol, depth + 1);
  }

  T integrate(double a, double b) {
    const T fa = f(a);
    const T fm = f(0.5 * (a + b));
    const T fb = f(b);
    evals += 3;
    const T whole = simpson(a, b, fa, fm, fb);
    return run(a, b, fa, fm, fb, whole, tol, 0);
  }
};

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, int max_depth) {
  QuadResult r;
  if (a == b) return r;
  AdaptiveSimpson<double, std::function<double(double)>> engine{f, abs_tol, max_depth};
  r.value = engine.integrate(a, b);
  r.error = engine.error;
  r.evals = engine.evals;
  return r;
}

ComplexQuadResult integrate_complex(const std::function<std::complex<double>(double)>& f,
                                    double a, double b, double abs_tol, int max_depth) {
  ComplexQuadResult r;
  if (a == b) return r;
  AdaptiveSimpson<std::complex<double>, std::function<std::complex<double>(double)>>
      engine{f, abs_tol, max_depth};
  r.value = engine.integrate(a, b);
  r.error = engine.error;
  r.evals = engine.evals;
  return r;
}

}  // namespace addlab
