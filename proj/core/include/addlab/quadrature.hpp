#pragma once

#include <complex>
#include <cstddef>
#include <functional>

namespace addlab {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // accumulated local error estimates
  std::size_t evals = 0;
};

struct ComplexQuadResult {
  std::complex<double> value{0.0, 0.0};
  double error = 0.0;
  std::size_t evals = 0;
};

// Adaptive Simpson with Richardson error control. abs_tol is the target for
// the whole interval; the reported error is the sum of accepted local
// estimates (usually far below abs_tol).
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, int max_depth = 40);

ComplexQuadResult integrate_complex(const std::function<std::complex<double>(double)>& f,
                                    double a, double b, double abs_tol,
                                    int max_depth = 40);

}  // namespace addlab
