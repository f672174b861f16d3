#pragma once

#include <cstdint>

#include "addlab/function_spec.hpp"

namespace addlab {

// Local companions at a prime p of the support indicator u_f:
//   S_p = sum_{nu>=1} u_f(p^nu) p^-nu,   w_p = (1 - 1/p) S_p,
// so 0 <= S_p <= 1/(p-1) and 0 <= w_p <= 1/p.
struct Companions {
  double S = 0.0;
  double w = 0.0;
};

// S_p summed until the geometric tail drops below tail_tol (default 1e-15);
// the truncated sum never exceeds the true value. Exact closed form is used
// for strongly additive specs whose values survive truncation at every
// exponent, so in that case S_p = 1/(p-1) and w_p = 1/p hold exactly.
Companions companions(const AdditiveFunctionSpec& spec, std::uint64_t p,
                      double tail_tol = 1e-15);

// Support indicator u_f(m): 1 iff f(p^nu) != 0 for every p^nu || m.
// Factors m by trial division (m is expected desk-scale).
bool u_indicator(const AdditiveFunctionSpec& spec, std::uint64_t m);

// h_f(m) = u_f(m) prod_{p|m} (1 - 1/p)/(1 - w_p); multiplicative,
// h_f(1) = 1, and h_f(m) = u_f(m) for strongly additive specs.
double h_factor(const AdditiveFunctionSpec& spec, std::uint64_t m,
                double tail_tol = 1e-15);

}  // namespace addlab
