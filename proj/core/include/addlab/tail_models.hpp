#pragma once

#include <complex>
#include <cstdint>
#include <memory>

#include "addlab/function_spec.hpp"

namespace addlab {

// Model estimate of a prime sum over p > P. The error field is a heuristic
// scale (logarithmic-integral density plus, for the dyadic families, exact
// sieved interval sums up to a fixed extension bound); it is not a rigorous
// enclosure and is flagged as such wherever it is surfaced.
struct TailEstimate {
  double value = 0.0;
  double error = 0.0;
  bool known = true;  // false: no model for this family/sum (value meaningless)
};

struct ComplexTailEstimate {
  std::complex<double> value{0.0, 0.0};
  double error = 0.0;
  bool known = true;
};

// Closed-form / numeric models for the prime-sum tails of a spec's family.
// All sums run over primes only (exponent 1); prime powers with nu >= 2 are
// covered separately by prime_power_crumbs. Override primes beyond the cut
// are corrected exactly; truncation never alters built-in family values at
// primes >= 3 (all such values have |f(p)| <= 1).
class TailModels {
 public:
  explicit TailModels(const AdditiveFunctionSpec& spec);

  // sum_{p > P} u_f(p)/p. Infinite (known, value = inf) when the support
  // series diverges; exact for finite-support specs.
  TailEstimate support_reciprocal(double P) const;

  // sum_{p > y, |f(p)| <= 1} f(p)/p.
  TailEstimate linear(double y) const;

  // sum_{p > y} min(1, f(p)^2)/p.
  TailEstimate square(double y) const;

  // sum_{a < p <= b} u_f(p) log(p)/p, model part (used for dyadic specs
  // beyond the directly sieved range).
  TailEstimate support_log_weighted(double a, double b) const;

  // sum_{p > P} (e^{i tau f(p)} - 1)/p.
  ComplexTailEstimate cf_exponent(double tau, double P) const;

  // Upper estimate for the prime-power leftovers
  //   sum_{p^nu > y, nu >= 2} min(1, f(p^nu)^2) p^-nu,
  // using the li density with family-specific caps on min(1, f^2)
  // (exactly zero for PPOW, where f(p^nu) = 0 for nu >= 2).
  double prime_power_crumbs(double y) const;

  const AdditiveFunctionSpec& spec() const { return spec_; }

 private:
  AdditiveFunctionSpec spec_;
  AdditiveFunctionSpec base_;  // family rule only (no overrides)

  TailEstimate dyadic_reciprocal(double P) const;
  TailEstimate smooth_linear(double y) const;
  TailEstimate smooth_square(double y) const;
  ComplexTailEstimate smooth_cf(double tau, double P) const;

  // Exact correction for override primes above the cut.
  template <typename Value, typename Term>
  void apply_override_corrections(double cut, Value& value, Term&& term) const;
};

// Heuristic relative accuracy of the logarithmic-integral density beyond P.
double density_model_rel_error(double P);

}  // namespace addlab
