#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "addlab/char_fn.hpp"
#include "addlab/function_spec.hpp"

namespace addlab {

// Evaluator for the limiting distribution F. Atomic mode carries an
// explicit (value, mass) list; Inversion mode carries a monotone grid of
// numerically inverted CDF values with linear interpolation in between.
// pointwise_error() bounds |computed - true| as far as derivable (heuristic
// tail-model components are included and dominate it).
class LimitLaw {
 public:
  enum class Mode { Atomic, Inversion };

  Mode mode() const { return mode_; }
  double operator()(double y) const;
  double left(double y) const;  // F(y-)
  double pointwise_error() const { return pointwise_error_; }

  // Atomic mode -------------------------------------------------------
  // Atoms sorted by value, masses already rescaled by the modelled
  // product tail so that each atom undercounts its true mass.
  const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }
  // prod_{p <= P_cut} (1 - w_p) * sum_{enumerated m} h_f(m)/m  (unrescaled)
  double enumerated_mass() const { return enumerated_mass_; }
  // bound on 1 - enumerated_mass (mass of m > M_cut under the P_cut law)
  double deficit_bound() const { return deficit_bound_; }
  // modelled sum_{p > P_cut} w_p (log-scale product tail), with its error
  double product_tail() const { return product_tail_; }
  bool meets_budget() const { return meets_budget_; }

  // Inversion mode ----------------------------------------------------
  double grid_lo() const { return grid_lo_; }
  double grid_hi() const { return grid_hi_; }
  std::uint32_t grid_points() const { return static_cast<std::uint32_t>(grid_F_.size()); }

  // CSV: y,F,err rows (atoms or grid); and fm,weight rows for atoms.
  void export_law_csv(std::ostream& out) const;
  void export_atoms_csv(std::ostream& out) const;

  friend LimitLaw atomic_law(const AdditiveFunctionSpec&, double, std::uint32_t,
                             std::uint64_t);
  friend LimitLaw atomic_law_indicator(const AdditiveFunctionSpec&, std::uint32_t);
  friend class InversionBuilder;

 private:
  Mode mode_ = Mode::Atomic;
  double pointwise_error_ = 0.0;
  // atomic
  std::vector<std::pair<double, double>> atoms_;
  std::vector<double> cum_;
  double enumerated_mass_ = 0.0;
  double deficit_bound_ = 0.0;
  double product_tail_ = 0.0;
  bool meets_budget_ = true;
  // inversion
  double grid_lo_ = 0.0;
  double grid_hi_ = 0.0;
  std::vector<double> grid_F_;

  void finalize_atoms();
};

// Enumerates every m <= M_cut supported on allowed prime powers (complete
// backtracking over the allowed primes <= min(P_cut, M_cut)), aggregates
// atoms by f(m), and reports the spec-normalised enumerated mass together
// with a smooth-plus-large-prime-split bound on the unenumerated mass.
// Refuses when the support series diverges (the law would be continuous).
// If the enumerated mass falls short of mass_budget the law is returned
// partial with meets_budget() == false.
LimitLaw atomic_law(const AdditiveFunctionSpec& spec, double mass_budget,
                    std::uint32_t p_cut, std::uint64_t m_cut);

// Fast exact route for unit-valued strongly additive specs (the dyadic
// families): F is the law of a sum of independent Bernoulli(1/p) over the
// support, computed by a Poisson-binomial recursion over p <= P_cut with a
// Poisson tail fold for p > P_cut. Far tighter than enumeration when the
// support reciprocal sum converges slowly.
LimitLaw atomic_law_indicator(const AdditiveFunctionSpec& spec, std::uint32_t p_cut);

struct InversionOptions {
  double target_error = 2e-3;   // quadrature + truncation target
  double T_cap = 5e4;           // never integrate past this frequency
  double refuse_level = 0.5;    // |phi(T)| above this -> insufficient decay
  double panel_h = 0.5;         // initial Filon panel width
  int max_refinements = 3;
  std::uint32_t probe_points = 9;
};

// Gil-Pelaez half-line inversion F(y) = 1/2 - (1/pi) int_0^inf
// Im(e^{-i tau y} phi(tau))/tau dtau, truncated at T_int. The 1/tau
// singularity is integrated exactly (sine-integral split); the smooth
// remainder uses shared Filon panels. Throws refusal_error when |phi| has
// not decayed below refuse_level by T_int.
double invert_cf(const CharacteristicFunction& cf, double y, double T_int,
                 double* error_out = nullptr, const InversionOptions& options = {});

// Grid law over [y_lo, y_hi]: shares the phi samples across all grid points
// and all refinements, picks T automatically from the measured decay (capped
// at options.T_cap), monotonises the result and reports a pointwise error =
// quadrature estimate + truncation estimate + tail-model error.
LimitLaw inversion_law(const CharacteristicFunction& cf, double y_lo, double y_hi,
                       std::uint32_t n_points, const InversionOptions& options = {});

// Sine integral Si(x) = int_0^x sin(t)/t dt (|error| < 1e-8 over the reals).
double sine_integral(double x);

}  // namespace addlab
