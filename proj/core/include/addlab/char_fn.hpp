#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "addlab/function_spec.hpp"

namespace addlab {

struct CfValue {
  std::complex<double> value{1.0, 0.0};
  // Heuristic bound on the modelling error of the p > P_max tail; +inf when
  // the tail model diverges (no limit law) or is unavailable.
  double tail_error = 0.0;
};

// Characteristic function evaluator: an Euler product over p <= P_max with a
// closed-form tail model, a conditional (fixed prime-factor count) product,
// or a user-supplied analytic control. Immutable and safe to share.
class CharacteristicFunction {
 public:
  CfValue operator()(double tau) const { return eval_(tau); }
  std::complex<double> value(double tau) const { return eval_(tau).value; }

  const std::string& tag() const { return tag_; }
  std::uint32_t p_max() const { return p_max_; }

  // prod_{p<=P_max} (1 - 1/p) sum_{nu>=0} e^{i tau f(p^nu)} p^-nu, with the
  // p > P_max factor modelled by exp of the family prime-sum tail.
  // Exactly 1 at tau = 0.
  static CharacteristicFunction euler_product(const AdditiveFunctionSpec& spec,
                                              std::uint32_t p_max);

  // prod_{p<=P_max} (1 + r e^{i tau f(p)}/(p-1)) / (1 + r/(p-1)); requires a
  // strongly additive spec and r in [kappa, 1/kappa].
  static CharacteristicFunction conditional(const AdditiveFunctionSpec& spec, double r,
                                            std::uint32_t p_max, double kappa = 0.1);

  static CharacteristicFunction analytic(std::function<std::complex<double>(double)> fn,
                                         std::string tag);
  static CharacteristicFunction gaussian();           // e^{-tau^2/2}
  static CharacteristicFunction degenerate(double a); // e^{i a tau}

 private:
  std::function<CfValue(double)> eval_;
  std::string tag_;
  std::uint32_t p_max_ = 0;
};

}  // namespace addlab
