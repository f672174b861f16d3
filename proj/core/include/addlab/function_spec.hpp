#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace addlab {

// Built-in families of real additive functions, each determined by its
// values on prime powers.
//
//   LogPow[xi]     f(p) = 1/(log p)^xi, strongly additive
//   PPow[xi]       f(p) = 1/p^xi, f(p^v) = 0 for v >= 2
//   DyadicLog[k]   f(p) = 1 iff 2^n < p <= 2^n(1 + 1/(log n)^k), n >= 3
//   DyadicPow[k]   f(p) = 1 iff 2^n < p <= 2^n(1 + 1/n^k), n >= 1
//   EulerRatio     f(n) = log(n/phi(n)), i.e. f(p^v) = -log(1 - 1/p)
//   SigmaRatio     f(p^v) = log(sigma(p^v)/p^v)
//   Zero           f identically 0
enum class Family {
  Zero,
  LogPow,
  PPow,
  DyadicLog,
  DyadicPow,
  EulerRatio,
  SigmaRatio,
};

const char* family_name(Family f);
bool family_has_parameter(Family f);
bool family_default_strongly_additive(Family f);

// Specification of a real additive function: a closed-form family plus
// finitely many explicit overrides, an optional strong-additivity flag and
// an optional truncation bound R.
//
// Evaluation priority: override first, family rule second; if the spec is
// strongly additive the exponent is forced to 1 before lookup; truncation
// is applied last (value kept when p^v <= R or |f(p^v)| <= 1, else 0).
class AdditiveFunctionSpec {
 public:
  AdditiveFunctionSpec() = default;
  AdditiveFunctionSpec(Family family, double parameter);

  static AdditiveFunctionSpec zero() { return AdditiveFunctionSpec(Family::Zero, 0.0); }

  Family family() const { return family_; }
  double parameter() const { return parameter_; }
  bool strongly_additive() const { return strongly_additive_; }
  std::optional<double> truncation() const { return truncation_; }
  const std::map<std::pair<std::uint64_t, std::uint32_t>, double>& overrides() const {
    return overrides_;
  }

  // Builders (value semantics; each returns a modified copy).
  AdditiveFunctionSpec with_truncation(double R) const;
  AdditiveFunctionSpec without_truncation() const;
  AdditiveFunctionSpec with_override(std::uint64_t p, std::uint32_t nu, double value) const;
  AdditiveFunctionSpec with_strongly_additive(bool flag) const;

  // f(p^nu). Throws input_error when p is not prime or nu == 0.
  double eval_prime_power(std::uint64_t p, std::uint32_t nu) const;
  // Same, but trusts the caller that p is prime (hot path for sieving).
  double eval_prime_power_unchecked(std::uint64_t p, std::uint32_t nu) const;

  // u_f indicator: 1 iff f(p^nu) != 0.
  bool nonzero_at(std::uint64_t p, std::uint32_t nu) const {
    return eval_prime_power_unchecked(p, nu) != 0.0;
  }

  // Untruncated family/override value (used by truncation logic and tests).
  double raw_value(std::uint64_t p, std::uint32_t nu) const;

  // Stable 64-bit hash of the canonical serialization.
  std::uint64_t hash() const;

  // Plain-text key-value round trip, e.g.
  //   family=LOGPOW xi=2 truncation=1000 override=2,1,0.5
  // Grammar is documented in the README; parse(print(s)) == s.
  std::string serialize() const;
  static AdditiveFunctionSpec parse(const std::string& text);

  bool operator==(const AdditiveFunctionSpec& other) const;

 private:
  Family family_ = Family::Zero;
  double parameter_ = 0.0;
  bool strongly_additive_ = true;
  std::optional<double> truncation_;
  std::map<std::pair<std::uint64_t, std::uint32_t>, double> overrides_;
};

// Truncation rule applied to a single prime-power value: keep when
// p^nu <= R or |value| <= 1, zero otherwise. Exposed for property tests
// (idempotence, value set {0, original}).
double apply_truncation(double value, std::uint64_t p, std::uint32_t nu, double R);

// Dyadic interval membership: is p in (2^n, floor(2^n (1 + delta_n))] for
// the unique candidate n? delta_n = 1/(log n)^kappa (log variant, n >= 3)
// or 1/n^kappa (pow variant, n >= 1). Decided by exact integer comparison
// with the interval endpoint computed in extended precision.
bool dyadic_member(std::uint64_t p, double kappa, bool log_variant);

// Convergence classification of the defining series over p <= prime_budget:
//   series_sq    sum_p min(1, f(p)^2)/p          (existence, part 1)
//   series_lin   sum_{|f(p)|<=1} f(p)/p          (existence, part 2)
//   series_supp  sum_{f(p) != 0} 1/p             (continuity criterion)
// Partial sums are evidence; verdicts are the analytically known answers
// for built-in families and Undetermined otherwise.
enum class SeriesVerdict { Convergent, Divergent, Undetermined };

struct ClassifyResult {
  double series_sq = 0.0;
  double series_lin = 0.0;
  double series_supp = 0.0;
  SeriesVerdict existence = SeriesVerdict::Undetermined;   // both series of the criterion
  SeriesVerdict support_divergence = SeriesVerdict::Undetermined;  // series_supp diverges?
  // Convenience flags, valid when the corresponding verdicts are known.
  bool limit_law_exists() const { return existence == SeriesVerdict::Convergent; }
  bool atomic() const {
    return limit_law_exists() && support_divergence == SeriesVerdict::Convergent;
  }
  bool continuous() const {
    return limit_law_exists() && support_divergence == SeriesVerdict::Divergent;
  }
  std::string note;
};

ClassifyResult classify(const AdditiveFunctionSpec& spec, std::uint32_t prime_budget);

}  // namespace addlab
