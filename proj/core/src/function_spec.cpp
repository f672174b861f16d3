#include "addlab/function_spec.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <vector>

#include "addlab/errors.hpp"
#include "addlab/primes.hpp"

namespace addlab {

namespace {

// p^nu saturating at UINT64_MAX (saturation means "larger than any R").
std::uint64_t pow_sat(std::uint64_t p, std::uint32_t nu) {
  std::uint64_t r = 1;
  for (std::uint32_t i = 0; i < nu; ++i) {
    if (r > UINT64_MAX / p) return UINT64_MAX;
    r *= p;
  }
  return r;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::Zero: return "ZERO";
    case Family::LogPow: return "LOGPOW";
    case Family::PPow: return "PPOW";
    case Family::DyadicLog: return "DYADIC_LOG";
    case Family::DyadicPow: return "DYADIC_POW";
    case Family::EulerRatio: return "EULER_RATIO";
    case Family::SigmaRatio: return "SIGMA_RATIO";
  }
  return "?";
}

bool family_has_parameter(Family f) {
  return f == Family::LogPow || f == Family::PPow || f == Family::DyadicLog ||
         f == Family::DyadicPow;
}

bool family_default_strongly_additive(Family f) {
  switch (f) {
    case Family::PPow:
    case Family::SigmaRatio:
      return false;
    default:
      return true;
  }
}

bool dyadic_member(std::uint64_t p, double kappa, bool log_variant) {
  if (p < 3) return false;
  if (std::has_single_bit(p)) return false;  // p = 2^m never qualifies
  const unsigned n = std::bit_width(p) - 1;  // unique candidate: 2^n < p < 2^(n+1)
  if (log_variant ? (n < 3) : (n < 1)) return false;
  if (n > 62) return false;
  const long double delta =
      log_variant ? 1.0L / std::pow(std::log(static_cast<long double>(n)),
                                    static_cast<long double>(kappa))
                  : std::pow(static_cast<long double>(n),
                             -static_cast<long double>(kappa));
  const std::uint64_t base = std::uint64_t{1} << n;
  const auto excess = static_cast<std::uint64_t>(
      std::floor(static_cast<long double>(base) * delta));
  return p <= base + excess;
}

AdditiveFunctionSpec::AdditiveFunctionSpec(Family family, double parameter)
    : family_(family),
      parameter_(parameter),
      strongly_additive_(family_default_strongly_additive(family)) {
  if (family_has_parameter(family) && !(parameter > 0.0)) {
    throw input_error("family parameter must be > 0");
  }
}

AdditiveFunctionSpec AdditiveFunctionSpec::with_truncation(double R) const {
  if (!(R >= 3.0)) throw input_error("truncation bound must satisfy R >= 3");
  AdditiveFunctionSpec s = *this;
  s.truncation_ = R;
  return s;
}

AdditiveFunctionSpec AdditiveFunctionSpec::without_truncation() const {
  AdditiveFunctionSpec s = *this;
  s.truncation_.reset();
  return s;
}

AdditiveFunctionSpec AdditiveFunctionSpec::with_override(std::uint64_t p, std::uint32_t nu,
                                                         double value) const {
  if (!is_prime_u64(p)) throw input_error("override prime is not prime");
  if (nu == 0) throw input_error("override exponent must be >= 1");
  if (strongly_additive_ && nu != 1) {
    throw input_error("strongly additive spec only accepts overrides at nu = 1");
  }
  AdditiveFunctionSpec s = *this;
  s.overrides_[{p, nu}] = value;
  return s;
}

AdditiveFunctionSpec AdditiveFunctionSpec::with_strongly_additive(bool flag) const {
  if (flag) {
    for (const auto& [key, v] : overrides_) {
      (void)v;
      if (key.second != 1) {
        throw input_error("cannot force strong additivity: override at nu >= 2 present");
      }
    }
  }
  AdditiveFunctionSpec s = *this;
  s.strongly_additive_ = flag;
  return s;
}

double AdditiveFunctionSpec::raw_value(std::uint64_t p, std::uint32_t nu) const {
  const std::uint32_t nu_eff = strongly_additive_ ? 1 : nu;
  if (!overrides_.empty()) {
    auto it = overrides_.find({p, nu_eff});
    if (it != overrides_.end()) return it->second;
  }
  switch (family_) {
    case Family::Zero:
      return 0.0;
    case Family::LogPow:
      return 1.0 / std::pow(std::log(static_cast<double>(p)), parameter_);
    case Family::PPow:
      return nu_eff == 1 ? std::pow(static_cast<double>(p), -parameter_) : 0.0;
    case Family::DyadicLog:
      return dyadic_member(p, parameter_, true) ? 1.0 : 0.0;
    case Family::DyadicPow:
      return dyadic_member(p, parameter_, false) ? 1.0 : 0.0;
    case Family::EulerRatio:
      return -std::log1p(-1.0 / static_cast<double>(p));
    case Family::SigmaRatio: {
      // sigma(p^nu)/p^nu = 1 + (1 - p^-nu)/(p - 1)
      const double pd = static_cast<double>(p);
      return std::log1p((1.0 - std::pow(pd, -static_cast<double>(nu_eff))) / (pd - 1.0));
    }
  }
  return 0.0;
}

double apply_truncation(double value, std::uint64_t p, std::uint32_t nu, double R) {
  if (std::abs(value) <= 1.0) return value;
  const std::uint64_t q = pow_sat(p, nu);
  if (q != UINT64_MAX && static_cast<long double>(q) <= static_cast<long double>(R)) {
    return value;
  }
  return 0.0;
}

double AdditiveFunctionSpec::eval_prime_power_unchecked(std::uint64_t p,
                                                        std::uint32_t nu) const {
  double v = raw_value(p, nu);
  if (truncation_) v = apply_truncation(v, p, nu, *truncation_);
  return v;
}

double AdditiveFunctionSpec::eval_prime_power(std::uint64_t p, std::uint32_t nu) const {
  if (nu == 0) throw input_error("prime-power exponent must be >= 1");
  if (!is_prime_u64(p)) {
    throw input_error("eval_prime_power: " + std::to_string(p) + " is not prime");
  }
  return eval_prime_power_unchecked(p, nu);
}

std::string AdditiveFunctionSpec::serialize() const {
  std::ostringstream out;
  out << "family=" << family_name(family_);
  if (family_has_parameter(family_)) {
    const char* key =
        (family_ == Family::LogPow || family_ == Family::PPow) ? "xi" : "kappa";
    out << ' ' << key << '=' << format_double(parameter_);
  }
  if (strongly_additive_ != family_default_strongly_additive(family_)) {
    out << " strongly_additive=" << (strongly_additive_ ? 1 : 0);
  }
  if (truncation_) out << " truncation=" << format_double(*truncation_);
  for (const auto& [key, v] : overrides_) {
    out << " override=" << key.first << ',' << key.second << ',' << format_double(v);
  }
  return out.str();
}

AdditiveFunctionSpec AdditiveFunctionSpec::parse(const std::string& text) {
  std::istringstream in(text);
  std::string token;
  std::optional<Family> family;
  std::optional<double> parameter;
  std::optional<bool> strongly;
  std::optional<double> truncation;
  std::vector<std::tuple<std::uint64_t, std::uint32_t, double>> overrides;

  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw input_error("spec token without '=': " + token);
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "family") {
      for (Family f : {Family::Zero, Family::LogPow, Family::PPow, Family::DyadicLog,
                       Family::DyadicPow, Family::EulerRatio, Family::SigmaRatio}) {
        if (value == family_name(f)) family = f;
      }
      if (!family) throw input_error("unknown family: " + value);
    } else if (key == "xi" || key == "kappa") {
      parameter = std::stod(value);
    } else if (key == "strongly_additive") {
      strongly = (value == "1" || value == "true");
    } else if (key == "truncation") {
      truncation = std::stod(value);
    } else if (key == "override") {
      std::uint64_t p;
      std::uint32_t nu;
      double v;
      if (std::sscanf(value.c_str(), "%lu,%u,%lf", &p, &nu, &v) != 3) {
        throw input_error("override must be p,nu,value: " + value);
      }
      overrides.emplace_back(p, nu, v);
    } else {
      throw input_error("unknown spec key: " + key);
    }
  }
  if (!family) throw input_error("spec is missing family=...");
  if (family_has_parameter(*family) && !parameter) {
    throw input_error("family requires a parameter (xi= or kappa=)");
  }

  AdditiveFunctionSpec spec(*family, parameter.value_or(0.0));
  if (strongly) spec = spec.with_strongly_additive(*strongly);
  for (const auto& [p, nu, v] : overrides) spec = spec.with_override(p, nu, v);
  if (truncation) spec = spec.with_truncation(*truncation);
  return spec;
}

std::uint64_t AdditiveFunctionSpec::hash() const {
  const std::string s = serialize();
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

bool AdditiveFunctionSpec::operator==(const AdditiveFunctionSpec& other) const {
  return family_ == other.family_ && parameter_ == other.parameter_ &&
         strongly_additive_ == other.strongly_additive_ &&
         truncation_ == other.truncation_ && overrides_ == other.overrides_;
}

ClassifyResult classify(const AdditiveFunctionSpec& spec, std::uint32_t prime_budget) {
  if (prime_budget < 100) throw input_error("classify: prime_budget must be >= 100");
  ClassifyResult r;
  const auto& primes = cached_primes(prime_budget);
  for (std::uint32_t p : primes) {
    if (p > prime_budget) break;
    const double f = spec.eval_prime_power_unchecked(p, 1);
    if (f == 0.0) continue;
    const double inv_p = 1.0 / p;
    r.series_sq += std::min(1.0, f * f) * inv_p;
    if (std::abs(f) <= 1.0) r.series_lin += f * inv_p;
    r.series_supp += inv_p;
  }

  // Analytic verdicts per family. Overrides and truncation alter only
  // finitely many prime values for the built-in families (all of which have
  // |f(p)| <= 1 for p >= 3), so they do not change convergence verdicts.
  switch (spec.family()) {
    case Family::Zero:
      r.existence = SeriesVerdict::Convergent;
      r.support_divergence = SeriesVerdict::Convergent;
      r.note = spec.overrides().empty() ? "identically zero" : "finite support";
      break;
    case Family::LogPow:
    case Family::PPow:
    case Family::EulerRatio:
    case Family::SigmaRatio:
      r.existence = SeriesVerdict::Convergent;
      r.support_divergence = SeriesVerdict::Divergent;
      r.note = "f(p) != 0 on all primes; continuous limit law";
      break;
    case Family::DyadicLog:
      if (spec.parameter() > 1.0) {
        r.existence = SeriesVerdict::Convergent;
        r.support_divergence = SeriesVerdict::Convergent;
        r.note = "dyadic log intervals, kappa > 1: atomic limit law";
      } else {
        r.existence = SeriesVerdict::Divergent;
        r.support_divergence = SeriesVerdict::Divergent;
        r.note = "dyadic log intervals, kappa <= 1: defining series diverge";
      }
      break;
    case Family::DyadicPow:
      r.existence = SeriesVerdict::Convergent;
      r.support_divergence = SeriesVerdict::Convergent;
      r.note = "dyadic power intervals: atomic limit law for every kappa > 0";
      break;
  }
  return r;
}

}  // namespace addlab
