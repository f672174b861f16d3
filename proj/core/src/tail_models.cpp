#include "addlab/tail_models.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

#include "addlab/errors.hpp"
#include "addlab/primes.hpp"
#include "addlab/quadrature.hpp"

namespace addlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Blocks with upper endpoint below this bound use exact sieved prime sums;
// beyond it the Mertens-form interval model takes over.
constexpr std::uint64_t kExactBlockLimit = std::uint64_t{1} << 26;

// E1(x) = -Ei(-x), the tail exponential integral.
double expint_e1(double x) { return -std::expint(-x); }

struct DyadicBlock {
  std::uint64_t lo = 0;  // exclusive
  std::uint64_t hi = 0;  // inclusive (floored endpoint)
  bool empty() const { return hi <= lo; }
};

double dyadic_delta(bool log_variant, double kappa, double n) {
  return log_variant ? 1.0 / std::pow(std::log(n), kappa) : std::pow(n, -kappa);
}

unsigned dyadic_min_n(bool log_variant) { return log_variant ? 3 : 1; }

DyadicBlock dyadic_block(bool log_variant, double kappa, unsigned n) {
  DyadicBlock b;
  b.lo = std::uint64_t{1} << n;
  const long double delta =
      log_variant
          ? 1.0L / std::pow(std::log(static_cast<long double>(n)),
                            static_cast<long double>(kappa))
          : std::pow(static_cast<long double>(n), -static_cast<long double>(kappa));
  b.hi = b.lo + static_cast<std::uint64_t>(
                    std::floor(static_cast<long double>(b.lo) * delta));
  return b;
}

struct BlockSums {
  double recip = 0.0;  // sum 1/p
  double logw = 0.0;   // sum log(p)/p
};

// Exact sums over primes in (lo, hi]; hi is expected to be modest.
BlockSums exact_prime_sums(std::uint64_t lo, std::uint64_t hi) {
  BlockSums s;
  for_each_prime(lo, hi, [&](std::uint64_t p) {
    const double pd = static_cast<double>(p);
    s.recip += 1.0 / pd;
    s.logw += std::log(pd) / pd;
  });
  return s;
}

const BlockSums& cached_block_sums(bool log_variant, double kappa, unsigned n) {
  static std::map<std::tuple<bool, double, unsigned>, BlockSums> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_tuple(log_variant, kappa, n);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const DyadicBlock b = dyadic_block(log_variant, kappa, n);
    it = cache.emplace(key, b.empty() ? BlockSums{} : exact_prime_sums(b.lo, b.hi)).first;
  }
  return it->second;
}

// Mertens-form sum of 1/p over (a, b], from the logarithmic-integral density.
double mertens_interval(double a, double b) {
  if (b <= a) return 0.0;
  return std::log(std::log(b) / std::log(a));
}

std::complex<double> cis(double x) { return {std::cos(x), std::sin(x)}; }

}  // namespace

double density_model_rel_error(double P) {
  return 2.0 * std::exp(-std::sqrt(std::max(std::log(P), 1.0)));
}

TailModels::TailModels(const AdditiveFunctionSpec& spec)
    : spec_(spec),
      base_(AdditiveFunctionSpec(spec.family(), spec.parameter())
                .with_strongly_additive(spec.strongly_additive())) {}

template <typename Value, typename Term>
void TailModels::apply_override_corrections(double cut, Value& value, Term&& term) const {
  for (const auto& [key, v] : spec_.overrides()) {
    (void)v;
    if (key.second != 1) continue;
    const double p = static_cast<double>(key.first);
    if (p <= cut) continue;
    const double fam = base_.eval_prime_power_unchecked(key.first, 1);
    const double act = spec_.eval_prime_power_unchecked(key.first, 1);
    value += term(act, p) - term(fam, p);
  }
}

TailEstimate TailModels::dyadic_reciprocal(double P) const {
  const bool log_variant = spec_.family() == Family::DyadicLog;
  const double kappa = spec_.parameter();
  const unsigned n_min = dyadic_min_n(log_variant);
  TailEstimate t;

  // Exact and Mertens-modelled blocks with integer endpoints.
  for (unsigned n = n_min; n <= 62; ++n) {
    const DyadicBlock b = dyadic_block(log_variant, kappa, n);
    if (static_cast<double>(b.hi) <= P || b.empty()) continue;
    const bool whole = static_cast<double>(b.lo) >= P;
    if (b.hi <= kExactBlockLimit) {
      if (whole) {
        t.value += cached_block_sums(log_variant, kappa, n).recip;
      } else {
        t.value += exact_prime_sums(static_cast<std::uint64_t>(P), b.hi).recip;
      }
    } else {
      const double lo = std::max(P, static_cast<double>(b.lo));
      const double v = mertens_interval(lo, static_cast<double>(b.hi));
      t.value += v;
      t.error += v * density_model_rel_error(lo);
    }
  }

  // Large blocks: real endpoints, Mertens model, then an integral remainder.
  const unsigned n_cap = log_variant ? 65536 : 8192;
  const double ln2 = std::log(2.0);
  for (unsigned n = 63; n <= n_cap; ++n) {
    const double delta = dyadic_delta(log_variant, kappa, n);
    const double v = std::log1p(std::log1p(delta) / (n * ln2));
    t.value += v;
    t.error += v * density_model_rel_error(std::pow(2.0, std::min(300, static_cast<int>(n))));
    if (v < 1e-18 * std::max(t.value, 1.0)) break;
  }
  const double N = n_cap + 0.5;
  double remainder;
  if (log_variant) {
    remainder = (kappa > 1.0)
                    ? std::pow(std::log(N), 1.0 - kappa) / ((kappa - 1.0) * ln2)
                    : kInf;
  } else {
    remainder = std::pow(N, -kappa) / (kappa * ln2);
  }
  t.value += remainder;
  if (std::isfinite(remainder)) {
    t.error += remainder * (dyadic_delta(log_variant, kappa, N) * 0.75 + 1e-6);
  }
  return t;
}

TailEstimate TailModels::support_reciprocal(double P) const {
  if (P < 2) throw input_error("tail models require P >= 2");
  TailEstimate t;
  switch (spec_.family()) {
    case Family::Zero:
      break;  // overrides only
    case Family::DyadicLog:
    case Family::DyadicPow:
      t = dyadic_reciprocal(P);
      break;
    default:
      // f(p) != 0 on all primes: the support series diverges.
      t.value = kInf;
      t.error = kInf;
      break;
  }
  if (std::isfinite(t.value)) {
    apply_override_corrections(P, t.value, [](double f, double p) {
      return f != 0.0 ? 1.0 / p : 0.0;
    });
  }
  return t;
}

TailEstimate TailModels::smooth_linear(double y) const {
  TailEstimate t;
  const double u0 = std::log(y);
  const double xi = spec_.parameter();
  switch (spec_.family()) {
    case Family::LogPow:
      t.value = std::pow(u0, -xi) / xi;
      break;
    case Family::PPow:
      t.value = expint_e1(xi * u0);
      break;
    case Family::EulerRatio:
    case Family::SigmaRatio: {
      const bool euler = spec_.family() == Family::EulerRatio;
      auto g = [&](double u) {
        const double e = std::exp(-u);
        return (euler ? -std::log1p(-e) : std::log1p(e)) / u;
      };
      t.value = integrate(g, u0, u0 + 60.0, 1e-15).value;
      break;
    }
    default:
      t.known = false;
      return t;
  }
  t.error = t.value * density_model_rel_error(y);
  return t;
}

TailEstimate TailModels::smooth_square(double y) const {
  TailEstimate t;
  const double u0 = std::log(y);
  const double xi = spec_.parameter();
  switch (spec_.family()) {
    case Family::LogPow:
      t.value = std::pow(u0, -2.0 * xi) / (2.0 * xi);
      break;
    case Family::PPow:
      t.value = expint_e1(2.0 * xi * u0);
      break;
    case Family::EulerRatio:
    case Family::SigmaRatio: {
      const bool euler = spec_.family() == Family::EulerRatio;
      auto g = [&](double u) {
        const double e = std::exp(-u);
        const double f = euler ? -std::log1p(-e) : std::log1p(e);
        return f * f / u;
      };
      t.value = integrate(g, u0, u0 + 40.0, 1e-16).value;
      break;
    }
    default:
      t.known = false;
      return t;
  }
  t.error = t.value * density_model_rel_error(y);
  return t;
}

TailEstimate TailModels::linear(double y) const {
  if (y < 8) throw input_error("tail models require y >= 8");
  TailEstimate t;
  switch (spec_.family()) {
    case Family::Zero:
      break;
    case Family::DyadicLog:
    case Family::DyadicPow:
      t = dyadic_reciprocal(y);  // f = 1 on the support, |f| <= 1
      break;
    default:
      t = smooth_linear(y);
      break;
  }
  if (t.known && std::isfinite(t.value)) {
    apply_override_corrections(y, t.value, [](double f, double p) {
      return std::abs(f) <= 1.0 ? f / p : 0.0;
    });
  }
  return t;
}

TailEstimate TailModels::square(double y) const {
  if (y < 8) throw input_error("tail models require y >= 8");
  TailEstimate t;
  switch (spec_.family()) {
    case Family::Zero:
      break;
    case Family::DyadicLog:
    case Family::DyadicPow:
      t = dyadic_reciprocal(y);  // min(1, f^2) = 1 on the support
      break;
    default:
      t = smooth_square(y);
      break;
  }
  if (t.known && std::isfinite(t.value)) {
    apply_override_corrections(y, t.value, [](double f, double p) {
      return std::min(1.0, f * f) / p;
    });
  }
  return t;
}

TailEstimate TailModels::support_log_weighted(double a, double b) const {
  TailEstimate t;
  switch (spec_.family()) {
    case Family::Zero:
      break;
    case Family::DyadicLog:
    case Family::DyadicPow: {
      const bool log_variant = spec_.family() == Family::DyadicLog;
      const double kappa = spec_.parameter();
      // sum over a block of log(p)/p ~ log(hi/lo) by the li density.
      for (unsigned n = dyadic_min_n(log_variant); n <= 62; ++n) {
        const DyadicBlock blk = dyadic_block(log_variant, kappa, n);
        if (blk.empty()) continue;
        const double lo = std::max(a, static_cast<double>(blk.lo));
        const double hi = std::min(b, static_cast<double>(blk.hi));
        if (hi <= lo) {
          if (static_cast<double>(blk.lo) > b) break;
          continue;
        }
        if (blk.hi <= kExactBlockLimit && lo == static_cast<double>(blk.lo) &&
            hi == static_cast<double>(blk.hi)) {
          t.value += cached_block_sums(log_variant, kappa, n).logw;
        } else if (hi <= static_cast<double>(kExactBlockLimit)) {
          t.value += exact_prime_sums(static_cast<std::uint64_t>(lo),
                                      static_cast<std::uint64_t>(hi))
                         .logw;
        } else {
          const double v = std::log(hi / lo);
          t.value += v;
          t.error += v * density_model_rel_error(lo);
        }
      }
      for (unsigned n = 63; n <= 65536; ++n) {
        const double block_lo = std::pow(2.0, n);
        if (block_lo > b) break;
        const double delta = dyadic_delta(log_variant, kappa, n);
        const double block_hi = block_lo * (1.0 + delta);
        const double lo = std::max(a, block_lo);
        const double hi = std::min(b, block_hi);
        if (hi <= lo) continue;
        const double v = std::log(hi / lo);
        t.value += v;
        t.error += v * 1e-3;
      }
      break;
    }
    default:
      t.known = false;
      break;
  }
  if (t.known) {
    for (const auto& [key, v] : spec_.overrides()) {
      (void)v;
      if (key.second != 1) continue;
      const double p = static_cast<double>(key.first);
      if (p <= a || p > b) continue;
      const double fam = base_.eval_prime_power_unchecked(key.first, 1);
      const double act = spec_.eval_prime_power_unchecked(key.first, 1);
      t.value += ((act != 0.0) - (fam != 0.0)) * std::log(p) / p;
    }
  }
  return t;
}

ComplexTailEstimate TailModels::smooth_cf(double tau, double P) const {
  ComplexTailEstimate t;
  const double xi = spec_.parameter();
  const double u0 = std::log(P);
  const double atau = std::abs(tau);
  const double phase_floor = 1e-9;

  if (spec_.family() == Family::LogPow) {
    // v = log u: integral of (e^{i tau e^{-xi v}} - 1) dv.
    const double v0 = std::log(u0);
    const double v1 = std::log(std::max(atau * 1e9, 1.0)) / xi;
    if (v1 > v0) {
      auto g = [&](double v) { return cis(tau * std::exp(-xi * v)) - 1.0; };
      t.value = integrate_complex(g, v0, v1, 1e-11).value;
    }
    const double U = std::exp(std::max(v0, v1));
    t.value += std::complex<double>(0.0, tau) * std::pow(U, -xi) / xi;
    t.error += atau * std::pow(U, -2.0 * xi) / (2.0 * xi) + phase_floor;
  } else {
    // PPow / EulerRatio / SigmaRatio: f decays like a power of p itself.
    auto f_of_u = [&](double u) -> double {
      const double e = std::exp(-u);
      switch (spec_.family()) {
        case Family::PPow: return std::exp(-xi * u);
        case Family::EulerRatio: return -std::log1p(-e);
        default: return std::log1p(e);  // SigmaRatio
      }
    };
    const double decay = spec_.family() == Family::PPow ? xi : 1.0;
    const double u1 = std::max(u0, std::log(std::max(atau, 1.0) * 1e9) / decay);
    if (u1 > u0) {
      auto g = [&](double u) { return (cis(tau * f_of_u(u)) - 1.0) / u; };
      t.value = integrate_complex(g, u0, u1, 1e-11).value;
    }
    // first-order remainder beyond u1
    const double rem = (spec_.family() == Family::PPow) ? expint_e1(decay * u1)
                                                        : std::exp(-u1) / u1;
    t.value += std::complex<double>(0.0, tau) * rem;
    t.error += atau * rem * 1e-3 + phase_floor;
  }
  t.error += std::abs(t.value) * density_model_rel_error(P);
  return t;
}

ComplexTailEstimate TailModels::cf_exponent(double tau, double P) const {
  if (P < 8) throw input_error("tail models require P >= 8");
  ComplexTailEstimate t;
  if (tau == 0.0) return t;
  switch (spec_.family()) {
    case Family::Zero:
      break;
    case Family::DyadicLog:
    case Family::DyadicPow: {
      const TailEstimate rec = dyadic_reciprocal(P);
      const std::complex<double> unit = cis(tau) - 1.0;
      t.value = unit * rec.value;
      t.error = std::abs(unit) * rec.error;
      break;
    }
    default:
      t = smooth_cf(tau, P);
      break;
  }
  apply_override_corrections(P, t.value, [&](double f, double p) {
    return (cis(tau * f) - 1.0) / p;
  });
  return t;
}

double TailModels::prime_power_crumbs(double y) const {
  const double xi = spec_.parameter();
  // cap on min(1, f(p^nu)^2) over primes p > z for exponents nu >= 2
  auto family_cap = [&](double z) -> double {
    switch (spec_.family()) {
      case Family::Zero:
        return 0.0;
      case Family::LogPow:
        return std::min(1.0, std::pow(std::max(std::log(z), std::log(2.0)), -2.0 * xi));
      case Family::PPow:
        return spec_.strongly_additive() ? std::min(1.0, std::pow(z, -2.0 * xi)) : 0.0;
      case Family::DyadicLog:
      case Family::DyadicPow:
        return 1.0;
      case Family::EulerRatio:
      case Family::SigmaRatio:
        return std::min(1.0, (1.4 / z) * (1.4 / z));
    }
    return 1.0;
  };
  double total = 0.0;
  for (int nu = 2; nu <= 64; ++nu) {
    const double z = std::max(2.0, std::pow(y, 1.0 / nu));
    const double lz = std::max(std::log(z), std::log(2.0));
    // integral_z^inf t^-nu / log t dt <= z^{1-nu} / ((nu-1) log z) * (1 + 1/((nu-1) log z))
    const double head = std::pow(z, 1.0 - nu) / ((nu - 1) * lz);
    const double term = 1.5 * head * (1.0 + 1.0 / ((nu - 1) * lz)) * family_cap(z);
    total += term;
    if (head < 1e-18) break;
  }
  // overrides at nu >= 2 beyond y contribute exactly
  for (const auto& [key, v] : spec_.overrides()) {
    if (key.second < 2 || v == 0.0) continue;
    const double q = std::pow(static_cast<double>(key.first), key.second);
    if (q <= y) continue;
    const double f = spec_.eval_prime_power_unchecked(key.first, key.second);
    total += std::min(1.0, f * f) / q;
  }
  return total;
}

}  // namespace addlab
