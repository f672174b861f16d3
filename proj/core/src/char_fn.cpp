#include "addlab/char_fn.hpp"

#include <cmath>
#include <vector>

#include "addlab/errors.hpp"
#include "addlab/primes.hpp"
#include "addlab/tail_models.hpp"

namespace addlab {

namespace {

inline std::complex<double> cis(double x) { return {std::cos(x), std::sin(x)}; }

// Per-prime data for fast repeated evaluation. A prime is "geometric" when
// the full nu-series collapses to (1 - 1/p) + e^{i tau f(p)}/p, i.e. the
// spec is strongly additive there and truncation never bites.
struct LocalFactor {
  std::uint32_t p = 0;
  double fp = 0.0;
  bool geometric = true;
  std::vector<double> values;  // f(p^nu) for nu = 1.. (non-geometric primes)
};

struct EulerProductData {
  AdditiveFunctionSpec spec;
  std::vector<LocalFactor> locals;
  std::shared_ptr<TailModels> tails;
  std::uint32_t p_max = 0;

  EulerProductData(const AdditiveFunctionSpec& s, std::uint32_t pm) : spec(s), p_max(pm) {
    tails = std::make_shared<TailModels>(spec);
    const auto& primes = cached_primes(pm);
    locals.reserve(primes.size());
    for (std::uint32_t p : primes) {
      if (p > pm) break;
      LocalFactor lf;
      lf.p = p;
      lf.fp = spec.eval_prime_power_unchecked(p, 1);
      const bool strongly_ok =
          spec.strongly_additive() && (!spec.truncation() || std::abs(lf.fp) <= 1.0);
      if (!strongly_ok) {
        lf.geometric = false;
        // keep values until the geometric weight is negligible
        const double lim = 54.0 / std::log2(static_cast<double>(p));
        const auto nu_max = static_cast<std::uint32_t>(lim) + 1;
        for (std::uint32_t nu = 1; nu <= nu_max; ++nu) {
          lf.values.push_back(spec.eval_prime_power_unchecked(p, nu));
        }
      }
      locals.push_back(std::move(lf));
    }
  }

  CfValue eval(double tau) const {
    CfValue out;
    if (tau == 0.0) return out;  // local factors telescope to 1 exactly

    std::complex<double> prod{1.0, 0.0};
    double log_scale = 0.0;  // renormalisation guard against underflow
    for (const auto& lf : locals) {
      const double inv_p = 1.0 / static_cast<double>(lf.p);
      std::complex<double> factor;
      if (lf.geometric) {
        factor = (1.0 - inv_p) + cis(tau * lf.fp) * inv_p;
      } else {
        std::complex<double> series{1.0, 0.0};
        double w = inv_p;
        for (double v : lf.values) {
          series += cis(tau * v) * w;
          w *= inv_p;
        }
        factor = (1.0 - inv_p) * series;
      }
      prod *= factor;
      const double mag = std::abs(prod);
      if (mag < 1e-120 && mag > 0.0) {
        log_scale += std::log(mag);
        prod /= mag;
      }
    }

    const ComplexTailEstimate tail = tails->cf_exponent(tau, p_max);
    if (!tail.known || !std::isfinite(tail.value.real()) ||
        !std::isfinite(tail.value.imag())) {
      out.value = prod * std::exp(log_scale);
      out.tail_error = std::numeric_limits<double>::infinity();
      return out;
    }
    const std::complex<double> tail_factor = std::exp(tail.value);
    out.value = prod * tail_factor * std::exp(log_scale);
    // second-order local corrections beyond P_max (nu >= 2 terms)
    const double crumbs = 3.0 / (static_cast<double>(p_max) *
                                 std::log(static_cast<double>(p_max)));
    out.tail_error = std::abs(out.value) * (tail.error + crumbs);
    return out;
  }
};

struct ConditionalData {
  AdditiveFunctionSpec spec;
  double r = 1.0;
  std::uint32_t p_max = 0;
  std::vector<std::uint32_t> primes;
  std::vector<double> fp;
  std::shared_ptr<TailModels> tails;

  ConditionalData(const AdditiveFunctionSpec& s, double r_in, std::uint32_t pm)
      : spec(s), r(r_in), p_max(pm) {
    tails = std::make_shared<TailModels>(spec);
    const auto& cache = cached_primes(pm);
    for (std::uint32_t p : cache) {
      if (p > pm) break;
      primes.push_back(p);
      fp.push_back(spec.eval_prime_power_unchecked(p, 1));
    }
  }

  CfValue eval(double tau) const {
    CfValue out;
    if (tau == 0.0) return out;
    std::complex<double> prod{1.0, 0.0};
    for (std::size_t i = 0; i < primes.size(); ++i) {
      const double denom_w = r / static_cast<double>(primes[i] - 1);
      const std::complex<double> num = 1.0 + denom_w * cis(tau * fp[i]);
      prod *= num / (1.0 + denom_w);
    }
    const ComplexTailEstimate tail = tails->cf_exponent(tau, p_max);
    if (!tail.known || !std::isfinite(tail.value.real())) {
      out.value = prod;
      out.tail_error = std::numeric_limits<double>::infinity();
      return out;
    }
    out.value = prod * std::exp(r * tail.value);
    const double lp = std::log(static_cast<double>(p_max));
    const double crumbs = (r * (r + 2.0) + 2.0) / (static_cast<double>(p_max) * lp);
    out.tail_error = std::abs(out.value) * (r * tail.error + crumbs);
    return out;
  }
};

}  // namespace

CharacteristicFunction CharacteristicFunction::euler_product(
    const AdditiveFunctionSpec& spec, std::uint32_t p_max) {
  if (p_max < 100) throw input_error("cf: P_max must be >= 100");
  CharacteristicFunction cf;
  auto data = std::make_shared<EulerProductData>(spec, p_max);
  cf.eval_ = [data](double tau) { return data->eval(tau); };
  cf.tag_ = "euler_product";
  cf.p_max_ = p_max;
  return cf;
}

CharacteristicFunction CharacteristicFunction::conditional(
    const AdditiveFunctionSpec& spec, double r, std::uint32_t p_max, double kappa) {
  if (r <= 0.0) throw input_error("conditional cf: r must be > 0");
  if (!(kappa > 0.0 && kappa < 1.0)) throw input_error("conditional cf: kappa in (0,1)");
  if (r < kappa || r > 1.0 / kappa) {
    throw input_error("conditional cf: r outside [kappa, 1/kappa]");
  }
  if (!spec.strongly_additive()) {
    throw input_error("conditional cf requires a strongly additive spec");
  }
  if (p_max < 100) throw input_error("cf: P_max must be >= 100");
  CharacteristicFunction cf;
  auto data = std::make_shared<ConditionalData>(spec, r, p_max);
  cf.eval_ = [data](double tau) { return data->eval(tau); };
  cf.tag_ = "conditional";
  cf.p_max_ = p_max;
  return cf;
}

CharacteristicFunction CharacteristicFunction::analytic(
    std::function<std::complex<double>(double)> fn, std::string tag) {
  CharacteristicFunction cf;
  cf.eval_ = [fn = std::move(fn)](double tau) {
    CfValue v;
    v.value = fn(tau);
    return v;
  };
  cf.tag_ = std::move(tag);
  return cf;
}

CharacteristicFunction CharacteristicFunction::gaussian() {
  return analytic([](double tau) { return std::complex<double>(std::exp(-0.5 * tau * tau), 0.0); },
                  "gaussian");
}

CharacteristicFunction CharacteristicFunction::degenerate(double a) {
  return analytic([a](double tau) { return cis(a * tau); }, "degenerate");
}

}  // namespace addlab
