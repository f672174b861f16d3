#include "addlab/companions.hpp"

#include <cmath>

#include "addlab/errors.hpp"
#include "addlab/primes.hpp"

namespace addlab {

namespace {

// Closed form applies when truncation can never zero a power of p: either
// no truncation is set or |f(p)| <= 1 (the truncation rule keeps those).
bool full_geometric_support(const AdditiveFunctionSpec& spec, std::uint64_t p) {
  if (!spec.strongly_additive()) return false;
  const double fp = spec.raw_value(p, 1);
  if (fp == 0.0) return false;
  return !spec.truncation() || std::abs(fp) <= 1.0;
}

}  // namespace

Companions companions(const AdditiveFunctionSpec& spec, std::uint64_t p,
                      double tail_tol) {
  if (!is_prime_u64(p)) throw input_error("companions: p is not prime");
  Companions c;
  if (full_geometric_support(spec, p)) {
    c.S = 1.0 / static_cast<double>(p - 1);
    c.w = 1.0 / static_cast<double>(p);
    return c;
  }
  const double inv_p = 1.0 / static_cast<double>(p);
  double term = inv_p;  // p^-nu
  double sum = 0.0;
  for (std::uint32_t nu = 1; nu <= 2048; ++nu) {
    if (spec.nonzero_at(p, nu)) sum += term;
    // remaining mass is at most term * inv_p / (1 - inv_p)
    if (term * inv_p / (1.0 - inv_p) < tail_tol) break;
    term *= inv_p;
  }
  c.S = sum;
  c.w = (1.0 - inv_p) * sum;
  return c;
}

bool u_indicator(const AdditiveFunctionSpec& spec, std::uint64_t m) {
  if (m == 0) throw input_error("u_indicator: m must be >= 1");
  for (std::uint64_t p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
    if (m % p) continue;
    std::uint32_t nu = 0;
    while (m % p == 0) {
      m /= p;
      ++nu;
    }
    if (!spec.nonzero_at(p, nu)) return false;
  }
  if (m > 1 && !spec.nonzero_at(m, 1)) return false;
  return true;
}

double h_factor(const AdditiveFunctionSpec& spec, std::uint64_t m, double tail_tol) {
  if (m == 0) throw input_error("h_factor: m must be >= 1");
  double h = 1.0;
  auto local = [&](std::uint64_t p, std::uint32_t nu) -> bool {
    if (!spec.nonzero_at(p, nu)) return false;  // u_f(m) = 0
    const Companions c = companions(spec, p, tail_tol);
    h *= (1.0 - 1.0 / static_cast<double>(p)) / (1.0 - c.w);
    return true;
  };
  std::uint64_t rest = m;
  for (std::uint64_t p = 2; p * p <= rest; p += (p == 2 ? 1 : 2)) {
    if (rest % p) continue;
    std::uint32_t nu = 0;
    while (rest % p == 0) {
      rest /= p;
      ++nu;
    }
    if (!local(p, nu)) return 0.0;
  }
  if (rest > 1 && !local(rest, 1)) return 0.0;
  return h;
}

}  // namespace addlab
