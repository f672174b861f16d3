#include "addlab/primes.hpp"

#include <algorithm>
#include <cmath>

namespace addlab {

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull,
                          19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // This base set is deterministic for all n < 2^64.
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull,
                          19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<std::uint32_t> primes_up_to(std::uint32_t limit) {
  std::vector<std::uint32_t> primes;
  if (limit < 2) return primes;
  std::vector<std::uint8_t> composite(static_cast<std::size_t>(limit) + 1, 0);
  for (std::uint64_t i = 2; i * i <= limit; ++i) {
    if (!composite[i]) {
      for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
    }
  }
  primes.reserve(static_cast<std::size_t>(
      limit > 16 ? 1.2 * limit / std::log(static_cast<double>(limit)) : 8));
  for (std::uint32_t i = 2; i <= limit; ++i) {
    if (!composite[i]) primes.push_back(i);
  }
  return primes;
}

void for_each_prime(std::uint64_t lo, std::uint64_t hi,
                    const std::function<void(std::uint64_t)>& fn) {
  if (hi < 2 || hi <= lo) return;
  const auto root = static_cast<std::uint32_t>(std::sqrt(static_cast<double>(hi))) + 1;
  const auto base = primes_up_to(root);
  const std::uint64_t segment = 1u << 20;
  std::vector<std::uint8_t> sieve(segment);
  std::uint64_t start = std::max<std::uint64_t>(lo + 1, 2);
  for (std::uint64_t low = start; low <= hi; low += segment) {
    const std::uint64_t high = std::min(hi, low + segment - 1);
    const std::size_t len = static_cast<std::size_t>(high - low + 1);
    std::fill(sieve.begin(), sieve.begin() + len, 0);
    for (std::uint32_t p : base) {
      const std::uint64_t p64 = p;
      if (p64 * p64 > high) break;
      std::uint64_t first = std::max(p64 * p64, ((low + p64 - 1) / p64) * p64);
      for (std::uint64_t j = first; j <= high; j += p64) {
        sieve[static_cast<std::size_t>(j - low)] = 1;
      }
    }
    for (std::size_t i = 0; i < len; ++i) {
      if (!sieve[i]) fn(low + i);
    }
  }
}

const std::vector<std::uint32_t>& cached_primes(std::uint32_t at_least) {
  static std::vector<std::uint32_t> cache;
  static std::uint32_t cached_limit = 0;
  if (cached_limit < at_least) {
    cache = primes_up_to(at_least);
    cached_limit = at_least;
  }
  return cache;
}

}  // namespace addlab
