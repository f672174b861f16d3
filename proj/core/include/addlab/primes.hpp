#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace addlab {

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n);

// Simple sieve of Eratosthenes; returns all primes <= limit.
std::vector<std::uint32_t> primes_up_to(std::uint32_t limit);

// Streams primes in (lo, hi] in increasing order through fn, sieving by
// segments so the memory footprint stays O(sqrt(hi) + segment).
void for_each_prime(std::uint64_t lo, std::uint64_t hi,
                    const std::function<void(std::uint64_t)>& fn);

// Process-wide cached prime list, grown on demand. A call with a larger
// bound may reallocate: re-take the reference after any call.
const std::vector<std::uint32_t>& cached_primes(std::uint32_t at_least);

}  // namespace addlab
