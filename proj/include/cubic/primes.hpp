#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace cubic {

// All primes <= n, via a segmented sieve.
std::vector<uint32_t> primes_upto(uint64_t n);

// Calls visit(p) for every prime p <= n in increasing order, sieving in
// blocks so memory stays O(sqrt n + block).
void for_each_prime(uint64_t n, const std::function<void(uint64_t)>& visit);

bool is_prime(uint64_t n);

// Shared table holding at least the primes <= n (possibly more); grows on
// demand. Older snapshots stay valid while referenced.
std::shared_ptr<const std::vector<uint32_t>> prime_table(uint64_t n);

}  // namespace cubic
