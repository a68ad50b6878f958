#include "cubic/primes.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace cubic {

namespace {

std::vector<uint32_t> small_primes(uint32_t n) {
  std::vector<char> comp(n + 1, 0);
  std::vector<uint32_t> out;
  for (uint32_t i = 2; i <= n; ++i) {
    if (comp[i]) continue;
    out.push_back(i);
    for (uint64_t j = static_cast<uint64_t>(i) * i; j <= n; j += i) comp[j] = 1;
  }
  return out;
}

constexpr uint64_t kBlock = 1u << 18;

}  // namespace

void for_each_prime(uint64_t n, const std::function<void(uint64_t)>& visit) {
  if (n < 2) return;
  uint32_t root = static_cast<uint32_t>(std::sqrt(static_cast<double>(n))) + 1;
  std::vector<uint32_t> base = small_primes(root);
  std::vector<char> block(kBlock);
  for (uint64_t lo = 2; lo <= n; lo += kBlock) {
    uint64_t hi = std::min(n, lo + kBlock - 1);
    std::fill(block.begin(), block.begin() + (hi - lo + 1), 0);
    for (uint32_t p : base) {
      uint64_t pp = static_cast<uint64_t>(p) * p;
      if (pp > hi) break;
      uint64_t start = std::max(pp, (lo + p - 1) / p * p);
      for (uint64_t j = start; j <= hi; j += p) block[j - lo] = 1;
    }
    for (uint64_t i = lo; i <= hi; ++i)
      if (!block[i - lo]) visit(i);
  }
}

std::vector<uint32_t> primes_upto(uint64_t n) {
  std::vector<uint32_t> out;
  if (n >= 2) out.reserve(static_cast<size_t>(1.3 * n / std::log(static_cast<double>(n))) + 16);
  for_each_prime(n, [&](uint64_t p) { out.push_back(static_cast<uint32_t>(p)); });
  return out;
}

bool is_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::shared_ptr<const std::vector<uint32_t>> prime_table(uint64_t n) {
  static std::mutex mu;
  static std::shared_ptr<const std::vector<uint32_t>> table;
  static uint64_t covered = 0;
  std::lock_guard<std::mutex> lock(mu);
  if (!table || n > covered) {
    uint64_t target = std::max<uint64_t>(n, 2 * covered);
    table = std::make_shared<const std::vector<uint32_t>>(primes_upto(target));
    covered = target;
  }
  return table;
}

}  // namespace cubic
