#include "raa/factorization.hpp"

#include <algorithm>
#include <cmath>

namespace raa {

bool PrimeFactorization::consistent() const {
  std::uint64_t prod = 1;
  std::uint64_t prev = 0;
  for (const auto& [p, a] : factors) {
    if (p <= prev || a == 0) return false;
    prev = p;
    for (std::uint32_t i = 0; i < a; ++i) {
      if (prod > n / p) return false;
      prod *= p;
    }
  }
  return prod == n;
}

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(
      static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                          23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // This base set is deterministic below 2^64 (Sorenson & Webster).
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                          23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> sieve(limit + 1, true);
  for (std::uint64_t i = 2; i * i <= limit; ++i) {
    if (sieve[i]) {
      for (std::uint64_t j = i * i; j <= limit; j += i) sieve[j] = false;
    }
  }
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (sieve[i]) primes.push_back(i);
  }
  return primes;
}

SpfTable::SpfTable(std::uint64_t limit, std::uint64_t budget_bytes)
    : limit_(limit) {
  if (limit < 2) throw std::invalid_argument("SpfTable: limit must be >= 2");
  if (limit >= (std::uint64_t(1) << 32))
    throw CapacityError("SpfTable: limit exceeds 32-bit entry width");
  if ((limit + 1) * sizeof(std::uint32_t) > budget_bytes)
    throw CapacityError("SpfTable: limit exceeds memory budget; use factorize_window");
  spf_.assign(limit + 1, 0);
  // Linear sieve: each composite is struck exactly once by its smallest prime.
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (spf_[i] == 0) {
      spf_[i] = static_cast<std::uint32_t>(i);
      primes_.push_back(i);
    }
    for (std::uint64_t p : primes_) {
      if (p > spf_[i] || i * p > limit) break;
      spf_[i * p] = static_cast<std::uint32_t>(p);
    }
  }
}

PrimeFactorization SpfTable::factorize(std::uint64_t n) const {
  if (n < 1 || n > limit_)
    throw std::invalid_argument("SpfTable::factorize: n out of range");
  PrimeFactorization f;
  f.n = n;
  while (n > 1) {
    std::uint64_t p = spf_[n];
    std::uint32_t a = 0;
    while (n % p == 0) {
      n /= p;
      ++a;
    }
    f.factors.emplace_back(p, a);
  }
  return f;
}

FactorWindow factorize_window(std::uint64_t start, std::uint64_t length,
                              const std::vector<std::uint64_t>& primes_to_sqrt) {
  if (start < 1 || length < 1)
    throw std::invalid_argument("factorize_window: start and length must be positive");
  const std::uint64_t end = start + length - 1;

  FactorWindow w;
  w.start = start;
  w.factorizations.resize(length);
  w.largest_prime.assign(length, 1);

  std::vector<std::uint64_t> residual(length);
  for (std::uint64_t i = 0; i < length; ++i) {
    residual[i] = start + i;
    w.factorizations[i].n = start + i;
  }

  std::uint64_t max_prime = 0;
  for (std::uint64_t p : primes_to_sqrt) {
    max_prime = std::max(max_prime, p);
    if (p * p > end) break;
    std::uint64_t first = ((start + p - 1) / p) * p;
    for (std::uint64_t m = first; m <= end; m += p) {
      std::uint64_t i = m - start;
      std::uint32_t a = 0;
      while (residual[i] % p == 0) {
        residual[i] /= p;
        ++a;
      }
      if (a > 0) {
        w.factorizations[i].factors.emplace_back(p, a);
        w.largest_prime[i] = p;
      }
    }
  }

  for (std::uint64_t i = 0; i < length; ++i) {
    std::uint64_t c = residual[i];
    if (c > 1) {
      // The cofactor must itself be prime; otherwise the supplied prime
      // list missed a prime <= sqrt(end).
      if (c > max_prime * max_prime && !is_prime_u64(c))
        throw std::invalid_argument(
            "factorize_window: primes_to_sqrt incomplete (composite cofactor " +
            std::to_string(c) + ")");
      w.factorizations[i].factors.emplace_back(c, 1);
      w.largest_prime[i] = std::max(w.largest_prime[i], c);
    }
  }
  return w;
}

}  // namespace raa
