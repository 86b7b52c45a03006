#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace raa {

/// Thrown when a requested table or scan exceeds the configured memory
/// budget. Callers should fall back to windowed factorization.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// Exponent-tagged prime factorization of a single integer.
/// Invariants: primes strictly increasing, exponents >= 1, product equals n.
/// n = 1 has an empty factor list.
struct PrimeFactorization {
  std::uint64_t n = 1;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> factors;

  // P(n); 1 for n = 1 by convention.
  std::uint64_t largest_prime() const {
    return factors.empty() ? 1 : factors.back().first;
  }

  bool consistent() const;
};

// Deterministic Miller-Rabin, valid for all n < 2^64.
bool is_prime_u64(std::uint64_t n);

// Simple Eratosthenes sieve; primes in [2, limit].
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit);

/// Smallest-prime-factor table over [2, limit]. 4 bytes per entry
/// (limit is capped at 2^32 - 1); immutable after construction.
class SpfTable {
 public:
  // budget_bytes bounds the table allocation; throws CapacityError when
  // 4 * (limit + 1) exceeds it.
  explicit SpfTable(std::uint64_t limit,
                    std::uint64_t budget_bytes = std::uint64_t(1) << 32);

  std::uint64_t limit() const { return limit_; }

  std::uint32_t spf(std::uint64_t n) const {
    if (n < 2 || n > limit_) throw std::invalid_argument("SpfTable::spf: n out of range");
    return spf_[n];
  }

  PrimeFactorization factorize(std::uint64_t n) const;

  const std::vector<std::uint64_t>& primes() const { return primes_; }

 private:
  std::uint64_t limit_;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint64_t> primes_;
};

/// Complete factorizations of the consecutive integers
/// start .. start+length-1, plus their largest prime factors.
struct FactorWindow {
  std::uint64_t start = 1;
  std::vector<PrimeFactorization> factorizations;
  std::vector<std::uint64_t> largest_prime;
};

// Segmented factorization of [start, start+length-1]. primes_to_sqrt must
// contain every prime <= floor(sqrt(start+length-1)); an undersized list is
// detected when a leftover cofactor exceeding the square of the largest
// supplied prime fails a primality confirmation.
FactorWindow factorize_window(std::uint64_t start, std::uint64_t length,
                              const std::vector<std::uint64_t>& primes_to_sqrt);

}  // namespace raa
