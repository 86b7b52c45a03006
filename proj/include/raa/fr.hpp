#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "raa/factorization.hpp"

namespace raa {

enum class FrMode { ExactInt, ExactRational, RealInterval };

/// Result of an f_r evaluation. Exactly one of the payloads is meaningful,
/// selected by mode(). Equality is only defined between two values of the
/// same exact mode; RealInterval supports separated/overlapping queries.
class FrValue {
 public:
  static FrValue exact_int(mpz_class v);
  static FrValue exact_rational(mpq_class v);
  static FrValue real_interval(double mid, double rad);

  FrMode mode() const { return mode_; }

  const mpz_class& int_value() const;
  const mpq_class& rat_value() const;
  double real_value() const;
  double error_bound() const;

  // Throws std::logic_error unless both operands share an exact mode.
  bool operator==(const FrValue& other) const;
  bool operator!=(const FrValue& other) const { return !(*this == other); }

  // Interval queries: true when the enclosures cannot / may intersect.
  bool separated_from(const FrValue& other) const;
  bool overlapping(const FrValue& other) const;

  // Exact decimal string (or num/den for rationals) for CSV emission.
  std::string to_string() const;

 private:
  FrMode mode_ = FrMode::ExactInt;
  mpz_class int_;
  mpq_class rat_;
  double mid_ = 0.0;
  double rad_ = 0.0;
};

// f_r(n) = sum a_i * p_i^r for integer r >= 1, exact.
FrValue f_r_int(const PrimeFactorization& fact, unsigned r);

// f_{-m}(n) = sum a_i / p_i^m as a reduced fraction, m >= 1.
FrValue f_r_negative(const PrimeFactorization& fact, unsigned m);

// Rigorous midpoint-radius enclosure of sum a_i * p_i^r for real r,
// computed with directed rounding at prec_bits working precision.
FrValue f_r_real(const PrimeFactorization& fact, double r, unsigned prec_bits);

// Same, with r given exactly as num/den (used for radical-separation
// witnesses where the exponent must not be rounded up front).
FrValue f_r_real_rational(const PrimeFactorization& fact, long num, long den,
                          unsigned prec_bits);

// Fast exact path for the scan hot loop: sum a_i * p_i^r in unsigned
// 128-bit, throwing CapacityError on overflow.
unsigned __int128 f_r_u128(const PrimeFactorization& fact, unsigned r);

// f_r over a consecutive range by segmented sieve; index i holds
// f_r(lo + i). primes must contain every prime <= sqrt(hi).
std::vector<unsigned __int128> f_r_range(std::uint64_t lo, std::uint64_t hi,
                                         unsigned r,
                                         const std::vector<std::uint64_t>& primes);

}  // namespace raa
