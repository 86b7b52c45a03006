#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "raa/factorization.hpp"

namespace raa {

/// Evaluation context for g_n(r) = f_r(n+1) - f_r(n) with n = p^2 - 1.
struct GnContext {
  std::uint64_t p = 3;
  std::uint64_t n = 8;
  PrimeFactorization factors_n;
  bool excluded = false;  // p^2 - 1 of the form 2^a * 3^b

  static GnContext make(std::uint64_t p);
};

/// Rigorous enclosure [lo, hi] of a real quantity.
struct Enclosure {
  double lo = 0.0;
  double hi = 0.0;

  bool contains_zero() const { return lo <= 0.0 && hi >= 0.0; }
  double abs_bound() const {
    double a = lo < 0 ? -lo : lo;
    double b = hi < 0 ? -hi : hi;
    return a > b ? a : b;
  }
};

// Enclosure of 2 p^r - sum a_i q_i^r over the factorization of p^2 - 1.
Enclosure g_n(const GnContext& ctx, double r, unsigned prec_bits = 192);

// Enclosure of the derivative 2 p^r ln p - sum a_i q_i^r ln q_i.
Enclosure g_n_prime(const GnContext& ctx, double r, unsigned prec_bits = 192);

struct RootResult {
  std::uint64_t p = 0;
  double r_root = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
  double residual = 0.0;  // upper bound on |g_n(r_root)|
  bool excluded = false;
};

// Bisection (Newton-polished inside the confirmed bracket) on [0, 1.5].
// Requires g(0) < 0 and g(1.5) > 0; a sign violation is reported as a
// diagnostic error, never clamped. For non-excluded p >= 5 the root is
// asserted to lie in (0, 1).
RootResult solve_r(std::uint64_t p, double tol);

struct ChainResult {
  std::vector<RootResult> chain;  // r strictly decreasing
  bool complete = false;          // found the requested count within bound
};

// Greedy decreasing-exponent chain: starting from p_start, repeatedly
// find the next prime whose root is strictly below the current one.
ChainResult decreasing_r_sequence(std::uint64_t p_start, std::size_t count,
                                  std::uint64_t search_bound, double tol = 1e-12);

// All n <= limit with P(n) <= y and P(n+1) <= y, by enumeration of
// y-smooth numbers. n = 1 is admitted only when include_unit is set.
std::vector<std::uint64_t> smooth_consecutive(std::uint64_t limit,
                                              std::uint64_t y = 3,
                                              bool include_unit = false);

std::string root_csv_header();
std::string root_csv_row(const RootResult& r);

}  // namespace raa
