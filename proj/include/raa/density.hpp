#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace raa {

/// One row of a density experiment: exact count plus derived fraction.
struct DensityRecord {
  std::uint64_t x = 0;
  std::string param_label;  // "t", "y", "delta", or "k"
  double param = 0.0;
  std::uint64_t count = 0;
  double fraction = 0.0;
};

// Count of n <= x with P(n) >= x^t (exact sieve count).
DensityRecord a_of_t(std::uint64_t x, double t);

// Count of y-smooth n <= x; n = 1 is y-smooth for every y.
DensityRecord psi(std::uint64_t x, std::uint64_t y);

// Fraction of n <= x-1 with P(n) > P(n+1); the reverse order fraction is
// exactly 1 minus this (ties are impossible for n >= 2).
DensityRecord pq_order_fraction(std::uint64_t x);

// Fraction of n <= x-1 with x^{-delta} < P(n)/P(n+1) < x^{delta}.
DensityRecord ratio_spread(std::uint64_t x, double delta);

// Fraction of composite n <= x with P(n)^r <= f_r(n) < (1+x^{-delta}) P(n)^r.
DensityRecord dominance_fraction(std::uint64_t x, unsigned r, double delta);

struct MertensResult {
  double sum = 0.0;      // sum of 1/p over u0 <= p <= v0
  bool bound_ok = false; // does C = 3 satisfy sum < (C + log(v0/u0))/log(u0)?
  double c_min = 0.0;    // minimal C making the inequality an equality
};

MertensResult mertens_window(std::uint64_t u0, std::uint64_t v0);

struct PlogpResult {
  double sum = 0.0;        // sum of 1/(p log p) over t <= p <= cutoff
  double tail_est = 0.0;   // integral estimate of the truncated tail
  double predicted = 0.0;  // 1/log(t)
  double abs_err = 0.0;    // |sum + tail_est - predicted|
};

PlogpResult plogp_tail(std::uint64_t t, std::uint64_t cutoff);

struct LandauResult {
  double slope = 0.0;     // (S(x2)-S(x1)) / (log x2 - log x1), S = sum 1/phi
  double e_series = 0.0;  // sum_{k<=terms} mu(k)^2 / (k phi(k))
  double e_zeta = 0.0;    // zeta(2) zeta(3) / zeta(6)
};

LandauResult landau_E(std::uint64_t x1, std::uint64_t x2,
                      std::uint64_t series_terms);

// Counts of n <= x with |f_r(n) - f_r(n+1)| <= k for each k in k_grid.
std::vector<DensityRecord> near_density_curve(std::uint64_t x, unsigned r,
                                              const std::vector<std::uint64_t>& k_grid);

std::string density_csv_header();
std::string density_csv_row(const std::string& op, const DensityRecord& rec,
                            double extra1 = 0.0, double extra2 = 0.0);

}  // namespace raa
