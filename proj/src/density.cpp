#include "raa/density.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "raa/fr.hpp"

namespace raa {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Compensated (Kahan) accumulator.
struct Kahan {
  double sum = 0.0;
  double c = 0.0;
  void add(double v) {
    double y = v - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

// P(n) for 1 <= n <= x; index n. P(1) = 1.
std::vector<u64> largest_prime_table(u64 x) {
  std::vector<u64> table(x + 1, 1);
  for (u64 p : primes_up_to(x)) {
    for (u64 m = p; m <= x; m += p) table[m] = p;  // ascending p: last wins
  }
  return table;
}

// Segmented prime enumeration over [lo, hi].
template <typename Fn>
void for_each_prime(u64 lo, u64 hi, Fn fn) {
  if (hi < 2 || hi < lo) return;
  lo = std::max<u64>(lo, 2);
  const u64 sqrt_hi = static_cast<u64>(std::sqrt(static_cast<double>(hi))) + 1;
  const auto base = primes_up_to(sqrt_hi);
  const u64 seg = std::uint64_t(1) << 20;
  std::vector<char> sieve;
  for (u64 s = lo; s <= hi; s += seg) {
    const u64 e = std::min(hi, s + seg - 1);
    sieve.assign(e - s + 1, 1);
    for (u64 p : base) {
      if (p * p > e) break;
      u64 first = std::max(p * p, ((s + p - 1) / p) * p);
      for (u64 m = first; m <= e; m += p) sieve[m - s] = 0;
    }
    for (u64 n = s; n <= e; ++n) {
      if (sieve[n - s]) fn(n);
    }
  }
}

// Smallest integer >= x^t, evaluated in 128-bit MPFR.
u64 pow_threshold_ceil(u64 x, double t) {
  mpfr_t v, e;
  mpfr_init2(v, 128);
  mpfr_init2(e, 128);
  mpfr_set_ui(v, x, MPFR_RNDN);
  mpfr_set_d(e, t, MPFR_RNDN);
  mpfr_pow(v, v, e, MPFR_RNDN);
  mpfr_ceil(v, v);
  u64 out = mpfr_get_ui(v, MPFR_RNDZ);
  mpfr_clear(v);
  mpfr_clear(e);
  return out;
}

long double zeta_em(long double s) {
  // Euler-Maclaurin with a short direct sum; ample for 12+ decimals at s >= 2.
  const int N = 2000;
  long double sum = 0.0L;
  for (int n = N; n >= 1; --n) sum += powl(static_cast<long double>(n), -s);
  long double Nl = static_cast<long double>(N);
  sum += powl(Nl, 1 - s) / (s - 1);
  sum -= powl(Nl, -s) / 2;
  sum += s * powl(Nl, -s - 1) / 12;
  sum -= s * (s + 1) * (s + 2) * powl(Nl, -s - 3) / 720;
  return sum;
}

}  // namespace

DensityRecord a_of_t(std::uint64_t x, double t) {
  if (x < 2) throw std::invalid_argument("a_of_t: x >= 2");
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("a_of_t: t in [0,1]");
  const u64 threshold = pow_threshold_ceil(x, t);
  const auto pn = largest_prime_table(x);
  u64 count = 0;
  for (u64 n = 1; n <= x; ++n) {
    if (pn[n] >= threshold) ++count;
  }
  DensityRecord rec{x, "t", t, count,
                    static_cast<double>(count) / static_cast<double>(x)};
  return rec;
}

DensityRecord psi(std::uint64_t x, std::uint64_t y) {
  if (x < 2 || y < 2) throw std::invalid_argument("psi: x, y >= 2");
  const auto pn = largest_prime_table(x);
  u64 count = 0;
  for (u64 n = 1; n <= x; ++n) {
    if (pn[n] <= y) ++count;  // includes n = 1
  }
  DensityRecord rec{x, "y", static_cast<double>(y), count,
                    static_cast<double>(count) / static_cast<double>(x)};
  return rec;
}

DensityRecord pq_order_fraction(std::uint64_t x) {
  if (x < 3) throw std::invalid_argument("pq_order_fraction: x >= 3");
  const auto pn = largest_prime_table(x);
  u64 count = 0;
  for (u64 n = 1; n <= x - 1; ++n) {
    if (pn[n] > pn[n + 1]) ++count;
  }
  DensityRecord rec{x, "t", 0.0, count,
                    static_cast<double>(count) / static_cast<double>(x - 1)};
  return rec;
}

DensityRecord ratio_spread(std::uint64_t x, double delta) {
  if (x < 2) throw std::invalid_argument("ratio_spread: x >= 2");
  if (delta <= 0.0) throw std::invalid_argument("ratio_spread: delta > 0");
  const auto pn = largest_prime_table(x);
  const double bound = std::pow(static_cast<double>(x), delta);
  u64 count = 0;
  for (u64 n = 1; n <= x - 1; ++n) {
    const double a = static_cast<double>(pn[n]);
    const double b = static_cast<double>(pn[n + 1]);
    if (a < b * bound && b < a * bound) ++count;
  }
  DensityRecord rec{x, "delta", delta, count,
                    static_cast<double>(count) / static_cast<double>(x - 1)};
  return rec;
}

DensityRecord dominance_fraction(std::uint64_t x, unsigned r, double delta) {
  if (x < 2) throw std::invalid_argument("dominance_fraction: x >= 2");
  if (r < 1 || delta <= 0.0)
    throw std::invalid_argument("dominance_fraction: r >= 1, delta > 0");
  const auto primes = primes_up_to(
      static_cast<u64>(std::sqrt(static_cast<double>(x))) + 1);
  const auto pn = largest_prime_table(x);
  const double eps = std::pow(static_cast<double>(x), -delta);

  u64 count = 0;
  u64 composites = 0;
  const u64 seg = std::uint64_t(1) << 20;
  for (u64 s = 2; s <= x; s += seg) {
    const u64 e = std::min(x, s + seg - 1);
    const auto fr = f_r_range(s, e, r, primes);
    for (u64 n = s; n <= e; ++n) {
      if (pn[n] == n) continue;  // prime
      ++composites;
      u128 pr = 1;
      for (unsigned i = 0; i < r; ++i) pr *= pn[n];
      const u128 f = fr[n - s];
      if (f < pr) continue;  // cannot happen; kept as a guard
      const double excess = static_cast<double>(f - pr);
      if (excess < eps * static_cast<double>(pr)) ++count;
    }
  }
  DensityRecord rec{x, "delta", delta, count,
                    composites > 0
                        ? static_cast<double>(count) / static_cast<double>(composites)
                        : 0.0};
  return rec;
}

MertensResult mertens_window(std::uint64_t u0, std::uint64_t v0) {
  if (u0 < 2 || v0 <= u0)
    throw std::invalid_argument("mertens_window: need 2 <= u0 < v0");
  Kahan acc;
  for_each_prime(u0, v0, [&](u64 p) { acc.add(1.0 / static_cast<double>(p)); });
  MertensResult res;
  res.sum = acc.sum;
  const double lu = std::log(static_cast<double>(u0));
  const double lr = std::log(static_cast<double>(v0) / static_cast<double>(u0));
  res.c_min = res.sum * lu - lr;
  res.bound_ok = res.sum < (3.0 + lr) / lu;
  return res;
}

PlogpResult plogp_tail(std::uint64_t t, std::uint64_t cutoff) {
  if (t < 3) throw std::invalid_argument("plogp_tail: t >= 3");
  if (cutoff < t * 1000)
    throw std::invalid_argument("plogp_tail: cutoff >= 1000 t");
  Kahan acc;
  for_each_prime(t, cutoff, [&](u64 p) {
    const double pd = static_cast<double>(p);
    acc.add(1.0 / (pd * std::log(pd)));
  });
  PlogpResult res;
  res.sum = acc.sum;
  // Truncated tail by the prime-density integral: int_cutoff dx/(x log^2 x).
  res.tail_est = 1.0 / std::log(static_cast<double>(cutoff));
  res.predicted = 1.0 / std::log(static_cast<double>(t));
  res.abs_err = std::abs(res.sum + res.tail_est - res.predicted);
  return res;
}

LandauResult landau_E(std::uint64_t x1, std::uint64_t x2,
                      std::uint64_t series_terms) {
  if (x1 < 10 || x2 <= x1) throw std::invalid_argument("landau_E: 10 <= x1 < x2");
  if (series_terms < 1000)
    throw std::invalid_argument("landau_E: series_terms >= 1000");

  const u64 n_max = std::max(x2, series_terms);
  std::vector<std::uint32_t> phi(n_max + 1);
  for (u64 i = 0; i <= n_max; ++i) phi[i] = static_cast<std::uint32_t>(i);
  for (u64 p = 2; p <= n_max; ++p) {
    if (phi[p] == p) {  // p prime
      for (u64 m = p; m <= n_max; m += p) phi[m] -= phi[m] / p;
    }
  }
  std::vector<char> squarefree(series_terms + 1, 1);
  for (u64 p = 2; p * p <= series_terms; ++p) {
    if (phi[p] == p - 1) {
      for (u64 m = p * p; m <= series_terms; m += p * p) squarefree[m] = 0;
    }
  }

  LandauResult res;
  Kahan s;
  double s_x1 = 0.0;
  for (u64 n = 1; n <= x2; ++n) {
    s.add(1.0 / static_cast<double>(phi[n]));
    if (n == x1) s_x1 = s.sum;
  }
  res.slope = (s.sum - s_x1) /
              (std::log(static_cast<double>(x2)) - std::log(static_cast<double>(x1)));

  Kahan series;
  for (u64 k = 1; k <= series_terms; ++k) {
    if (squarefree[k])
      series.add(1.0 / (static_cast<double>(k) * static_cast<double>(phi[k])));
  }
  res.e_series = series.sum;

  const long double z2 = zeta_em(2.0L), z3 = zeta_em(3.0L), z6 = zeta_em(6.0L);
  res.e_zeta = static_cast<double>(z2 * z3 / z6);
  return res;
}

std::vector<DensityRecord> near_density_curve(
    std::uint64_t x, unsigned r, const std::vector<std::uint64_t>& k_grid) {
  if (x < 2) throw std::invalid_argument("near_density_curve: x >= 2");
  const auto primes = primes_up_to(
      static_cast<u64>(std::sqrt(static_cast<double>(x + 1))) + 1);
  std::vector<u64> counts(k_grid.size(), 0);
  const u64 seg = std::uint64_t(1) << 20;
  for (u64 s = 1; s <= x; s += seg) {
    const u64 e = std::min(x, s + seg - 1);
    const auto fr = f_r_range(s, e + 1, r, primes);
    for (u64 n = s; n <= e; ++n) {
      const u128 a = fr[n - s], b = fr[n - s + 1];
      const u128 d = a > b ? a - b : b - a;
      for (std::size_t i = 0; i < k_grid.size(); ++i) {
        if (d <= k_grid[i]) ++counts[i];
      }
    }
  }
  std::vector<DensityRecord> out;
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    out.push_back(DensityRecord{x, "k", static_cast<double>(k_grid[i]),
                                counts[i],
                                static_cast<double>(counts[i]) /
                                    static_cast<double>(x)});
  }
  return out;
}

std::string density_csv_header() {
  return "op,x,param,count,fraction,extra1,extra2\n";
}

std::string density_csv_row(const std::string& op, const DensityRecord& rec,
                            double extra1, double extra2) {
  std::ostringstream os;
  os.precision(17);
  os << op << "," << rec.x << "," << rec.param << "," << rec.count << ","
     << rec.fraction << "," << extra1 << "," << extra2 << "\n";
  return os.str();
}

}  // namespace raa
