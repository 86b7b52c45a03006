#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "raa/factorization.hpp"
#include "raa/fr.hpp"

using raa::PrimeFactorization;

namespace {

// Independent oracle: plain trial division.
PrimeFactorization trial_factorize(std::uint64_t n) {
  PrimeFactorization out;
  out.n = n;
  std::uint64_t m = n;
  for (std::uint64_t p = 2; p * p <= m; ++p) {
    std::uint32_t a = 0;
    while (m % p == 0) {
      m /= p;
      ++a;
    }
    if (a) out.factors.push_back({p, a});
  }
  if (m > 1) out.factors.push_back({m, 1});
  return out;
}

std::uint64_t f1_trial(std::uint64_t n) {
  std::uint64_t s = 0;
  for (auto [p, a] : trial_factorize(n).factors) s += a * p;
  return s;
}

}  // namespace

TEST_CASE("deterministic primality") {
  CHECK_FALSE(raa::is_prime_u64(0));
  CHECK_FALSE(raa::is_prime_u64(1));
  CHECK(raa::is_prime_u64(2));
  CHECK(raa::is_prime_u64(3));
  CHECK_FALSE(raa::is_prime_u64(3215031751ULL));  // strong pseudoprime base 2,3,5,7
  CHECK(raa::is_prime_u64(2147483647ULL));
  CHECK(raa::is_prime_u64(18446744073709551557ULL));  // largest 64-bit prime
  CHECK_FALSE(raa::is_prime_u64(18446744073709551555ULL));
  int primes = 0;
  for (std::uint64_t n = 0; n <= 1000; ++n)
    if (raa::is_prime_u64(n)) ++primes;
  CHECK(primes == 168);
}

TEST_CASE("primes_up_to matches pi(x)") {
  CHECK(raa::primes_up_to(1).empty());
  auto ps = raa::primes_up_to(100);
  CHECK(ps.size() == 25);
  CHECK(ps.front() == 2);
  CHECK(ps.back() == 97);
}

TEST_CASE("SpfTable factorizes exactly") {
  raa::SpfTable table(10000);
  for (std::uint64_t n = 2; n <= 10000; ++n) {
    auto f = table.factorize(n);
    CHECK(f.consistent());
    CHECK(f.factors == trial_factorize(n).factors);
  }
  CHECK(table.spf(2) == 2);
  CHECK(table.spf(9991) == 97);  // 97 * 103
  CHECK_THROWS_AS(table.spf(10001), std::invalid_argument);
  CHECK_THROWS_AS(raa::SpfTable(1 << 20, 1024), raa::CapacityError);
}

TEST_CASE("factorize_window agrees with trial division") {
  const std::uint64_t start = 999950, len = 200;
  auto primes = raa::primes_up_to(
      static_cast<std::uint64_t>(std::sqrt(double(start + len))) + 1);
  auto w = raa::factorize_window(start, len, primes);
  REQUIRE(w.factorizations.size() == len);
  for (std::uint64_t i = 0; i < len; ++i) {
    auto expect = trial_factorize(start + i);
    CHECK(w.factorizations[i].factors == expect.factors);
    CHECK(w.largest_prime[i] == expect.largest_prime());
  }
}

TEST_CASE("f_r worked examples") {
  auto f2020 = trial_factorize(2020);  // 2^2 * 5 * 101
  CHECK(raa::f_r_int(f2020, 1).int_value() == 110);
  CHECK(raa::f_r_int(f2020, 2).int_value() == mpz_class(2 * 4 + 25 + 101 * 101));

  CHECK(raa::f_r_int(trial_factorize(714), 1).int_value() == 29);
  CHECK(raa::f_r_int(trial_factorize(715), 1).int_value() == 29);
  CHECK(raa::f_r_int(trial_factorize(5), 1).int_value() == 5);  // prime identity
  CHECK(raa::f_r_int(trial_factorize(8), 1).int_value() == 6);

  // f_{-1}(8) = 3/2, f_{-2}(12) = 2/4 + 1/9 = 11/18
  CHECK(raa::f_r_negative(trial_factorize(8), 1).rat_value() == mpq_class(3, 2));
  CHECK(raa::f_r_negative(trial_factorize(12), 2).rat_value() == mpq_class(11, 18));

  // f_{1/2}(4) = 2 sqrt(2)
  auto v = raa::f_r_real(trial_factorize(4), 0.5, 128);
  CHECK(std::abs(v.real_value() - 2.0 * std::sqrt(2.0)) < 1e-12);
  CHECK(v.error_bound() < 1e-12);
}

TEST_CASE("f_r is additive on coprime parts") {
  for (std::uint64_t n : {91ULL, 255ULL, 4181ULL, 99991ULL}) {
    for (std::uint64_t m : {64ULL, 625ULL, 2ULL}) {
      if (std::gcd(n, m) != 1) continue;
      mpz_class lhs = raa::f_r_int(trial_factorize(n * m), 2).int_value();
      mpz_class rhs = raa::f_r_int(trial_factorize(n), 2).int_value() +
                      raa::f_r_int(trial_factorize(m), 2).int_value();
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("f_1(n) <= n with equality iff n prime or n = 4 (n >= 2)") {
  raa::SpfTable table(100000);
  for (std::uint64_t n = 2; n <= 100000; ++n) {
    auto f = raa::f_r_int(table.factorize(n), 1).int_value();
    CHECK(f <= n);
    const bool eq = f == mpz_class(static_cast<unsigned long>(n));
    CHECK(eq == (raa::is_prime_u64(n) || n == 4));
  }
}

TEST_CASE("f_r_range matches per-n evaluation on [2, 10^6]") {
  const std::uint64_t hi = 1000000;
  auto primes = raa::primes_up_to(1001);
  raa::SpfTable table(hi);
  std::uint64_t checked = 0;
  for (std::uint64_t lo = 2; lo <= hi; lo += 1 << 18) {
    std::uint64_t e = std::min(hi, lo + (1 << 18) - 1);
    auto fr = raa::f_r_range(lo, e, 1, primes);
    for (std::uint64_t n = lo; n <= e; n += 997) {  // sampled stride
      auto exact = raa::f_r_int(table.factorize(n), 1).int_value();
      CHECK(exact == mpz_class(std::to_string(
                         static_cast<unsigned long long>(fr[n - lo]))));
      ++checked;
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("FrValue mode discipline") {
  auto a = raa::FrValue::exact_int(5);
  auto b = raa::FrValue::exact_rational(mpq_class(3, 2));
  auto c = raa::FrValue::real_interval(1.0, 0.25);
  auto d = raa::FrValue::real_interval(2.0, 0.25);
  CHECK(a == raa::FrValue::exact_int(5));
  CHECK_THROWS_AS((void)(a == b), std::logic_error);
  CHECK_THROWS_AS((void)(c == d), std::logic_error);
  CHECK_THROWS_AS(a.rat_value(), std::logic_error);
  CHECK_THROWS_AS(b.int_value(), std::logic_error);
  CHECK(c.separated_from(d));
  CHECK_FALSE(c.separated_from(raa::FrValue::real_interval(1.3, 0.25)));
  CHECK(c.overlapping(raa::FrValue::real_interval(1.3, 0.25)));
}

TEST_CASE("interval enclosures contain the exact integer values") {
  for (std::uint64_t n = 2; n <= 500; ++n) {
    auto fact = trial_factorize(n);
    auto exact = raa::f_r_int(fact, 3).int_value();
    auto iv = raa::f_r_real(fact, 3.0, 96);
    double e = exact.get_d();
    CHECK(std::abs(iv.real_value() - e) <= iv.error_bound());
  }
}

TEST_CASE("f_r_u128 overflow detection") {
  PrimeFactorization big;
  big.n = 0;
  big.factors = {{18446744073709551557ULL, 3}};
  CHECK_THROWS_AS(raa::f_r_u128(big, 3), raa::CapacityError);
  CHECK(raa::f_r_u128(trial_factorize(714), 1) == 29);
}
