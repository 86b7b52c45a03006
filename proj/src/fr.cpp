#include "raa/fr.hpp"

#include <mpfr.h>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace raa {

FrValue FrValue::exact_int(mpz_class v) {
  FrValue r;
  r.mode_ = FrMode::ExactInt;
  r.int_ = std::move(v);
  return r;
}

FrValue FrValue::exact_rational(mpq_class v) {
  FrValue r;
  r.mode_ = FrMode::ExactRational;
  v.canonicalize();
  r.rat_ = std::move(v);
  return r;
}

FrValue FrValue::real_interval(double mid, double rad) {
  FrValue r;
  r.mode_ = FrMode::RealInterval;
  r.mid_ = mid;
  r.rad_ = rad;
  return r;
}

const mpz_class& FrValue::int_value() const {
  if (mode_ != FrMode::ExactInt) throw std::logic_error("FrValue: not ExactInt");
  return int_;
}

const mpq_class& FrValue::rat_value() const {
  if (mode_ != FrMode::ExactRational)
    throw std::logic_error("FrValue: not ExactRational");
  return rat_;
}

double FrValue::real_value() const {
  if (mode_ != FrMode::RealInterval)
    throw std::logic_error("FrValue: not RealInterval");
  return mid_;
}

double FrValue::error_bound() const {
  if (mode_ != FrMode::RealInterval)
    throw std::logic_error("FrValue: not RealInterval");
  return rad_;
}

bool FrValue::operator==(const FrValue& other) const {
  if (mode_ != other.mode_ || mode_ == FrMode::RealInterval)
    throw std::logic_error("FrValue: equality requires matching exact modes");
  if (mode_ == FrMode::ExactInt) return int_ == other.int_;
  return rat_ == other.rat_;
}

bool FrValue::separated_from(const FrValue& other) const {
  if (mode_ != FrMode::RealInterval || other.mode_ != FrMode::RealInterval)
    throw std::logic_error("FrValue: separation requires RealInterval mode");
  double gap = mid_ > other.mid_ ? mid_ - other.mid_ : other.mid_ - mid_;
  return gap > rad_ + other.rad_;
}

bool FrValue::overlapping(const FrValue& other) const {
  return !separated_from(other);
}

std::string FrValue::to_string() const {
  switch (mode_) {
    case FrMode::ExactInt:
      return int_.get_str();
    case FrMode::ExactRational:
      return rat_.get_str();
    case FrMode::RealInterval:
      return std::to_string(mid_);
  }
  return {};
}

FrValue f_r_int(const PrimeFactorization& fact, unsigned r) {
  if (r < 1) throw std::invalid_argument("f_r_int: r must be >= 1");
  mpz_class sum = 0;
  mpz_class pw;
  for (const auto& [p, a] : fact.factors) {
    mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(p), r);
    sum += a * pw;
  }
  return FrValue::exact_int(std::move(sum));
}

FrValue f_r_negative(const PrimeFactorization& fact, unsigned m) {
  if (m < 1) throw std::invalid_argument("f_r_negative: m must be >= 1");
  mpq_class sum = 0;
  mpz_class pw;
  for (const auto& [p, a] : fact.factors) {
    mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(p), m);
    mpq_class term(a, 1);
    term /= mpq_class(pw);
    sum += term;
  }
  sum.canonicalize();
  return FrValue::exact_rational(std::move(sum));
}

namespace {

// Accumulates sum a_i p_i^r once rounded down and once rounded up.
void fr_directed(const PrimeFactorization& fact, mpfr_t r_exp,
                 unsigned prec_bits, mpfr_t lo, mpfr_t hi) {
  mpfr_t base, term;
  mpfr_init2(base, prec_bits);
  mpfr_init2(term, prec_bits);
  mpfr_set_ui(lo, 0, MPFR_RNDD);
  mpfr_set_ui(hi, 0, MPFR_RNDU);
  for (const auto& [p, a] : fact.factors) {
    mpfr_set_ui(base, static_cast<unsigned long>(p), MPFR_RNDD);
    mpfr_pow(term, base, r_exp, MPFR_RNDD);
    mpfr_mul_ui(term, term, a, MPFR_RNDD);
    mpfr_add(lo, lo, term, MPFR_RNDD);
    mpfr_set_ui(base, static_cast<unsigned long>(p), MPFR_RNDU);
    mpfr_pow(term, base, r_exp, MPFR_RNDU);
    mpfr_mul_ui(term, term, a, MPFR_RNDU);
    mpfr_add(hi, hi, term, MPFR_RNDU);
  }
  mpfr_clear(base);
  mpfr_clear(term);
}

FrValue interval_from_bounds(mpfr_t lo, mpfr_t hi) {
  double l = mpfr_get_d(lo, MPFR_RNDD);
  double h = mpfr_get_d(hi, MPFR_RNDU);
  double mid = l + (h - l) / 2;
  double rad = h - mid >= mid - l ? h - mid : mid - l;
  // Guard the double rounding of the midpoint itself.
  rad = std::nextafter(rad, std::numeric_limits<double>::infinity());
  return FrValue::real_interval(mid, rad);
}

}  // namespace

FrValue f_r_real(const PrimeFactorization& fact, double r, unsigned prec_bits) {
  if (prec_bits < 8) prec_bits = 8;
  mpfr_t re, lo, hi;
  mpfr_init2(re, prec_bits);
  mpfr_init2(lo, prec_bits);
  mpfr_init2(hi, prec_bits);
  mpfr_set_d(re, r, MPFR_RNDN);  // doubles are exact in binary
  fr_directed(fact, re, prec_bits, lo, hi);
  FrValue out = interval_from_bounds(lo, hi);
  mpfr_clear(re);
  mpfr_clear(lo);
  mpfr_clear(hi);
  return out;
}

FrValue f_r_real_rational(const PrimeFactorization& fact, long num, long den,
                          unsigned prec_bits) {
  if (den == 0) throw std::invalid_argument("f_r_real_rational: zero denominator");
  if (prec_bits < 8) prec_bits = 8;
  // r = num/den is not exactly representable; bracket it and use the
  // monotonicity of p^r in r (p >= 2) to keep the enclosure rigorous.
  mpfr_t r_lo, r_hi, lo1, hi1, lo2, hi2;
  mpfr_init2(r_lo, prec_bits);
  mpfr_init2(r_hi, prec_bits);
  mpfr_init2(lo1, prec_bits);
  mpfr_init2(hi1, prec_bits);
  mpfr_init2(lo2, prec_bits);
  mpfr_init2(hi2, prec_bits);
  mpfr_set_si(r_lo, num, MPFR_RNDD);
  mpfr_div_si(r_lo, r_lo, den, MPFR_RNDD);
  mpfr_set_si(r_hi, num, MPFR_RNDU);
  mpfr_div_si(r_hi, r_hi, den, MPFR_RNDU);
  fr_directed(fact, r_lo, prec_bits, lo1, hi1);
  fr_directed(fact, r_hi, prec_bits, lo2, hi2);
  if (mpfr_cmp(lo2, lo1) < 0) mpfr_set(lo1, lo2, MPFR_RNDD);
  if (mpfr_cmp(hi2, hi1) > 0) mpfr_set(hi1, hi2, MPFR_RNDU);
  FrValue out = interval_from_bounds(lo1, hi1);
  mpfr_clear(r_lo);
  mpfr_clear(r_hi);
  mpfr_clear(lo1);
  mpfr_clear(hi1);
  mpfr_clear(lo2);
  mpfr_clear(hi2);
  return out;
}

namespace {

unsigned __int128 pow_checked_u128(std::uint64_t p, unsigned r) {
  constexpr unsigned __int128 kMax = ~static_cast<unsigned __int128>(0);
  unsigned __int128 pw = 1;
  for (unsigned i = 0; i < r; ++i) {
    if (pw > kMax / p) throw CapacityError("f_r_range: p^r exceeds 128 bits");
    pw *= p;
  }
  return pw;
}

}  // namespace

std::vector<unsigned __int128> f_r_range(std::uint64_t lo, std::uint64_t hi,
                                         unsigned r,
                                         const std::vector<std::uint64_t>& primes) {
  if (lo < 1 || hi < lo) throw std::invalid_argument("f_r_range: bad range");
  const std::uint64_t len = hi - lo + 1;
  std::vector<std::uint64_t> residual(len);
  std::vector<unsigned __int128> fr(len, 0);
  for (std::uint64_t i = 0; i < len; ++i) residual[i] = lo + i;
  for (std::uint64_t p : primes) {
    if (p * p > hi) break;
    const unsigned __int128 ppow = pow_checked_u128(p, r);
    std::uint64_t first = ((lo + p - 1) / p) * p;
    for (std::uint64_t m = first; m <= hi; m += p) {
      std::uint64_t i = m - lo;
      unsigned a = 0;
      while (residual[i] % p == 0) {
        residual[i] /= p;
        ++a;
      }
      if (a > 0) fr[i] += static_cast<unsigned __int128>(a) * ppow;
    }
  }
  for (std::uint64_t i = 0; i < len; ++i) {
    if (residual[i] > 1) fr[i] += pow_checked_u128(residual[i], r);
  }
  return fr;
}

unsigned __int128 f_r_u128(const PrimeFactorization& fact, unsigned r) {
  if (r < 1) throw std::invalid_argument("f_r_u128: r must be >= 1");
  constexpr unsigned __int128 kMax = ~static_cast<unsigned __int128>(0);
  unsigned __int128 sum = 0;
  for (const auto& [p, a] : fact.factors) {
    unsigned __int128 pw = 1;
    for (unsigned i = 0; i < r; ++i) {
      if (pw > kMax / p) throw CapacityError("f_r_u128: power overflow");
      pw *= p;
    }
    if (pw > (kMax - sum) / a) throw CapacityError("f_r_u128: sum overflow");
    sum += static_cast<unsigned __int128>(a) * pw;
  }
  return sum;
}

}  // namespace raa
