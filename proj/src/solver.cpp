#include "raa/solver.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace raa {

namespace {

PrimeFactorization factorize_trial(std::uint64_t n) {
  PrimeFactorization f;
  f.n = n;
  std::uint64_t m = n;
  for (std::uint64_t d = 2; d * d <= m; d += (d == 2 ? 1 : 2)) {
    if (m % d == 0) {
      std::uint32_t a = 0;
      while (m % d == 0) {
        m /= d;
        ++a;
      }
      f.factors.emplace_back(d, a);
    }
  }
  if (m > 1) f.factors.emplace_back(m, 1);
  return f;
}

// One directed-rounding pass of 2 p^r - sum a q^r (weight_log scales each
// term by ln of its base, giving the derivative).
Enclosure eval_directed(const GnContext& ctx, double r, unsigned prec,
                        bool weight_log) {
  mpfr_t re, base, term, lg, pos_lo, pos_hi, neg_lo, neg_hi, out;
  mpfr_init2(re, prec);
  mpfr_init2(base, prec);
  mpfr_init2(term, prec);
  mpfr_init2(lg, prec);
  mpfr_init2(pos_lo, prec);
  mpfr_init2(pos_hi, prec);
  mpfr_init2(neg_lo, prec);
  mpfr_init2(neg_hi, prec);
  mpfr_init2(out, prec);
  mpfr_set_d(re, r, MPFR_RNDN);  // exact: double -> mpfr

  auto pow_term = [&](std::uint64_t b, unsigned long mult, mpfr_rnd_t rnd,
                      mpfr_t dst) {
    mpfr_set_ui(base, b, rnd);
    mpfr_pow(term, base, re, rnd);
    if (weight_log) {
      mpfr_log_ui(lg, b, rnd);
      mpfr_mul(term, term, lg, rnd);
    }
    mpfr_mul_ui(dst, term, mult, rnd);
  };

  pow_term(ctx.p, 2, MPFR_RNDD, pos_lo);
  pow_term(ctx.p, 2, MPFR_RNDU, pos_hi);
  mpfr_set_ui(neg_lo, 0, MPFR_RNDD);
  mpfr_set_ui(neg_hi, 0, MPFR_RNDU);
  for (const auto& [q, a] : ctx.factors_n.factors) {
    pow_term(q, a, MPFR_RNDD, term);
    mpfr_add(neg_lo, neg_lo, term, MPFR_RNDD);
    pow_term(q, a, MPFR_RNDU, term);
    mpfr_add(neg_hi, neg_hi, term, MPFR_RNDU);
  }

  Enclosure e;
  mpfr_sub(out, pos_lo, neg_hi, MPFR_RNDD);
  e.lo = mpfr_get_d(out, MPFR_RNDD);
  mpfr_sub(out, pos_hi, neg_lo, MPFR_RNDU);
  e.hi = mpfr_get_d(out, MPFR_RNDU);

  mpfr_clears(re, base, term, lg, pos_lo, pos_hi, neg_lo, neg_hi, out,
              static_cast<mpfr_ptr>(nullptr));
  return e;
}

}  // namespace

GnContext GnContext::make(std::uint64_t p) {
  if (p < 3 || !is_prime_u64(p))
    throw std::invalid_argument("GnContext: p must be a prime >= 3");
  GnContext ctx;
  ctx.p = p;
  ctx.n = p * p - 1;
  ctx.factors_n = factorize_trial(ctx.n);
  ctx.excluded = ctx.factors_n.largest_prime() <= 3;
  return ctx;
}

Enclosure g_n(const GnContext& ctx, double r, unsigned prec_bits) {
  return eval_directed(ctx, r, prec_bits, false);
}

Enclosure g_n_prime(const GnContext& ctx, double r, unsigned prec_bits) {
  return eval_directed(ctx, r, prec_bits, true);
}

RootResult solve_r(std::uint64_t p, double tol) {
  if (tol <= 0) throw std::invalid_argument("solve_r: tol must be positive");
  const GnContext ctx = GnContext::make(p);

  // Sign of g at a point, refining precision until unambiguous; 0 when the
  // enclosure still straddles zero at the highest precision tried.
  auto sign_at = [&](double r) -> int {
    for (unsigned prec = 192; prec <= 1536; prec *= 2) {
      Enclosure e = g_n(ctx, r, prec);
      if (e.lo > 0) return 1;
      if (e.hi < 0) return -1;
      if (e.lo == 0 && e.hi == 0) return 0;
    }
    return 0;
  };

  double lo = 0.0, hi = 1.5;
  if (sign_at(lo) >= 0)
    throw std::runtime_error("solve_r: bracket failure, g(0) >= 0 for p=" +
                             std::to_string(p));
  if (sign_at(hi) <= 0)
    throw std::runtime_error(
        "solve_r: bracket failure, g(1.5) <= 0 for p=" + std::to_string(p) +
        " (theorem-violation diagnostic)");
  {
    int s1 = sign_at(1.0);
    if (s1 < 0)
      throw std::runtime_error(
          "solve_r: g(1) < 0 for p=" + std::to_string(p) +
          " (theorem-violation diagnostic)");
  }

  RootResult res;
  res.p = p;
  res.excluded = ctx.excluded;

  int iterations = 0;
  double root = 0.5 * (lo + hi);
  for (; iterations < 200; ++iterations) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;  // double resolution reached
    int s = sign_at(mid);
    if (s == 0) {
      root = mid;
      lo = std::nextafter(mid, -1.0);
      hi = std::nextafter(mid, 2.0);
      break;
    }
    (s < 0 ? lo : hi) = mid;
    root = 0.5 * (lo + hi);
    if (hi - lo < 1e-13 && g_n(ctx, root).abs_bound() <= tol) break;
  }

  // Newton polish inside the confirmed bracket.
  for (int k = 0; k < 8; ++k) {
    Enclosure g = g_n(ctx, root, 384);
    Enclosure gp = g_n_prime(ctx, root, 384);
    double gm = 0.5 * (g.lo + g.hi);
    double gpm = 0.5 * (gp.lo + gp.hi);
    if (gpm == 0.0) break;
    double next = root - gm / gpm;
    if (!(next > lo && next < hi)) break;
    if (next == root) break;
    root = next;
    ++iterations;
    if (g_n(ctx, root).abs_bound() <= tol) break;
  }

  res.r_root = root;
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  res.iterations = iterations;
  res.residual = g_n(ctx, root, 768).abs_bound();
  if (res.residual > tol)
    throw std::runtime_error("solve_r: residual " +
                             std::to_string(res.residual) +
                             " exceeds tolerance for p=" + std::to_string(p));
  if (p >= 5 && !ctx.excluded && !(root > 0.0 && root < 1.0))
    throw std::runtime_error(
        "solve_r: root outside (0,1) for non-excluded p=" + std::to_string(p));
  return res;
}

ChainResult decreasing_r_sequence(std::uint64_t p_start, std::size_t count,
                                  std::uint64_t search_bound, double tol) {
  if (count < 1) throw std::invalid_argument("decreasing_r_sequence: count >= 1");
  ChainResult out;
  std::uint64_t p = p_start;
  double current_r = 2.0;  // above any attainable root
  while (out.chain.size() < count && p <= search_bound) {
    if (is_prime_u64(p)) {
      RootResult r = solve_r(p, tol);
      if (r.r_root < current_r) {
        current_r = r.r_root;
        out.chain.push_back(r);
      }
    }
    p += (p == 2) ? 1 : 2;
  }
  out.complete = out.chain.size() >= count;
  return out;
}

std::vector<std::uint64_t> smooth_consecutive(std::uint64_t limit,
                                              std::uint64_t y,
                                              bool include_unit) {
  if (limit < 2) throw std::invalid_argument("smooth_consecutive: limit >= 2");
  const auto primes = primes_up_to(y);
  std::vector<std::uint64_t> smooth;
  std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t i,
                                                            std::uint64_t cur) {
    smooth.push_back(cur);
    for (std::size_t j = i; j < primes.size(); ++j) {
      if (cur > (limit + 1) / primes[j]) continue;
      rec(j, cur * primes[j]);
    }
  };
  rec(0, 1);
  std::sort(smooth.begin(), smooth.end());

  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i + 1 < smooth.size(); ++i) {
    if (smooth[i + 1] == smooth[i] + 1 && smooth[i] <= limit) {
      if (smooth[i] == 1 && !include_unit) continue;
      out.push_back(smooth[i]);
    }
  }
  return out;
}

std::string root_csv_header() {
  return "p,n,r_root,bracket_lo,bracket_hi,iterations,residual,excluded\n";
}

std::string root_csv_row(const RootResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.p << "," << r.p * r.p - 1 << "," << r.r_root << "," << r.bracket_lo
     << "," << r.bracket_hi << "," << r.iterations << "," << r.residual << ","
     << (r.excluded ? 1 : 0) << "\n";
  return os.str();
}

}  // namespace raa
