#include "raa/search.hpp"

#include <mpfr.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace raa {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i128 = __int128;

std::string u128_str(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<unsigned>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

std::string i128_str(i128 v) {
  if (v < 0) return "-" + u128_str(static_cast<u128>(-v));
  return u128_str(static_cast<u128>(v));
}

u128 pow_checked(u64 p, unsigned r) {
  constexpr u128 kMax = ~static_cast<u128>(0);
  u128 pw = 1;
  for (unsigned i = 0; i < r; ++i) {
    if (pw > kMax / p) throw CapacityError("scan: p^r exceeds 128 bits");
    pw *= p;
  }
  return pw;
}

u64 isqrt_u64(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Independent of the sieve path; used to re-verify every hit.
PrimeFactorization factorize_trial(u64 n) {
  PrimeFactorization f;
  f.n = n;
  u64 m = n;
  for (u64 d = 2; d * d <= m; d += (d == 2 ? 1 : 2)) {
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

// Scan predicates count the unit as f(1) = 1 (as in the phi-analogue of
// the recurrence), which admits the Rabonacci number 3; the library-level
// f_r keeps the additive convention f_r(1) = 0.
u128 fr_trial(u64 n, unsigned r) {
  if (n == 1) return 1;
  return f_r_u128(factorize_trial(n), r);
}

// Ordered window driver. compute must be a pure function of its window;
// emit is called in ascending window order regardless of shard count.
void for_each_window(
    u64 from, u64 end, u64 window_len, unsigned shards,
    const std::function<std::vector<Hit>(u64, u64)>& compute,
    const std::function<void(u64, const std::vector<Hit>&)>& emit) {
  if (from > end) return;
  std::vector<std::pair<u64, u64>> windows;
  for (u64 w0 = from; w0 <= end;) {
    u64 w1 = std::min(end, w0 + window_len - 1);
    windows.emplace_back(w0, w1);
    if (w1 == end) break;
    w0 = w1 + 1;
  }

  if (shards <= 1) {
    for (const auto& [w0, w1] : windows) emit(w1, compute(w0, w1));
    return;
  }

  std::vector<std::optional<std::vector<Hit>>> results(windows.size());
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= windows.size()) return;
      try {
        auto hits = compute(windows[i].first, windows[i].second);
        std::lock_guard<std::mutex> lock(mu);
        results[i] = std::move(hits);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
        results[i] = std::vector<Hit>{};
      }
      cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  for (unsigned s = 0; s < shards; ++s) pool.emplace_back(worker);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    std::unique_lock<std::mutex> lock(mu);
    cv.wait(lock, [&] { return results[i].has_value(); });
    if (error) break;
    auto hits = std::move(*results[i]);
    lock.unlock();
    emit(windows[i].second, hits);
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct KindShape {
  int min_off = 0;
  int max_off = 1;
};

KindShape shape_for(const SearchSpec& spec) {
  switch (spec.kind) {
    case ScanKind::Pairs:
    case ScanKind::Near:
      return {0, 1};
    case ScanKind::Triples:
      return {0, 2};
    case ScanKind::Rabonacci:
      return {-2, 0};
    case ScanKind::Linear:
      return {0, static_cast<int>(spec.coeffs.size()) - 1};
    default:
      return {0, 0};
  }
}

void verify_hit_or_throw(const SearchSpec& spec, u64 n) {
  bool ok = true;
  switch (spec.kind) {
    case ScanKind::Pairs:
      ok = fr_trial(n, spec.r) == fr_trial(n + 1, spec.r);
      break;
    case ScanKind::Near: {
      u128 a = fr_trial(n, spec.r), b = fr_trial(n + 1, spec.r);
      u128 d = a > b ? a - b : b - a;
      ok = d <= spec.near.evaluate(spec.end);
      break;
    }
    case ScanKind::Triples:
      ok = fr_trial(n, 1) == fr_trial(n + 1, 1) &&
           fr_trial(n + 1, 1) == fr_trial(n + 2, 1);
      break;
    case ScanKind::Rabonacci:
      ok = fr_trial(n, 1) == fr_trial(n - 1, 1) + fr_trial(n - 2, 1);
      break;
    case ScanKind::Linear: {
      i128 sum = 0;
      for (std::size_t i = 0; i < spec.coeffs.size(); ++i)
        sum += static_cast<i128>(spec.coeffs[i]) *
               static_cast<i128>(fr_trial(n + i, spec.r));
      ok = sum == 0;
      break;
    }
    default:
      break;
  }
  if (!ok)
    throw std::logic_error("hit re-verification failed at n=" +
                           std::to_string(n));
}

std::vector<Hit> eval_window(const SearchSpec& spec, u64 w0, u64 w1,
                             const std::vector<u64>& primes) {
  const KindShape shape = shape_for(spec);
  const u64 lo = w0 + shape.min_off;  // validate() guarantees lo >= 1
  const u64 hi = w1 + shape.max_off;
  const std::vector<u128> fr = f_r_range(lo, hi, spec.r, primes);
  auto at = [&](u64 n) {
    return n == 1 ? static_cast<u128>(1) : fr[n - lo];
  };

  std::vector<Hit> hits;
  const u64 near_k =
      spec.kind == ScanKind::Near ? spec.near.evaluate(spec.end) : 0;
  for (u64 n = w0; n <= w1; ++n) {
    Hit h;
    h.n = n;
    bool is_hit = false;
    switch (spec.kind) {
      case ScanKind::Pairs:
        if (at(n) == at(n + 1)) {
          is_hit = true;
          h.value_n = u128_str(at(n));
          h.value_n1 = u128_str(at(n + 1));
          h.delta = "0";
        }
        break;
      case ScanKind::Near: {
        u128 a = at(n), b = at(n + 1);
        u128 d = a > b ? a - b : b - a;
        if (d <= near_k) {
          is_hit = true;
          h.value_n = u128_str(a);
          h.value_n1 = u128_str(b);
          h.delta = u128_str(d);
        }
        break;
      }
      case ScanKind::Triples:
        if (at(n) == at(n + 1) && at(n + 1) == at(n + 2)) {
          is_hit = true;
          h.value_n = u128_str(at(n));
          h.value_n1 = u128_str(at(n + 1));
          h.value_n2 = u128_str(at(n + 2));
        }
        break;
      case ScanKind::Rabonacci:
        if (at(n) == at(n - 1) + at(n - 2)) {
          is_hit = true;
          h.value_n = u128_str(at(n));
          h.value_n1 = u128_str(at(n - 1));
          h.value_n2 = u128_str(at(n - 2));
        }
        break;
      case ScanKind::Linear: {
        i128 sum = 0;
        for (std::size_t i = 0; i < spec.coeffs.size(); ++i)
          sum += static_cast<i128>(spec.coeffs[i]) *
                 static_cast<i128>(at(n + i));
        if (sum == 0) {
          is_hit = true;
          h.value_n = u128_str(at(n));
          if (spec.coeffs.size() > 1) h.value_n1 = u128_str(at(n + 1));
          if (spec.coeffs.size() > 2) h.value_n2 = u128_str(at(n + 2));
        }
        break;
      }
      default:
        break;
    }
    if (is_hit) {
      verify_hit_or_throw(spec, n);
      hits.push_back(std::move(h));
    }
  }
  return hits;
}

constexpr u64 kFnvOffset = 1469598103934665603ull;
constexpr u64 kFnvPrime = 1099511628211ull;

u64 fnv1a(const std::string& s) {
  u64 h = kFnvOffset;
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace

std::string to_string(ScanKind kind) {
  switch (kind) {
    case ScanKind::Pairs:
      return "pairs";
    case ScanKind::Near:
      return "near";
    case ScanKind::Triples:
      return "triples";
    case ScanKind::Linear:
      return "linear";
    case ScanKind::Rabonacci:
      return "rabonacci";
    case ScanKind::NegativeR:
      return "negative-r";
    case ScanKind::RationalRCheck:
      return "rational-r";
  }
  return "?";
}

std::uint64_t NearThreshold::evaluate(std::uint64_t range_end) const {
  if (is_constant) return constant;
  // floor(c * end^delta), evaluated in 128-bit MPFR so the floor is honest.
  mpfr_t x, d, cf;
  mpfr_init2(x, 128);
  mpfr_init2(d, 128);
  mpfr_init2(cf, 128);
  mpfr_set_ui(x, range_end, MPFR_RNDN);
  mpfr_set_d(d, delta, MPFR_RNDN);
  mpfr_pow(x, x, d, MPFR_RNDN);
  mpfr_set_d(cf, c, MPFR_RNDN);
  mpfr_mul(x, x, cf, MPFR_RNDN);
  mpfr_floor(x, x);
  std::uint64_t out = mpfr_get_ui(x, MPFR_RNDZ);
  mpfr_clear(x);
  mpfr_clear(d);
  mpfr_clear(cf);
  return out;
}

void SearchSpec::validate() const {
  if (end < start || start < 1)
    throw std::invalid_argument("SearchSpec: need end >= start >= 1");
  if (window_length < 16)
    throw std::invalid_argument("SearchSpec: window_length too small");
  if (shard_count < 1)
    throw std::invalid_argument("SearchSpec: shard_count must be >= 1");
  switch (kind) {
    case ScanKind::Pairs:
    case ScanKind::Near:
      if (r < 1) throw std::invalid_argument("SearchSpec: r must be >= 1");
      break;
    case ScanKind::Linear:
      if (coeffs.size() < 2)
        throw std::invalid_argument("SearchSpec: linear needs >= 2 coefficients");
      if (std::all_of(coeffs.begin(), coeffs.end(),
                      [](long long a) { return a == 0; }))
        throw std::invalid_argument("SearchSpec: coefficients all zero");
      break;
    case ScanKind::Rabonacci:
      if (start < 3)
        throw std::invalid_argument("SearchSpec: rabonacci needs start >= 3");
      break;
    case ScanKind::NegativeR:
      if (neg_m < 1) throw std::invalid_argument("SearchSpec: m must be >= 1");
      break;
    case ScanKind::RationalRCheck: {
      if (rat_den < 2)
        throw std::invalid_argument("SearchSpec: rational r needs den >= 2");
      long g = std::gcd(rat_num, rat_den);
      if (g != 1 && g != -1)
        throw std::invalid_argument("SearchSpec: rational r must be in lowest terms");
      break;
    }
    default:
      break;
  }
}

std::string SearchSpec::digest() const {
  std::ostringstream os;
  os << "kind=" << to_string(kind) << ";start=" << start << ";end=" << end;
  switch (kind) {
    case ScanKind::Pairs:
    case ScanKind::Triples:
    case ScanKind::Rabonacci:
      os << ";r=" << r;
      break;
    case ScanKind::Near:
      os << ";r=" << r << ";near=";
      if (near.is_constant)
        os << "k" << near.constant;
      else
        os << "c" << near.c << "d" << near.delta;
      break;
    case ScanKind::Linear:
      os << ";r=" << r << ";a=";
      for (long long a : coeffs) os << a << ",";
      break;
    case ScanKind::NegativeR:
      os << ";m=" << neg_m;
      break;
    case ScanKind::RationalRCheck:
      os << ";rat=" << rat_num << "/" << rat_den;
      break;
  }
  std::ostringstream hex;
  hex << std::hex << fnv1a(os.str());
  return hex.str();
}

std::string Checkpoint::to_json() const {
  nlohmann::json j;
  j["spec_digest"] = spec_digest;
  j["completed_prefix_end"] = completed_prefix_end;
  j["hits_so_far"] = hits_so_far;
  j["emitted_file_offset"] = emitted_file_offset;
  return j.dump();
}

Checkpoint Checkpoint::parse(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  Checkpoint cp;
  cp.spec_digest = j.at("spec_digest").get<std::string>();
  cp.completed_prefix_end = j.at("completed_prefix_end").get<std::uint64_t>();
  cp.hits_so_far = j.at("hits_so_far").get<std::uint64_t>();
  cp.emitted_file_offset = j.at("emitted_file_offset").get<std::uint64_t>();
  return cp;
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Checkpoint::store(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot write " + tmp);
    out << to_json();
  }
  std::filesystem::rename(tmp, path);
}

std::string hits_csv_header() {
  return "n,kind,r,value_n,value_n1,value_n2,delta\n";
}

std::string hit_csv_row(const SearchSpec& spec, const Hit& hit) {
  std::ostringstream os;
  os << hit.n << "," << to_string(spec.kind) << ",";
  switch (spec.kind) {
    case ScanKind::NegativeR:
      os << "-" << spec.neg_m;
      break;
    case ScanKind::RationalRCheck:
      os << spec.rat_num << "/" << spec.rat_den;
      break;
    default:
      os << spec.r;
  }
  os << "," << hit.value_n << "," << hit.value_n1 << "," << hit.value_n2 << ","
     << hit.delta << "\n";
  return os.str();
}

std::vector<std::uint64_t> negative_r_candidates(std::uint64_t limit,
                                                 unsigned m) {
  if (m < 1) throw std::invalid_argument("negative_r_candidates: m >= 1");
  // A candidate is a product of prime powers p^a with p^m | a, so each
  // prime contributes a power of base = p^(p^m).
  std::vector<u64> bases;
  for (u64 p : primes_up_to(64)) {
    u128 exp = 1;
    bool fits = true;
    for (unsigned i = 0; i < m; ++i) {
      exp *= p;
      if (exp > 64) {  // 2^64 > any u64 limit already
        fits = false;
        break;
      }
    }
    if (!fits) break;
    u128 base = 1;
    for (u128 i = 0; i < exp; ++i) {
      base *= p;
      if (base > limit) break;
    }
    if (base <= limit) bases.push_back(static_cast<u64>(base));
  }

  std::vector<u64> out;
  std::function<void(std::size_t, u64)> rec = [&](std::size_t i, u64 cur) {
    out.push_back(cur);
    for (std::size_t j = i; j < bases.size(); ++j) {
      u128 v = static_cast<u128>(cur) * bases[j];
      while (v <= limit) {
        rec(j + 1, static_cast<u64>(v));
        v *= bases[j];
      }
    }
  };
  rec(0, 1);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::uint64_t negative_r_candidate_pairs(std::uint64_t start, std::uint64_t end,
                                         unsigned m) {
  auto cands = negative_r_candidates(end + 1, m);
  std::uint64_t pairs = 0;
  for (std::size_t i = 0; i + 1 < cands.size(); ++i) {
    if (cands[i + 1] == cands[i] + 1 && cands[i] >= start && cands[i] <= end)
      ++pairs;
  }
  return pairs;
}

std::vector<Hit> scan_negative_r(std::uint64_t start, std::uint64_t end,
                                 unsigned m) {
  auto cands = negative_r_candidates(end + 1, m);
  std::vector<Hit> hits;
  for (std::size_t i = 0; i + 1 < cands.size(); ++i) {
    if (cands[i + 1] != cands[i] + 1) continue;
    u64 n = cands[i];
    if (n < start || n > end) continue;
    auto fn = factorize_trial(n);
    auto fn1 = factorize_trial(n + 1);
    FrValue a = f_r_negative(fn, m);
    FrValue b = f_r_negative(fn1, m);
    if (a == b) {
      // Structural necessity: p^m must divide every exponent on both sides.
      for (const auto* f : {&fn, &fn1}) {
        for (const auto& [p, e] : f->factors) {
          u128 pm = pow_checked(p, m);
          if (pm > e || e % static_cast<u64>(pm) != 0)
            throw std::logic_error(
                "negative-r equality violates the p^m | a_i structure at n=" +
                std::to_string(n));
        }
      }
      Hit h;
      h.n = n;
      h.value_n = a.to_string();
      h.value_n1 = b.to_string();
      hits.push_back(std::move(h));
    }
  }
  return hits;
}

RationalCheckResult rational_r_structural_check(std::uint64_t n, long num,
                                               long den, unsigned prec_bits) {
  if (den < 2)
    throw std::invalid_argument("rational_r_structural_check: den >= 2");
  RationalCheckResult res;
  res.possible = false;  // gcd(n, n+1) = 1: the radical supports are disjoint
  auto fn = factorize_trial(n);
  auto fn1 = factorize_trial(n + 1);
  for (unsigned p = prec_bits; p <= prec_bits * 4; p *= 2) {
    FrValue a = f_r_real_rational(fn, num, den, p);
    FrValue b = f_r_real_rational(fn1, num, den, p);
    double gap = std::abs(a.real_value() - b.real_value()) -
                 (a.error_bound() + b.error_bound());
    if (gap > 0) {
      res.separated = true;
      res.witness_gap_lo = gap;
      break;
    }
  }
  return res;
}

std::vector<Hit> run_scan(const SearchSpec& spec) {
  spec.validate();
  if (spec.kind == ScanKind::NegativeR)
    return scan_negative_r(spec.start, spec.end, spec.neg_m);
  if (spec.kind == ScanKind::RationalRCheck) {
    std::vector<Hit> hits;
    for (u64 n = spec.start; n <= spec.end; ++n) {
      auto res = rational_r_structural_check(n, spec.rat_num, spec.rat_den);
      if (res.possible) {
        Hit h;
        h.n = n;
        hits.push_back(h);
      }
    }
    return hits;
  }

  const KindShape shape = shape_for(spec);
  const auto primes =
      primes_up_to(isqrt_u64(spec.end + shape.max_off) + 1);
  std::vector<Hit> all;
  for_each_window(
      spec.start, spec.end, spec.window_length, spec.shard_count,
      [&](u64 w0, u64 w1) { return eval_window(spec, w0, w1, primes); },
      [&](u64, const std::vector<Hit>& hits) {
        all.insert(all.end(), hits.begin(), hits.end());
      });
  return all;
}

namespace {

SearchSpec make_spec(ScanKind kind, u64 start, u64 end, unsigned r,
                     unsigned shards, u64 window_length) {
  SearchSpec s;
  s.kind = kind;
  s.start = start;
  s.end = end;
  s.r = r;
  s.shard_count = shards;
  s.window_length = window_length;
  return s;
}

}  // namespace

std::vector<Hit> scan_pairs(std::uint64_t start, std::uint64_t end, unsigned r,
                            unsigned shards, std::uint64_t window_length) {
  return run_scan(make_spec(ScanKind::Pairs, start, end, r, shards, window_length));
}

std::vector<Hit> scan_near(std::uint64_t start, std::uint64_t end, unsigned r,
                           const NearThreshold& threshold, unsigned shards,
                           std::uint64_t window_length) {
  SearchSpec s = make_spec(ScanKind::Near, start, end, r, shards, window_length);
  s.near = threshold;
  return run_scan(s);
}

std::vector<Hit> scan_linear(std::uint64_t start, std::uint64_t end,
                             const std::vector<long long>& coeffs, unsigned r,
                             unsigned shards, std::uint64_t window_length) {
  SearchSpec s = make_spec(ScanKind::Linear, start, end, r, shards, window_length);
  s.coeffs = coeffs;
  return run_scan(s);
}

std::vector<Hit> scan_triples(std::uint64_t start, std::uint64_t end,
                              unsigned shards, std::uint64_t window_length) {
  return run_scan(
      make_spec(ScanKind::Triples, start, end, 1, shards, window_length));
}

std::vector<Hit> scan_rabonacci(std::uint64_t start, std::uint64_t end,
                                unsigned shards, std::uint64_t window_length) {
  return run_scan(
      make_spec(ScanKind::Rabonacci, start, end, 1, shards, window_length));
}

RunResult run(const SearchSpec& spec, const std::string& hits_path,
              bool resume) {
  spec.validate();
  const std::string digest = spec.digest();

  Checkpoint cp;
  cp.spec_digest = digest;
  cp.completed_prefix_end = spec.start - 1;

  bool fresh = true;
  if (resume && !spec.checkpoint_path.empty() &&
      std::filesystem::exists(spec.checkpoint_path)) {
    Checkpoint prev = Checkpoint::load(spec.checkpoint_path);
    if (prev.spec_digest != digest)
      throw CheckpointMismatch("checkpoint digest " + prev.spec_digest +
                               " does not match spec digest " + digest);
    cp = prev;
    fresh = false;
  }

  if (fresh) {
    std::ofstream out(hits_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write hits file " + hits_path);
    out << hits_csv_header();
    out.flush();
    cp.emitted_file_offset = hits_csv_header().size();
    cp.hits_so_far = 0;
    if (!spec.checkpoint_path.empty()) cp.store(spec.checkpoint_path);
  } else {
    // A crash between hit append and checkpoint write leaves a tail past
    // emitted_file_offset; drop it so the resume is exact.
    if (std::filesystem::exists(hits_path) &&
        std::filesystem::file_size(hits_path) > cp.emitted_file_offset)
      std::filesystem::resize_file(hits_path, cp.emitted_file_offset);
  }

  RunResult result;
  if (cp.completed_prefix_end >= spec.end) {
    result.checkpoint = cp;
    return result;  // completed spec: no-op
  }

  std::ofstream out(hits_path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot append to hits file " + hits_path);

  auto emit = [&](u64 w1, const std::vector<Hit>& hits) {
    for (const Hit& h : hits) out << hit_csv_row(spec, h);
    out.flush();
    cp.completed_prefix_end = w1;
    cp.hits_so_far += hits.size();
    result.hits_emitted += hits.size();
    cp.emitted_file_offset = std::filesystem::file_size(hits_path);
    if (!spec.checkpoint_path.empty()) cp.store(spec.checkpoint_path);
  };

  const u64 from = cp.completed_prefix_end + 1;
  if (spec.kind == ScanKind::NegativeR || spec.kind == ScanKind::RationalRCheck) {
    SearchSpec sub = spec;
    sub.start = from;
    emit(spec.end, run_scan(sub));
  } else {
    const KindShape shape = shape_for(spec);
    const auto primes = primes_up_to(isqrt_u64(spec.end + shape.max_off) + 1);
    for_each_window(
        from, spec.end, spec.window_length, spec.shard_count,
        [&](u64 w0, u64 w1) { return eval_window(spec, w0, w1, primes); },
        emit);
  }

  result.checkpoint = cp;
  return result;
}

}  // namespace raa
