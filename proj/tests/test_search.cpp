#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "raa/search.hpp"

using raa::Hit;
using raa::ScanKind;
using raa::SearchSpec;

namespace {

std::uint64_t f1(std::uint64_t n) {
  std::uint64_t s = 0, m = n;
  for (std::uint64_t p = 2; p * p <= m; ++p)
    while (m % p == 0) {
      m /= p;
      s += p;
    }
  if (m > 1) s += m;
  return s;
}

unsigned __int128 fr(std::uint64_t n, unsigned r) {
  unsigned __int128 s = 0;
  std::uint64_t m = n;
  auto powr = [&](std::uint64_t p) {
    unsigned __int128 w = 1;
    for (unsigned i = 0; i < r; ++i) w *= p;
    return w;
  };
  for (std::uint64_t p = 2; p * p <= m; ++p)
    while (m % p == 0) {
      m /= p;
      s += powr(p);
    }
  if (m > 1) s += powr(m);
  return s;
}

std::vector<std::uint64_t> hit_ns(const std::vector<Hit>& hits) {
  std::vector<std::uint64_t> out;
  for (const auto& h : hits) out.push_back(h.n);
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct TempPaths {
  std::string hits = "test_search_hits.csv";
  std::string ckpt = "test_search_ckpt.json";
  ~TempPaths() {
    std::remove(hits.c_str());
    std::remove(ckpt.c_str());
  }
};

}  // namespace

TEST_CASE("pairs scan matches trial-division oracle on [2, 10^5]") {
  std::vector<std::uint64_t> oracle;
  for (std::uint64_t n = 2; n < 100000; ++n)
    if (f1(n) == f1(n + 1)) oracle.push_back(n);
  auto hits = raa::scan_pairs(2, 100000, 1);
  CHECK(hit_ns(hits) == oracle);
  REQUIRE(!hits.empty());
  CHECK(hits.front().n == 5);
  CHECK(hits.front().value_n == "5");
  CHECK(hits.front().delta == "0");
}

TEST_CASE("r = 2 pairs oracle on [2, 10^5]") {
  std::vector<std::uint64_t> oracle;
  for (std::uint64_t n = 2; n < 100000; ++n)
    if (fr(n, 2) == fr(n + 1, 2)) oracle.push_back(n);
  CHECK(hit_ns(raa::scan_pairs(2, 100000, 2)) == oracle);
}

TEST_CASE("range edges") {
  CHECK(raa::scan_pairs(9, 14, 1).empty());
  auto single = raa::scan_pairs(714, 714, 1);
  REQUIRE(single.size() == 1);
  CHECK(single[0].n == 714);
  CHECK(single[0].value_n == "29");
  // end is the last n examined; the partner n+1 = 715 lies outside.
  CHECK(raa::scan_pairs(2, 4, 1).empty());
}

TEST_CASE("near scan: counts monotone in k and match oracle") {
  raa::NearThreshold k0{true, 0, 0, 0}, k1{true, 1, 0, 0}, k5{true, 5, 0, 0};
  auto h0 = raa::scan_near(2, 50000, 1, k0);
  auto h1 = raa::scan_near(2, 50000, 1, k1);
  auto h5 = raa::scan_near(2, 50000, 1, k5);
  CHECK(h0.size() <= h1.size());
  CHECK(h1.size() <= h5.size());
  CHECK(hit_ns(h0) == hit_ns(raa::scan_pairs(2, 50000, 1)));
  std::uint64_t oracle5 = 0;
  for (std::uint64_t n = 2; n < 50000; ++n) {
    std::uint64_t a = f1(n), b = f1(n + 1);
    if ((a > b ? a - b : b - a) <= 5) ++oracle5;
  }
  CHECK(h5.size() == oracle5);
  // delta column holds |f(n+1) - f(n)|
  for (const auto& h : h5) {
    std::uint64_t d = std::stoull(h.delta);
    std::uint64_t a = f1(h.n), b = f1(h.n + 1);
    CHECK(d == (a > b ? a - b : b - a));
  }
}

TEST_CASE("near threshold k(x) = c x^delta evaluated at range end") {
  raa::NearThreshold t;
  t.is_constant = false;
  t.c = 2.0;
  t.delta = 0.5;
  CHECK(t.evaluate(10000) == 200);
  CHECK(t.evaluate(2) == 2);  // floor(2 sqrt 2)
}

TEST_CASE("triples and rabonacci match oracles on [2, 10^5]") {
  std::vector<std::uint64_t> trip, rab;
  for (std::uint64_t n = 2; n + 2 <= 100000; ++n)
    if (f1(n) == f1(n + 1) && f1(n + 1) == f1(n + 2)) trip.push_back(n);
  for (std::uint64_t n = 4; n <= 100000; ++n)
    if (f1(n) == f1(n - 1) + f1(n - 2)) rab.push_back(n);
  CHECK(hit_ns(raa::scan_triples(2, 100000)) == trip);
  CHECK(hit_ns(raa::scan_rabonacci(4, 100000)) == rab);
  // n = 3 qualifies under the unit convention f(1) = 1.
  auto from3 = raa::scan_rabonacci(3, 100000);
  REQUIRE(!from3.empty());
  CHECK(from3.front().n == 3);
  CHECK(from3.size() == rab.size() + 1);
}

TEST_CASE("linear scan generalizes pairs") {
  // a = (1, -1): f(n) - f(n+1) = 0 is exactly the pairs predicate.
  auto lin = raa::scan_linear(2, 100000, {1, -1}, 1);
  CHECK(hit_ns(lin) == hit_ns(raa::scan_pairs(2, 100000, 1)));
  // a = (1, 1, -1): f(n) + f(n+1) = f(n+2).
  std::vector<std::uint64_t> oracle;
  for (std::uint64_t n = 2; n + 2 <= 50000; ++n)
    if (f1(n) + f1(n + 1) == f1(n + 2)) oracle.push_back(n);
  CHECK(hit_ns(raa::scan_linear(2, 50000, {1, 1, -1}, 1)) == oracle);
}

TEST_CASE("shard count and window length do not change results") {
  auto base = raa::scan_pairs(2, 200000, 1, 1);
  CHECK(hit_ns(raa::scan_pairs(2, 200000, 1, 4)) == hit_ns(base));
  CHECK(hit_ns(raa::scan_pairs(2, 200000, 1, 8, 1 << 12)) == hit_ns(base));
  CHECK(hit_ns(raa::scan_pairs(2, 200000, 1, 3, 77777)) == hit_ns(base));
}

TEST_CASE("negative-r candidate enumeration") {
  // m = 1: products of powers p^(p t): 1, 4, 16, 27, 64, 108, 256, 432, ...
  auto c = raa::negative_r_candidates(1000, 1);
  std::vector<std::uint64_t> expect = {1, 4, 16, 27, 64, 108, 256, 432, 729};
  CHECK(c == expect);
  // Oracle: n is a candidate iff every p^a in n has p | a.
  for (std::uint64_t n = 1; n <= 1000; ++n) {
    bool ok = true;
    std::uint64_t m = n;
    for (std::uint64_t p = 2; p * p <= m; ++p) {
      std::uint32_t a = 0;
      while (m % p == 0) {
        m /= p;
        ++a;
      }
      if (a && a % p != 0) ok = false;
    }
    if (m > 1) ok = false;  // exponent 1 never divisible by p >= 2
    bool listed = std::find(c.begin(), c.end(), n) != c.end();
    CHECK(listed == ok);
  }
  // m = 2 requires p^2 | a: powers of 2^4 until 3^9 fits.
  auto c2 = raa::negative_r_candidates(10000, 2);
  CHECK(c2 == std::vector<std::uint64_t>{1, 16, 256, 4096});
}

TEST_CASE("negative-r scan finds nothing below 10^6") {
  auto hits = raa::scan_negative_r(1, 1000000, 1);
  CHECK(hits.empty());
  CHECK(raa::negative_r_candidate_pairs(1, 1000000, 1) == 0);
}

TEST_CASE("rational r structural impossibility with witnesses") {
  for (std::uint64_t n : {2ULL, 8ULL, 714ULL, 5959ULL}) {
    auto res = raa::rational_r_structural_check(n, 1, 2);
    CHECK_FALSE(res.possible);
    CHECK(res.separated);
    CHECK(res.witness_gap_lo > 0.0);
  }
  // n = 2: |f_{1/2}(2) - f_{1/2}(3)| = sqrt(3) - sqrt(2) = 0.3178...
  auto res = raa::rational_r_structural_check(2, 1, 2);
  CHECK(res.witness_gap_lo == doctest::Approx(0.31783724).epsilon(1e-4));
}

TEST_CASE("spec digest covers semantics, not sharding") {
  SearchSpec a;
  a.kind = ScanKind::Pairs;
  a.start = 2;
  a.end = 1000;
  a.r = 1;
  SearchSpec b = a;
  b.shard_count = 8;
  b.window_length = 4096;
  CHECK(a.digest() == b.digest());
  b.r = 2;
  CHECK(a.digest() != b.digest());
  b = a;
  b.end = 1001;
  CHECK(a.digest() != b.digest());
  b = a;
  b.kind = ScanKind::Near;
  b.near.is_constant = true;
  b.near.constant = 0;
  CHECK(a.digest() != b.digest());
}

TEST_CASE("spec validation") {
  SearchSpec s;
  s.kind = ScanKind::Pairs;
  s.start = 10;
  s.end = 5;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.end = 20;
  s.r = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.r = 1;
  CHECK_NOTHROW(s.validate());
  s.kind = ScanKind::Linear;
  s.coeffs = {};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.coeffs = {1, -1};
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("checkpointed run: fresh, resume, and digest mismatch") {
  TempPaths tmp;
  SearchSpec spec;
  spec.kind = ScanKind::Pairs;
  spec.start = 2;
  spec.end = 60000;
  spec.r = 1;
  spec.window_length = 1 << 12;
  spec.checkpoint_path = tmp.ckpt;

  auto full = raa::run(spec, tmp.hits, false);
  const std::string full_text = slurp(tmp.hits);
  CHECK(full.checkpoint.completed_prefix_end == 60000);
  CHECK(full_text.rfind("n,kind,r,value_n,value_n1,value_n2,delta\n", 0) == 0);

  // Simulate a crash: truncate to a mid-run checkpoint state.
  raa::Checkpoint mid = full.checkpoint;
  mid.completed_prefix_end = 20481;
  std::uint64_t hits_before = 0;
  {
    std::istringstream is(full_text);
    std::string line;
    std::getline(is, line);  // header
    std::string kept = line + "\n";
    while (std::getline(is, line)) {
      auto n = std::stoull(line.substr(0, line.find(',')));
      if (n > 20481) break;
      kept += line + "\n";
      ++hits_before;
    }
    // Append garbage past the recorded offset, as an interrupted write would.
    mid.hits_so_far = hits_before;
    mid.emitted_file_offset = kept.size();
    std::ofstream(tmp.hits, std::ios::binary | std::ios::trunc)
        << kept << "1234,partial";
    mid.store(tmp.ckpt);
  }

  auto resumed = raa::run(spec, tmp.hits, true);
  CHECK(slurp(tmp.hits) == full_text);
  CHECK(resumed.checkpoint.hits_so_far == full.checkpoint.hits_so_far);

  // Digest mismatch: same files, different spec.
  SearchSpec other = spec;
  other.r = 2;
  CHECK_THROWS_AS(raa::run(other, tmp.hits, true), raa::CheckpointMismatch);

  // Resume of a completed run is a no-op.
  auto again = raa::run(spec, tmp.hits, true);
  CHECK(slurp(tmp.hits) == full_text);
  CHECK(again.hits_emitted == 0);
}

TEST_CASE("checkpoint json round trip") {
  raa::Checkpoint c;
  c.spec_digest = "deadbeef01234567";
  c.completed_prefix_end = 42;
  c.hits_so_far = 7;
  c.emitted_file_offset = 1234;
  auto d = raa::Checkpoint::parse(c.to_json());
  CHECK(d.spec_digest == c.spec_digest);
  CHECK(d.completed_prefix_end == 42);
  CHECK(d.hits_so_far == 7);
  CHECK(d.emitted_file_offset == 1234);
  CHECK(c.to_json().find("spec_digest") != std::string::npos);
  CHECK(c.to_json().find("completed_prefix_end") != std::string::npos);
  CHECK(c.to_json().find("emitted_file_offset") != std::string::npos);
}

TEST_CASE("csv row format") {
  SearchSpec spec;
  spec.kind = ScanKind::Pairs;
  spec.r = 1;
  Hit h{714, "29", "29", "", "0"};
  CHECK(raa::hit_csv_row(spec, h) == "714,pairs,1,29,29,,0\n");
  CHECK(raa::hits_csv_header() == "n,kind,r,value_n,value_n1,value_n2,delta\n");
}
