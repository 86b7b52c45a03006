#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "raa/fr.hpp"

namespace raa {

enum class ScanKind {
  Pairs,
  Near,
  Triples,
  Linear,
  Rabonacci,
  NegativeR,
  RationalRCheck,
};

std::string to_string(ScanKind kind);

/// Near-scan threshold: either an exact constant k, or floor(c * end^delta)
/// evaluated once at the range end.
struct NearThreshold {
  bool is_constant = true;
  std::uint64_t constant = 0;
  double c = 1.0;
  double delta = 0.0;

  std::uint64_t evaluate(std::uint64_t range_end) const;
};

struct SearchSpec {
  ScanKind kind = ScanKind::Pairs;
  unsigned r = 1;                  // exact integer exponent, r >= 1
  unsigned neg_m = 1;              // NegativeR: r = -neg_m
  long rat_num = 1;                // RationalRCheck: r = rat_num/rat_den
  long rat_den = 2;
  std::vector<long long> coeffs;   // Linear only
  NearThreshold near;              // Near only
  std::uint64_t start = 1;
  std::uint64_t end = 1;
  unsigned shard_count = 1;
  std::uint64_t window_length = std::uint64_t(1) << 20;
  std::string checkpoint_path;

  void validate() const;           // throws std::invalid_argument
  std::string digest() const;      // stable hash of the semantic fields
};

/// One found solution. Exact values rendered as decimal (or num/den)
/// strings; fields that do not apply to the kind stay empty.
struct Hit {
  std::uint64_t n = 0;
  std::string value_n;
  std::string value_n1;
  std::string value_n2;
  std::string delta;
};

struct Checkpoint {
  std::string spec_digest;
  std::uint64_t completed_prefix_end = 0;
  std::uint64_t hits_so_far = 0;
  std::uint64_t emitted_file_offset = 0;

  std::string to_json() const;
  static Checkpoint parse(const std::string& json_text);
  static Checkpoint load(const std::string& path);
  void store(const std::string& path) const;
};

class CheckpointMismatch : public std::runtime_error {
 public:
  explicit CheckpointMismatch(const std::string& what)
      : std::runtime_error(what) {}
};

// CSV surface shared by the CLI and the checkpointed runner.
std::string hits_csv_header();
std::string hit_csv_row(const SearchSpec& spec, const Hit& hit);

// In-memory scans (ascending n, every hit re-verified before emission).
std::vector<Hit> scan_pairs(std::uint64_t start, std::uint64_t end, unsigned r,
                            unsigned shards = 1,
                            std::uint64_t window_length = std::uint64_t(1) << 20);
std::vector<Hit> scan_near(std::uint64_t start, std::uint64_t end, unsigned r,
                           const NearThreshold& threshold, unsigned shards = 1,
                           std::uint64_t window_length = std::uint64_t(1) << 20);
std::vector<Hit> scan_linear(std::uint64_t start, std::uint64_t end,
                             const std::vector<long long>& coeffs, unsigned r,
                             unsigned shards = 1,
                             std::uint64_t window_length = std::uint64_t(1) << 20);
std::vector<Hit> scan_triples(std::uint64_t start, std::uint64_t end,
                              unsigned shards = 1,
                              std::uint64_t window_length = std::uint64_t(1) << 20);
std::vector<Hit> scan_rabonacci(std::uint64_t start, std::uint64_t end,
                                unsigned shards = 1,
                                std::uint64_t window_length = std::uint64_t(1) << 20);

// Structural scan for f_{-m}(n) = f_{-m}(n+1): enumerate the sparse
// candidates whose every prime power p^a has p^m | a, intersect
// consecutive ones, then verify exact rational equality.
std::vector<Hit> scan_negative_r(std::uint64_t start, std::uint64_t end,
                                 unsigned m);
std::vector<std::uint64_t> negative_r_candidates(std::uint64_t limit,
                                                 unsigned m);
// Consecutive candidate pairs examined by scan_negative_r (audit surface).
std::uint64_t negative_r_candidate_pairs(std::uint64_t start,
                                         std::uint64_t end, unsigned m);

struct RationalCheckResult {
  bool possible = false;       // always false for n >= 2
  bool separated = false;      // interval witness separated |diff| from 0
  double witness_gap_lo = 0.0; // rigorous lower bound on |f_r(n)-f_r(n+1)|
};

// Can f_r(n) = f_r(n+1) for non-integer rational r = num/den? The prime
// supports of n and n+1 are disjoint, so the radicals involved are
// linearly independent and the answer is structurally no; an interval
// witness at prec_bits is attached when it separates from zero.
RationalCheckResult rational_r_structural_check(std::uint64_t n, long num,
                                               long den,
                                               unsigned prec_bits = 128);

struct RunResult {
  std::uint64_t hits_emitted = 0;
  Checkpoint checkpoint;
};

// Checkpointed, shardable file-backed run. Appends hits to hits_path as
// CSV; checkpoint advances only over contiguous completed prefixes.
// resume=true requires a checkpoint whose digest matches the spec.
RunResult run(const SearchSpec& spec, const std::string& hits_path,
              bool resume = false);

// Same scan, collected in memory (used by tests and the bindings).
std::vector<Hit> run_scan(const SearchSpec& spec);

}  // namespace raa
