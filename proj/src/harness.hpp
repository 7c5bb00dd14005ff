#pragma once

#include <map>
#include <string>

#include "oram.hpp"

namespace oram3::harness {

enum class Workload { uniform, adversarial_repeat, sequential };

const char* workload_name(Workload w);

struct ExperimentConfig {
  std::uint64_t n = 16;
  std::uint64_t ops = 100;
  std::uint64_t seed = 0;
  Workload workload = Workload::uniform;
  bool big_blocks = false;
};

struct Request {
  std::uint64_t addr = 0;
  std::optional<std::uint64_t> value;  // present: write, absent: read
};

std::vector<Request> make_workload(Workload w, std::uint64_t n, std::uint64_t ops,
                                   RandomSource& rng);

// ---- oracle replay ----------------------------------------------------------

struct OracleReplayResult {
  std::uint64_t ops = 0;
  std::uint64_t mismatches = 0;
  double seconds = 0;
  double blocks_per_access = 0;
  std::vector<std::string> violations;  // first few mismatches, spelled out
};

/// Plays the configured workload against the store and a plain array side by
/// side. Mismatches are recorded, never thrown.
OracleReplayResult run_oracle_replay(const ExperimentConfig& cfg);

// ---- pattern audits ---------------------------------------------------------

struct PatternAuditResult {
  bool pattern_equal = true;
  bool seed_invariant = true;
  std::uint64_t pairs = 0;
  std::uint64_t seeds_checked = 0;
  std::vector<std::string> violations;
};

/// Content-stripped trace of setup plus the given requests, byte-comparable.
std::string run_skeleton(const ExperimentConfig& cfg, const std::vector<Request>& reqs);

/// Runs both sequences under the same seed and compares skeletons.
bool run_pattern_audit(const ExperimentConfig& cfg, const std::vector<Request>& r0,
                       const std::vector<Request>& r1);

/// `pairs` generated pairs of equal-length sequences (the first pair is
/// all-same-address vs uniform-random), plus a 10-seed invariance check on a
/// fixed sequence.
PatternAuditResult run_pattern_suite(const ExperimentConfig& cfg, std::size_t pairs);

// ---- statistics -------------------------------------------------------------

/// Upper-tail p-value of the chi-square distribution with df degrees.
double chi_square_p(double stat, int df);

/// Chi-square p against a uniform expectation over counts.size() buckets.
double chi_square_uniform_p(const std::vector<std::uint64_t>& counts);

/// Least-squares slope of ln(y) against ln(x).
double fit_exponent(const std::vector<double>& x, const std::vector<double>& y);

// ---- index-uniformity audits ------------------------------------------------

enum class Protocol { otm, compact, merge };

const char* protocol_name(Protocol p);

struct UniformityCell {
  Protocol proto = Protocol::otm;
  int server = 0;
  double p = 0;
  double stat = 0;
  std::size_t buckets = 0;
};

/// Repeats the protocol `trials` times with fresh sub-seeds and tests, per
/// server, that the first post-permutation physical read index is uniform
/// over the permuted address space. Empty when trials == 0.
std::vector<UniformityCell> run_index_uniformity(Protocol proto, std::size_t n,
                                                 std::size_t lookups, std::size_t trials,
                                                 std::uint64_t seed, RandomSource::Mode mode);

// ---- bandwidth suite --------------------------------------------------------

struct OramBandwidthRow {
  std::uint64_t n = 0;
  std::uint64_t setup_blocks = 0;
  std::uint64_t accesses = 0;
  double blocks_per_access = 0;
  double bytes_per_access = 0;
  double bit_blowup = 0;  // bytes per access over one data block's bytes
};

struct SweepRow {
  std::uint64_t n = 0;
  std::uint64_t blocks = 0;
};

/// Metered blocks for one compaction of an n-entry half-real layout.
std::uint64_t measure_compact_blocks(std::size_t n, std::uint64_t seed);

/// Metered blocks for one merge producing an n-entry layout.
std::uint64_t measure_merge_blocks(std::size_t n, std::uint64_t seed);

/// Setup plus window_mult*n uniform accesses, metered separately.
OramBandwidthRow measure_oram_bandwidth(std::uint64_t n, bool big_blocks, std::uint64_t seed,
                                        std::uint64_t window_mult);

struct BandwidthSuite {
  bool big_blocks = false;
  std::vector<OramBandwidthRow> oram_rows;
  std::vector<SweepRow> compact_rows;
  std::vector<SweepRow> merge_rows;
  double oram_exponent = 0;        // blocks/access vs log2 n
  double blowup_exponent = 0;      // bit blowup vs log2 n
  double compact_exponent = 0;     // blocks vs n
  double merge_exponent = 0;       // blocks vs n
  std::vector<double> compact_ratios;  // cost ratio per size doubling
  std::vector<double> merge_ratios;
};

/// Sweeps the store (amortized over `window_mult`*n post-setup accesses) and
/// the two building blocks at each size, then fits scaling exponents.
BandwidthSuite run_bandwidth_suite(const std::vector<std::uint64_t>& sizes, bool big_blocks,
                                   std::uint64_t seed, std::uint64_t window_mult = 4);

// ---- report assembly --------------------------------------------------------

struct AuditReport {
  bool pattern_equal = true;
  bool seed_invariant = true;
  std::map<std::string, double> chi_square_p;
  bool chi_pass_bonferroni = true;
  BandwidthSuite bandwidth;
  std::vector<std::string> violations;
};

/// Pattern suite + uniformity audits (positive and negative controls) in one
/// report. `trials` drives every chi-square test.
AuditReport run_full_audit(const ExperimentConfig& cfg, std::size_t trials);

/// Stable JSON rendering (audit sections).
std::string audit_report_json(const AuditReport& r);

/// Stable JSON rendering (bandwidth sections).
std::string bandwidth_json(const BandwidthSuite& s);

/// Streams a JSONL trace of setup plus the workload to `path`.
void dump_trace_jsonl(const ExperimentConfig& cfg, const std::string& path);

}  // namespace oram3::harness
