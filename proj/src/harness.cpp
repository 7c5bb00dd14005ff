#include "harness.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"

namespace oram3::harness {

using ordered_json = nlohmann::ordered_json;

const char* workload_name(Workload w) {
  switch (w) {
    case Workload::uniform: return "uniform-random";
    case Workload::adversarial_repeat: return "adversarial-repeat";
    default: return "sequential-scan";
  }
}

std::vector<Request> make_workload(Workload w, std::uint64_t n, std::uint64_t ops,
                                   RandomSource& rng) {
  std::vector<Request> reqs;
  reqs.reserve(ops);
  const std::uint64_t hot = rng.below(n);
  for (std::uint64_t i = 0; i < ops; ++i) {
    Request q;
    switch (w) {
      case Workload::uniform:
        q.addr = rng.below(n);
        if (rng.next_u64() & 1) q.value = rng.next_u64();
        break;
      case Workload::adversarial_repeat:
        q.addr = hot;
        if (i & 1) q.value = rng.next_u64();
        break;
      case Workload::sequential:
        q.addr = i % n;
        if (i & 1) q.value = rng.next_u64();
        break;
    }
    reqs.push_back(q);
  }
  return reqs;
}

OracleReplayResult run_oracle_replay(const ExperimentConfig& cfg) {
  OracleReplayResult res;
  res.ops = cfg.ops;
  const auto t0 = std::chrono::steady_clock::now();

  OramSystem sys = make_oram(cfg.n, cfg.seed, cfg.big_blocks);
  sys.net.reset_meter();
  RandomSource wrng = RandomSource(cfg.seed).stream(RandomSource::kWorkloadStream);
  const std::vector<Request> reqs = make_workload(cfg.workload, cfg.n, cfg.ops, wrng);

  std::vector<std::uint64_t> ref(cfg.n, 0);
  const std::uint64_t mask = codec::payload_mask(sys.w.data);
  for (std::size_t i = 0; i < reqs.size(); ++i) {
    const std::uint64_t got = oram_access(sys, reqs[i].addr, reqs[i].value);
    const std::uint64_t want = ref[reqs[i].addr];
    if (got != want) {
      ++res.mismatches;
      if (res.violations.size() < 8) {
        std::ostringstream o;
        o << workload_name(cfg.workload) << " op " << i << " addr " << reqs[i].addr << ": got "
          << got << ", expected " << want;
        res.violations.push_back(o.str());
      }
    }
    if (reqs[i].value) ref[reqs[i].addr] = *reqs[i].value & mask;
  }
  if (cfg.ops)
    res.blocks_per_access =
        static_cast<double>(sys.net.meter().blocks) / static_cast<double>(cfg.ops);
  free_oram(sys);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

std::string run_skeleton(const ExperimentConfig& cfg, const std::vector<Request>& reqs) {
  OramSystem sys;
  SkeletonSink sink(sys.net);
  sys.net.set_sink(&sink);
  oram_init(sys, cfg.n, cfg.seed, cfg.big_blocks);
  for (const Request& q : reqs) oram_access(sys, q.addr, q.value);
  sys.net.set_sink(nullptr);
  free_oram(sys);
  return sink.bytes();
}

bool run_pattern_audit(const ExperimentConfig& cfg, const std::vector<Request>& r0,
                       const std::vector<Request>& r1) {
  if (r0.size() != r1.size())
    throw std::invalid_argument("pattern audit needs equal-length sequences");
  return run_skeleton(cfg, r0) == run_skeleton(cfg, r1);
}

PatternAuditResult run_pattern_suite(const ExperimentConfig& cfg, std::size_t pairs) {
  PatternAuditResult res;
  res.pairs = pairs;
  constexpr Workload kKinds[3] = {Workload::uniform, Workload::adversarial_repeat,
                                  Workload::sequential};
  for (std::size_t p = 0; p < pairs; ++p) {
    RandomSource g0 = RandomSource(cfg.seed + 31 * p + 1).stream(RandomSource::kWorkloadStream);
    RandomSource g1 = RandomSource(cfg.seed + 31 * p + 2).stream(RandomSource::kWorkloadStream);
    const Workload w0 = p == 0 ? Workload::adversarial_repeat : kKinds[p % 3];
    const Workload w1 = p == 0 ? Workload::uniform : kKinds[(p + 1) % 3];
    const std::vector<Request> r0 = make_workload(w0, cfg.n, cfg.ops, g0);
    const std::vector<Request> r1 = make_workload(w1, cfg.n, cfg.ops, g1);
    if (!run_pattern_audit(cfg, r0, r1)) {
      res.pattern_equal = false;
      std::ostringstream o;
      o << "trace skeletons differ: " << workload_name(w0) << " vs " << workload_name(w1)
        << " (pair " << p << ")";
      res.violations.push_back(o.str());
    }
  }

  RandomSource fixed_rng = RandomSource(12345).stream(RandomSource::kWorkloadStream);
  const std::vector<Request> fixed = make_workload(Workload::uniform, cfg.n, cfg.ops, fixed_rng);
  std::string first;
  for (std::uint64_t s = 0; s < 10; ++s) {
    ExperimentConfig c = cfg;
    c.seed = cfg.seed + s;
    std::string sk = run_skeleton(c, fixed);
    if (s == 0) {
      first = std::move(sk);
    } else if (sk != first) {
      res.seed_invariant = false;
      res.violations.push_back("trace skeleton varies with seed " + std::to_string(c.seed));
    }
  }
  res.seeds_checked = 10;
  return res;
}

// ---- statistics -------------------------------------------------------------

namespace {

/// Regularized upper incomplete gamma Q(a, x): series for small x, Lentz
/// continued fraction otherwise.
double gamma_q(double a, double x) {
  if (x < 0 || a <= 0) return std::numeric_limits<double>::quiet_NaN();
  if (x == 0) return 1.0;
  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  double b = x + 1.0 - a;
  double c = 1e300;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::fabs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi_square_p(double stat, int df) { return gamma_q(df / 2.0, stat / 2.0); }

double chi_square_uniform_p(const std::vector<std::uint64_t>& counts) {
  const std::size_t k = counts.size();
  if (k < 2) return std::numeric_limits<double>::quiet_NaN();
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  if (total == 0) return std::numeric_limits<double>::quiet_NaN();
  const double expected = static_cast<double>(total) / static_cast<double>(k);
  double stat = 0;
  for (std::uint64_t c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  return chi_square_p(stat, static_cast<int>(k) - 1);
}

double fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  return num / den;
}

// ---- index-uniformity audits ------------------------------------------------

const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::otm: return "otm";
    case Protocol::compact: return "compact";
    default: return "merge";
  }
}

namespace {

/// First read index per server on any permuted output array, or -1.
std::array<std::int64_t, 3> first_permuted_reads(const SimNet& net,
                                                 const std::vector<TraceEvent>& evs) {
  std::array<std::int64_t, 3> first = {-1, -1, -1};
  for (const TraceEvent& ev : evs) {
    if (ev.kind != EventKind::read_req) continue;
    const int srv = ev.receiver;
    if (srv < 0 || srv > 2 || first[static_cast<std::size_t>(srv)] >= 0) continue;
    const std::string& nm = net.array_name(srv, ev.array);
    if (nm.rfind("pm.out", 0) == 0) first[static_cast<std::size_t>(srv)] = ev.index;
  }
  return first;
}

Layout half_real_layout(SimNet& net, std::size_t n, std::size_t width, std::uint64_t key_step,
                        std::uint64_t key_base, RandomSource& rng) {
  Layout l = alloc_layout(net, "uin", n, width);
  for (std::size_t i = 0; i < n; ++i) {
    Block e = i < n / 2 ? codec::real_entry(width, key_base + key_step * i, i)
                        : codec::dummy_entry(width);
    secret_write(net, l, i, e, rng);
  }
  return l;
}

std::array<std::int64_t, 3> uniformity_trial(Protocol proto, std::size_t n, std::size_t lookups,
                                             RandomSource&& rng) {
  SimNet net;
  const Widths w = Widths::fixed();
  VectorSink sink;
  switch (proto) {
    case Protocol::otm: {
      Layout in = alloc_layout(net, "uin", n, w.data);
      for (std::size_t i = 0; i < n; ++i)
        secret_write(net, in, i, codec::real_entry(w.data, i, i), rng);
      OtmBuild b = otm_build(net, std::move(in), w, rng);
      std::vector<PositionTuple> tuples(n);
      for (std::size_t i = 0; i < n; ++i)
        tuples[i] = codec::keypos_tuple(peek_abstract(net, b.keymap, i));
      std::vector<std::size_t> order(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      for (std::size_t i = n; i-- > 1;)
        std::swap(order[i], order[rng.below(i + 1)]);
      net.set_sink(&sink);
      for (std::size_t r = 0; r < std::min(lookups, n); ++r)
        otm_lookup(net, b.st, order[r], tuples[order[r]], rng);
      net.set_sink(nullptr);
      free_otm(net, b.st);
      free_layout(net, b.keymap);
      break;
    }
    case Protocol::compact: {
      Layout in = half_real_layout(net, n, w.data, 1, 0, rng);
      net.set_sink(&sink);
      CompactResult c = stable_compact(net, std::move(in), w.link, rng);
      net.set_sink(nullptr);
      free_layout(net, c.out);
      break;
    }
    case Protocol::merge: {
      Layout a = half_real_layout(net, n, w.data, 2, 0, rng);
      Layout b = half_real_layout(net, n, w.data, 2, 1, rng);
      net.set_sink(&sink);
      MergeResult m = merge(net, std::move(a), std::move(b), w.link, rng);
      net.set_sink(nullptr);
      free_layout(net, m.out);
      break;
    }
  }
  return first_permuted_reads(net, sink.events);
}

}  // namespace

std::vector<UniformityCell> run_index_uniformity(Protocol proto, std::size_t n,
                                                 std::size_t lookups, std::size_t trials,
                                                 std::uint64_t seed, RandomSource::Mode mode) {
  std::vector<UniformityCell> cells;
  if (trials == 0) return cells;
  const std::size_t buckets = proto == Protocol::compact ? n : 2 * n;
  std::array<std::vector<std::uint64_t>, 3> counts;
  for (auto& c : counts) c.assign(buckets, 0);

  for (std::size_t t = 0; t < trials; ++t) {
    RandomSource trial_rng(RandomSource(seed, mode).stream(RandomSource::kMaskStream).next_u64() ^
                               (0x100000001b3ull * (t + 1)),
                           mode);
    const std::array<std::int64_t, 3> first = uniformity_trial(proto, n, lookups,
                                                               std::move(trial_rng));
    for (int s = 0; s < 3; ++s) {
      if (first[static_cast<std::size_t>(s)] < 0 ||
          first[static_cast<std::size_t>(s)] >= static_cast<std::int64_t>(buckets))
        throw ProtocolError("uniformity trial saw no permuted read");
      ++counts[static_cast<std::size_t>(s)][static_cast<std::size_t>(first[static_cast<std::size_t>(s)])];
    }
  }

  for (int s = 0; s < 3; ++s) {
    UniformityCell cell;
    cell.proto = proto;
    cell.server = s;
    cell.buckets = buckets;
    const double expected = static_cast<double>(trials) / static_cast<double>(buckets);
    double stat = 0;
    for (std::uint64_t c : counts[static_cast<std::size_t>(s)]) {
      const double d = static_cast<double>(c) - expected;
      stat += d * d / expected;
    }
    cell.stat = stat;
    cell.p = chi_square_p(stat, static_cast<int>(buckets) - 1);
    cells.push_back(cell);
  }
  return cells;
}

// ---- bandwidth suite --------------------------------------------------------

std::uint64_t measure_compact_blocks(std::size_t n, std::uint64_t seed) {
  SimNet net;
  RandomSource rng(seed);
  const Widths w = Widths::fixed();
  Layout in = half_real_layout(net, n, w.data, 1, 0, rng);
  net.reset_meter();
  CompactResult c = stable_compact(net, std::move(in), w.link, rng);
  const std::uint64_t blocks = net.meter().blocks;
  free_layout(net, c.out);
  return blocks;
}

std::uint64_t measure_merge_blocks(std::size_t n, std::uint64_t seed) {
  if (n < 2 || (n & 1)) throw std::invalid_argument("merge size must be even");
  SimNet net;
  RandomSource rng(seed);
  const Widths w = Widths::fixed();
  Layout a = half_real_layout(net, n / 2, w.data, 2, 0, rng);
  Layout b = half_real_layout(net, n / 2, w.data, 2, 1, rng);
  net.reset_meter();
  MergeResult m = merge(net, std::move(a), std::move(b), w.link, rng);
  const std::uint64_t blocks = net.meter().blocks;
  free_layout(net, m.out);
  return blocks;
}

OramBandwidthRow measure_oram_bandwidth(std::uint64_t n, bool big_blocks, std::uint64_t seed,
                                        std::uint64_t window_mult) {
  OramBandwidthRow row;
  row.n = n;
  OramSystem sys = make_oram(n, seed, big_blocks);
  row.setup_blocks = sys.net.meter().blocks;
  sys.net.reset_meter();
  row.accesses = window_mult * n;
  RandomSource wrng = RandomSource(seed ^ n).stream(RandomSource::kWorkloadStream);
  const std::vector<Request> reqs = make_workload(Workload::uniform, n, row.accesses, wrng);
  for (const Request& q : reqs) oram_access(sys, q.addr, q.value);
  row.blocks_per_access =
      static_cast<double>(sys.net.meter().blocks) / static_cast<double>(row.accesses);
  row.bytes_per_access =
      static_cast<double>(sys.net.meter().bytes) / static_cast<double>(row.accesses);
  row.bit_blowup = row.bytes_per_access / static_cast<double>(sys.w.data);
  free_oram(sys);
  return row;
}

BandwidthSuite run_bandwidth_suite(const std::vector<std::uint64_t>& sizes, bool big_blocks,
                                   std::uint64_t seed, std::uint64_t window_mult) {
  BandwidthSuite s;
  s.big_blocks = big_blocks;
  for (std::uint64_t n : sizes) {
    s.oram_rows.push_back(measure_oram_bandwidth(n, big_blocks, seed, window_mult));
    s.compact_rows.push_back(SweepRow{n, measure_compact_blocks(n, seed)});
    s.merge_rows.push_back(SweepRow{n, measure_merge_blocks(n, seed)});
  }

  std::vector<double> logs, blocks, blowups, ns, ccost, mcost;
  for (const OramBandwidthRow& r : s.oram_rows) {
    logs.push_back(std::log2(static_cast<double>(r.n)));
    blocks.push_back(r.blocks_per_access);
    blowups.push_back(r.bit_blowup);
  }
  for (std::size_t i = 0; i < s.compact_rows.size(); ++i) {
    ns.push_back(static_cast<double>(s.compact_rows[i].n));
    ccost.push_back(static_cast<double>(s.compact_rows[i].blocks));
    mcost.push_back(static_cast<double>(s.merge_rows[i].blocks));
    if (i > 0 && s.compact_rows[i].n == 2 * s.compact_rows[i - 1].n) {
      s.compact_ratios.push_back(static_cast<double>(s.compact_rows[i].blocks) /
                                 static_cast<double>(s.compact_rows[i - 1].blocks));
      s.merge_ratios.push_back(static_cast<double>(s.merge_rows[i].blocks) /
                               static_cast<double>(s.merge_rows[i - 1].blocks));
    }
  }
  s.oram_exponent = fit_exponent(logs, blocks);
  s.blowup_exponent = fit_exponent(logs, blowups);
  s.compact_exponent = fit_exponent(ns, ccost);
  s.merge_exponent = fit_exponent(ns, mcost);
  return s;
}

// ---- report assembly --------------------------------------------------------

AuditReport run_full_audit(const ExperimentConfig& cfg, std::size_t trials) {
  AuditReport r;
  const PatternAuditResult pa = run_pattern_suite(cfg, 10);
  r.pattern_equal = pa.pattern_equal;
  r.seed_invariant = pa.seed_invariant;
  r.violations.insert(r.violations.end(), pa.violations.begin(), pa.violations.end());

  struct Params {
    Protocol proto;
    std::size_t n;
    std::size_t lookups;
  };
  const Params cases[3] = {{Protocol::otm, 4, 4}, {Protocol::compact, 8, 0},
                           {Protocol::merge, 8, 0}};
  std::size_t positive_tests = 0;
  std::vector<std::pair<std::string, double>> positives;
  for (const Params& ps : cases) {
    for (const UniformityCell& c :
         run_index_uniformity(ps.proto, ps.n, ps.lookups, trials, cfg.seed,
                              RandomSource::Mode::counter)) {
      std::string name = std::string(protocol_name(c.proto)) + "_s" + std::to_string(c.server);
      r.chi_square_p[name] = c.p;
      positives.emplace_back(name, c.p);
      ++positive_tests;
    }
    for (const UniformityCell& c :
         run_index_uniformity(ps.proto, ps.n, ps.lookups, trials, cfg.seed,
                              RandomSource::Mode::constant)) {
      std::string name =
          std::string(protocol_name(c.proto)) + "_s" + std::to_string(c.server) + "_rigged";
      r.chi_square_p[name] = c.p;
      if (!(c.p < 0.001)) {
        r.violations.push_back("negative control passed uniformity: " + name);
      }
    }
  }
  const double threshold = 0.001 / static_cast<double>(positive_tests);
  for (const auto& [name, p] : positives) {
    if (!(p > threshold)) {
      r.chi_pass_bonferroni = false;
      r.violations.push_back("uniformity rejected: " + name + " p=" + std::to_string(p));
    }
  }
  return r;
}

std::string audit_report_json(const AuditReport& r) {
  ordered_json j;
  j["pattern_equal"] = r.pattern_equal;
  j["seed_invariant"] = r.seed_invariant;
  ordered_json chi = ordered_json::object();
  for (const auto& [name, p] : r.chi_square_p) chi[name] = p;
  j["chi_square_p"] = chi;
  j["chi_pass_bonferroni"] = r.chi_pass_bonferroni;
  j["violations"] = r.violations;
  return j.dump(2);
}

std::string bandwidth_json(const BandwidthSuite& s) {
  ordered_json j;
  j["big_blocks"] = s.big_blocks;
  ordered_json rows = ordered_json::array();
  for (const OramBandwidthRow& r : s.oram_rows) {
    ordered_json o;
    o["n"] = r.n;
    o["setup_blocks"] = r.setup_blocks;
    o["accesses"] = r.accesses;
    o["blocks_per_access"] = r.blocks_per_access;
    o["bytes_per_access"] = r.bytes_per_access;
    o["bit_blowup"] = r.bit_blowup;
    rows.push_back(o);
  }
  j["bandwidth_table"] = rows;
  auto sweep = [](const std::vector<SweepRow>& sr) {
    ordered_json a = ordered_json::array();
    for (const SweepRow& r : sr) a.push_back(ordered_json{{"n", r.n}, {"blocks", r.blocks}});
    return a;
  };
  j["compact_table"] = sweep(s.compact_rows);
  j["merge_table"] = sweep(s.merge_rows);
  j["fitted_exponent"] = ordered_json{{"oram_blocks_vs_log_n", s.oram_exponent},
                                      {"bit_blowup_vs_log_n", s.blowup_exponent},
                                      {"compact_vs_n", s.compact_exponent},
                                      {"merge_vs_n", s.merge_exponent}};
  j["doubling_ratios"] =
      ordered_json{{"compact", s.compact_ratios}, {"merge", s.merge_ratios}};
  return j.dump(2);
}

namespace {

class JsonlStreamSink : public TraceSink {
public:
  JsonlStreamSink(std::ostream& os, const SimNet& net) : os_(os), net_(net) {}
  void on_event(const TraceEvent& ev) override {
    one_[0] = ev;
    write_trace_jsonl(os_, one_, net_);
  }

private:
  std::ostream& os_;
  const SimNet& net_;
  std::vector<TraceEvent> one_{1};
};

}  // namespace

void dump_trace_jsonl(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::ios_base::failure("cannot open trace output: " + path);
  OramSystem sys;
  JsonlStreamSink sink(os, sys.net);
  sys.net.set_sink(&sink);
  oram_init(sys, cfg.n, cfg.seed, cfg.big_blocks);
  RandomSource wrng = RandomSource(cfg.seed).stream(RandomSource::kWorkloadStream);
  for (const Request& q : make_workload(cfg.workload, cfg.n, cfg.ops, wrng))
    oram_access(sys, q.addr, q.value);
  sys.net.set_sink(nullptr);
  free_oram(sys);
  if (!os) throw std::ios_base::failure("trace write failed: " + path);
}

}  // namespace oram3::harness
