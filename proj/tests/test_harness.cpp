#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "doctest.h"
#include "harness.hpp"
#include "test_util.hpp"

using namespace oram3;
using namespace harness;

TEST_CASE("chi-square tail probabilities") {
  CHECK(chi_square_p(0.0, 5) == doctest::Approx(1.0));
  CHECK(chi_square_p(3.841, 1) == doctest::Approx(0.05).epsilon(0.01));
  CHECK(chi_square_p(7.815, 3) == doctest::Approx(0.05).epsilon(0.01));
  CHECK(chi_square_p(2.0, 2) == doctest::Approx(std::exp(-1.0)));
  CHECK(chi_square_p(100.0, 1) < 1e-20);
  CHECK(std::isnan(chi_square_p(-1.0, 1)));
}

TEST_CASE("uniform chi-square over counts") {
  CHECK(chi_square_uniform_p({25, 25, 25, 25}) == doctest::Approx(1.0));
  CHECK(chi_square_uniform_p({100, 0, 0, 0}) < 1e-20);
  CHECK(chi_square_uniform_p({24, 26, 25, 25}) > 0.9);
  CHECK(std::isnan(chi_square_uniform_p({5})));
  CHECK(std::isnan(chi_square_uniform_p({0, 0})));
}

TEST_CASE("exponent fits recover power laws") {
  std::vector<double> x = {8, 16, 32, 64, 128};
  std::vector<double> lin, quad, half;
  for (double v : x) {
    lin.push_back(3 * v);
    quad.push_back(0.5 * v * v);
    half.push_back(7 * std::sqrt(v));
  }
  CHECK(fit_exponent(x, lin) == doctest::Approx(1.0));
  CHECK(fit_exponent(x, quad) == doctest::Approx(2.0));
  CHECK(fit_exponent(x, half) == doctest::Approx(0.5));
}

TEST_CASE("workload generators") {
  RandomSource rng(90);
  auto uni = make_workload(Workload::uniform, 16, 50, rng);
  CHECK(uni.size() == 50);
  for (const Request& q : uni) CHECK(q.addr < 16);

  RandomSource rng2(91);
  auto rep = make_workload(Workload::adversarial_repeat, 16, 20, rng2);
  for (const Request& q : rep) CHECK(q.addr == rep[0].addr);
  CHECK_FALSE(rep[0].value.has_value());
  CHECK(rep[1].value.has_value());

  RandomSource rng3(92);
  auto seq = make_workload(Workload::sequential, 4, 10, rng3);
  for (std::size_t i = 0; i < seq.size(); ++i) CHECK(seq[i].addr == i % 4);
}

TEST_CASE("oracle replay sees no mismatches") {
  for (Workload w : {Workload::uniform, Workload::adversarial_repeat, Workload::sequential}) {
    ExperimentConfig cfg;
    cfg.n = 8;
    cfg.ops = 24;
    cfg.seed = 93;
    cfg.workload = w;
    OracleReplayResult r = run_oracle_replay(cfg);
    CHECK(r.ops == 24);
    CHECK(r.mismatches == 0);
    CHECK(r.violations.empty());
    CHECK(r.blocks_per_access > 0);
  }
}

TEST_CASE("trace skeletons hide the request stream") {
  ExperimentConfig cfg;
  cfg.n = 8;
  cfg.ops = 5;
  cfg.seed = 94;
  std::vector<Request> same(5, Request{3, std::nullopt});
  std::vector<Request> spread;
  for (std::uint64_t i = 0; i < 5; ++i) spread.push_back({i, i * 7});
  CHECK(run_pattern_audit(cfg, same, spread));
  CHECK_THROWS_AS(run_pattern_audit(cfg, same, {Request{0, 1}}), std::invalid_argument);
}

TEST_CASE("pattern suite passes on an honest store") {
  ExperimentConfig cfg;
  cfg.n = 8;
  cfg.ops = 6;
  cfg.seed = 95;
  PatternAuditResult r = run_pattern_suite(cfg, 3);
  CHECK(r.pattern_equal);
  CHECK(r.seed_invariant);
  CHECK(r.pairs == 3);
  CHECK(r.seeds_checked == 10);
  CHECK(r.violations.empty());
}

TEST_CASE("bandwidth measurements are deterministic and sized sanely") {
  const std::uint64_t c = measure_compact_blocks(64, 7);
  CHECK(c == measure_compact_blocks(64, 7));
  CHECK(c > 64);
  const std::uint64_t m = measure_merge_blocks(64, 7);
  CHECK(m > 64);
  CHECK_THROWS_AS(measure_merge_blocks(63, 7), std::invalid_argument);

  OramBandwidthRow row = measure_oram_bandwidth(8, false, 7, 2);
  CHECK(row.accesses == 16);
  CHECK(row.setup_blocks > 0);
  CHECK(row.blocks_per_access > 0);
  CHECK(row.bit_blowup == doctest::Approx(row.bytes_per_access / 16.0));
}

TEST_CASE("bandwidth suite json carries tables and fits") {
  BandwidthSuite s = run_bandwidth_suite({8, 16}, false, 7, 2);
  REQUIRE(s.oram_rows.size() == 2);
  REQUIRE(s.compact_ratios.size() == 1);
  CHECK(s.compact_ratios[0] == doctest::Approx(2.0).epsilon(0.1));
  CHECK(s.merge_ratios[0] == doctest::Approx(2.0).epsilon(0.1));

  auto j = nlohmann::json::parse(bandwidth_json(s));
  CHECK(j["big_blocks"] == false);
  CHECK(j["bandwidth_table"].size() == 2);
  CHECK(j["bandwidth_table"][0]["n"] == 8);
  CHECK(j["compact_table"][1]["blocks"] == s.compact_rows[1].blocks);
  CHECK(j["fitted_exponent"].contains("oram_blocks_vs_log_n"));
  CHECK(j["doubling_ratios"]["merge"].size() == 1);
}

TEST_CASE("full audit passes and its json parses") {
  ExperimentConfig cfg;
  cfg.n = 8;
  cfg.ops = 4;
  cfg.seed = 96;
  AuditReport r = run_full_audit(cfg, 250);
  CHECK(r.pattern_equal);
  CHECK(r.seed_invariant);
  CHECK(r.chi_pass_bonferroni);
  CHECK(r.violations.empty());
  CHECK(r.chi_square_p.size() == 18);  // 3 protocols x 3 servers, honest and rigged
  for (const auto& [name, p] : r.chi_square_p) {
    if (name.find("_rigged") != std::string::npos)
      CHECK_MESSAGE(p < 0.001, name << " p=" << p);
    else
      CHECK_MESSAGE(p > 0.001 / 9.0, name << " p=" << p);
  }

  auto j = nlohmann::json::parse(audit_report_json(r));
  CHECK(j["pattern_equal"] == true);
  CHECK(j["seed_invariant"] == true);
  CHECK(j["chi_pass_bonferroni"] == true);
  CHECK(j["chi_square_p"].size() == 18);
  CHECK(j["violations"].empty());
}

TEST_CASE("jsonl trace dump is parseable line by line") {
  const std::string path = "trace_test_tmp.jsonl";
  ExperimentConfig cfg;
  cfg.n = 4;
  cfg.ops = 2;
  cfg.seed = 97;
  dump_trace_jsonl(cfg, path);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::size_t lines = 0;
  bool saw_read = false, saw_write = false, saw_null_index = false;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    ++lines;
    CHECK(j.contains("round"));
    CHECK(j.contains("sender"));
    CHECK(j.contains("receiver"));
    CHECK(j.contains("kind"));
    CHECK(j.contains("array"));
    CHECK(j.contains("index"));
    CHECK(j.contains("size_blocks"));
    const std::string kind = j["kind"];
    if (kind == "read_req") saw_read = true;
    if (kind == "write_req") saw_write = true;
    if (j["index"].is_null()) saw_null_index = true;
    const std::string who = j["sender"];
    CHECK((who == "client" || who == "s0" || who == "s1" || who == "s2"));
  }
  CHECK(lines > 100);
  CHECK(saw_read);
  CHECK(saw_write);
  CHECK(saw_null_index);
  std::remove(path.c_str());

  CHECK_THROWS_AS(dump_trace_jsonl(cfg, "/nonexistent-dir/x.jsonl"), std::ios_base::failure);
}

TEST_CASE("uniformity runs return one cell per server") {
  auto cells = run_index_uniformity(Protocol::otm, 4, 4, 120, 98, RandomSource::Mode::counter);
  REQUIRE(cells.size() == 3);
  for (const auto& c : cells) {
    CHECK(c.buckets == 8);
    CHECK(c.p >= 0.0);
    CHECK(c.p <= 1.0);
  }
  CHECK(run_index_uniformity(Protocol::otm, 4, 4, 0, 98, RandomSource::Mode::counter).empty());
}
