#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oram3/capi.h"

namespace {

std::uint64_t seed_from(const CLI::Option* opt, std::uint64_t flag_value) {
  if (opt->count() > 0) return flag_value;
  if (const char* env = std::getenv("ORAM3_SEED")) return std::strtoull(env, nullptr, 0);
  return 0;
}

int finish(o3_status st, char* json) {
  if (json) {
    std::fputs(json, stdout);
    std::fputc('\n', stdout);
    o3_string_free(json);
  }
  if (st != O3_OK) std::fprintf(stderr, "error: %s (%s)\n", o3_last_error(), o3_status_name(st));
  return static_cast<int>(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"three-server oblivious store: verification, audits, benchmarks, tracing"};
  app.require_subcommand(1);

  std::uint64_t n = 0, ops = 0, seed = 0, trials = 4000;
  std::string out_path;
  std::vector<std::uint64_t> sizes;
  bool big = false;

  CLI::App* verify = app.add_subcommand("verify", "replay workloads against a reference array");
  verify->add_option("--n", n, "store capacity (power of two)")->required();
  verify->add_option("--ops", ops, "operations per workload")->required();
  CLI::Option* verify_seed = verify->add_option("--seed", seed, "base seed");

  CLI::App* audit = app.add_subcommand("audit", "pattern-equality and uniformity audits");
  audit->add_option("--n", n, "store capacity (power of two)")->required();
  audit->add_option("--ops", ops, "requests per audited sequence")->required();
  audit->add_option("--trials", trials, "chi-square sample count");
  CLI::Option* audit_seed = audit->add_option("--seed", seed, "base seed");

  CLI::App* bench = app.add_subcommand("bench", "bandwidth sweep with scaling fits");
  bench->add_option("--sizes", sizes, "comma-separated capacities")->delimiter(',')->required();
  bench->add_flag("--big-blocks", big, "widen payloads to ~log^2(n) bits");
  CLI::Option* bench_seed = bench->add_option("--seed", seed, "base seed");

  CLI::App* trace = app.add_subcommand("trace", "dump a JSONL network trace");
  trace->add_option("--n", n, "store capacity (power of two)")->required();
  trace->add_option("--ops", ops, "accesses to trace")->required();
  trace->add_option("--out", out_path, "output path")->required();
  CLI::Option* trace_seed = trace->add_option("--seed", seed, "base seed");

  CLI11_PARSE(app, argc, argv);

  char* json = nullptr;
  if (verify->parsed()) {
    const o3_status st = o3_verify(n, ops, seed_from(verify_seed, seed), &json);
    return finish(st, json);
  }
  if (audit->parsed()) {
    const o3_status st = o3_audit(n, ops, trials, seed_from(audit_seed, seed), &json);
    return finish(st, json);
  }
  if (bench->parsed()) {
    const o3_status st =
        o3_bench(sizes.data(), sizes.size(), big ? 1 : 0, seed_from(bench_seed, seed), &json);
    return finish(st, json);
  }
  if (trace->parsed()) {
    const o3_status st = o3_trace(n, ops, seed_from(trace_seed, seed), out_path.c_str());
    if (st == O3_OK) std::printf("wrote %s\n", out_path.c_str());
    return finish(st, nullptr);
  }
  return 0;
}
