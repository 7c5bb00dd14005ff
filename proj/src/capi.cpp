#include "oram3/capi.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "harness.hpp"

using namespace oram3;

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
o3_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const ProtocolError& e) {
    g_last_error = e.what();
    return O3_EVIOLATION;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return O3_EINVAL;
  } catch (const std::ios_base::failure& e) {
    g_last_error = e.what();
    return O3_EIO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return O3_EINTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return O3_EINTERNAL;
  }
}

}  // namespace

struct o3_oram {
  OramSystem sys;
};

extern "C" {

const char* o3_status_name(o3_status s) {
  switch (s) {
    case O3_OK: return "ok";
    case O3_EINVAL: return "invalid-argument";
    case O3_ESTATE: return "invalid-state";
    case O3_EVIOLATION: return "violation";
    case O3_EIO: return "io-error";
    default: return "internal-error";
  }
}

const char* o3_last_error(void) { return g_last_error.c_str(); }

void o3_string_free(char* s) { std::free(s); }

o3_status o3_oram_create(uint64_t n, uint64_t seed, int big_blocks, o3_oram** out) {
  if (!out) {
    g_last_error = "null output handle";
    return O3_EINVAL;
  }
  *out = nullptr;
  return guarded([&]() {
    auto h = std::make_unique<o3_oram>();
    oram_init(h->sys, n, seed, big_blocks != 0);
    *out = h.release();
    return O3_OK;
  });
}

void o3_oram_destroy(o3_oram* h) {
  if (!h) return;
  free_oram(h->sys);
  delete h;
}

o3_status o3_oram_read(o3_oram* h, uint64_t addr, uint64_t* value_out) {
  if (!h || !value_out) {
    g_last_error = "null argument";
    return O3_EINVAL;
  }
  return guarded([&]() {
    *value_out = oram_read(h->sys, addr);
    return O3_OK;
  });
}

o3_status o3_oram_write(o3_oram* h, uint64_t addr, uint64_t value, uint64_t* old_out) {
  if (!h) {
    g_last_error = "null handle";
    return O3_EINVAL;
  }
  return guarded([&]() {
    uint64_t old = oram_write(h->sys, addr, value);
    if (old_out) *old_out = old;
    return O3_OK;
  });
}

o3_status o3_oram_stats_json(o3_oram* h, char** json_out) {
  if (!h || !json_out) {
    g_last_error = "null argument";
    return O3_EINVAL;
  }
  return guarded([&]() {
    nlohmann::ordered_json j;
    j["n"] = h->sys.n;
    j["big_blocks"] = h->sys.big;
    j["data_block_bytes"] = h->sys.w.data;
    j["accesses"] = h->sys.t;
    j["blocks_moved"] = h->sys.net.meter().blocks;
    j["bytes_moved"] = h->sys.net.meter().bytes;
    j["rounds"] = h->sys.net.round();
    *json_out = dup_string(j.dump(2));
    return *json_out ? O3_OK : O3_EINTERNAL;
  });
}

o3_status o3_verify(uint64_t n, uint64_t ops, uint64_t seed, char** json_out) {
  if (!json_out) {
    g_last_error = "null output";
    return O3_EINVAL;
  }
  return guarded([&]() {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    uint64_t mismatches = 0;
    std::vector<std::string> violations;
    for (harness::Workload w : {harness::Workload::uniform, harness::Workload::adversarial_repeat,
                                harness::Workload::sequential}) {
      harness::ExperimentConfig cfg;
      cfg.n = n;
      cfg.ops = ops;
      cfg.seed = seed;
      cfg.workload = w;
      harness::OracleReplayResult r = harness::run_oracle_replay(cfg);
      mismatches += r.mismatches;
      violations.insert(violations.end(), r.violations.begin(), r.violations.end());
      nlohmann::ordered_json row;
      row["workload"] = harness::workload_name(w);
      row["ops"] = r.ops;
      row["mismatches"] = r.mismatches;
      row["seconds"] = r.seconds;
      row["blocks_per_access"] = r.blocks_per_access;
      rows.push_back(row);
    }
    nlohmann::ordered_json j;
    j["n"] = n;
    j["ops"] = ops;
    j["seed"] = seed;
    j["workloads"] = rows;
    j["mismatches_total"] = mismatches;
    j["ok"] = mismatches == 0;
    j["violations"] = violations;
    *json_out = dup_string(j.dump(2));
    if (!*json_out) return O3_EINTERNAL;
    if (mismatches) {
      g_last_error = "oracle mismatches: " + std::to_string(mismatches);
      return O3_EVIOLATION;
    }
    return O3_OK;
  });
}

o3_status o3_audit(uint64_t n, uint64_t ops, uint64_t trials, uint64_t seed, char** json_out) {
  if (!json_out) {
    g_last_error = "null output";
    return O3_EINVAL;
  }
  return guarded([&]() {
    harness::ExperimentConfig cfg;
    cfg.n = n;
    cfg.ops = ops;
    cfg.seed = seed;
    harness::AuditReport r = harness::run_full_audit(cfg, trials);
    *json_out = dup_string(harness::audit_report_json(r));
    if (!*json_out) return O3_EINTERNAL;
    if (!r.violations.empty() || !r.pattern_equal || !r.seed_invariant ||
        !r.chi_pass_bonferroni) {
      g_last_error = "audit reported violations";
      return O3_EVIOLATION;
    }
    return O3_OK;
  });
}

o3_status o3_bench(const uint64_t* sizes, size_t count, int big_blocks, uint64_t seed,
                   char** json_out) {
  if (!json_out || (!sizes && count)) {
    g_last_error = "null argument";
    return O3_EINVAL;
  }
  return guarded([&]() {
    std::vector<uint64_t> sz(sizes, sizes + count);
    harness::BandwidthSuite s = harness::run_bandwidth_suite(sz, big_blocks != 0, seed);
    *json_out = dup_string(harness::bandwidth_json(s));
    return *json_out ? O3_OK : O3_EINTERNAL;
  });
}

o3_status o3_trace(uint64_t n, uint64_t ops, uint64_t seed, const char* path) {
  if (!path) {
    g_last_error = "null path";
    return O3_EINVAL;
  }
  return guarded([&]() {
    harness::ExperimentConfig cfg;
    cfg.n = n;
    cfg.ops = ops;
    cfg.seed = seed;
    harness::dump_trace_jsonl(cfg, path);
    return O3_OK;
  });
}

}  // extern "C"
