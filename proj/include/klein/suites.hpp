#pragma once

#include <map>
#include <string>
#include <vector>

#include "klein/arrangement.hpp"
#include "klein/certificate.hpp"
#include "klein/containment.hpp"

namespace klein {

// One verification item: a self-contained claim, a pass/fail/skipped status,
// and the exact values it rests on (rationals as strings, with a separate
// presentation-only decimal rendering).
struct CheckResult {
  std::string id;
  std::string claim;
  std::string status;  // "pass" | "fail" | "skipped-long-running"
  std::map<std::string, std::string> values;
  std::map<std::string, std::string> decimals;
  double seconds = 0;
  std::string detail;  // failure reason or skip reason
};

struct SuiteOptions {
  bool long_running = false;  // unlock the multi-hour Groebner/syzygy legs
  bool no_cache = false;      // neither read nor write the artifact cache
  bool spot_check = false;    // re-verify one cached artifact byte-for-byte
  std::string case_filter;    // containment suite: run only this case
  GroebnerBudget budget;      // spair/wall budgets for the long legs
  std::string cache_dir;      // empty: resolve KLEINQ_CACHE_DIR, else default
};

struct SuiteReport {
  std::string suite;
  std::string toolchain;
  std::vector<CheckResult> checks;
  std::map<std::string, std::string> artifact_hashes;

  bool all_passed() const;  // skipped-long-running does not fail
  Json to_json() const;
  std::string to_table() const;
};

std::vector<std::string> suite_names();

// Runs one named suite (or "all") and returns the assembled report.
// Unknown names throw.
SuiteReport run_suite(const std::string& name, const SuiteOptions& opt = {});

// Directory used for cached artifacts and checkpoints: the explicit option,
// else $KLEINQ_CACHE_DIR, else ".kleinq-cache".
std::string cache_directory(const SuiteOptions& opt);

// Sealed certificate envelopes for offline replay.  Supported ids: "group",
// "census", the containment cases and the nested-family labels.
Json emit_certificate(const std::string& check_id, const SuiteOptions& opt);

// Replay-only validation dispatched on the envelope kind; never reruns a
// Groebner computation.
RecheckOutcome recheck_certificate(const Json& envelope);

// The individual certificate builders and replayers (exposed for tests).
Json group_certificate(const GroupTable& g);
RecheckOutcome recheck_group(const Json& envelope);
Json census_certificate(const ArrangementModel& m);
RecheckOutcome recheck_census(const Json& envelope);

}  // namespace klein
