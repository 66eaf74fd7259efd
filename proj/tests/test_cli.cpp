#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "klein/sha256.hpp"
#include "klein/suites.hpp"

using namespace klein;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("kleinq-test-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Json report_without_timings(const SuiteReport& rep) {
  Json j = rep.to_json();
  for (Json& c : j.at("checks")) c.erase("seconds");
  return j;
}

const ArrangementModel& shared_model() {
  static ArrangementModel m = build_arrangement();
  return m;
}

}  // namespace

TEST_CASE("suite registry rejects unknown names") {
  auto names = suite_names();
  CHECK(names.size() == 10);
  CHECK(std::count(names.begin(), names.end(), "group") == 1);
  CHECK(std::count(names.begin(), names.end(), "all") == 1);
  SuiteOptions opt;
  opt.no_cache = true;
  auto thrown_with = [&](const std::string& suite, const char* text) {
    try {
      run_suite(suite, opt);
    } catch (const std::runtime_error& e) {
      return std::string(e.what()).find(text) != std::string::npos;
    }
    return false;
  };
  CHECK(thrown_with("nonsense", "unknown suite"));
  opt.case_filter = "nonsense";
  CHECK(thrown_with("containment", "unknown containment case"));
}

TEST_CASE("group suite passes with exact values and artifact hashes") {
  SuiteOptions opt;
  opt.no_cache = true;
  SuiteReport rep = run_suite("group", opt);
  CHECK(rep.suite == "group");
  CHECK(rep.all_passed());
  REQUIRE(rep.checks.size() == 3);
  CHECK(rep.checks[0].id == "group-order");
  CHECK(rep.checks[0].values.at("order") == "168");
  CHECK(rep.checks[2].values.at("involutions") == "21");
  CHECK(!rep.toolchain.empty());
  CHECK(rep.artifact_hashes.count("group") == 1);
  CHECK(rep.artifact_hashes.at("group").size() == 64);
  for (const CheckResult& c : rep.checks) {
    CHECK(!c.claim.empty());
    CHECK(c.status == "pass");
  }
}

TEST_CASE("orbit suite passes and reports signatures") {
  SuiteOptions opt;
  opt.no_cache = true;
  SuiteReport rep = run_suite("orbits", opt);
  CHECK(rep.all_passed());
  REQUIRE(rep.checks.size() == 5);
  CHECK(rep.checks[0].values.at("orbit_size") == "24");
  CHECK(rep.checks[1].values.at("orbit_size") == "28");
  CHECK(rep.checks[2].values.at("orbit_size") == "21");
  CHECK(rep.checks[3].values.at("orbit_size") == "56");
  CHECK(rep.checks[4].id == "orbit-noncontainment");
}

TEST_CASE("json and table renderings agree on the outcome") {
  SuiteOptions opt;
  opt.no_cache = true;
  SuiteReport rep = run_suite("group", opt);
  Json j = rep.to_json();
  CHECK(j.at("summary").at("total").get<long>() == 3);
  CHECK(j.at("summary").at("passed").get<long>() == 3);
  CHECK(j.at("summary").at("all_passed").get<bool>());
  std::string table = rep.to_table();
  CHECK(table.find("[PASS] group-order") != std::string::npos);
  CHECK(table.find("3 passed") != std::string::npos);
  CHECK(table.find("FAIL") == std::string::npos);
}

TEST_CASE("cache round trip is byte-identical and --no-cache writes nothing") {
  TempDir tmp;
  SuiteOptions opt;
  opt.cache_dir = tmp.path.string();

  SuiteReport cold = run_suite("group", opt);
  CHECK(cold.all_passed());
  CHECK(fs::exists(tmp.path / "group.json"));

  SuiteReport warm = run_suite("group", opt);
  CHECK(warm.all_passed());
  CHECK(report_without_timings(cold).dump() ==
        report_without_timings(warm).dump());

  TempDir empty;
  SuiteOptions off;
  off.cache_dir = empty.path.string();
  off.no_cache = true;
  SuiteReport rep = run_suite("group", off);
  CHECK(rep.all_passed());
  CHECK(!fs::exists(empty.path / "group.json"));
}

TEST_CASE("cache drift is reported as a failure") {
  TempDir tmp;
  SuiteOptions opt;
  opt.cache_dir = tmp.path.string();
  CHECK(run_suite("group", opt).all_passed());

  Json entry = read_json_file((tmp.path / "group.json").string());
  entry["payload"] = entry.at("payload").get<std::string>() + "tampered";
  write_json_file((tmp.path / "group.json").string(), entry);

  SuiteReport rep = run_suite("group", opt);
  CHECK(!rep.all_passed());
  bool drift_flagged = false;
  for (const CheckResult& c : rep.checks)
    if (c.status == "fail" && c.detail.find("cache drift") != std::string::npos)
      drift_flagged = true;
  CHECK(drift_flagged);
}

TEST_CASE("spot check verifies a cached artifact on a warm cache") {
  TempDir tmp;
  SuiteOptions opt;
  opt.cache_dir = tmp.path.string();
  CHECK(run_suite("group", opt).all_passed());

  opt.spot_check = true;
  SuiteReport rep = run_suite("group", opt);
  CHECK(rep.all_passed());
  REQUIRE(rep.checks.back().id == "cache-spot-check");
  CHECK(rep.checks.back().status == "pass");
  CHECK(rep.checks.back().values.at("artifact") == "group");
}

TEST_CASE("group certificate emits, rechecks and resists tampering") {
  GroupTable g = build_group();
  Json env = group_certificate(g);
  CHECK(env.at("kind") == "group");
  CHECK(env.at("sha256").get<std::string>().size() == 64);

  RecheckOutcome ok = recheck_certificate(env);
  CHECK(ok.ok);
  CHECK(ok.checks > 500);  // one per generator product plus the censuses
  CHECK(ok.failures.empty());

  // Flipping one byte of the body breaks the digest.
  Json forged = env;
  forged["body"]["order"] = 167;
  RecheckOutcome bad = recheck_certificate(forged);
  CHECK(!bad.ok);
  REQUIRE(!bad.failures.empty());
  CHECK(bad.failures[0].find("replay error") != std::string::npos);

  // Re-sealing a modified body passes the digest but fails the replay.
  Json body = env.at("body");
  body["elements"].erase(body["elements"].size() - 1);
  body["order"] = 167;
  Json resealed;
  resealed["kind"] = "group";
  resealed["version"] = env.at("version");
  resealed["body"] = body;
  resealed["sha256"] = Sha256::hash_hex(body.dump());
  RecheckOutcome replay = recheck_certificate(resealed);
  CHECK(!replay.ok);
  CHECK(!replay.failures.empty());
}

TEST_CASE("census certificate emits, rechecks and resists tampering") {
  const ArrangementModel& m = shared_model();
  Json env = census_certificate(m);
  CHECK(env.at("kind") == "census");

  RecheckOutcome ok = recheck_certificate(env);
  CHECK(ok.ok);
  CHECK(ok.checks > 1000);  // several per point plus the global identities
  CHECK(ok.failures.empty());

  // A census that claims a different tally must fail the recount.
  Json body = env.at("body");
  body["census"]["pair"]["2"] = 41;
  Json resealed;
  resealed["kind"] = "census";
  resealed["version"] = env.at("version");
  resealed["body"] = body;
  resealed["sha256"] = Sha256::hash_hex(body.dump());
  RecheckOutcome bad = recheck_certificate(resealed);
  CHECK(!bad.ok);
  bool tally_flagged = false;
  for (const std::string& f : bad.failures)
    if (f.find("census drifted") != std::string::npos) tally_flagged = true;
  CHECK(tally_flagged);

  // Unknown kinds are rejected without replaying anything.
  Json unknown = env;
  unknown["kind"] = "something-else";
  RecheckOutcome rejected = recheck_certificate(unknown);
  CHECK(!rejected.ok);
  REQUIRE(!rejected.failures.empty());
  CHECK(rejected.failures[0].find("unknown certificate kind") !=
        std::string::npos);
}

TEST_CASE("cli binary honors the exit-code contract") {
  // The binary sits next to the test executable in the build tree; skip
  // quietly when running from an unexpected working directory.
  if (!fs::exists("kleinq")) {
    MESSAGE("kleinq binary not found in the working directory; skipping");
    return;
  }
  TempDir tmp;
  std::string cache = " --cache-dir " + tmp.path.string();
  auto run = [&](const std::string& args) {
    int rc = std::system(("./kleinq " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
  };
  CHECK(run("verify group" + cache) == 0);
  CHECK(run("verify nonsense" + cache) != 0);
  CHECK(run("verify containment --case nonsense" + cache) != 0);

  // recheck: a valid certificate exits 0, a tampered one exits 1.
  GroupTable g = build_group();
  Json env = group_certificate(g);
  std::string good = (tmp.path / "group-cert.json").string();
  write_json_file(good, env);
  CHECK(run("recheck " + good) == 0);
  env["body"]["order"] = 167;
  std::string bad = (tmp.path / "group-cert-bad.json").string();
  write_json_file(bad, env);
  CHECK(run("recheck " + bad) == 1);
}
