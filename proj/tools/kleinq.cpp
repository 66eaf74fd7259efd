// kleinq: exact verification of the arrangement of the 21 reducible polars
// of the Klein quartic.  All decisions are made in exact arithmetic; the
// reports carry rationals as strings with decimal renderings for reading.

#include <cstdio>
#include <fstream>
#include <string>

#include "CLI11.hpp"
#include "klein/covariant.hpp"
#include "klein/suites.hpp"
#include "klein/symmetry.hpp"

namespace {

struct CommonFlags {
  bool long_running = false;
  bool no_cache = false;
  bool spot_check = false;
  std::string case_filter;
  std::string cache_dir;
  long budget_spairs = -1;
  double budget_wall = -1;

  klein::SuiteOptions to_options() const {
    klein::SuiteOptions opt;
    opt.long_running = long_running;
    opt.no_cache = no_cache;
    opt.spot_check = spot_check;
    opt.case_filter = case_filter;
    opt.cache_dir = cache_dir;
    opt.budget.max_spairs = budget_spairs;
    opt.budget.wall_seconds = budget_wall;
    return opt;
  }
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_flag("--long", f.long_running,
                "run the long Groebner/syzygy legs (hours with no budget)");
  cmd->add_flag("--no-cache", f.no_cache,
                "neither read nor write cached artifacts");
  cmd->add_option("--budget-spairs", f.budget_spairs,
                  "S-pair budget for Groebner runs (-1 = unlimited)");
  cmd->add_option("--budget-wall", f.budget_wall,
                  "wall-clock budget in seconds for budgeted legs");
  cmd->add_option("--cache-dir", f.cache_dir,
                  "cache directory (default $KLEINQ_CACHE_DIR or "
                  ".kleinq-cache)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "exact reconstruction and verification of the conic-line arrangement "
      "of the 21 reducible polars of the Klein quartic"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string suite = "all", out_path, format = "table";

  CLI::App* verify = app.add_subcommand(
      "verify", "run a verification suite and print its report");
  verify->add_option("SUITE", suite, "suite to run")
      ->check(CLI::IsMember(klein::suite_names()));
  verify->add_option("--suite", suite, "suite to run (same as the positional)")
      ->check(CLI::IsMember(klein::suite_names()));
  verify->add_option("--case", flags.case_filter,
                     "containment case filter: dual_hesse, klein_lines or "
                     "klein_mult3");
  verify->add_flag("--spot-check", flags.spot_check,
                   "re-verify one cached artifact byte for byte");
  verify->add_option("--out", out_path, "also write the report to this file");
  verify->add_option("--format", format, "report format")
      ->check(CLI::IsMember({"json", "table"}));
  add_common(verify, flags);

  CLI::App* recheck =
      app.add_subcommand("recheck", "replay a sealed certificate file");
  std::string cert_path;
  recheck->add_option("path", cert_path, "certificate file")
      ->required()
      ->check(CLI::ExistingFile);

  CLI::App* emit = app.add_subcommand("emit", "write a sealed certificate");
  std::string emit_id, emit_out;
  emit->add_option("id", emit_id,
                   "group | census | dual_hesse | klein_lines | klein_mult3 "
                   "| nested_mult3 | nested_mult3_plus_nodes")
      ->required();
  emit->add_option("--out", emit_out, "output file")->required();
  add_common(emit, flags);

  CLI::App* dump = app.add_subcommand(
      "dump", "print a canonical artifact dump and its content hash");
  std::string dump_what;
  dump->add_option("what", dump_what, "catalogue | group")
      ->required()
      ->check(CLI::IsMember({"catalogue", "group"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      klein::SuiteReport rep = klein::run_suite(suite, flags.to_options());
      std::string text = format == "json" ? rep.to_json().dump(2) + "\n"
                                          : rep.to_table();
      std::fputs(text.c_str(), stdout);
      if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw std::runtime_error("cannot write " + out_path);
        f << text;
        std::fprintf(stdout, "report written to %s\n", out_path.c_str());
      }
      return rep.all_passed() ? 0 : 1;
    }
    if (recheck->parsed()) {
      klein::Json env = klein::read_json_file(cert_path);
      klein::RecheckOutcome out = klein::recheck_certificate(env);
      std::fprintf(stdout, "replayed %ld checks: %s\n", out.checks,
                   out.ok ? "ok" : "FAILED");
      for (const std::string& f : out.failures)
        std::fprintf(stdout, "  failure: %s\n", f.c_str());
      return out.ok ? 0 : 1;
    }
    if (emit->parsed()) {
      klein::Json env = klein::emit_certificate(emit_id, flags.to_options());
      klein::write_json_file(emit_out, env);
      std::fprintf(stdout, "%s certificate sealed to %s (sha256 %s)\n",
                   env.at("kind").get<std::string>().c_str(), emit_out.c_str(),
                   env.at("sha256").get<std::string>().substr(0, 16).c_str());
      return 0;
    }
    if (dump->parsed()) {
      if (dump_what == "catalogue") {
        klein::InvariantCatalogue cat = klein::build_catalogue();
        std::fputs(cat.dump().c_str(), stdout);
        std::fprintf(stdout, "content_hash %s\n", cat.content_hash().c_str());
      } else {
        klein::GroupTable g = klein::build_group();
        std::fputs(g.dump().c_str(), stdout);
        std::fprintf(stdout, "content_hash %s\n", g.content_hash().c_str());
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
