#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "slicekit/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"slicekit: vertical-slice flow simulator and verifier"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(slicekit::cli::kVersion));

  std::string config_path, out_dir = "out";
  CLI::App* run = app.add_subcommand("run", "integrate a configured model run");
  run->add_option("--config", config_path, "configuration file")->required();
  run->add_option("--out", out_dir, "output directory");

  std::string suite, level = "quick", verify_out;
  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", suite, "algebra|conservation|noether")->required();
  verify->add_option("--level", level, "quick|full");
  verify->add_option("--out", verify_out, "scratch directory (unused)");

  slicekit::cli::DiagnoseOptions dopt;
  std::string snapshot_path;
  CLI::App* diag = app.add_subcommand("diagnose", "report invariants of a snapshot");
  diag->add_option("snapshot", snapshot_path, "snapshot file")->required();
  diag->add_option("--config", dopt.config_path, "configuration file (default: config.ini next to the snapshot)");
  diag->add_option("--loops", dopt.loops, "loop spec cx,cz,rx,rz,n[;...] overriding the configuration");
  diag->add_option("--csv", dopt.csv_path, "append a diagnostics row to this CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return slicekit::cli::cmd_run(config_path, out_dir);
    if (verify->parsed()) return slicekit::cli::cmd_verify(suite, level, verify_out);
    if (diag->parsed()) return slicekit::cli::cmd_diagnose(snapshot_path, dopt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
