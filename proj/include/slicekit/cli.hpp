#pragma once

#include <string>

namespace slicekit::cli {

inline constexpr const char* kVersion = "1.0.0";

// Exit codes shared by every command:
//   0 success, 1 usage/config error, 2 numerical failure, 3 verification
//   failure.

// Runs the configured simulation into out_dir: diagnostics.csv, field
// snapshots, manifest.json, and a verbatim config copy. On blow-up the
// partial outputs are kept and the manifest records the failure.
int cmd_run(const std::string& config_path, const std::string& out_dir);

struct DiagnoseOptions {
  std::string config_path;  // empty: config.ini next to the snapshot
  std::string loops;        // "cx,cz,rx,rz,n[;...]" overriding the config loops
  std::string csv_path;     // nonempty: also append a diagnostics-format row
};

// Recomputes energy, PV statistics, and loop circulations from a snapshot.
int cmd_diagnose(const std::string& snapshot_path, const DiagnoseOptions& opt);

// suite: algebra | conservation | noether; level: quick | full.
// Prints one pass/fail line per property with the measured numbers.
// out_dir, when nonempty, receives scratch run output.
int cmd_verify(const std::string& suite, const std::string& level,
               const std::string& out_dir);

}  // namespace slicekit::cli
