#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "berglab/report.hpp"

namespace berglab::runner {

// Experiment driver behind the command-line tool.  Each subcommand maps a
// validated configuration to (a) a per-case CSV of numeric results and (b) a
// JSON summary holding every bound check with its pass/fail status.  Given the
// same configuration and seed the outputs are byte-identical, regardless of
// the thread count.

inline constexpr std::uint64_t kDefaultSeed = 20260815;

// The twelve experiment names, in documentation order.
const std::vector<std::string>& subcommand_names();
std::string subcommand_description(const std::string& name);

struct ConfigData;  // parsed + schema-validated document (internal)

struct ExperimentConfig {
  std::string subcommand;
  std::uint64_t seed = kDefaultSeed;
  std::string csv_name;      // file name inside the output directory
  std::string summary_name;  // file name of the JSON summary
  std::string source;        // where the config came from (path or "<default>")
  std::shared_ptr<const ConfigData> data;
};

// Built-in defaults for a subcommand (the same values README documents).
ExperimentConfig default_config(const std::string& subcommand);

// Parse and schema-validate a JSON config document.  Unknown keys, wrong
// types, and out-of-range values raise ConfigInvalid.  When both the document
// and `subcommand_hint` name a subcommand they must agree.
ExperimentConfig parse_config(const std::string& json_text,
                              const std::string& subcommand_hint = "",
                              const std::string& source = "<inline>");
ExperimentConfig load_config_file(const std::string& path,
                                  const std::string& subcommand_hint = "");

struct RunOptions {
  std::string out_dir = ".";
  int threads = 1;
  std::optional<std::uint64_t> seed;  // overrides the config seed
  bool strict = false;  // advisory (trend) rows count toward the exit code
};

struct RunResult {
  std::string subcommand;
  std::string csv_path;
  std::string summary_path;
  // Asserted inequalities: any failure here makes the run exit 1.
  std::vector<report::BoundReport> checks;
  // Trend observations (decay of defects along a level ladder, truncation
  // headroom).  Reported always, asserted only under strict mode.
  std::vector<report::BoundReport> advisories;
  bool pass = false;
  int exit_code = 2;  // 0 = pass, 1 = failed check; errors throw instead
};

// Executes the experiment, writes the CSV and the summary, and returns the
// collected reports.  Configuration and computation failures propagate as the
// library exception types (ConfigInvalid, MassMismatch, NonConvergent, ...)
// with the offending case named in the message; the CLI maps them to exit 2.
RunResult run(const ExperimentConfig& config, const RunOptions& options = {});

// argv-level entry point used by the binary: parses flags, loads the config
// (or defaults), runs, prints a short human summary, and returns the exit
// code (0 pass, 1 failed check, 2 configuration/convergence error).
int main_cli(int argc, const char* const* argv);

}  // namespace berglab::runner
