#pragma once

#include "config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace flowrecon::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1; // some per-day work items failed
inline constexpr int kExitError = 2;

// Hex SHA-256 of a file's bytes. Throws Io.
std::string sha256_file(const std::filesystem::path& path);

// Output layout under config.out:
//   corpus.csv, synth_manifest.json                  synth
//   days/<sensor>/<date>.csv, days/index.json,
//   gap_report.{csv,json}, ingest_log.csv            ingest
//   matrix_s<n>.{csv,json}                           matrix
//   results_s<n>/{days/,day_results.*,manifest.json} reconstruct
//   report/{summary.csv,summary.json,plot_data.csv}  report
// Library errors propagate as flowrecon::Error; the caller maps them to kExitError.
int cmd_synth(const RunConfig& config, std::ostream& log);
int cmd_ingest(const RunConfig& config, std::ostream& log);
int cmd_matrix(const RunConfig& config, std::ostream& log);
int cmd_reconstruct(const RunConfig& config, std::ostream& log);
int cmd_report(const RunConfig& config, std::ostream& log);

} // namespace flowrecon::cli
