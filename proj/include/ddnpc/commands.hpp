/*
 Copyright 2026 The ddnpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

// Driver subcommands. Each returns a process exit code; errors surface as
// exceptions and are mapped by exit_code_for.

#include "ddnpc/config.hpp"

#include <exception>
#include <filesystem>
#include <iosfwd>

namespace ddnpc {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitInfeasible = 3,
  kExitNumerical = 4,
};

/// Files read and written by the subcommands, relative to the output directory.
namespace files {
inline constexpr const char* kData = "data.csv";
inline constexpr const char* kDataClean = "data_clean.csv";
inline constexpr const char* kValidation = "validation.csv";
inline constexpr const char* kCertificate = "pe_certificate.json";
inline constexpr const char* kConstants = "constants.json";
inline constexpr const char* kRecord = "record.csv";
inline constexpr const char* kStates = "states.csv";
inline constexpr const char* kSolutions = "solutions.csv";
inline constexpr const char* kSummary = "summary.json";
inline constexpr const char* kReport = "stability_report.json";
inline constexpr const char* kLemma = "lemma1.csv";
inline constexpr const char* kConfig = "config.json";
}  // namespace files

int cmd_collect(const ExperimentConfig& cfg, std::ostream& log);
int cmd_fit(const ExperimentConfig& cfg, std::ostream& log);
int cmd_run(const ExperimentConfig& cfg, std::ostream& log);
int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log);
int cmd_verify_bound(const ExperimentConfig& cfg, std::ostream& log);

/// Maps an exception escaping a subcommand to its exit code.
int exit_code_for(const std::exception& e);

}  // namespace ddnpc
