// Copyright 2026 The qswr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Batch front end behind the `qswr` executable.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qsw/config.hpp"

namespace qsw {

inline constexpr const char* kToolName = "qswr";
inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitDegenerate = 3,
  kExitVerification = 4,
  kExitNotConverged = 5,
  kExitInvalidTarget = 6,
  kExitTolerance = 7,
  kExitSteadyState = 8,
};

struct JobResult {
  int code = kExitOk;
  std::string message;
  /// (file name, contents); written only as a complete set.
  std::vector<std::pair<std::string, std::string>> files;
};

/// Runs one validated config in memory; domain errors are mapped to exit codes.
JobResult run_job(const ExperimentConfig& config);

/// Writes every file through a temporary name and renames once all are on disk.
void write_atomically(const std::string& directory,
                      const std::vector<std::pair<std::string, std::string>>& files);

/// Full command line: `qswr <simulate|analyze|engineer|verify> --config PATH ...`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qsw
