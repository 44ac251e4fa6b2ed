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

// Experiment configs: strict JSON, unknown keys rejected, every error names the
// offending JSON pointer. Quantities are in one inverse-time unit system and
// the config must say so in its "units" block.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qsw/microscopic.hpp"
#include "qsw/walk.hpp"

namespace qsw {

enum class JobKind { simulate, analyze, engineer, verify };
std::string to_string(JobKind job);
JobKind job_from_string(const std::string& name);

struct Tolerances {
  double tol_freq = 1e-9;
  double verdict = 1e-12;
  double target_relative = 1e-4;
  double rtol = 1e-10;
  double atol = 1e-12;
  double check = 1e-10;
  double convergence = 1e-16;
};

struct SpaceChoice {
  enum class Kind { automatic, full, walker, sectors } kind = Kind::automatic;
  std::vector<int> sectors;
};

struct EngineerTarget {
  std::string from;
  std::string to;
  double rate = 0.0;
};

struct EngineerSettings {
  std::vector<EngineerTarget> targets;
  std::vector<std::pair<std::string, std::string>> zero_dephasing;
  int bath_count = 1;
  int starts = 16;
  int max_iterations = 200;
};

struct ExperimentConfig {
  JobKind job = JobKind::simulate;
  std::uint64_t seed = 0;
  std::optional<Graph> graph;
  SpaceChoice space;
  /// (label, weight); weights sum to one.
  std::vector<std::pair<std::string, double>> initial;
  std::vector<double> times;
  Integrator integrator = Integrator::automatic;
  bool coherences = false;
  bool steady_state = false;
  std::vector<Bath> baths;
  SpectralModel spectral{SpectralFamily::ohmic, 0.0, 1.0};
  double temperature = 0.0;
  Tolerances tolerances;
  EngineerSettings engineer;
  std::string stem;
  /// Canonical (key-sorted) form of the effective config; hashed into outputs.
  nlohmann::json canonical;

  std::string hash() const;
  HilbertSpace resolve_space() const;
  BathCouplingSpec bath_spec() const;
};

/// Command-line overrides applied to the document before validation.
struct ConfigOverrides {
  std::optional<JobKind> job;
  std::optional<std::uint64_t> seed;
  /// "key=value" sets tolerances.key; a bare number sets the job's primary tolerance.
  std::vector<std::string> tolerances;
};

ExperimentConfig parse_config(const nlohmann::json& document, const ConfigOverrides& overrides = {},
                              const std::string& default_stem = "experiment");
ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});

}  // namespace qsw
