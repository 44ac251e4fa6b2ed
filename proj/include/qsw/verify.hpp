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

// Built-in invariant suites run by `qswr verify` and the acceptance tests.

#include <cstdint>
#include <string>
#include <vector>

namespace qsw {

struct SuiteResult {
  std::string name;
  bool passed = false;
  int instances = 0;
  int failures = 0;
  /// Worst observed value of the suite's metric and the bound it is held to.
  double worst = 0.0;
  double bound = 0.0;
  std::vector<std::string> messages;
};

/// Zero-sum x couplings kill every eigen rate; one broken node sum revives
/// excitation-changing local rates.
SuiteResult decoupling_suite(std::uint64_t seed, int instances = 50);
/// z couplings on number-conserving graphs never connect different sectors,
/// and a two-node instance moves a walker between the nodes.
SuiteResult sector_suite(std::uint64_t seed, int instances = 50);
/// Tensor contraction against the brute-force secular generator.
SuiteResult oracle_suite(std::uint64_t seed, int instances = 25);
/// Boltzmann ratio of up and down rates at three temperatures.
SuiteResult detailed_balance_suite(std::uint64_t seed, int instances = 20);

std::vector<SuiteResult> run_verification(std::uint64_t seed);

}  // namespace qsw
