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

// Coupling engineering for z-kind baths: choose coefficients so that chosen
// local coherences do not dephase while chosen hopping rates hit targets.
// Also hosts an independent secular-generator construction used as an oracle.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsw/microscopic.hpp"

namespace qsw {

/// Requested local rate `from -> to` (basis indices of the Hamiltonian's space).
struct RateTarget {
  std::size_t to = 0;
  std::size_t from = 0;
  double rate = 0.0;
};

struct BasisPair {
  std::size_t m = 0;
  std::size_t n = 0;
};

struct EngineeringProblem {
  Operator hamiltonian;
  std::vector<RateTarget> targets;
  std::vector<BasisPair> zero_dephasing_pairs;
  int bath_count = 1;
  SpectralModel spectral;
  double temperature = 0.0;
};

struct SolverOptions {
  int starts = 16;
  int max_iterations = 200;
  /// Objective (rates normalized by the largest target) below this is converged.
  double convergence = 1e-16;
  double tol_freq = 1e-9;
  bool record_trace = true;
  int threads = 1;
};

enum class SolveStatus { converged, infeasible_certified, max_iterations };
std::string to_string(SolveStatus status);

struct TraceEntry {
  int start = 0;
  int iteration = 0;
  double objective = 0.0;
};

struct TargetResult {
  RateTarget target;
  double achieved = 0.0;
  double relative_error = 0.0;
};

struct DephasingResult {
  BasisPair pair;
  cplx achieved{0.0, 0.0};
};

/// Lower bound on the objective from complete positivity of the secular
/// generator: |R_{mn,mn}| >= (out_m + out_n) / 2, and out_m >= any rate leaving m.
struct InfeasibilityCertificate {
  bool applies = false;
  double objective_lower_bound = 0.0;
  std::string reason;
};

struct EngineeringSolution {
  HilbertSpace space;          ///< space of the problem Hamiltonian
  HilbertSpace reduced_space;  ///< excitation sectors actually diagonalized
  std::vector<Bath> baths;
  std::vector<double> coefficients;  ///< concatenation of all bath coefficients
  std::vector<double> node_coupling;  ///< sum over baths per node
  std::vector<TargetResult> targets;
  std::vector<DephasingResult> dephasing;
  std::vector<double> residuals;
  double rate_reference = 1.0;
  double objective = 0.0;
  SolveStatus status = SolveStatus::max_iterations;
  int best_start = 0;
  int iterations = 0;
  std::vector<TraceEntry> trace;
  InfeasibilityCertificate certificate;
  /// Max deviation between the solver's values and a from-scratch recomputation.
  double recomputation_error = 0.0;
  std::uint64_t seed = 0;
  SpectralModel spectral;
  double temperature = 0.0;

  BathCouplingSpec spec() const;
};

/// Throws InvalidTarget for targets between different excitation numbers,
/// DegenerateTransitions when the reduced block is degenerate.
EngineeringSolution solve(const EngineeringProblem& problem, std::uint64_t seed,
                          const SolverOptions& options = {});

/// Certificate for the problem as posed (no optimization needed); applies when
/// the objective bound reaches `threshold`.
InfeasibilityCertificate positivity_certificate(const EngineeringProblem& problem,
                                               double threshold = 1e-16);

struct SecularGenerator {
  Superoperator local;          ///< full generator in the local basis
  RealMatrix populations;       ///< R_{mm,nn}
  Matrix coherences;            ///< R_{mn,mn}
};

/// Davies generator assembled from eigenbasis jump operators and rotated to the
/// local basis; no overlap tensors involved. Requires dimension <= 16.
SecularGenerator brute_force_secular(const Operator& hamiltonian, const BathCouplingSpec& spec,
                                     double tol_freq = 1e-9);

}  // namespace qsw
