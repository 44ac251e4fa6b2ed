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

// Seeded random instances for property checks. Draws are built from raw
// mt19937_64 output so a seed reproduces the same instance on any platform.

#include <cstdint>
#include <random>
#include <vector>

#include "qsw/microscopic.hpp"
#include "qsw/walk.hpp"

namespace qsw {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Inclusive integer range.
  int integer(int lo, int hi);
  double normal();
  cplx complex_normal() { return {normal(), normal()}; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

Matrix random_hermitian(Rng& rng, std::size_t dim, double scale = 1.0);

/// Random Hermitian Hamiltonian plus `jumps` random (non-Hermitian) jump operators.
LindbladModel random_lindblad(Rng& rng, const HilbertSpace& space, int jumps);

struct RandomGraphOptions {
  /// Probability of each coherent edge; 1 gives the complete graph.
  double coherent_density = 1.0;
  double incoherent_density = 0.0;
  bool complex_weights = true;
  double onsite_spread = 1.0;
};

Graph random_graph(Rng& rng, int nodes, const RandomGraphOptions& options = {});

struct RandomSpecOptions {
  std::vector<CouplingKind> kinds{CouplingKind::z};
  int baths_per_kind = 2;
  SpectralModel spectral{SpectralFamily::ohmic, 0.1, 5.0};
  double temperature = 0.5;
};

BathCouplingSpec random_spec(Rng& rng, int nodes, const RandomSpecOptions& options = {});

/// x (or y) spec whose coefficients sum to zero on every node.
BathCouplingSpec zero_sum_spec(Rng& rng, int nodes, CouplingKind kind, int baths,
                               SpectralModel spectral, double temperature);

/// Draws graphs until the Hamiltonian on `space` has nondegenerate transitions.
Eigensystem random_nondegenerate(Rng& rng, const HilbertSpace& space,
                                 const RandomGraphOptions& options = {}, double tol_freq = 1e-9,
                                 int max_attempts = 64);

}  // namespace qsw
