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

// Quantum stochastic walk generators on graphs and open-system propagation.
//
// Units: hbar = 1, energies and rates share the inverse-time base unit.
//
// Vectorization is column stacking: vec(rho)[i + d * j] = rho(i, j), so that
// vec(A rho B) = (B^T kron A) vec(rho).

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qsw/hilbert.hpp"

namespace qsw {

/// Coherent edge: weight * sigma^+_a sigma^-_b + h.c.
struct CoherentEdge {
  int a = 0;
  int b = 0;
  cplx weight{0.0, 0.0};
};

/// Directed incoherent edge: a walker hops from `from` to `to` at `rate`.
struct IncoherentEdge {
  int from = 0;
  int to = 0;
  double rate = 0.0;
};

class Graph {
 public:
  /// Validates: nodes >= 1, one onsite energy per node, no self-loops, no
  /// duplicate edges, finite weights, rates >= 0.
  Graph(int node_count, std::vector<double> onsite_energies,
        std::vector<CoherentEdge> coherent_edges, std::vector<IncoherentEdge> incoherent_edges);

  int node_count() const { return node_count_; }
  const std::vector<double>& onsite_energies() const { return onsite_; }
  const std::vector<CoherentEdge>& coherent_edges() const { return coherent_; }
  const std::vector<IncoherentEdge>& incoherent_edges() const { return incoherent_; }

  /// Same graph with every coherent term and onsite energy removed.
  Graph without_hamiltonian() const;
  /// Same graph with every incoherent edge removed.
  Graph without_jumps() const;

 private:
  int node_count_;
  std::vector<double> onsite_;
  std::vector<CoherentEdge> coherent_;
  std::vector<IncoherentEdge> incoherent_;
};

struct Jump {
  Operator op;
  double rate;
};

/// Hamiltonian plus weighted jump operators on one space.
class LindbladModel {
 public:
  LindbladModel(Operator hamiltonian, std::vector<Jump> jumps);

  const HilbertSpace& space() const { return hamiltonian_.space(); }
  const Operator& hamiltonian() const { return hamiltonian_; }
  const std::vector<Jump>& jumps() const { return jumps_; }

  /// d rho / dt evaluated directly on the matrix.
  Matrix apply(const Matrix& rho) const;

 private:
  Operator hamiltonian_;
  std::vector<Jump> jumps_;
};

class Superoperator {
 public:
  Superoperator(HilbertSpace space, Matrix matrix);
  const HilbertSpace& space() const { return space_; }
  const Matrix& matrix() const { return matrix_; }
  std::size_t dimension() const { return space_.dimension(); }
  static std::size_t vec_index(std::size_t row, std::size_t col, std::size_t dim) {
    return row + dim * col;
  }
  Matrix apply(const Matrix& rho) const;

 private:
  HilbertSpace space_;
  Matrix matrix_;
};

Vector vectorize(const Matrix& m);
Matrix unvectorize(const Vector& v, std::size_t dim);

Operator graph_hamiltonian(const Graph& graph, const HilbertSpace& space);
/// Each incoherent edge from -> to contributes sigma^+_to sigma^-_from at its rate.
LindbladModel qsw_generator(const Graph& graph, const HilbertSpace& space);
Superoperator liouvillian(const LindbladModel& model);

enum class Integrator { automatic, expm, rk45 };
std::string to_string(Integrator method);
Integrator integrator_from_string(const std::string& name);

struct PropagationOptions {
  Integrator method = Integrator::automatic;
  /// Dense exponentials are used up to this Liouvillian size (d^2) in automatic mode.
  std::size_t dense_limit = 4096;
  double rtol = 1e-10;
  double atol = 1e-12;
  /// Post-hoc tolerance for Hermiticity, trace and negativity of outputs.
  double check_tolerance = 1e-10;
  std::size_t max_steps = 2'000'000;
};

struct PropagationMetadata {
  Integrator method = Integrator::expm;
  double rtol = 0.0;
  double atol = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t exponentials = 0;
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  PropagationMetadata metadata;
};

/// rho(t) = exp(L t) rho0 for each requested time. Times must be ascending and
/// non-negative. Throws ToleranceNotMet when an output fails the state checks.
Trajectory propagate(const LindbladModel& model, const DensityMatrix& rho0,
                     std::span<const double> times, const PropagationOptions& options = {});

struct SteadyState {
  DensityMatrix state;
  /// ||L vec(rho_ss)||
  double residual;
  /// Smallest |Re lambda| among the nonzero Liouvillian eigenvalues (0 if d == 1).
  double gap;
};

/// Unique stationary state. Singular values below zero_tol * max(1, sigma_max)
/// count as zero; throws DegenerateSteadyState if there is more than one.
SteadyState steady_state(const LindbladModel& model, double zero_tol = 1e-12);

/// Rate matrix of the classical chain on the nodes: Q(to, from) = rate,
/// columns sum to zero.
RealMatrix rate_matrix(const Graph& graph);

/// Continuous-time Markov chain p(t) = exp(Q t) p0, independent of the
/// Lindblad machinery.
std::vector<RealVector> classical_oracle(const Graph& graph, const RealVector& p0,
                                         std::span<const double> times);

}  // namespace qsw
