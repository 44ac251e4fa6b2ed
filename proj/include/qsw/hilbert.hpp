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

// Operator and state algebra on the qubit register of a graph.
//
// Basis convention: a basis state is an occupation bitmask over the nodes,
// node 0 being the least significant bit. Basis states are ordered by that
// integer. The printable label of a state has one character per node, with
// character j giving the occupation of node j ("01" = node 1 occupied).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qsw/errors.hpp"

namespace qsw {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

enum class SpaceMode { full, sectors };

/// Single-node operator kinds. raise = sigma^+ = |1><0|, lower = sigma^- = |0><1|.
enum class LocalKind { x, y, z, raise, lower };

/// State space of the walker register: either the full 2^n register or a
/// union of fixed-excitation-number sectors. Cheap to copy; immutable.
class HilbertSpace {
 public:
  static HilbertSpace full(int node_count);
  /// Union of the given excitation-number sectors, e.g. {0, 1} for the
  /// vacuum plus single-walker states (dimension n + 1).
  static HilbertSpace sectors(int node_count, std::vector<int> excitations);
  static HilbertSpace walker(int node_count) { return sectors(node_count, {0, 1}); }

  SpaceMode mode() const;
  int node_count() const;
  std::size_t dimension() const;
  /// Excitation numbers present, ascending.
  const std::vector<int>& excitations() const;

  std::uint64_t occupation(std::size_t index) const;
  int excitation_number(std::size_t index) const;
  const std::string& label(std::size_t index) const;
  const std::vector<std::string>& labels() const;

  std::optional<std::size_t> find(std::uint64_t occupation) const;
  /// Index of a label; throws IndexOutOfRange when not represented.
  std::size_t index_of(std::string_view label) const;

  /// Indices of all basis states holding exactly `excitations` walkers.
  std::vector<std::size_t> sector_indices(int excitations) const;

  bool operator==(const HilbertSpace& other) const;
  bool operator!=(const HilbertSpace& other) const { return !(*this == other); }

 private:
  struct Data;
  explicit HilbertSpace(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  std::shared_ptr<const Data> data_;
};

/// Hamming weight of an occupation label. Throws InvalidArgument for
/// characters other than '0' and '1'.
int excitation_number(std::string_view label);
std::uint64_t parse_label(std::string_view label);
std::string format_label(std::uint64_t occupation, int node_count);

class Operator {
 public:
  Operator(HilbertSpace space, Matrix matrix);

  static Operator zero(const HilbertSpace& space);
  static Operator identity(const HilbertSpace& space);

  const HilbertSpace& space() const { return space_; }
  const Matrix& matrix() const { return matrix_; }
  std::size_t dimension() const { return space_.dimension(); }

  /// max |A - A^dagger|
  double hermiticity_error() const;
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_error() < tol; }
  /// True when no matrix element connects states of different excitation number.
  bool conserves_excitation_number(double tol = 0.0) const;

  Operator adjoint() const;

  Operator& operator+=(const Operator& other);
  Operator& operator-=(const Operator& other);
  Operator& operator*=(cplx scale);

 private:
  HilbertSpace space_;
  Matrix matrix_;
};

Operator operator+(Operator lhs, const Operator& rhs);
Operator operator-(Operator lhs, const Operator& rhs);
Operator operator*(const Operator& lhs, const Operator& rhs);
Operator operator*(cplx scale, Operator op);
/// Commutator [A, B].
Operator commutator(const Operator& a, const Operator& b);

/// Embedded single-node operator. Throws IndexOutOfRange for a bad node and
/// SectorViolation when the operator leaves the represented sectors.
Operator local_operator(const HilbertSpace& space, int node, LocalKind kind);
/// sigma^+_node sigma^-_node
Operator number_operator(const HilbertSpace& space, int node);
Operator total_number_operator(const HilbertSpace& space);
/// sigma^+_to sigma^-_from: moves a walker from `from` to `to`.
Operator hopping_operator(const HilbertSpace& space, int from, int to);

struct DensityTolerances {
  double hermiticity = 1e-12;
  double trace = 1e-12;
  double min_eigenvalue = -1e-10;
};

/// Hermitian, unit-trace, positive semidefinite state. Validated on construction.
class DensityMatrix {
 public:
  DensityMatrix(HilbertSpace space, Matrix matrix, DensityTolerances tol = {});

  static DensityMatrix basis_state(const HilbertSpace& space, std::size_t index);
  static DensityMatrix pure(const HilbertSpace& space, const Vector& psi);
  static DensityMatrix maximally_mixed(const HilbertSpace& space);

  const HilbertSpace& space() const { return space_; }
  const Matrix& matrix() const { return matrix_; }

  RealVector populations() const;
  double purity() const;
  double trace_error() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;

 private:
  HilbertSpace space_;
  Matrix matrix_;
};

double min_hermitian_eigenvalue(const Matrix& m);

/// Eigendecomposition of a Hermitian system Hamiltonian, eigenvalues ascending.
struct Eigensystem {
  HilbertSpace space;
  RealVector energies;
  /// Column alpha holds <m|alpha> over the local basis m.
  Matrix vectors;
  /// Excitation number of each eigenvector, or -1 when it spans several sectors.
  std::vector<int> sector;
  std::vector<DegeneratePair> degeneracies;
  double frequency_tolerance = 0.0;

  std::size_t dimension() const { return static_cast<std::size_t>(energies.size()); }
  bool nondegenerate() const { return degeneracies.empty(); }
  /// Throws DegenerateTransitions when any transition frequencies coincide.
  void require_nondegenerate(std::string_view context) const;
};

/// Diagonalizes H. Number-conserving operators are diagonalized block by block so
/// eigenvectors carry a definite excitation number. `tol_freq` is relative to
/// the largest transition frequency.
Eigensystem eigendecompose(const Operator& hamiltonian, double tol_freq = 1e-9);

/// Coinciding Bohr frequencies of a sorted spectrum.
std::vector<DegeneratePair> find_degenerate_transitions(const RealVector& energies,
                                                        double threshold);

}  // namespace qsw
