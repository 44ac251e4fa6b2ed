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

#include "qsw/hilbert.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

namespace qsw {

struct HilbertSpace::Data {
  SpaceMode mode = SpaceMode::full;
  int node_count = 0;
  std::vector<int> excitations;
  std::vector<std::uint64_t> occupations;
  std::vector<std::string> labels;
  std::unordered_map<std::uint64_t, std::size_t> index;
};

namespace {

constexpr int kMaxNodes = 30;

void check_node_count(int node_count) {
  if (node_count < 1 || node_count > kMaxNodes) {
    throw InvalidArgument("node count must be in [1, " + std::to_string(kMaxNodes) +
                          "], got " + std::to_string(node_count));
  }
}

int popcount(std::uint64_t bits) { return std::popcount(bits); }

// One single-node operator applied to one basis state: at most one output term.
struct Term {
  std::uint64_t occupation;
  cplx amplitude;
};

std::optional<Term> apply_local(std::uint64_t occ, int node, LocalKind kind) {
  const std::uint64_t bit = std::uint64_t{1} << node;
  const bool occupied = (occ & bit) != 0;
  switch (kind) {
    case LocalKind::z:
      return Term{occ, occupied ? cplx{-1.0, 0.0} : cplx{1.0, 0.0}};
    case LocalKind::x:
      return Term{occ ^ bit, {1.0, 0.0}};
    case LocalKind::y:
      // sigma_y = [[0, -i], [i, 0]] on {|0>, |1>}
      return Term{occ ^ bit, occupied ? cplx{0.0, -1.0} : cplx{0.0, 1.0}};
    case LocalKind::raise:
      if (occupied) return std::nullopt;
      return Term{occ | bit, {1.0, 0.0}};
    case LocalKind::lower:
      if (!occupied) return std::nullopt;
      return Term{occ & ~bit, {1.0, 0.0}};
  }
  return std::nullopt;
}

const char* kind_name(LocalKind kind) {
  switch (kind) {
    case LocalKind::x: return "x";
    case LocalKind::y: return "y";
    case LocalKind::z: return "z";
    case LocalKind::raise: return "+";
    case LocalKind::lower: return "-";
  }
  return "?";
}

void check_node(const HilbertSpace& space, int node) {
  if (node < 0 || node >= space.node_count()) {
    throw IndexOutOfRange("node " + std::to_string(node) + " out of range for " +
                          std::to_string(space.node_count()) + " nodes");
  }
}

}  // namespace

// ---------------------------------------------------------------- labels

std::uint64_t parse_label(std::string_view label) {
  if (label.empty() || label.size() > static_cast<std::size_t>(kMaxNodes)) {
    throw InvalidArgument("invalid basis label '" + std::string(label) + "'");
  }
  std::uint64_t occ = 0;
  for (std::size_t j = 0; j < label.size(); ++j) {
    if (label[j] == '1') {
      occ |= std::uint64_t{1} << j;
    } else if (label[j] != '0') {
      throw InvalidArgument("invalid basis label '" + std::string(label) + "'");
    }
  }
  return occ;
}

std::string format_label(std::uint64_t occupation, int node_count) {
  std::string s(static_cast<std::size_t>(node_count), '0');
  for (int j = 0; j < node_count; ++j) {
    if ((occupation >> j) & 1U) s[static_cast<std::size_t>(j)] = '1';
  }
  return s;
}

int excitation_number(std::string_view label) { return popcount(parse_label(label)); }

// ---------------------------------------------------------------- HilbertSpace

HilbertSpace HilbertSpace::full(int node_count) {
  check_node_count(node_count);
  if (node_count > 24) throw InvalidArgument("full register limited to 24 nodes");
  auto data = std::make_shared<Data>();
  data->mode = SpaceMode::full;
  data->node_count = node_count;
  for (int k = 0; k <= node_count; ++k) data->excitations.push_back(k);
  const std::uint64_t dim = std::uint64_t{1} << node_count;
  data->occupations.reserve(dim);
  for (std::uint64_t occ = 0; occ < dim; ++occ) data->occupations.push_back(occ);
  for (std::size_t i = 0; i < data->occupations.size(); ++i) {
    data->labels.push_back(format_label(data->occupations[i], node_count));
    data->index.emplace(data->occupations[i], i);
  }
  return HilbertSpace(std::move(data));
}

HilbertSpace HilbertSpace::sectors(int node_count, std::vector<int> excitations) {
  check_node_count(node_count);
  std::sort(excitations.begin(), excitations.end());
  excitations.erase(std::unique(excitations.begin(), excitations.end()), excitations.end());
  if (excitations.empty()) throw InvalidArgument("at least one excitation sector required");
  for (int k : excitations) {
    if (k < 0 || k > node_count) {
      throw InvalidArgument("excitation sector " + std::to_string(k) + " invalid for " +
                            std::to_string(node_count) + " nodes");
    }
  }
  auto data = std::make_shared<Data>();
  data->mode = SpaceMode::sectors;
  data->node_count = node_count;
  data->excitations = excitations;
  // Enumerate by increasing occupation integer so the order matches full mode.
  // Sectors with few walkers are enumerated directly to avoid a 2^n scan.
  double count = 0.0;
  for (int k : excitations) count += std::round(std::exp(std::lgamma(node_count + 1.0) -
                                                         std::lgamma(k + 1.0) -
                                                         std::lgamma(node_count - k + 1.0)));
  if (count > static_cast<double>(std::size_t{1} << 16)) {
    throw InvalidArgument("sector space too large");
  }
  std::vector<std::uint64_t> occs;
  for (int k : excitations) {
    if (k == 0) {
      occs.push_back(0);
      continue;
    }
    std::uint64_t v = (std::uint64_t{1} << k) - 1;
    const std::uint64_t limit = std::uint64_t{1} << node_count;
    while (v < limit) {
      occs.push_back(v);
      // next integer with the same popcount (Gosper)
      const std::uint64_t c = v & (~v + 1);
      const std::uint64_t r = v + c;
      v = (((r ^ v) >> 2) / c) | r;
    }
  }
  std::sort(occs.begin(), occs.end());
  data->occupations = std::move(occs);
  for (std::size_t i = 0; i < data->occupations.size(); ++i) {
    data->labels.push_back(format_label(data->occupations[i], node_count));
    data->index.emplace(data->occupations[i], i);
  }
  return HilbertSpace(std::move(data));
}

SpaceMode HilbertSpace::mode() const { return data_->mode; }
int HilbertSpace::node_count() const { return data_->node_count; }
std::size_t HilbertSpace::dimension() const { return data_->occupations.size(); }
const std::vector<int>& HilbertSpace::excitations() const { return data_->excitations; }
std::uint64_t HilbertSpace::occupation(std::size_t index) const {
  return data_->occupations.at(index);
}
int HilbertSpace::excitation_number(std::size_t index) const {
  return popcount(occupation(index));
}
const std::string& HilbertSpace::label(std::size_t index) const { return data_->labels.at(index); }
const std::vector<std::string>& HilbertSpace::labels() const { return data_->labels; }

std::optional<std::size_t> HilbertSpace::find(std::uint64_t occupation) const {
  const auto it = data_->index.find(occupation);
  if (it == data_->index.end()) return std::nullopt;
  return it->second;
}

std::size_t HilbertSpace::index_of(std::string_view label) const {
  if (label.size() != static_cast<std::size_t>(node_count())) {
    throw IndexOutOfRange("label '" + std::string(label) + "' has wrong length for " +
                          std::to_string(node_count()) + " nodes");
  }
  const auto idx = find(parse_label(label));
  if (!idx) throw IndexOutOfRange("label '" + std::string(label) + "' not represented");
  return *idx;
}

std::vector<std::size_t> HilbertSpace::sector_indices(int excitations) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dimension(); ++i) {
    if (excitation_number(i) == excitations) out.push_back(i);
  }
  return out;
}

bool HilbertSpace::operator==(const HilbertSpace& other) const {
  if (data_ == other.data_) return true;
  return data_->node_count == other.data_->node_count &&
         data_->occupations == other.data_->occupations;
}

// ---------------------------------------------------------------- Operator

Operator::Operator(HilbertSpace space, Matrix matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  const auto d = static_cast<Eigen::Index>(space_.dimension());
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw DimensionMismatch("operator matrix is " + std::to_string(matrix_.rows()) + "x" +
                            std::to_string(matrix_.cols()) + ", space dimension is " +
                            std::to_string(d));
  }
}

Operator Operator::zero(const HilbertSpace& space) {
  const auto d = static_cast<Eigen::Index>(space.dimension());
  return Operator(space, Matrix::Zero(d, d));
}

Operator Operator::identity(const HilbertSpace& space) {
  const auto d = static_cast<Eigen::Index>(space.dimension());
  return Operator(space, Matrix::Identity(d, d));
}

double Operator::hermiticity_error() const {
  if (matrix_.size() == 0) return 0.0;
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

bool Operator::conserves_excitation_number(double tol) const {
  const auto d = static_cast<Eigen::Index>(dimension());
  for (Eigen::Index j = 0; j < d; ++j) {
    const int nj = space_.excitation_number(static_cast<std::size_t>(j));
    for (Eigen::Index i = 0; i < d; ++i) {
      if (space_.excitation_number(static_cast<std::size_t>(i)) != nj &&
          std::abs(matrix_(i, j)) > tol) {
        return false;
      }
    }
  }
  return true;
}

Operator Operator::adjoint() const { return Operator(space_, matrix_.adjoint()); }

Operator& Operator::operator+=(const Operator& other) {
  if (space_ != other.space_) throw DimensionMismatch("operators live on different spaces");
  matrix_ += other.matrix_;
  return *this;
}

Operator& Operator::operator-=(const Operator& other) {
  if (space_ != other.space_) throw DimensionMismatch("operators live on different spaces");
  matrix_ -= other.matrix_;
  return *this;
}

Operator& Operator::operator*=(cplx scale) {
  matrix_ *= scale;
  return *this;
}

Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
Operator operator*(cplx scale, Operator op) { return op *= scale; }

Operator operator*(const Operator& lhs, const Operator& rhs) {
  if (lhs.space() != rhs.space()) throw DimensionMismatch("operators live on different spaces");
  return Operator(lhs.space(), lhs.matrix() * rhs.matrix());
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

Operator local_operator(const HilbertSpace& space, int node, LocalKind kind) {
  check_node(space, node);
  const auto d = static_cast<Eigen::Index>(space.dimension());
  Matrix m = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < space.dimension(); ++j) {
    const auto term = apply_local(space.occupation(j), node, kind);
    if (!term) continue;
    const auto i = space.find(term->occupation);
    if (!i) {
      throw SectorViolation(std::string("operator ") + kind_name(kind) + " on node " +
                            std::to_string(node) + " maps |" + space.label(j) +
                            "> outside the represented sectors");
    }
    m(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(j)) += term->amplitude;
  }
  return Operator(space, std::move(m));
}

Operator number_operator(const HilbertSpace& space, int node) {
  check_node(space, node);
  const auto d = static_cast<Eigen::Index>(space.dimension());
  Matrix m = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    if ((space.occupation(i) >> node) & 1U) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    }
  }
  return Operator(space, std::move(m));
}

Operator total_number_operator(const HilbertSpace& space) {
  const auto d = static_cast<Eigen::Index>(space.dimension());
  Matrix m = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = space.excitation_number(i);
  }
  return Operator(space, std::move(m));
}

Operator hopping_operator(const HilbertSpace& space, int from, int to) {
  check_node(space, from);
  check_node(space, to);
  if (from == to) return number_operator(space, from);
  const std::uint64_t fbit = std::uint64_t{1} << from;
  const std::uint64_t tbit = std::uint64_t{1} << to;
  const auto d = static_cast<Eigen::Index>(space.dimension());
  Matrix m = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < space.dimension(); ++j) {
    const std::uint64_t occ = space.occupation(j);
    if ((occ & fbit) == 0 || (occ & tbit) != 0) continue;
    const auto i = space.find(occ ^ fbit ^ tbit);
    // Same excitation number, so always represented.
    m(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(j)) = 1.0;
  }
  return Operator(space, std::move(m));
}

// ---------------------------------------------------------------- DensityMatrix

double min_hermitian_eigenvalue(const Matrix& m) {
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

DensityMatrix::DensityMatrix(HilbertSpace space, Matrix matrix, DensityTolerances tol)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  const auto d = static_cast<Eigen::Index>(space_.dimension());
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw DimensionMismatch("density matrix dimension does not match space");
  }
  if (!matrix_.allFinite()) throw InvalidArgument("density matrix has non-finite entries");
  if (hermiticity_error() >= tol.hermiticity) {
    throw InvalidArgument("density matrix not Hermitian (error " +
                          std::to_string(hermiticity_error()) + ")");
  }
  if (trace_error() >= tol.trace) {
    throw InvalidArgument("density matrix trace differs from 1 by " +
                          std::to_string(trace_error()));
  }
  if (min_eigenvalue() < tol.min_eigenvalue) {
    throw InvalidArgument("density matrix has negative eigenvalue " +
                          std::to_string(min_eigenvalue()));
  }
}

DensityMatrix DensityMatrix::basis_state(const HilbertSpace& space, std::size_t index) {
  if (index >= space.dimension()) throw IndexOutOfRange("basis index out of range");
  const auto d = static_cast<Eigen::Index>(space.dimension());
  Matrix m = Matrix::Zero(d, d);
  m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
  return DensityMatrix(space, std::move(m));
}

DensityMatrix DensityMatrix::pure(const HilbertSpace& space, const Vector& psi) {
  if (psi.size() != static_cast<Eigen::Index>(space.dimension())) {
    throw DimensionMismatch("state vector dimension does not match space");
  }
  const double norm = psi.norm();
  if (norm == 0.0) throw InvalidArgument("zero state vector");
  const Vector v = psi / norm;
  return DensityMatrix(space, v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(const HilbertSpace& space) {
  const auto d = static_cast<Eigen::Index>(space.dimension());
  return DensityMatrix(space, Matrix::Identity(d, d) / static_cast<double>(d));
}

RealVector DensityMatrix::populations() const { return matrix_.diagonal().real(); }
double DensityMatrix::purity() const { return (matrix_ * matrix_).trace().real(); }
double DensityMatrix::trace_error() const { return std::abs(matrix_.trace() - 1.0); }
double DensityMatrix::hermiticity_error() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}
double DensityMatrix::min_eigenvalue() const { return min_hermitian_eigenvalue(matrix_); }

// ---------------------------------------------------------------- eigendecompose

std::vector<DegeneratePair> find_degenerate_transitions(const RealVector& energies,
                                                        double threshold) {
  struct Gap {
    double value;
    std::size_t lower;
    std::size_t upper;
  };
  const auto d = static_cast<std::size_t>(energies.size());
  std::vector<Gap> gaps;
  gaps.reserve(d * (d > 0 ? d - 1 : 0) / 2);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a + 1; b < d; ++b) {
      gaps.push_back({energies(static_cast<Eigen::Index>(b)) -
                          energies(static_cast<Eigen::Index>(a)),
                      a, b});
    }
  }
  std::sort(gaps.begin(), gaps.end(), [](const Gap& x, const Gap& y) {
    if (x.value != y.value) return x.value < y.value;
    if (x.lower != y.lower) return x.lower < y.lower;
    return x.upper < y.upper;
  });
  std::vector<DegeneratePair> out;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (std::abs(gaps[i].value) <= threshold) {
      out.push_back({gaps[i].lower, gaps[i].upper, gaps[i].lower, gaps[i].lower,
                     std::abs(gaps[i].value)});
    }
    for (std::size_t j = i + 1; j < gaps.size() && gaps[j].value - gaps[i].value <= threshold;
         ++j) {
      out.push_back({gaps[i].lower, gaps[i].upper, gaps[j].lower, gaps[j].upper,
                     gaps[j].value - gaps[i].value});
    }
  }
  return out;
}

void Eigensystem::require_nondegenerate(std::string_view context) const {
  if (degeneracies.empty()) return;
  const auto& p = degeneracies.front();
  throw DegenerateTransitions(
      std::string(context) + ": degenerate transition frequencies (" +
          std::to_string(degeneracies.size()) + " coinciding pairs, first " +
          std::to_string(p.a_lower) + "->" + std::to_string(p.a_upper) + " vs " +
          std::to_string(p.b_lower) + "->" + std::to_string(p.b_upper) +
          "); the secular approximation does not apply",
      degeneracies);
}

Eigensystem eigendecompose(const Operator& hamiltonian, double tol_freq) {
  if (!hamiltonian.is_hermitian()) {
    throw NotHermitian("eigendecompose: operator not Hermitian (error " +
                       std::to_string(hamiltonian.hermiticity_error()) + ")");
  }
  const HilbertSpace& space = hamiltonian.space();
  const auto d = static_cast<Eigen::Index>(space.dimension());
  const Matrix& h = hamiltonian.matrix();

  struct Column {
    double energy;
    int sector;
    Vector vec;
  };
  std::vector<Column> columns;
  columns.reserve(static_cast<std::size_t>(d));

  const bool blocked = space.excitations().size() > 1 && hamiltonian.conserves_excitation_number();
  if (blocked) {
    for (int k : space.excitations()) {
      const auto idx = space.sector_indices(k);
      const auto b = static_cast<Eigen::Index>(idx.size());
      Matrix block(b, b);
      for (Eigen::Index i = 0; i < b; ++i) {
        for (Eigen::Index j = 0; j < b; ++j) {
          block(i, j) = h(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]),
                          static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
        }
      }
      Eigen::SelfAdjointEigenSolver<Matrix> solver(block);
      for (Eigen::Index c = 0; c < b; ++c) {
        Vector v = Vector::Zero(d);
        for (Eigen::Index i = 0; i < b; ++i) {
          v(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)])) =
              solver.eigenvectors()(i, c);
        }
        columns.push_back({solver.eigenvalues()(c), k, std::move(v)});
      }
    }
    std::stable_sort(columns.begin(), columns.end(),
                     [](const Column& a, const Column& b) { return a.energy < b.energy; });
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    const int single_sector = space.excitations().size() == 1 ? space.excitations().front() : -1;
    for (Eigen::Index c = 0; c < d; ++c) {
      columns.push_back({solver.eigenvalues()(c), single_sector, solver.eigenvectors().col(c)});
    }
  }

  Eigensystem eig{space, RealVector(d), Matrix(d, d), {}, {}, 0.0};
  for (Eigen::Index c = 0; c < d; ++c) {
    eig.energies(c) = columns[static_cast<std::size_t>(c)].energy;
    eig.vectors.col(c) = columns[static_cast<std::size_t>(c)].vec;
    eig.sector.push_back(columns[static_cast<std::size_t>(c)].sector);
  }
  const double span = d > 0 ? eig.energies(d - 1) - eig.energies(0) : 0.0;
  eig.frequency_tolerance = tol_freq * span;
  eig.degeneracies = find_degenerate_transitions(eig.energies, eig.frequency_tolerance);
  return eig;
}

}  // namespace qsw
