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

// Weak-coupling secular rates from a microscopic system-bath model, their
// transformation to the local (node occupation) basis, and the realizability
// checks built on them.
//
// Rate convention: eigen_rates(a, b) is the rate of the transition b -> a,
// local_rates(m, n) = R_{mm,nn} is the rate of population flow n -> m.
// All baths add coherently into one effective coupling operator
//   Vbar = sum_k sum_j eta_k^(j) S_k^(j)
// seen by a single reservoir with spectral density J and temperature T (k_B = 1).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qsw/hilbert.hpp"
#include "qsw/walk.hpp"

namespace qsw {

enum class CouplingKind { x, y, z };
std::string to_string(CouplingKind kind);
CouplingKind coupling_kind_from_string(const std::string& name);
LocalKind local_kind(CouplingKind kind);

enum class SpectralFamily { ohmic, flat };
std::string to_string(SpectralFamily family);
SpectralFamily spectral_family_from_string(const std::string& name);

/// ohmic: J(w) = prefactor * w * exp(-w / cutoff)
/// flat:  J(w) = prefactor * exp(-w / cutoff)
struct SpectralModel {
  SpectralFamily family = SpectralFamily::ohmic;
  double prefactor = 0.0;
  double cutoff = 1.0;

  double density(double omega) const;
};

struct Bath {
  CouplingKind kind = CouplingKind::z;
  /// eta_k^(j), one per node; zero means uncoupled.
  std::vector<double> coefficients;
};

class BathCouplingSpec {
 public:
  BathCouplingSpec(int node_count, std::vector<Bath> baths, SpectralModel spectral,
                   double temperature);

  int node_count() const { return node_count_; }
  const std::vector<Bath>& baths() const { return baths_; }
  const SpectralModel& spectral() const { return spectral_; }
  double temperature() const { return temperature_; }

  /// gamma(w): 2 pi J(w)(n(w) + 1) for w > 0, 2 pi J(|w|) n(|w|) for w < 0,
  /// and the zero-frequency limit at w == 0.
  double rate_function(double omega) const;
  double zero_frequency_rate() const;
  static double thermal_occupation(double omega, double temperature);

  bool has_kind(CouplingKind kind) const;
  /// sum_k eta_k^(j) over baths of the given kind.
  std::vector<double> node_sums(CouplingKind kind) const;
  /// sum over all baths and nodes of |eta|.
  double coefficient_norm() const;
  /// Baths of one kind only (may be empty).
  BathCouplingSpec restricted_to(CouplingKind kind) const;
  BathCouplingSpec scaled(double factor) const;

 private:
  int node_count_;
  std::vector<Bath> baths_;
  SpectralModel spectral_;
  double temperature_;
};

/// System-side effective coupling operator sum_{k,j} eta_k^(j) S_k^(j).
Operator vbar(const BathCouplingSpec& spec, const HilbertSpace& space);

/// Local/eigen overlap tensors stored flat with index ((m d + n) d + a) d + b:
///   T(m,n;a,b)  = |<m|a>|^2 |<b|n>|^2
///   Tt(m,n;a,b) = <m|a><b|m><a|n><n|b>
struct OverlapTensors {
  std::size_t dim = 0;
  std::vector<double> t;
  std::vector<cplx> t_tilde;

  std::size_t index(std::size_t m, std::size_t n, std::size_t a, std::size_t b) const {
    return ((m * dim + n) * dim + a) * dim + b;
  }
  double T(std::size_t m, std::size_t n, std::size_t a, std::size_t b) const {
    return t[index(m, n, a, b)];
  }
  cplx Ttilde(std::size_t m, std::size_t n, std::size_t a, std::size_t b) const {
    return t_tilde[index(m, n, a, b)];
  }
};

OverlapTensors overlap_tensors(const Eigensystem& eig);

struct EigenRates {
  /// transition(a, b): rate b -> a; zero diagonal.
  RealMatrix transition;
  /// dephasing(a, b): total decay rate of the eigenbasis coherence rho_ab;
  /// dephasing(a, a) is the total outflow from a.
  RealMatrix dephasing;
};

/// Golden-rule rates. Throws DegenerateTransitions unless the spectrum has
/// nondegenerate transition frequencies.
EigenRates golden_rule_rates(const Eigensystem& eig, const BathCouplingSpec& spec);

struct LocalRates {
  RealMatrix rates;
  /// max |Im| dropped from the contraction.
  double imaginary_residue = 0.0;
};

/// Gamma_mn = sum_{a != a'} T(m,n;a,a') G(a,a') - sum_{a,b} Tt(m,n;a,b) Gt(a,b)
LocalRates local_rates(const OverlapTensors& tensors, const EigenRates& rates);
/// Gt_mn = R_{mn,mn} = sum_{a != a'} Tt(m,n;a,a') G(a,a') - sum_{a,b} T(m,n;a,b) Gt(a,b)
Matrix local_pure_dephasing(const OverlapTensors& tensors, const EigenRates& rates);

/// Single entries of the two contractions above (complex, before dropping Im).
cplx local_rate_element(const OverlapTensors& tensors, const EigenRates& rates, std::size_t m,
                        std::size_t n);
cplx local_dephasing_element(const OverlapTensors& tensors, const EigenRates& rates,
                             std::size_t m, std::size_t n);

/// Upper bound on every rate these couplings can produce for this spectrum:
/// max_w gamma(w) * (sum |eta|)^2. Verdict tolerances are relative to it.
double rate_scale(const BathCouplingSpec& spec, const Eigensystem& eig);

struct VanishingCondition {
  cplx vbar_element{0.0, 0.0};
  bool implies_nonzero_rate = false;
  /// The implication needs a dense bath spectrum (energy matching always possible).
  bool assumes_dense_spectrum = true;
};

/// <m|Vbar|n>; a nonzero element forces some eigen rate between the eigenstates
/// overlapping m and n to be nonzero.
VanishingCondition vanishing_condition(const BathCouplingSpec& spec, const HilbertSpace& space,
                                       std::size_t m, std::size_t n, double tol = 1e-12);

struct EigenRateEntry {
  std::size_t to = 0;
  std::size_t from = 0;
  double rate = 0.0;
};

struct LocalRateEntry {
  std::string to;
  std::string from;
  double rate = 0.0;
};

struct DecouplingVerdict {
  bool applicable = false;
  bool decoupled = false;
  std::vector<double> x_node_sums;
  std::vector<double> y_node_sums;
  double max_eigen_rate = 0.0;
  /// When decoupled, every eigen rate was confirmed below 1e-12.
  bool numerically_confirmed = false;
  std::vector<EigenRateEntry> nonzero_eigen_rates;
  std::vector<LocalRateEntry> forbidden_local_transitions;
};

/// Decoupling test for the x/y (excitation-changing) couplings.
DecouplingVerdict check_decoupling(const BathCouplingSpec& spec, const Eigensystem& eig,
                                   double tol = 1e-12);

struct RateReport {
  Eigensystem eig;
  EigenRates eigen;
  OverlapTensors overlaps;
  RealMatrix local_rates;
  Matrix local_dephasing;
  double imaginary_residue = 0.0;
  double rate_scale = 0.0;

  const HilbertSpace& space() const { return eig.space; }
};

RateReport analyze(const Operator& system_hamiltonian, const BathCouplingSpec& spec,
                   double tol_freq = 1e-9);
RateReport analyze(const Eigensystem& eig, const BathCouplingSpec& spec);

struct RealizabilityOptions {
  /// Nonzero-rate threshold relative to rate_scale.
  double verdict_tolerance = 1e-12;
  /// Relative error allowed between achieved and requested hopping rates.
  double target_relative_tolerance = 1e-4;
  double tol_freq = 1e-9;
  /// Forces the analysis space; default is full when x/y couplings are present,
  /// vacuum + single-walker sectors otherwise.
  std::optional<HilbertSpace> space;
};

struct TransferComparison {
  int from = 0;
  int to = 0;
  double requested = 0.0;
  double achieved = 0.0;
  /// |achieved - requested| / requested, or achieved / rate_scale when nothing was requested.
  double relative_error = 0.0;
  bool matches = false;
};

struct Verdict {
  std::string kind;
  /// Every excitation-number-changing local rate vanishes.
  bool sector_preserving = true;
  /// x and y node sums all vanish (vacuous without x/y baths).
  bool decay_decoupled = true;
  /// Every single-walker local coherence has zero R_{mn,mn}.
  bool dephasing_free = true;
  bool targets_reproduced = true;
  bool nontrivial_transfer = false;
  double max_forbidden_rate = 0.0;
  double max_local_dephasing = 0.0;
  double max_transfer_rate = 0.0;
};

struct RealizabilityReport {
  RateReport rates;
  Verdict combined;
  std::vector<Verdict> per_kind;
  std::vector<TransferComparison> transfers;
  DecouplingVerdict decoupling;
  /// combined restriction verdicts equal the conjunction of the per-kind ones.
  bool union_consistent = true;
  /// Sector-preserving, dephasing-free, reproduces the requested hops and moves the walker.
  bool realizable = false;
  std::vector<std::string> notes;
};

RealizabilityReport classify_realizability(const Graph& graph, const BathCouplingSpec& spec,
                                           const RealizabilityOptions& options = {});

}  // namespace qsw
