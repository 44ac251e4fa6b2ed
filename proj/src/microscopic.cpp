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

#include "qsw/microscopic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace qsw {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMaxTensorDim = 32;

bool is_finite(double v) { return std::isfinite(v); }

int single_node(std::uint64_t occupation) { return std::countr_zero(occupation); }

}  // namespace

std::string to_string(CouplingKind kind) {
  switch (kind) {
    case CouplingKind::x: return "x";
    case CouplingKind::y: return "y";
    case CouplingKind::z: return "z";
  }
  return "?";
}

CouplingKind coupling_kind_from_string(const std::string& name) {
  if (name == "x") return CouplingKind::x;
  if (name == "y") return CouplingKind::y;
  if (name == "z") return CouplingKind::z;
  throw InvalidArgument("unknown coupling kind '" + name + "'");
}

LocalKind local_kind(CouplingKind kind) {
  switch (kind) {
    case CouplingKind::x: return LocalKind::x;
    case CouplingKind::y: return LocalKind::y;
    case CouplingKind::z: return LocalKind::z;
  }
  return LocalKind::z;
}

std::string to_string(SpectralFamily family) {
  return family == SpectralFamily::ohmic ? "ohmic" : "flat";
}

SpectralFamily spectral_family_from_string(const std::string& name) {
  if (name == "ohmic") return SpectralFamily::ohmic;
  if (name == "flat") return SpectralFamily::flat;
  throw InvalidArgument("unknown spectral family '" + name + "'");
}

double SpectralModel::density(double omega) const {
  if (omega <= 0.0) return 0.0;
  const double shape = std::exp(-omega / cutoff);
  return family == SpectralFamily::ohmic ? prefactor * omega * shape : prefactor * shape;
}

// ---------------------------------------------------------------- spec

BathCouplingSpec::BathCouplingSpec(int node_count, std::vector<Bath> baths,
                                   SpectralModel spectral, double temperature)
    : node_count_(node_count),
      baths_(std::move(baths)),
      spectral_(spectral),
      temperature_(temperature) {
  if (node_count_ < 1) throw InvalidArgument("bath spec needs at least one node");
  for (std::size_t k = 0; k < baths_.size(); ++k) {
    if (baths_[k].coefficients.size() != static_cast<std::size_t>(node_count_)) {
      throw InvalidArgument("bath " + std::to_string(k) + " needs one coefficient per node");
    }
    for (double c : baths_[k].coefficients) {
      if (!is_finite(c)) throw InvalidArgument("bath coefficients must be finite");
    }
  }
  if (!is_finite(spectral_.prefactor) || spectral_.prefactor < 0.0) {
    throw InvalidArgument("spectral prefactor must be finite and >= 0");
  }
  if (!is_finite(spectral_.cutoff) || spectral_.cutoff <= 0.0) {
    throw InvalidArgument("spectral cutoff must be finite and > 0");
  }
  if (!is_finite(temperature_) || temperature_ < 0.0) {
    throw InvalidArgument("temperature must be finite and >= 0");
  }
  if (spectral_.family == SpectralFamily::flat && temperature_ > 0.0) {
    throw InvalidArgument(
        "flat spectral density has no finite zero-frequency rate at T > 0; use T = 0 or ohmic");
  }
}

double BathCouplingSpec::thermal_occupation(double omega, double temperature) {
  if (temperature == 0.0 || omega <= 0.0) return 0.0;
  return 1.0 / std::expm1(omega / temperature);
}

double BathCouplingSpec::zero_frequency_rate() const {
  if (spectral_.family == SpectralFamily::ohmic) {
    return kTwoPi * spectral_.prefactor * temperature_;
  }
  return kTwoPi * spectral_.prefactor;  // flat, T = 0
}

double BathCouplingSpec::rate_function(double omega) const {
  if (omega == 0.0) return zero_frequency_rate();
  const double w = std::abs(omega);
  const double n = thermal_occupation(w, temperature_);
  const double j = spectral_.density(w);
  return omega > 0.0 ? kTwoPi * j * (n + 1.0) : kTwoPi * j * n;
}

bool BathCouplingSpec::has_kind(CouplingKind kind) const {
  return std::any_of(baths_.begin(), baths_.end(), [&](const Bath& b) { return b.kind == kind; });
}

std::vector<double> BathCouplingSpec::node_sums(CouplingKind kind) const {
  std::vector<double> sums(static_cast<std::size_t>(node_count_), 0.0);
  for (const auto& b : baths_) {
    if (b.kind != kind) continue;
    for (std::size_t j = 0; j < sums.size(); ++j) sums[j] += b.coefficients[j];
  }
  return sums;
}

double BathCouplingSpec::coefficient_norm() const {
  double s = 0.0;
  for (const auto& b : baths_) {
    for (double c : b.coefficients) s += std::abs(c);
  }
  return s;
}

BathCouplingSpec BathCouplingSpec::restricted_to(CouplingKind kind) const {
  std::vector<Bath> kept;
  for (const auto& b : baths_) {
    if (b.kind == kind) kept.push_back(b);
  }
  return BathCouplingSpec(node_count_, std::move(kept), spectral_, temperature_);
}

BathCouplingSpec BathCouplingSpec::scaled(double factor) const {
  std::vector<Bath> out = baths_;
  for (auto& b : out) {
    for (double& c : b.coefficients) c *= factor;
  }
  return BathCouplingSpec(node_count_, std::move(out), spectral_, temperature_);
}

Operator vbar(const BathCouplingSpec& spec, const HilbertSpace& space) {
  if (space.node_count() != spec.node_count()) {
    throw DimensionMismatch("bath spec and space have different node counts");
  }
  Operator v = Operator::zero(space);
  for (const auto& bath : spec.baths()) {
    for (int j = 0; j < spec.node_count(); ++j) {
      const double eta = bath.coefficients[static_cast<std::size_t>(j)];
      if (eta == 0.0) continue;
      v += cplx{eta, 0.0} * local_operator(space, j, local_kind(bath.kind));
    }
  }
  return v;
}

// ---------------------------------------------------------------- rates

OverlapTensors overlap_tensors(const Eigensystem& eig) {
  const std::size_t d = eig.dimension();
  if (d > kMaxTensorDim) {
    throw InvalidArgument("overlap tensors limited to dimension " +
                          std::to_string(kMaxTensorDim));
  }
  OverlapTensors out;
  out.dim = d;
  out.t.resize(d * d * d * d);
  out.t_tilde.resize(d * d * d * d);
  const Matrix& u = eig.vectors;  // u(m, a) = <m|a>
  const RealMatrix p = u.cwiseAbs2();
  for (std::size_t m = 0; m < d; ++m) {
    for (std::size_t n = 0; n < d; ++n) {
      for (std::size_t a = 0; a < d; ++a) {
        const auto ia = static_cast<Eigen::Index>(a);
        const cplx ma = u(static_cast<Eigen::Index>(m), ia);
        const cplx an = std::conj(u(static_cast<Eigen::Index>(n), ia));
        for (std::size_t b = 0; b < d; ++b) {
          const auto ib = static_cast<Eigen::Index>(b);
          const std::size_t k = out.index(m, n, a, b);
          out.t[k] = p(static_cast<Eigen::Index>(m), ia) * p(static_cast<Eigen::Index>(n), ib);
          const cplx bm = std::conj(u(static_cast<Eigen::Index>(m), ib));
          const cplx nb = u(static_cast<Eigen::Index>(n), ib);
          out.t_tilde[k] = ma * bm * an * nb;
        }
      }
    }
  }
  return out;
}

EigenRates golden_rule_rates(const Eigensystem& eig, const BathCouplingSpec& spec) {
  eig.require_nondegenerate("golden_rule_rates");
  const auto d = static_cast<Eigen::Index>(eig.dimension());
  const Matrix& u = eig.vectors;
  Matrix ve = u.adjoint() * vbar(spec, eig.space).matrix() * u;
  ve = 0.5 * (ve + ve.adjoint()).eval();

  EigenRates out{RealMatrix::Zero(d, d), RealMatrix::Zero(d, d)};
  for (Eigen::Index b = 0; b < d; ++b) {
    for (Eigen::Index a = 0; a < d; ++a) {
      if (a == b) continue;
      const double element = std::norm(ve(a, b));
      if (element == 0.0) continue;
      out.transition(a, b) = element * spec.rate_function(eig.energies(b) - eig.energies(a));
    }
  }
  const RealVector outflow = out.transition.colwise().sum().transpose();
  const double g0 = spec.zero_frequency_rate();
  for (Eigen::Index a = 0; a < d; ++a) {
    out.dephasing(a, a) = outflow(a);
    for (Eigen::Index b = 0; b < d; ++b) {
      if (a == b) continue;
      const double diag_gap = std::norm(ve(a, a) - ve(b, b));
      out.dephasing(a, b) = 0.5 * outflow(a) + 0.5 * outflow(b) + 0.5 * g0 * diag_gap;
    }
  }
  return out;
}

cplx local_rate_element(const OverlapTensors& tensors, const EigenRates& rates, std::size_t m,
                        std::size_t n) {
  const std::size_t d = tensors.dim;
  cplx acc{0.0, 0.0};
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      const auto ia = static_cast<Eigen::Index>(a);
      const auto ib = static_cast<Eigen::Index>(b);
      if (a != b) acc += tensors.T(m, n, a, b) * rates.transition(ia, ib);
      acc -= tensors.Ttilde(m, n, a, b) * rates.dephasing(ia, ib);
    }
  }
  return acc;
}

cplx local_dephasing_element(const OverlapTensors& tensors, const EigenRates& rates,
                             std::size_t m, std::size_t n) {
  const std::size_t d = tensors.dim;
  cplx acc{0.0, 0.0};
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      const auto ia = static_cast<Eigen::Index>(a);
      const auto ib = static_cast<Eigen::Index>(b);
      if (a != b) acc += tensors.Ttilde(m, n, a, b) * rates.transition(ia, ib);
      acc -= tensors.T(m, n, a, b) * rates.dephasing(ia, ib);
    }
  }
  return acc;
}

namespace {

void check_shapes(const OverlapTensors& tensors, const EigenRates& rates) {
  const auto d = static_cast<Eigen::Index>(tensors.dim);
  if (rates.transition.rows() != d || rates.transition.cols() != d ||
      rates.dephasing.rows() != d || rates.dephasing.cols() != d) {
    throw DimensionMismatch("rate matrices and overlap tensors disagree in dimension");
  }
}

}  // namespace

LocalRates local_rates(const OverlapTensors& tensors, const EigenRates& rates) {
  check_shapes(tensors, rates);
  const auto d = static_cast<Eigen::Index>(tensors.dim);
  LocalRates out{RealMatrix::Zero(d, d), 0.0};
  for (Eigen::Index m = 0; m < d; ++m) {
    for (Eigen::Index n = 0; n < d; ++n) {
      const cplx v = local_rate_element(tensors, rates, static_cast<std::size_t>(m),
                                        static_cast<std::size_t>(n));
      out.rates(m, n) = v.real();
      out.imaginary_residue = std::max(out.imaginary_residue, std::abs(v.imag()));
    }
  }
  return out;
}

Matrix local_pure_dephasing(const OverlapTensors& tensors, const EigenRates& rates) {
  check_shapes(tensors, rates);
  const auto d = static_cast<Eigen::Index>(tensors.dim);
  Matrix out = Matrix::Zero(d, d);
  for (Eigen::Index m = 0; m < d; ++m) {
    for (Eigen::Index n = 0; n < d; ++n) {
      out(m, n) = local_dephasing_element(tensors, rates, static_cast<std::size_t>(m),
                                          static_cast<std::size_t>(n));
    }
  }
  return out;
}

double rate_scale(const BathCouplingSpec& spec, const Eigensystem& eig) {
  double gmax = spec.zero_frequency_rate();
  const auto d = eig.energies.size();
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) {
      const double w = eig.energies(b) - eig.energies(a);
      gmax = std::max({gmax, spec.rate_function(w), spec.rate_function(-w)});
    }
  }
  const double norm = spec.coefficient_norm();
  return gmax * norm * norm;
}

VanishingCondition vanishing_condition(const BathCouplingSpec& spec, const HilbertSpace& space,
                                       std::size_t m, std::size_t n, double tol) {
  if (m >= space.dimension() || n >= space.dimension()) {
    throw IndexOutOfRange("vanishing_condition: basis index out of range");
  }
  VanishingCondition out;
  out.vbar_element = vbar(spec, space).matrix()(static_cast<Eigen::Index>(m),
                                                static_cast<Eigen::Index>(n));
  out.implies_nonzero_rate = std::abs(out.vbar_element) > tol * spec.coefficient_norm();
  return out;
}

// ---------------------------------------------------------------- reports

RateReport analyze(const Eigensystem& eig, const BathCouplingSpec& spec) {
  RateReport r{eig, golden_rule_rates(eig, spec), overlap_tensors(eig), {}, {}, 0.0, 0.0};
  const LocalRates lr = local_rates(r.overlaps, r.eigen);
  r.local_rates = lr.rates;
  r.imaginary_residue = lr.imaginary_residue;
  r.local_dephasing = local_pure_dephasing(r.overlaps, r.eigen);
  r.rate_scale = rate_scale(spec, eig);
  return r;
}

RateReport analyze(const Operator& system_hamiltonian, const BathCouplingSpec& spec,
                   double tol_freq) {
  return analyze(eigendecompose(system_hamiltonian, tol_freq), spec);
}

DecouplingVerdict check_decoupling(const BathCouplingSpec& spec, const Eigensystem& eig,
                                   double tol) {
  DecouplingVerdict v;
  v.applicable = spec.has_kind(CouplingKind::x) || spec.has_kind(CouplingKind::y);
  v.x_node_sums = spec.node_sums(CouplingKind::x);
  v.y_node_sums = spec.node_sums(CouplingKind::y);
  if (!v.applicable) {
    v.decoupled = true;
    v.numerically_confirmed = true;
    return v;
  }
  std::vector<Bath> decay;
  for (const auto& b : spec.baths()) {
    if (b.kind != CouplingKind::z) decay.push_back(b);
  }
  const BathCouplingSpec sub(spec.node_count(), std::move(decay), spec.spectral(),
                             spec.temperature());
  const double norm = sub.coefficient_norm();
  v.decoupled = true;
  for (std::size_t j = 0; j < v.x_node_sums.size(); ++j) {
    if (std::abs(v.x_node_sums[j]) > tol * norm || std::abs(v.y_node_sums[j]) > tol * norm) {
      v.decoupled = false;
    }
  }

  const RateReport r = analyze(eig, sub);
  v.max_eigen_rate = r.eigen.transition.size() ? r.eigen.transition.maxCoeff() : 0.0;
  if (v.decoupled) {
    v.numerically_confirmed = v.max_eigen_rate < 1e-12;
    return v;
  }
  const double thr = tol * r.rate_scale;
  const auto d = static_cast<Eigen::Index>(eig.dimension());
  for (Eigen::Index b = 0; b < d; ++b) {
    for (Eigen::Index a = 0; a < d; ++a) {
      if (a != b && r.eigen.transition(a, b) > thr) {
        v.nonzero_eigen_rates.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(b),
                                         r.eigen.transition(a, b)});
      }
    }
  }
  const HilbertSpace& space = eig.space;
  for (Eigen::Index n = 0; n < d; ++n) {
    for (Eigen::Index m = 0; m < d; ++m) {
      const auto mi = static_cast<std::size_t>(m);
      const auto ni = static_cast<std::size_t>(n);
      if (space.excitation_number(mi) != space.excitation_number(ni) &&
          r.local_rates(m, n) > thr) {
        v.forbidden_local_transitions.push_back(
            {space.label(mi), space.label(ni), r.local_rates(m, n)});
      }
    }
  }
  return v;
}

namespace {

Verdict make_verdict(std::string kind, const RateReport& r, const BathCouplingSpec& spec,
                     const Graph& graph, const RealizabilityOptions& opt,
                     std::vector<TransferComparison>* transfers) {
  Verdict v;
  v.kind = std::move(kind);
  const HilbertSpace& space = r.space();
  const auto d = static_cast<Eigen::Index>(space.dimension());
  const double thr = opt.verdict_tolerance * r.rate_scale;

  for (Eigen::Index n = 0; n < d; ++n) {
    for (Eigen::Index m = 0; m < d; ++m) {
      if (space.excitation_number(static_cast<std::size_t>(m)) ==
          space.excitation_number(static_cast<std::size_t>(n))) {
        continue;
      }
      v.max_forbidden_rate = std::max(v.max_forbidden_rate, std::abs(r.local_rates(m, n)));
    }
  }
  v.sector_preserving = v.max_forbidden_rate <= thr;

  const double norm = spec.coefficient_norm();
  for (auto kind_xy : {CouplingKind::x, CouplingKind::y}) {
    for (double s : spec.node_sums(kind_xy)) {
      if (std::abs(s) > opt.verdict_tolerance * norm) v.decay_decoupled = false;
    }
  }

  const auto singles = space.sector_indices(1);
  for (std::size_t i : singles) {
    for (std::size_t j : singles) {
      if (i == j) continue;
      v.max_local_dephasing =
          std::max(v.max_local_dephasing, std::abs(r.local_dephasing(static_cast<Eigen::Index>(i),
                                                                     static_cast<Eigen::Index>(j))));
    }
  }
  v.dephasing_free = v.max_local_dephasing <= thr;

  for (std::size_t from : singles) {
    for (std::size_t to : singles) {
      if (from == to) continue;
      TransferComparison c;
      c.from = single_node(space.occupation(from));
      c.to = single_node(space.occupation(to));
      for (const auto& e : graph.incoherent_edges()) {
        if (e.from == c.from && e.to == c.to) c.requested = e.rate;
      }
      c.achieved = r.local_rates(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from));
      if (c.requested > 0.0) {
        c.relative_error = std::abs(c.achieved - c.requested) / c.requested;
        c.matches = c.relative_error <= opt.target_relative_tolerance;
      } else {
        c.relative_error = r.rate_scale > 0.0 ? std::abs(c.achieved) / r.rate_scale : 0.0;
        c.matches = std::abs(c.achieved) <= thr;
      }
      v.targets_reproduced = v.targets_reproduced && c.matches;
      v.max_transfer_rate = std::max(v.max_transfer_rate, c.achieved);
      if (c.achieved > thr) v.nontrivial_transfer = true;
      if (transfers) transfers->push_back(c);
    }
  }
  return v;
}

}  // namespace

RealizabilityReport classify_realizability(const Graph& graph, const BathCouplingSpec& spec,
                                           const RealizabilityOptions& options) {
  if (graph.node_count() != spec.node_count()) {
    throw DimensionMismatch("graph and bath spec have different node counts");
  }
  const bool decay = spec.has_kind(CouplingKind::x) || spec.has_kind(CouplingKind::y);
  const HilbertSpace space = options.space ? *options.space
                             : decay       ? HilbertSpace::full(graph.node_count())
                                           : HilbertSpace::walker(graph.node_count());
  const Eigensystem eig = eigendecompose(graph_hamiltonian(graph, space), options.tol_freq);
  eig.require_nondegenerate("classify_realizability");

  RealizabilityReport rep{analyze(eig, spec), {}, {}, {}, {}, true, false, {}};
  rep.combined = make_verdict("combined", rep.rates, spec, graph, options, &rep.transfers);

  for (auto kind : {CouplingKind::x, CouplingKind::y, CouplingKind::z}) {
    if (!spec.has_kind(kind)) continue;
    const BathCouplingSpec sub = spec.restricted_to(kind);
    rep.per_kind.push_back(
        make_verdict(to_string(kind), analyze(eig, sub), sub, graph, options, nullptr));
  }
  bool sector = true, decoupled = true, dephasing = true;
  for (const auto& v : rep.per_kind) {
    sector = sector && v.sector_preserving;
    decoupled = decoupled && v.decay_decoupled;
    dephasing = dephasing && v.dephasing_free;
  }
  rep.union_consistent = sector == rep.combined.sector_preserving &&
                         decoupled == rep.combined.decay_decoupled &&
                         dephasing == rep.combined.dephasing_free;

  if (decay) rep.decoupling = check_decoupling(spec, eig, options.verdict_tolerance);

  const Verdict& c = rep.combined;
  rep.realizable =
      c.sector_preserving && c.dephasing_free && c.targets_reproduced && c.nontrivial_transfer;

  if (decay && c.decay_decoupled) {
    rep.notes.emplace_back(
        "x/y couplings are effectively decoupled (per-node coefficient sums vanish); they "
        "induce no incoherent transitions at all");
  }
  if (!c.sector_preserving) {
    rep.notes.emplace_back(
        "excitation-number-changing local transitions are present (walker loss or creation)");
  }
  if (!c.nontrivial_transfer) {
    rep.notes.emplace_back(
        "no incoherent transfer between single-walker states: no nontrivial quantum "
        "stochastic walk is realizable with this coupling");
  }
  if (!c.dephasing_free) {
    rep.notes.emplace_back("residual local dephasing R_{mn,mn} != 0 on single-walker coherences");
  }
  if (!c.targets_reproduced) {
    rep.notes.emplace_back("achieved hopping rates differ from the requested incoherent edges");
  }
  rep.notes.emplace_back(
      "suppressing transitions through a reservoir spectrum that forbids energy matching is "
      "not analyzed");
  return rep;
}

}  // namespace qsw
