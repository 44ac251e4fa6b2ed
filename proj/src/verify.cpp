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

#include "qsw/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qsw/engineer.hpp"
#include "qsw/random.hpp"

namespace qsw {

namespace {

// Two-node full registers always carry a degenerate Bohr frequency, so the
// full-space suites draw from one, three and four nodes.
int draw_nodes(Rng& rng) {
  static constexpr int kNodes[] = {1, 3, 4};
  return kNodes[rng.integer(0, 2)];
}

SpectralModel draw_spectral(Rng& rng) {
  return {SpectralFamily::ohmic, rng.uniform(0.05, 0.5), rng.uniform(2.0, 8.0)};
}

double max_cross_sector(const RateReport& r) {
  const HilbertSpace& s = r.space();
  double worst = 0.0;
  for (Eigen::Index n = 0; n < r.local_rates.cols(); ++n) {
    for (Eigen::Index m = 0; m < r.local_rates.rows(); ++m) {
      if (s.excitation_number(static_cast<std::size_t>(m)) !=
          s.excitation_number(static_cast<std::size_t>(n))) {
        worst = std::max(worst, std::abs(r.local_rates(m, n)));
      }
    }
  }
  return worst;
}

Eigensystem random_generic(Rng& rng, const HilbertSpace& space) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Eigensystem eig = eigendecompose(Operator(space, random_hermitian(rng, space.dimension())));
    if (eig.nondegenerate()) return eig;
  }
  throw Error("no nondegenerate random Hamiltonian found");
}

void fail(SuiteResult& r, int instance, const std::string& what) {
  ++r.failures;
  if (r.messages.size() < 20) {
    r.messages.push_back("instance " + std::to_string(instance) + ": " + what);
  }
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

SuiteResult decoupling_suite(std::uint64_t seed, int instances) {
  SuiteResult r{"decoupling"};
  r.bound = 1e-12;
  Rng rng(seed);
  double weakest_violation = INFINITY;
  for (int i = 0; i < instances; ++i) {
    const int n = draw_nodes(rng);
    const Eigensystem eig = random_nondegenerate(rng, HilbertSpace::full(n));
    const auto spec = zero_sum_spec(rng, n, CouplingKind::x, rng.integer(2, 3), draw_spectral(rng),
                                    rng.uniform(0.1, 2.0));
    const EigenRates rates = golden_rule_rates(eig, spec);
    const double worst = rates.transition.maxCoeff();
    r.worst = std::max(r.worst, worst);
    const DecouplingVerdict v = check_decoupling(spec, eig);
    if (!(worst < r.bound) || !v.decoupled || !v.numerically_confirmed) {
      fail(r, i, "zero-sum spec left eigen rate " + num(worst));
    }
    ++r.instances;
  }
  for (int i = 0; i < instances; ++i) {
    const int n = draw_nodes(rng);
    const Eigensystem eig = random_nondegenerate(rng, HilbertSpace::full(n));
    const auto base = zero_sum_spec(rng, n, CouplingKind::x, rng.integer(2, 3), draw_spectral(rng),
                                    rng.uniform(0.1, 2.0));
    std::vector<Bath> baths = base.baths();
    const auto node = static_cast<std::size_t>(rng.integer(0, n - 1));
    baths[0].coefficients[node] += rng.uniform(0.2, 1.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    const BathCouplingSpec spec(n, baths, base.spectral(), base.temperature());
    const double worst = max_cross_sector(analyze(eig, spec));
    weakest_violation = std::min(weakest_violation, worst);
    const DecouplingVerdict v = check_decoupling(spec, eig);
    if (!(worst > 1e-10) || v.decoupled || v.forbidden_local_transitions.empty()) {
      fail(r, instances + i, "broken zero sum gave excitation-changing rate " + num(worst));
    }
    ++r.instances;
  }
  r.messages.insert(r.messages.begin(),
                    "max eigen rate over zero-sum specs " + num(r.worst) +
                        "; weakest excitation-changing rate over broken specs " +
                        num(weakest_violation));
  r.passed = r.failures == 0;
  return r;
}

SuiteResult sector_suite(std::uint64_t seed, int instances) {
  SuiteResult r{"sector-rule"};
  r.bound = 1e-12;
  Rng rng(seed);
  for (int i = 0; i < instances; ++i) {
    const int n = draw_nodes(rng);
    const Eigensystem eig = random_nondegenerate(rng, HilbertSpace::full(n));
    RandomSpecOptions opt;
    opt.kinds = {CouplingKind::z};
    opt.baths_per_kind = rng.integer(1, 3);
    opt.spectral = draw_spectral(rng);
    opt.temperature = rng.uniform(0.1, 2.0);
    const double worst = max_cross_sector(analyze(eig, random_spec(rng, n, opt)));
    r.worst = std::max(r.worst, worst);
    if (!(worst < r.bound)) fail(r, i, "cross-sector rate " + num(worst));
    ++r.instances;
  }

  // Delocalized two-node walker with asymmetric z coupling.
  const HilbertSpace walker = HilbertSpace::walker(2);
  const Graph g(2, {0.0, 0.3}, {{0, 1, cplx{0.5, 0.0}}}, {});
  const BathCouplingSpec spec(2, {Bath{CouplingKind::z, {1.0, 0.0}}},
                              {SpectralFamily::ohmic, 0.1, 5.0}, 0.5);
  const RateReport rep = analyze(graph_hamiltonian(g, walker), spec);
  const auto a = static_cast<Eigen::Index>(*walker.find(0b01));
  const auto b = static_cast<Eigen::Index>(*walker.find(0b10));
  const double transfer = std::min(rep.local_rates(a, b), rep.local_rates(b, a));
  if (!(transfer > 1e-6)) fail(r, instances, "single-walker transfer only " + num(transfer));
  ++r.instances;
  r.messages.insert(r.messages.begin(), "max cross-sector rate " + num(r.worst) +
                                            "; two-node single-walker transfer " + num(transfer));
  r.passed = r.failures == 0;
  return r;
}

SuiteResult oracle_suite(std::uint64_t seed, int instances) {
  SuiteResult r{"oracle-equivalence"};
  r.bound = 1e-10;
  Rng rng(seed);
  for (int i = 0; i < instances; ++i) {
    Eigensystem eig = [&] {
      if (i % 2 == 0) return random_generic(rng, HilbertSpace::full(rng.integer(1, 3)));
      return random_nondegenerate(rng, HilbertSpace::walker(rng.integer(2, 7)));
    }();
    RandomSpecOptions opt;
    opt.kinds = i % 2 == 0 ? std::vector<CouplingKind>{CouplingKind::x, CouplingKind::y,
                                                       CouplingKind::z}
                           : std::vector<CouplingKind>{CouplingKind::z};
    opt.baths_per_kind = rng.integer(1, 2);
    opt.spectral = draw_spectral(rng);
    opt.temperature = rng.uniform(0.1, 2.0);
    const auto spec = random_spec(rng, eig.space.node_count(), opt);
    const Operator h(eig.space, eig.vectors * eig.energies.cast<cplx>().asDiagonal() *
                                    eig.vectors.adjoint());
    const RateReport rep = analyze(h, spec);
    const SecularGenerator oracle = brute_force_secular(h, spec);
    const double err = std::max((rep.local_rates - oracle.populations).cwiseAbs().maxCoeff(),
                                (rep.local_dephasing - oracle.coherences).cwiseAbs().maxCoeff());
    r.worst = std::max(r.worst, err);
    if (!(err < r.bound)) fail(r, i, "contraction and oracle differ by " + num(err));
    ++r.instances;
  }
  r.messages.insert(r.messages.begin(), "max deviation " + num(r.worst));
  r.passed = r.failures == 0;
  return r;
}

SuiteResult detailed_balance_suite(std::uint64_t seed, int instances) {
  SuiteResult r{"detailed-balance"};
  r.bound = 1e-8;
  Rng rng(seed);
  static constexpr double kTemperatures[] = {0.25, 1.0, 4.0};
  int compared = 0;
  for (int i = 0; i < instances; ++i) {
    const Eigensystem eig = random_generic(rng, HilbertSpace::full(rng.integer(1, 3)));
    RandomSpecOptions opt;
    opt.kinds = {CouplingKind::x, CouplingKind::z};
    opt.spectral = draw_spectral(rng);
    const auto base = random_spec(rng, eig.space.node_count(), opt);
    for (double t : kTemperatures) {
      const BathCouplingSpec spec(base.node_count(), base.baths(), base.spectral(), t);
      const EigenRates rates = golden_rule_rates(eig, spec);
      const auto d = rates.transition.rows();
      double worst = 0.0;
      for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
          const double up = rates.transition(a, b);
          const double down = rates.transition(b, a);
          if (a == b || up <= 1e-12 || down <= 1e-12) continue;
          const double expected = std::exp(-(eig.energies(a) - eig.energies(b)) / t);
          worst = std::max(worst, std::abs(up / down / expected - 1.0));
          ++compared;
        }
      }
      r.worst = std::max(r.worst, worst);
      if (!(worst < r.bound)) fail(r, i, "Boltzmann ratio off by " + num(worst) + " at T=" + num(t));
      ++r.instances;
    }
  }
  r.messages.insert(r.messages.begin(), "max relative deviation " + num(r.worst) + " over " +
                                            std::to_string(compared) + " rate pairs");
  r.passed = r.failures == 0 && compared > 0;
  return r;
}

std::vector<SuiteResult> run_verification(std::uint64_t seed) {
  return {decoupling_suite(seed), sector_suite(seed + 1), oracle_suite(seed + 2),
          detailed_balance_suite(seed + 3)};
}

}  // namespace qsw
