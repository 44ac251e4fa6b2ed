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

#include <gtest/gtest.h>

#include <cmath>

#include "qsw/engineer.hpp"
#include "qsw/random.hpp"

namespace qsw {
namespace {

const SpectralModel kOhmic{SpectralFamily::ohmic, 0.1, 5.0};

Operator spectator_hamiltonian() {
  const Graph g(4, {0.0, 0.37, 1.1, 1.62}, {{0, 1, cplx{0.3, 0.1}}, {2, 3, cplx{0.25, 0.0}}}, {});
  return graph_hamiltonian(g, HilbertSpace::walker(4));
}

EngineeringProblem spectator() {
  const Operator h = spectator_hamiltonian();
  const auto& s = h.space();
  return {h, {{s.index_of("0100"), s.index_of("1000"), 0.05}}, {{s.index_of("0010"), s.index_of("0001")}},
          4, kOhmic, 0.5};
}

EngineeringProblem triangle() {
  const Graph g(3, {0.0, 0.41, 0.97},
                {{0, 1, cplx{0.3, 0.1}}, {1, 2, cplx{0.25, -0.05}}, {0, 2, cplx{0.2, 0.0}}}, {});
  const Operator h = graph_hamiltonian(g, HilbertSpace::walker(3));
  const auto& s = h.space();
  const std::size_t a = s.index_of("100"), b = s.index_of("010"), c = s.index_of("001");
  return {h, {{b, a, 0.05}}, {{a, b}, {a, c}, {b, c}}, 3, kOhmic, 0.5};
}

SolverOptions quick(int starts = 4) {
  SolverOptions o;
  o.starts = starts;
  return o;
}

TEST(Solve, ZeroTargetsGiveZeroCouplings) {
  EngineeringProblem p = triangle();
  p.targets[0].rate = 0.0;
  const EngineeringSolution sol = solve(p, 1, quick());
  EXPECT_EQ(sol.status, SolveStatus::converged);
  EXPECT_EQ(sol.objective, 0.0);
  for (double eta : sol.coefficients) EXPECT_EQ(eta, 0.0);
  EXPECT_EQ(sol.best_start, 0);
}

TEST(Solve, NumberViolatingTargetIsInvalid) {
  const auto s = HilbertSpace::full(3);
  Rng rng(2);
  const Operator h = graph_hamiltonian(random_graph(rng, 3), s);
  EngineeringProblem p{h, {{s.index_of("100"), s.index_of("000"), 0.1}}, {}, 3, kOhmic, 0.5};
  EXPECT_THROW(solve(p, 1, quick()), InvalidTarget);
  p.targets = {{s.index_of("100"), s.index_of("100"), 0.1}};
  EXPECT_THROW(solve(p, 1, quick()), InvalidTarget);
}

TEST(Solve, RejectsMalformedProblems) {
  EngineeringProblem p = spectator();
  p.bath_count = 0;
  EXPECT_THROW(solve(p, 1, quick()), InvalidArgument);
  p = spectator();
  p.targets[0].rate = -0.1;
  EXPECT_THROW(solve(p, 1, quick()), InvalidArgument);
  p = spectator();
  p.zero_dephasing_pairs = {{1, 1}};
  EXPECT_THROW(solve(p, 1, quick()), InvalidArgument);
  p = spectator();
  p.targets[0].to = 99;
  EXPECT_THROW(solve(p, 1, quick()), IndexOutOfRange);
  p = spectator();
  Matrix bad = p.hamiltonian.matrix();
  bad(1, 2) += cplx(0.5, 0.0);
  p.hamiltonian = Operator(p.hamiltonian.space(), bad);
  EXPECT_THROW(solve(p, 1, quick()), NotHermitian);
}

TEST(Solve, SpectatorProblemConvergesAndRecomputes) {
  const EngineeringProblem p = spectator();
  const EngineeringSolution sol = solve(p, 42);
  ASSERT_EQ(sol.status, SolveStatus::converged);
  EXPECT_LT(sol.objective, 1e-16);
  EXPECT_LE(sol.recomputation_error, 1e-10);
  EXPECT_EQ(sol.coefficients.size(), sol.baths.size() * 4);

  const RateReport fresh = analyze(p.hamiltonian, sol.spec());
  for (const auto& pair : p.zero_dephasing_pairs) {
    const auto m = static_cast<Eigen::Index>(pair.m), n = static_cast<Eigen::Index>(pair.n);
    EXPECT_LT(std::abs(fresh.local_dephasing(m, n)), 1e-8);
  }
  for (const auto& t : p.targets) {
    const double got = fresh.local_rates(static_cast<Eigen::Index>(t.to), static_cast<Eigen::Index>(t.from));
    EXPECT_LT(std::abs(got - t.rate) / t.rate, 1e-4);
  }
  ASSERT_EQ(sol.targets.size(), 1u);
  EXPECT_NEAR(sol.targets[0].achieved, 0.05, 0.05 * 1e-4);
  EXPECT_FALSE(sol.certificate.applies);
}

TEST(Solve, DeterministicAcrossRunsAndThreads) {
  const EngineeringProblem p = spectator();
  SolverOptions one = quick(6);
  SolverOptions many = one;
  many.threads = 3;
  const EngineeringSolution a = solve(p, 9, one);
  const EngineeringSolution b = solve(p, 9, one);
  const EngineeringSolution c = solve(p, 9, many);
  EXPECT_EQ(a.coefficients, b.coefficients);
  EXPECT_EQ(a.coefficients, c.coefficients);
  EXPECT_EQ(a.objective, c.objective);
  EXPECT_EQ(a.best_start, c.best_start);
  EXPECT_EQ(a.trace.size(), c.trace.size());
}

TEST(Certificate, TriangleIsInfeasible) {
  const EngineeringProblem p = triangle();
  const InfeasibilityCertificate cert = positivity_certificate(p);
  ASSERT_TRUE(cert.applies);
  EXPECT_NEAR(cert.objective_lower_bound, 1.0 / 3.0, 1e-12);
  EXPECT_FALSE(cert.reason.empty());
  const EngineeringSolution sol = solve(p, 7, quick());
  EXPECT_EQ(sol.status, SolveStatus::infeasible_certified);
  EXPECT_GE(sol.objective, cert.objective_lower_bound);
}

TEST(Certificate, BoundHoldsOnRandomProblems) {
  Rng rng(13);
  for (int trial = 0; trial < 4; ++trial) {
    const auto s = HilbertSpace::walker(3);
    const Eigensystem eig = random_nondegenerate(rng, s);
    const Operator h(s, eig.vectors * eig.energies.cast<cplx>().asDiagonal() * eig.vectors.adjoint());
    EngineeringProblem p{h, {{2, 1, rng.uniform(0.01, 0.1)}}, {{1, 3}, {2, 3}}, 3, kOhmic, 0.5};
    const InfeasibilityCertificate cert = positivity_certificate(p);
    const EngineeringSolution sol = solve(p, 100 + trial, quick(3));
    EXPECT_GE(sol.objective + 1e-12, cert.objective_lower_bound);
  }
}

TEST(StatusNames, Strings) {
  EXPECT_EQ(to_string(SolveStatus::converged), "converged");
  EXPECT_EQ(to_string(SolveStatus::infeasible_certified), "infeasible-certified");
  EXPECT_EQ(to_string(SolveStatus::max_iterations), "max-iterations");
}

TEST(BruteForce, DiagonalHamiltonianHasNoPopulationTransfer) {
  const auto s = HilbertSpace::walker(3);
  const Operator h = graph_hamiltonian(Graph(3, {0.2, 0.9, 2.1}, {}, {}), s);
  const BathCouplingSpec spec(3, {{CouplingKind::z, {0.5, -0.3, 0.8}}}, kOhmic, 0.5);
  const SecularGenerator g = brute_force_secular(h, spec);
  EXPECT_LT(g.populations.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BruteForce, ZeroCouplingGivesZeroGenerator) {
  Rng rng(14);
  const auto s = HilbertSpace::walker(3);
  const Eigensystem eig = random_nondegenerate(rng, s);
  const Operator h(s, eig.vectors * eig.energies.cast<cplx>().asDiagonal() * eig.vectors.adjoint());
  const SecularGenerator g = brute_force_secular(h, BathCouplingSpec(3, {{CouplingKind::z, {0, 0, 0}}}, kOhmic, 0.5));
  EXPECT_EQ(g.local.matrix().cwiseAbs().maxCoeff(), 0.0);
}

TEST(BruteForce, RandomTwoQubitMatchesContraction) {
  Rng rng(15);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = HilbertSpace::full(2);
    const Operator h(s, random_hermitian(rng, 4));
    RandomSpecOptions opt;
    opt.kinds = {CouplingKind::x, CouplingKind::y, CouplingKind::z};
    const auto spec = random_spec(rng, 2, opt);
    const RateReport rep = analyze(h, spec);
    const SecularGenerator g = brute_force_secular(h, spec);
    EXPECT_LT((rep.local_rates - g.populations).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((rep.local_dephasing - g.coherences).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(BruteForce, RejectsLargeAndDegenerateInput) {
  const auto big = HilbertSpace::full(5);
  EXPECT_THROW(brute_force_secular(Operator::zero(big), BathCouplingSpec(5, {}, kOhmic, 0.5)), InvalidArgument);
  const auto s = HilbertSpace::full(2);
  EXPECT_THROW(brute_force_secular(graph_hamiltonian(Graph(2, {0.3, 1.1}, {}, {}), s),
                                   BathCouplingSpec(2, {{CouplingKind::z, {1.0, 0.0}}}, kOhmic, 0.5)),
               DegenerateTransitions);
}

}  // namespace
}  // namespace qsw
