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

#include <Eigen/Eigenvalues>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "qsw/errors.hpp"
#include "qsw/random.hpp"
#include "qsw/walk.hpp"

namespace qsw {
namespace {

Graph directed_pair() { return Graph(2, {}, {}, {{0, 1, 1.0}}); }

std::vector<double> grid(double stop, int count) {
  std::vector<double> t;
  for (int i = 0; i < count; ++i) t.push_back(stop * i / (count - 1));
  return t;
}

TEST(GraphHamiltonian, SingleExcitationBlockIsTheAdjacency) {
  const Graph g(2, {0.0, 0.0}, {{0, 1, cplx{1.0, 0.0}}}, {});
  const auto s = HilbertSpace::sectors(2, {1});
  const Matrix h = graph_hamiltonian(g, s).matrix();
  EXPECT_EQ(h(0, 0), cplx(0.0, 0.0));
  EXPECT_EQ(h(0, 1), cplx(1.0, 0.0));
  EXPECT_EQ(h(1, 0), cplx(1.0, 0.0));
}

TEST(GraphHamiltonian, OnsiteEnergiesOnOccupiedNodes) {
  const Graph g(2, {1.0, 2.0}, {}, {});
  const auto s = HilbertSpace::full(2);
  const Matrix h = graph_hamiltonian(g, s).matrix();
  EXPECT_EQ(h(0, 0), cplx(0.0, 0.0));
  EXPECT_EQ(h(static_cast<Eigen::Index>(s.index_of("10")), static_cast<Eigen::Index>(s.index_of("10"))), cplx(1.0, 0.0));
  EXPECT_EQ(h(static_cast<Eigen::Index>(s.index_of("01")), static_cast<Eigen::Index>(s.index_of("01"))), cplx(2.0, 0.0));
  EXPECT_EQ(h(3, 3), cplx(3.0, 0.0));
}

TEST(GraphHamiltonian, CommutesWithTotalNumber) {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = rng.integer(1, 4);
    const auto s = HilbertSpace::full(n);
    const Operator h = graph_hamiltonian(random_graph(rng, n), s);
    EXPECT_TRUE(h.is_hermitian());
    EXPECT_LT(commutator(h, total_number_operator(s)).matrix().cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Graph, RejectsInvalidEdges) {
  EXPECT_THROW(Graph(2, {}, {}, {{0, 1, -1.0}}), InvalidArgument);
  EXPECT_THROW(Graph(2, {}, {}, {{1, 1, 1.0}}), InvalidArgument);
  EXPECT_THROW(Graph(2, {}, {{0, 0, cplx{1.0, 0.0}}}, {}), InvalidArgument);
  EXPECT_THROW(Graph(2, {1.0}, {}, {}), InvalidArgument);
  EXPECT_THROW(Graph(2, {}, {}, {{0, 2, 1.0}}), IndexOutOfRange);
  EXPECT_THROW(Graph(2, {}, {}, {{0, 1, 1.0}, {0, 1, 2.0}}), InvalidArgument);
}

TEST(QswGenerator, JumpsFollowIncoherentEdges) {
  const auto s = HilbertSpace::walker(2);
  EXPECT_TRUE(qsw_generator(Graph(2, {}, {{0, 1, cplx{1.0, 0.0}}}, {}), s).jumps().empty());
  const LindbladModel m = qsw_generator(directed_pair(), s);
  ASSERT_EQ(m.jumps().size(), 1u);
  EXPECT_EQ(m.jumps()[0].rate, 1.0);
  EXPECT_EQ(m.jumps()[0].op.matrix(), hopping_operator(s, 0, 1).matrix());
  EXPECT_TRUE(m.jumps()[0].op.conserves_excitation_number());
}

TEST(Liouvillian, ZeroModelGivesZeroMatrix) {
  const auto s = HilbertSpace::full(2);
  const Superoperator l = liouvillian(LindbladModel(Operator::zero(s), {}));
  EXPECT_EQ(l.matrix().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Liouvillian, AmplitudeDampingSpectrum) {
  const auto s = HilbertSpace::full(1);
  const double gamma = 0.7;
  const Superoperator l =
      liouvillian(LindbladModel(Operator::zero(s), {{local_operator(s, 0, LocalKind::lower), gamma}}));
  Eigen::ComplexEigenSolver<Matrix> es(l.matrix());
  std::vector<double> eig;
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_NEAR(es.eigenvalues()(i).imag(), 0.0, 1e-14);
    eig.push_back(es.eigenvalues()(i).real());
  }
  std::sort(eig.begin(), eig.end());
  EXPECT_NEAR(eig[0], -gamma, 1e-14);
  EXPECT_NEAR(eig[1], -gamma / 2, 1e-14);
  EXPECT_NEAR(eig[2], -gamma / 2, 1e-14);
  EXPECT_NEAR(eig[3], 0.0, 1e-14);
}

TEST(Liouvillian, MatchesDirectApplicationAndPreservesTrace) {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = HilbertSpace::full(rng.integer(1, 3));
    const LindbladModel m = random_lindblad(rng, s, rng.integer(1, 3));
    const Superoperator l = liouvillian(m);
    const std::size_t d = s.dimension();
    const Matrix rho = random_hermitian(rng, d);
    EXPECT_LT((l.apply(rho) - m.apply(rho)).cwiseAbs().maxCoeff(), 1e-12);
    const Vector id = vectorize(Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
    EXPECT_LT((id.adjoint() * l.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Vectorization, ColumnStacking) {
  Matrix m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  const Vector v = vectorize(m);
  EXPECT_EQ(v(Superoperator::vec_index(0, 1, 2)), cplx(2.0, 0.0));
  EXPECT_EQ(v(1), cplx(3.0, 0.0));
  EXPECT_EQ(unvectorize(v, 2), m);
}

TEST(Propagate, ZeroTimeReturnsInitialStateExactly) {
  Rng rng(4);
  const auto s = HilbertSpace::full(2);
  const LindbladModel m = random_lindblad(rng, s, 2);
  const DensityMatrix rho0 = DensityMatrix::maximally_mixed(s);
  const std::vector<double> t{0.0, 0.5};
  for (Integrator method : {Integrator::expm, Integrator::rk45}) {
    PropagationOptions opt;
    opt.method = method;
    const Trajectory tr = propagate(m, rho0, t, opt);
    EXPECT_EQ(tr.states[0].matrix(), rho0.matrix());
    EXPECT_EQ(tr.metadata.method, method);
  }
}

TEST(Propagate, DirectedPairFollowsClosedForm) {
  const auto s = HilbertSpace::walker(2);
  const LindbladModel m = qsw_generator(directed_pair(), s);
  const auto t = grid(10.0, 41);
  for (Integrator method : {Integrator::expm, Integrator::rk45}) {
    PropagationOptions opt;
    opt.method = method;
    const Trajectory tr = propagate(m, DensityMatrix::basis_state(s, s.index_of("10")), t, opt);
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double p2 = tr.states[k].populations()(static_cast<Eigen::Index>(s.index_of("01")));
      EXPECT_NEAR(p2, 1.0 - std::exp(-t[k]), 1e-8) << "t=" << t[k];
    }
  }
}

TEST(Propagate, UnitaryLimitKeepsPurity) {
  Rng rng(6);
  const auto s = HilbertSpace::walker(4);
  const LindbladModel m = qsw_generator(random_graph(rng, 4), s);
  const Trajectory tr = propagate(m, DensityMatrix::basis_state(s, 1), grid(10.0, 21));
  for (const auto& rho : tr.states) EXPECT_NEAR(rho.purity(), 1.0, 1e-9);
}

TEST(Propagate, IntegratorsAgree) {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = HilbertSpace::full(rng.integer(1, 3));
    const LindbladModel m = random_lindblad(rng, s, 2);
    const auto t = grid(5.0, 11);
    const DensityMatrix rho0 = DensityMatrix::basis_state(s, 0);
    PropagationOptions a, b;
    a.method = Integrator::expm;
    b.method = Integrator::rk45;
    const Trajectory ta = propagate(m, rho0, t, a);
    const Trajectory tb = propagate(m, rho0, t, b);
    for (std::size_t k = 0; k < t.size(); ++k) {
      EXPECT_LT((ta.states[k].matrix() - tb.states[k].matrix()).cwiseAbs().maxCoeff(), 1e-8);
    }
    EXPECT_GT(tb.metadata.accepted_steps, 0u);
  }
}

TEST(Propagate, ExcitationNumberConserved) {
  Rng rng(8);
  const auto s = HilbertSpace::full(3);
  RandomGraphOptions opt;
  opt.incoherent_density = 0.5;
  const LindbladModel m = qsw_generator(random_graph(rng, 3, opt), s);
  Vector psi = Vector::Zero(8);
  psi(1) = 0.6;
  psi(3) = cplx(0.0, 0.8);
  const Matrix n = total_number_operator(s).matrix();
  const Trajectory tr = propagate(m, DensityMatrix::pure(s, psi), grid(8.0, 17));
  const double n0 = (n * tr.states[0].matrix()).trace().real();
  for (const auto& rho : tr.states) EXPECT_NEAR((n * rho.matrix()).trace().real(), n0, 1e-10);
}

TEST(Propagate, ChoiMatrixIsPositive) {
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = HilbertSpace::full(rng.integer(1, 2));
    const Superoperator l = liouvillian(random_lindblad(rng, s, 2));
    const Matrix p = l.matrix().exp();
    const auto d = static_cast<Eigen::Index>(s.dimension());
    Matrix choi(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = 0; k < d; ++k)
          for (Eigen::Index q = 0; q < d; ++q) choi(i * d + k, j * d + q) = p(k + d * q, i + d * j);
    EXPECT_GE(min_hermitian_eigenvalue(0.5 * (choi + choi.adjoint())), -1e-8);
  }
}

TEST(Propagate, RejectsBadTimesAndReportsTolerance) {
  Rng rng(10);
  const auto s = HilbertSpace::full(2);
  const LindbladModel m = random_lindblad(rng, s, 1);
  const DensityMatrix rho0 = DensityMatrix::basis_state(s, 0);
  const std::vector<double> descending{1.0, 0.5};
  EXPECT_THROW(propagate(m, rho0, descending), InvalidArgument);
  const std::vector<double> negative{-1.0};
  EXPECT_THROW(propagate(m, rho0, negative), InvalidArgument);
  PropagationOptions strict;
  strict.method = Integrator::rk45;
  strict.check_tolerance = 1e-300;
  const std::vector<double> t{0.0, 3.0};
  EXPECT_THROW(propagate(m, rho0, t, strict), ToleranceNotMet);
}

TEST(SteadyState, SymmetricPairIsUniform) {
  const auto s = HilbertSpace::sectors(2, {1});
  const Graph g(2, {}, {}, {{0, 1, 0.4}, {1, 0, 0.4}});
  const SteadyState ss = steady_state(qsw_generator(g, s));
  EXPECT_NEAR(ss.state.populations()(0), 0.5, 1e-12);
  EXPECT_NEAR(ss.state.populations()(1), 0.5, 1e-12);
  EXPECT_NEAR(ss.gap, 0.4, 1e-12);
}

TEST(SteadyState, DirectedPairAbsorbs) {
  const auto s = HilbertSpace::sectors(2, {1});
  const SteadyState ss = steady_state(qsw_generator(directed_pair(), s));
  EXPECT_NEAR(ss.state.populations()(static_cast<Eigen::Index>(s.index_of("01"))), 1.0, 1e-12);
  EXPECT_LT(ss.residual, 1e-10);
}

TEST(SteadyState, RandomErgodicResidual) {
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = HilbertSpace::full(2);
    const SteadyState ss = steady_state(random_lindblad(rng, s, 3));
    EXPECT_LT(ss.residual, 1e-10);
    EXPECT_GT(ss.gap, 0.0);
  }
}

TEST(SteadyState, DegenerateNullSpaceCarriesSolutions) {
  const auto s = HilbertSpace::walker(2);
  try {
    steady_state(qsw_generator(directed_pair(), s));
    FAIL() << "expected DegenerateSteadyState";
  } catch (const DegenerateSteadyState& e) {
    EXPECT_GE(e.solutions().size(), 2u);
  }
}

TEST(ClassicalOracle, SymmetricPairClosedForm) {
  const double g = 0.3;
  const Graph graph(2, {}, {}, {{0, 1, g}, {1, 0, g}});
  RealVector p0(2);
  p0 << 1.0, 0.0;
  const auto t = grid(5.0, 11);
  const auto p = classical_oracle(graph, p0, t);
  for (std::size_t k = 0; k < t.size(); ++k) {
    EXPECT_NEAR(p[k](0), 0.5 * (1.0 + std::exp(-2.0 * g * t[k])), 1e-12);
    EXPECT_NEAR(p[k].sum(), 1.0, 1e-12);
    EXPECT_GE(p[k].minCoeff(), 0.0);
  }
  EXPECT_EQ(p[0], p0);
}

TEST(Limits, ClassicalAndQuantum) {
  Rng rng(13);
  RandomGraphOptions opt;
  opt.incoherent_density = 0.6;
  const int n = 4;
  const Graph g = random_graph(rng, n, opt);
  const auto s = HilbertSpace::sectors(n, {1});
  const auto t = grid(10.0, 11);

  RealVector p0 = RealVector::Zero(n);
  p0(0) = 0.7;
  p0(2) = 0.3;
  Matrix rho0 = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) rho0(j, j) = p0(j);
  const Trajectory tr =
      propagate(qsw_generator(g.without_hamiltonian(), s), DensityMatrix(s, rho0), t);
  const auto oracle = classical_oracle(g, p0, t);
  for (std::size_t k = 0; k < t.size(); ++k) {
    EXPECT_LT((tr.states[k].populations() - oracle[k]).cwiseAbs().maxCoeff(), 1e-8);
  }

  const Operator h = graph_hamiltonian(g, s);
  Vector psi = Vector::Zero(n);
  psi(1) = 1.0;
  const Trajectory q = propagate(qsw_generator(g.without_jumps(), s), DensityMatrix::pure(s, psi), t);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const Vector phi = (cplx(0.0, -t[k]) * h.matrix()).exp() * psi;
    EXPECT_LT((q.states[k].populations() - phi.cwiseAbs2()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

}  // namespace
}  // namespace qsw
