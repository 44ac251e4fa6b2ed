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

#include "qsw/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace qsw {

// ---------------------------------------------------------------- Graph

Graph::Graph(int node_count, std::vector<double> onsite_energies,
             std::vector<CoherentEdge> coherent_edges,
             std::vector<IncoherentEdge> incoherent_edges)
    : node_count_(node_count),
      onsite_(std::move(onsite_energies)),
      coherent_(std::move(coherent_edges)),
      incoherent_(std::move(incoherent_edges)) {
  if (node_count_ < 1) throw InvalidArgument("graph needs at least one node");
  if (onsite_.empty()) onsite_.assign(static_cast<std::size_t>(node_count_), 0.0);
  if (onsite_.size() != static_cast<std::size_t>(node_count_)) {
    throw InvalidArgument("expected one onsite energy per node");
  }
  for (double e : onsite_) {
    if (!std::isfinite(e)) throw InvalidArgument("onsite energy not finite");
  }
  auto check_node = [&](int v, const char* what) {
    if (v < 0 || v >= node_count_) {
      throw IndexOutOfRange(std::string(what) + " node " + std::to_string(v) + " out of range");
    }
  };
  std::set<std::pair<int, int>> seen;
  for (const auto& e : coherent_) {
    check_node(e.a, "coherent edge");
    check_node(e.b, "coherent edge");
    if (e.a == e.b) throw InvalidArgument("coherent self-loop on node " + std::to_string(e.a));
    if (!std::isfinite(e.weight.real()) || !std::isfinite(e.weight.imag())) {
      throw InvalidArgument("coherent edge weight not finite");
    }
    if (!seen.insert({std::min(e.a, e.b), std::max(e.a, e.b)}).second) {
      throw InvalidArgument("duplicate coherent edge " + std::to_string(e.a) + "-" +
                            std::to_string(e.b));
    }
  }
  seen.clear();
  for (const auto& e : incoherent_) {
    check_node(e.from, "incoherent edge");
    check_node(e.to, "incoherent edge");
    if (e.from == e.to) {
      throw InvalidArgument("incoherent self-loop on node " + std::to_string(e.from));
    }
    if (!std::isfinite(e.rate) || e.rate < 0.0) {
      throw InvalidArgument("incoherent rate must be finite and >= 0");
    }
    if (!seen.insert({e.from, e.to}).second) {
      throw InvalidArgument("duplicate incoherent edge " + std::to_string(e.from) + "->" +
                            std::to_string(e.to));
    }
  }
}

Graph Graph::without_hamiltonian() const {
  return Graph(node_count_, std::vector<double>(onsite_.size(), 0.0), {}, incoherent_);
}

Graph Graph::without_jumps() const { return Graph(node_count_, onsite_, coherent_, {}); }

// ---------------------------------------------------------------- models

LindbladModel::LindbladModel(Operator hamiltonian, std::vector<Jump> jumps)
    : hamiltonian_(std::move(hamiltonian)), jumps_(std::move(jumps)) {
  if (!hamiltonian_.is_hermitian()) throw NotHermitian("Lindblad Hamiltonian not Hermitian");
  for (const auto& j : jumps_) {
    if (j.op.space() != hamiltonian_.space()) {
      throw DimensionMismatch("jump operator lives on a different space");
    }
    if (!std::isfinite(j.rate) || j.rate < 0.0) {
      throw InvalidArgument("jump rates must be finite and >= 0");
    }
  }
}

Matrix LindbladModel::apply(const Matrix& rho) const {
  const cplx i{0.0, 1.0};
  const Matrix& h = hamiltonian_.matrix();
  Matrix out = -i * (h * rho - rho * h);
  for (const auto& j : jumps_) {
    const Matrix& l = j.op.matrix();
    const Matrix k = l.adjoint() * l;
    out += j.rate * (l * rho * l.adjoint() - 0.5 * (k * rho + rho * k));
  }
  return out;
}

Superoperator::Superoperator(HilbertSpace space, Matrix matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  const auto n = static_cast<Eigen::Index>(space_.dimension() * space_.dimension());
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw DimensionMismatch("superoperator must be d^2 x d^2");
  }
}

Matrix Superoperator::apply(const Matrix& rho) const {
  return unvectorize(matrix_ * vectorize(rho), dimension());
}

Vector vectorize(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvectorize(const Vector& v, std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  if (v.size() != d * d) throw DimensionMismatch("vector length is not d^2");
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

Operator graph_hamiltonian(const Graph& graph, const HilbertSpace& space) {
  if (space.node_count() != graph.node_count()) {
    throw DimensionMismatch("graph has " + std::to_string(graph.node_count()) +
                            " nodes, space has " + std::to_string(space.node_count()));
  }
  Operator h = Operator::zero(space);
  for (int m = 0; m < graph.node_count(); ++m) {
    const double e = graph.onsite_energies()[static_cast<std::size_t>(m)];
    if (e != 0.0) h += cplx{e, 0.0} * number_operator(space, m);
  }
  for (const auto& edge : graph.coherent_edges()) {
    // weight sigma^+_a sigma^-_b moves the walker b -> a
    h += edge.weight * hopping_operator(space, edge.b, edge.a);
    h += std::conj(edge.weight) * hopping_operator(space, edge.a, edge.b);
  }
  return h;
}

LindbladModel qsw_generator(const Graph& graph, const HilbertSpace& space) {
  std::vector<Jump> jumps;
  for (const auto& edge : graph.incoherent_edges()) {
    if (edge.rate == 0.0) continue;
    jumps.push_back({hopping_operator(space, edge.from, edge.to), edge.rate});
  }
  return LindbladModel(graph_hamiltonian(graph, space), std::move(jumps));
}

Superoperator liouvillian(const LindbladModel& model) {
  const auto d = static_cast<Eigen::Index>(model.space().dimension());
  const Matrix id = Matrix::Identity(d, d);
  const Matrix& h = model.hamiltonian().matrix();
  const cplx i{0.0, 1.0};
  Matrix l = -i * (Eigen::kroneckerProduct(id, h).eval() -
                   Eigen::kroneckerProduct(h.transpose(), id).eval());
  for (const auto& jump : model.jumps()) {
    if (jump.rate == 0.0) continue;
    const Matrix& a = jump.op.matrix();
    const Matrix k = a.adjoint() * a;
    l += jump.rate *
         (Eigen::kroneckerProduct(a.conjugate(), a).eval() -
          0.5 * (Eigen::kroneckerProduct(id, k).eval() +
                 Eigen::kroneckerProduct(k.transpose(), id).eval()));
  }
  return Superoperator(model.space(), std::move(l));
}

std::string to_string(Integrator method) {
  switch (method) {
    case Integrator::automatic: return "auto";
    case Integrator::expm: return "expm";
    case Integrator::rk45: return "rk45";
  }
  return "?";
}

Integrator integrator_from_string(const std::string& name) {
  if (name == "auto") return Integrator::automatic;
  if (name == "expm") return Integrator::expm;
  if (name == "rk45") return Integrator::rk45;
  throw InvalidArgument("unknown integrator '" + name + "'");
}

// ---------------------------------------------------------------- propagation

namespace {

void check_times(std::span<const double> times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] < 0.0) {
      throw InvalidArgument("propagation times must be finite and >= 0");
    }
    if (i > 0 && times[i] < times[i - 1]) {
      throw InvalidArgument("propagation times must be ascending");
    }
  }
}

class StepperExpm {
 public:
  explicit StepperExpm(const LindbladModel& model) : generator_(liouvillian(model).matrix()) {}

  Vector advance(const Vector& v, double dt, PropagationMetadata& meta) {
    // Output grids built by repeated addition differ in the last bits; reuse the
    // cached propagator when the step matches to within rounding.
    if (!cache_valid_ || std::abs(dt - cached_dt_) > 64.0 * kEps * std::max(1.0, dt)) {
      cached_ = (generator_ * dt).exp();
      cached_dt_ = dt;
      cache_valid_ = true;
      ++meta.exponentials;
    }
    return cached_ * v;
  }

 private:
  static constexpr double kEps = std::numeric_limits<double>::epsilon();
  Matrix generator_;
  Matrix cached_;
  double cached_dt_ = 0.0;
  bool cache_valid_ = false;
};

// Dormand-Prince 5(4) with embedded error control, acting on the d x d matrix.
class StepperRk45 {
 public:
  StepperRk45(const LindbladModel& model, const PropagationOptions& opt) : opt_(opt) {
    const cplx i{0.0, 1.0};
    heff_ = model.hamiltonian().matrix();
    double scale = 2.0 * heff_.cwiseAbs().rowwise().sum().maxCoeff();
    for (const auto& j : model.jumps()) {
      if (j.rate == 0.0) continue;
      const Matrix s = std::sqrt(j.rate) * j.op.matrix();
      heff_ -= 0.5 * i * (s.adjoint() * s);
      scale += 2.0 * std::pow(s.cwiseAbs().rowwise().sum().maxCoeff(), 2);
      jumps_.push_back(s);
    }
    step_ = 0.05 / std::max(scale, 1e-3);
  }

  Matrix rhs(const Matrix& rho) const {
    const cplx i{0.0, 1.0};
    Matrix out = -i * (heff_ * rho - rho * heff_.adjoint());
    for (const auto& s : jumps_) out += s * rho * s.adjoint();
    return out;
  }

  Matrix advance(Matrix y, double duration, PropagationMetadata& meta) {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    // b - b* (fifth minus fourth order weights)
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    double t = 0.0;
    while (t < duration) {
      if (meta.accepted_steps + meta.rejected_steps >= opt_.max_steps) {
        throw ToleranceNotMet("rk45: step budget exhausted");
      }
      double h = std::min(step_, duration - t);
      const bool last = h >= duration - t;
      const Matrix k1 = rhs(y);
      const Matrix k2 = rhs(y + h * (a21 * k1));
      const Matrix k3 = rhs(y + h * (a31 * k1 + a32 * k2));
      const Matrix k4 = rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const Matrix k5 = rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Matrix k6 = rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      Matrix y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Matrix k7 = rhs(y_new);
      const Matrix err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double ratio = 0.0;
      for (Eigen::Index c = 0; c < y.cols(); ++c) {
        for (Eigen::Index r = 0; r < y.rows(); ++r) {
          const double sc =
              opt_.atol + opt_.rtol * std::max(std::abs(y(r, c)), std::abs(y_new(r, c)));
          ratio = std::max(ratio, std::abs(err(r, c)) / sc);
        }
      }
      const double factor =
          ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
      if (ratio <= 1.0) {
        t = last ? duration : t + h;
        y = std::move(y_new);
        ++meta.accepted_steps;
        // Do not let a short final step shrink the next interval's first step.
        if (!last || factor < 1.0) step_ = h * factor;
      } else {
        ++meta.rejected_steps;
        step_ = h * factor;
      }
    }
    return y;
  }

 private:
  PropagationOptions opt_;
  Matrix heff_;
  std::vector<Matrix> jumps_;
  double step_ = 0.0;
};

}  // namespace

Trajectory propagate(const LindbladModel& model, const DensityMatrix& rho0,
                     std::span<const double> times, const PropagationOptions& options) {
  if (rho0.space() != model.space()) throw DimensionMismatch("initial state space mismatch");
  check_times(times);
  const std::size_t d = model.space().dimension();

  Trajectory traj;
  traj.metadata.rtol = options.rtol;
  traj.metadata.atol = options.atol;
  Integrator method = options.method;
  if (method == Integrator::automatic) {
    method = d * d <= options.dense_limit ? Integrator::expm : Integrator::rk45;
  }
  traj.metadata.method = method;
  traj.metadata.min_eigenvalue = rho0.min_eigenvalue();

  const DensityTolerances tol{options.check_tolerance, options.check_tolerance,
                              -options.check_tolerance};
  auto record = [&](double t, Matrix m) {
    try {
      DensityMatrix state(model.space(), std::move(m), tol);
      auto& meta = traj.metadata;
      meta.max_trace_error = std::max(meta.max_trace_error, state.trace_error());
      meta.max_hermiticity_error = std::max(meta.max_hermiticity_error, state.hermiticity_error());
      meta.min_eigenvalue = std::min(meta.min_eigenvalue, state.min_eigenvalue());
      traj.times.push_back(t);
      traj.states.push_back(std::move(state));
    } catch (const InvalidArgument& e) {
      throw ToleranceNotMet("propagate: state at t = " + std::to_string(t) +
                            " fails checks at tolerance " +
                            std::to_string(options.check_tolerance) + ": " + e.what());
    }
  };

  double t_prev = 0.0;
  if (method == Integrator::expm) {
    StepperExpm stepper(model);
    Vector v = vectorize(rho0.matrix());
    for (double t : times) {
      if (t > t_prev) v = stepper.advance(v, t - t_prev, traj.metadata);
      record(t, unvectorize(v, d));
      t_prev = t;
    }
  } else {
    StepperRk45 stepper(model, options);
    Matrix y = rho0.matrix();
    for (double t : times) {
      if (t > t_prev) y = stepper.advance(std::move(y), t - t_prev, traj.metadata);
      record(t, y);
      t_prev = t;
    }
  }
  return traj;
}

SteadyState steady_state(const LindbladModel& model, double zero_tol) {
  const std::size_t d = model.space().dimension();
  const Matrix l = liouvillian(model).matrix();
  Eigen::BDCSVD<Matrix> svd(l, Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  const auto n = sv.size();
  const double cutoff = zero_tol * std::max(1.0, sv(0));
  Eigen::Index nullity = 0;
  for (Eigen::Index k = n - 1; k >= 0 && sv(k) < cutoff; --k) ++nullity;
  nullity = std::max<Eigen::Index>(nullity, 1);
  if (nullity > 1) {
    std::vector<Matrix> solutions;
    for (Eigen::Index k = n - nullity; k < n; ++k) {
      solutions.push_back(unvectorize(svd.matrixV().col(k), d));
    }
    throw DegenerateSteadyState("steady_state: " + std::to_string(nullity) +
                                    " independent stationary states",
                                std::move(solutions));
  }
  Matrix rho = unvectorize(svd.matrixV().col(n - 1), d);
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const double residual = (l * vectorize(rho)).norm();

  double gap = 0.0;
  if (d > 1 && d * d <= 1024) {
    Eigen::ComplexEigenSolver<Matrix> es(l, false);
    gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      const cplx lam = es.eigenvalues()(k);
      if (std::abs(lam) > cutoff) gap = std::min(gap, std::abs(lam.real()));
    }
    if (!std::isfinite(gap)) gap = 0.0;
  } else if (d > 1) {
    gap = std::numeric_limits<double>::quiet_NaN();
  }
  return SteadyState{DensityMatrix(model.space(), std::move(rho)), residual, gap};
}

RealMatrix rate_matrix(const Graph& graph) {
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  RealMatrix q = RealMatrix::Zero(n, n);
  for (const auto& e : graph.incoherent_edges()) {
    q(e.to, e.from) += e.rate;
    q(e.from, e.from) -= e.rate;
  }
  return q;
}

std::vector<RealVector> classical_oracle(const Graph& graph, const RealVector& p0,
                                         std::span<const double> times) {
  if (p0.size() != graph.node_count()) throw DimensionMismatch("p0 length != node count");
  if ((p0.array() < 0.0).any() || std::abs(p0.sum() - 1.0) > 1e-12) {
    throw InvalidArgument("p0 must be a probability vector");
  }
  check_times(times);
  const RealMatrix q = rate_matrix(graph);
  std::vector<RealVector> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t == 0.0) {
      out.push_back(p0);
    } else {
      out.push_back((q * t).exp() * p0);
    }
  }
  return out;
}

}  // namespace qsw
