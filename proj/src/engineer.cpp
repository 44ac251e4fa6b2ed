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

#include "qsw/engineer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "qsw/errors.hpp"

namespace qsw {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::infeasible_certified: return "infeasible-certified";
    case SolveStatus::max_iterations: return "max-iterations";
  }
  return "?";
}

BathCouplingSpec EngineeringSolution::spec() const {
  return BathCouplingSpec(space.node_count(), baths, spectral, temperature);
}

namespace {

void validate(const EngineeringProblem& p) {
  const HilbertSpace& space = p.hamiltonian.space();
  const std::size_t d = space.dimension();
  if (p.bath_count < 1) throw InvalidArgument("engineering needs at least one bath");
  if (!p.hamiltonian.is_hermitian()) throw NotHermitian("engineering Hamiltonian is not Hermitian");
  if (!p.hamiltonian.conserves_excitation_number(1e-12)) {
    throw InvalidArgument("engineering Hamiltonian must conserve the excitation number");
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& t : p.targets) {
    if (t.to >= d || t.from >= d) throw IndexOutOfRange("target index out of range");
    if (!std::isfinite(t.rate) || t.rate < 0.0) {
      throw InvalidArgument("target rates must be finite and >= 0");
    }
    if (t.to == t.from) throw InvalidTarget("target must connect two different basis states");
    if (space.excitation_number(t.to) != space.excitation_number(t.from)) {
      throw InvalidTarget("target " + space.label(t.from) + " -> " + space.label(t.to) +
                          " changes the excitation number; z couplings cannot produce it");
    }
    if (!seen.insert({t.to, t.from}).second) throw InvalidArgument("duplicate rate target");
  }
  seen.clear();
  for (const auto& z : p.zero_dephasing_pairs) {
    if (z.m >= d || z.n >= d) throw IndexOutOfRange("dephasing pair index out of range");
    if (z.m == z.n) throw InvalidArgument("dephasing pair must join two different states");
    if (!seen.insert({std::min(z.m, z.n), std::max(z.m, z.n)}).second) {
      throw InvalidArgument("duplicate dephasing pair");
    }
  }
}

double reference_rate(const EngineeringProblem& p) {
  double ref = 0.0;
  for (const auto& t : p.targets) ref = std::max(ref, t.rate);
  return ref > 0.0 ? ref : 1.0;
}

// Bath layout: n single-node baths (one parameter each) followed by shared
// baths (n parameters each); below n baths every bath is shared.
struct Layout {
  int nodes = 0;
  int local = 0;
  int shared = 0;

  int parameters() const { return local + shared * nodes; }

  std::vector<Bath> baths(const Eigen::VectorXd& x) const {
    std::vector<Bath> out;
    const auto n = static_cast<std::size_t>(nodes);
    for (int j = 0; j < local; ++j) {
      Bath b{CouplingKind::z, std::vector<double>(n, 0.0)};
      b.coefficients[static_cast<std::size_t>(j)] = x(j);
      out.push_back(std::move(b));
    }
    for (int k = 0; k < shared; ++k) {
      Bath b{CouplingKind::z, std::vector<double>(n, 0.0)};
      for (int j = 0; j < nodes; ++j) b.coefficients[static_cast<std::size_t>(j)] = x(local + k * nodes + j);
      out.push_back(std::move(b));
    }
    return out;
  }
};

Layout make_layout(int nodes, int bath_count) {
  if (bath_count >= nodes) return {nodes, nodes, bath_count - nodes};
  return {nodes, 0, bath_count};
}

struct Context {
  Eigensystem eig;
  OverlapTensors overlaps;
  Layout layout;
  SpectralModel spectral;
  double temperature = 0.0;
  double ref = 1.0;
  std::vector<RateTarget> targets;      // reduced indices
  std::vector<BasisPair> zero_pairs;    // reduced indices
  int values = 0;

  struct Evaluation {
    std::vector<double> rates;
    std::vector<cplx> dephasing;
  };

  Evaluation evaluate(const Eigen::VectorXd& x) const {
    const BathCouplingSpec spec(layout.nodes, layout.baths(x), spectral, temperature);
    const EigenRates rates = golden_rule_rates(eig, spec);
    Evaluation e;
    for (const auto& t : targets) {
      e.rates.push_back(local_rate_element(overlaps, rates, t.to, t.from).real());
    }
    for (const auto& z : zero_pairs) {
      e.dephasing.push_back(local_dephasing_element(overlaps, rates, z.m, z.n));
    }
    return e;
  }

  void residuals(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    const Evaluation e = evaluate(x);
    f.setZero(values);
    Eigen::Index k = 0;
    for (std::size_t i = 0; i < targets.size(); ++i) f(k++) = (e.rates[i] - targets[i].rate) / ref;
    for (const cplx& g : e.dephasing) {
      f(k++) = g.real() / ref;
      f(k++) = g.imag() / ref;
    }
  }
};

struct Residual {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const Context* ctx = nullptr;

  Residual() = default;
  explicit Residual(const Context* c) : ctx(c) {}
  int inputs() const { return ctx->layout.parameters(); }
  int values() const { return ctx->values; }
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    ctx->residuals(x, f);
    return 0;
  }
};

struct StartResult {
  Eigen::VectorXd x;
  double objective = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::vector<TraceEntry> trace;
};

double objective_at(const Context& ctx, const Eigen::VectorXd& x) {
  Eigen::VectorXd f;
  ctx.residuals(x, f);
  return f.squaredNorm();
}

StartResult run_start(const Context& ctx, int start, Eigen::VectorXd x,
                      const SolverOptions& opt) {
  StartResult r;
  r.objective = objective_at(ctx, x);
  if (opt.record_trace) r.trace.push_back({start, 0, r.objective});
  const double good_enough = opt.convergence * 1e-6;
  if (r.objective > good_enough) {
    Eigen::NumericalDiff<Residual, Eigen::Central> functor{Residual(&ctx)};
    Eigen::LevenbergMarquardt<decltype(functor)> lm(functor);
    lm.parameters.ftol = 1e-15;
    lm.parameters.xtol = 1e-15;
    lm.parameters.maxfev = std::numeric_limits<int>::max() / 4;
    lm.minimizeInit(x);
    while (r.iterations < opt.max_iterations) {
      const auto status = lm.minimizeOneStep(x);
      ++r.iterations;
      const double obj = lm.fvec.squaredNorm();
      if (opt.record_trace) r.trace.push_back({start, r.iterations, obj});
      if (obj <= good_enough || status != Eigen::LevenbergMarquardtSpace::Running) break;
    }
    r.objective = objective_at(ctx, x);
  }
  r.x = std::move(x);
  return r;
}

// Raw 64-bit draws mapped to [-1, 1) keep starts identical across standard libraries.
Eigen::VectorXd random_start(std::mt19937_64& rng, int size, double scale) {
  Eigen::VectorXd x(size);
  for (int i = 0; i < size; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x(i) = scale * (2.0 * u - 1.0);
  }
  return x;
}

double max_rate_function(const Eigensystem& eig, const SpectralModel& spectral, double t) {
  const BathCouplingSpec probe(eig.space.node_count(), {}, spectral, t);
  double g = probe.zero_frequency_rate();
  const auto d = eig.energies.size();
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) {
      const double w = eig.energies(b) - eig.energies(a);
      g = std::max({g, probe.rate_function(w), probe.rate_function(-w)});
    }
  }
  return g;
}

}  // namespace

InfeasibilityCertificate positivity_certificate(const EngineeringProblem& problem,
                                               double threshold) {
  validate(problem);
  const HilbertSpace& space = problem.hamiltonian.space();
  const double ref = reference_rate(problem);
  InfeasibilityCertificate c;
  for (const auto& t : problem.targets) {
    if (t.rate <= 0.0) continue;
    int k = 0;
    for (const auto& z : problem.zero_dephasing_pairs) {
      if (z.m == t.from || z.n == t.from) ++k;
    }
    if (k == 0) continue;
    const double x = t.rate / ref;
    const double bound = x * x * k / (4.0 + k);
    if (bound > c.objective_lower_bound) {
      c.objective_lower_bound = bound;
      std::ostringstream os;
      os << "target " << space.label(t.from) << " -> " << space.label(t.to) << " needs outflow from "
         << space.label(t.from) << ", which appears in " << k
         << " zero-dephasing pair(s); complete positivity gives |R_{mn,mn}| >= (out_m + out_n)/2, "
            "so the objective is at least "
         << bound;
      c.reason = os.str();
    }
  }
  c.applies = c.objective_lower_bound >= threshold;
  return c;
}

EngineeringSolution solve(const EngineeringProblem& problem, std::uint64_t seed,
                          const SolverOptions& options) {
  validate(problem);
  if (options.starts < 1) throw InvalidArgument("solver needs at least one start");
  const HilbertSpace& space = problem.hamiltonian.space();
  const int nodes = space.node_count();

  std::vector<int> sectors;
  for (const auto& t : problem.targets) sectors.push_back(space.excitation_number(t.from));
  for (const auto& z : problem.zero_dephasing_pairs) {
    sectors.push_back(space.excitation_number(z.m));
    sectors.push_back(space.excitation_number(z.n));
  }
  if (sectors.empty()) sectors.push_back(1);
  std::sort(sectors.begin(), sectors.end());
  sectors.erase(std::unique(sectors.begin(), sectors.end()), sectors.end());
  const HilbertSpace reduced = HilbertSpace::sectors(nodes, sectors);

  std::vector<std::size_t> to_full(reduced.dimension());
  for (std::size_t i = 0; i < reduced.dimension(); ++i) {
    to_full[i] = *space.find(reduced.occupation(i));
  }
  auto to_reduced = [&](std::size_t full_index) {
    return *reduced.find(space.occupation(full_index));
  };
  const auto dr = static_cast<Eigen::Index>(reduced.dimension());
  Matrix hr(dr, dr);
  for (Eigen::Index i = 0; i < dr; ++i) {
    for (Eigen::Index j = 0; j < dr; ++j) {
      hr(i, j) = problem.hamiltonian.matrix()(static_cast<Eigen::Index>(to_full[static_cast<std::size_t>(i)]),
                                              static_cast<Eigen::Index>(to_full[static_cast<std::size_t>(j)]));
    }
  }
  const Operator h_reduced(reduced, hr);

  Context ctx{eigendecompose(h_reduced, options.tol_freq), {}, make_layout(nodes, problem.bath_count),
              problem.spectral, problem.temperature, reference_rate(problem), {}, {}, 0};
  ctx.eig.require_nondegenerate("engineering solve");
  ctx.overlaps = overlap_tensors(ctx.eig);
  for (const auto& t : problem.targets) ctx.targets.push_back({to_reduced(t.to), to_reduced(t.from), t.rate});
  for (const auto& z : problem.zero_dephasing_pairs) ctx.zero_pairs.push_back({to_reduced(z.m), to_reduced(z.n)});
  const int params = ctx.layout.parameters();
  ctx.values = std::max(static_cast<int>(ctx.targets.size() + 2 * ctx.zero_pairs.size()), params);

  const double gmax = max_rate_function(ctx.eig, problem.spectral, problem.temperature);
  const double scale = gmax > 0.0 ? std::sqrt(ctx.ref / gmax) : 1.0;
  std::mt19937_64 rng(seed);
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Zero(params));
  for (int s = 1; s < options.starts; ++s) starts.push_back(random_start(rng, params, scale));

  std::vector<StartResult> results(starts.size());
  const int threads = std::clamp(options.threads, 1, static_cast<int>(starts.size()));
  if (threads == 1) {
    for (std::size_t s = 0; s < starts.size(); ++s) {
      results[s] = run_start(ctx, static_cast<int>(s), starts[s], options);
    }
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t s = static_cast<std::size_t>(w); s < starts.size();
             s += static_cast<std::size_t>(threads)) {
          results[s] = run_start(ctx, static_cast<int>(s), starts[s], options);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  std::size_t best = 0;
  for (std::size_t s = 1; s < results.size(); ++s) {
    if (results[s].objective < results[best].objective) best = s;
  }
  const StartResult& win = results[best];

  EngineeringSolution sol{.space = space, .reduced_space = reduced};
  sol.spectral = problem.spectral;
  sol.temperature = problem.temperature;
  sol.seed = seed;
  sol.baths = ctx.layout.baths(win.x);
  sol.node_coupling.assign(static_cast<std::size_t>(nodes), 0.0);
  for (const auto& b : sol.baths) {
    for (std::size_t j = 0; j < b.coefficients.size(); ++j) {
      sol.coefficients.push_back(b.coefficients[j]);
      sol.node_coupling[j] += b.coefficients[j];
    }
  }
  sol.rate_reference = ctx.ref;
  sol.objective = win.objective;
  sol.best_start = static_cast<int>(best);
  sol.iterations = win.iterations;
  for (const auto& r : results) sol.trace.insert(sol.trace.end(), r.trace.begin(), r.trace.end());

  Eigen::VectorXd f;
  ctx.residuals(win.x, f);
  sol.residuals.assign(f.data(), f.data() + ctx.targets.size() + 2 * ctx.zero_pairs.size());
  const Context::Evaluation e = ctx.evaluate(win.x);
  for (std::size_t i = 0; i < problem.targets.size(); ++i) {
    const RateTarget& t = problem.targets[i];
    const double err = t.rate > 0.0 ? std::abs(e.rates[i] - t.rate) / t.rate
                                    : std::abs(e.rates[i]) / ctx.ref;
    sol.targets.push_back({t, e.rates[i], err});
  }
  for (std::size_t i = 0; i < problem.zero_dephasing_pairs.size(); ++i) {
    sol.dephasing.push_back({problem.zero_dephasing_pairs[i], e.dephasing[i]});
  }

  // Independent recomputation from the coefficients alone.
  const RateReport check = analyze(h_reduced, sol.spec(), options.tol_freq);
  for (std::size_t i = 0; i < ctx.targets.size(); ++i) {
    const double v = check.local_rates(static_cast<Eigen::Index>(ctx.targets[i].to),
                                       static_cast<Eigen::Index>(ctx.targets[i].from));
    sol.recomputation_error = std::max(sol.recomputation_error, std::abs(v - e.rates[i]));
  }
  for (std::size_t i = 0; i < ctx.zero_pairs.size(); ++i) {
    const cplx v = check.local_dephasing(static_cast<Eigen::Index>(ctx.zero_pairs[i].m),
                                         static_cast<Eigen::Index>(ctx.zero_pairs[i].n));
    sol.recomputation_error = std::max(sol.recomputation_error, std::abs(v - e.dephasing[i]));
  }

  sol.certificate = positivity_certificate(problem, options.convergence);
  if (sol.objective < options.convergence) {
    sol.status = SolveStatus::converged;
  } else if (sol.certificate.applies) {
    sol.status = SolveStatus::infeasible_certified;
  } else {
    sol.status = SolveStatus::max_iterations;
  }
  return sol;
}

SecularGenerator brute_force_secular(const Operator& hamiltonian, const BathCouplingSpec& spec,
                                     double tol_freq) {
  const HilbertSpace& space = hamiltonian.space();
  const auto d = static_cast<Eigen::Index>(space.dimension());
  if (d > 16) throw InvalidArgument("brute_force_secular is limited to dimension 16");
  const Eigensystem eig = eigendecompose(hamiltonian, tol_freq);
  eig.require_nondegenerate("brute_force_secular");
  const Matrix& u = eig.vectors;
  const Matrix ve = u.adjoint() * vbar(spec, space).matrix() * u;

  std::vector<Jump> jumps;
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      if (a == b) continue;
      const double w = std::norm(ve(a, b)) * spec.rate_function(eig.energies(b) - eig.energies(a));
      if (w <= 0.0) continue;
      jumps.push_back({Operator(space, u.col(a) * u.col(b).adjoint()), w});
    }
  }
  const double g0 = spec.zero_frequency_rate();
  if (g0 > 0.0) {
    const Matrix diag = ve.diagonal().real().cast<cplx>().asDiagonal();
    jumps.push_back({Operator(space, u * diag * u.adjoint()), g0});
  }
  const Superoperator l = liouvillian(LindbladModel(Operator::zero(space), std::move(jumps)));

  SecularGenerator out{l, RealMatrix::Zero(d, d), Matrix::Zero(d, d)};
  const auto dim = static_cast<std::size_t>(d);
  for (std::size_t m = 0; m < dim; ++m) {
    for (std::size_t n = 0; n < dim; ++n) {
      const auto mm = static_cast<Eigen::Index>(Superoperator::vec_index(m, m, dim));
      const auto nn = static_cast<Eigen::Index>(Superoperator::vec_index(n, n, dim));
      const auto mn = static_cast<Eigen::Index>(Superoperator::vec_index(m, n, dim));
      out.populations(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) =
          l.matrix()(mm, nn).real();
      out.coherences(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = l.matrix()(mn, mn);
    }
  }
  return out;
}

}  // namespace qsw
