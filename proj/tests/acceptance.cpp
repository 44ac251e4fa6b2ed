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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any selected criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "CLI11.hpp"
#include "qsw/engineer.hpp"
#include "qsw/microscopic.hpp"
#include "qsw/random.hpp"
#include "qsw/serialize.hpp"
#include "qsw/verify.hpp"
#include "qsw/walk.hpp"

namespace fs = std::filesystem;
using namespace qsw;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<double> grid(double stop, int count) {
  std::vector<double> t;
  for (int i = 0; i < count; ++i) t.push_back(stop * i / (count - 1));
  return t;
}

Outcome dynamics_fidelity(std::uint64_t seed) {
  const auto start = Clock::now();
  Rng rng(seed);
  double trace = 0.0, herm = 0.0, min_eig = 1.0;
  const auto times = grid(10.0, 21);
  for (int i = 0; i < 100; ++i) {
    const auto space = HilbertSpace::full(rng.integer(1, 4));
    const LindbladModel model = random_lindblad(rng, space, rng.integer(1, 3));
    const auto d = static_cast<Eigen::Index>(space.dimension());
    Vector psi(d);
    for (Eigen::Index k = 0; k < d; ++k) psi(k) = rng.complex_normal();
    PropagationOptions opt;
    opt.method = i % 2 == 0 ? Integrator::expm : Integrator::rk45;
    const Trajectory tr = propagate(model, DensityMatrix::pure(space, psi.normalized()), times, opt);
    for (const DensityMatrix& rho : tr.states) {
      trace = std::max(trace, std::abs(rho.matrix().trace() - 1.0));
      herm = std::max(herm, (rho.matrix() - rho.matrix().adjoint()).cwiseAbs().maxCoeff());
      min_eig = std::min(min_eig, min_hermitian_eigenvalue(0.5 * (rho.matrix() + rho.matrix().adjoint())));
    }
  }
  const double elapsed = seconds_since(start);
  return {trace <= 1e-10 && herm <= 1e-10 && min_eig >= -1e-10 && elapsed < 60.0,
          "100 models, trace err " + num(trace) + ", hermiticity err " + num(herm) +
              ", min eigenvalue " + num(min_eig) + ", " + num(elapsed) + " s"};
}

Outcome limiting_cases(std::uint64_t seed) {
  Rng rng(seed);
  RandomGraphOptions opt;
  opt.incoherent_density = 0.6;
  double classical = 0.0, quantum = 0.0;
  const auto times = grid(10.0, 21);
  for (int i = 0; i < 20; ++i) {
    const int n = rng.integer(2, 6);
    const auto space = HilbertSpace::sectors(n, {1});
    const Graph g = random_graph(rng, n, opt);
    const int start = rng.integer(0, n - 1);

    RealVector p0 = RealVector::Zero(n);
    p0(start) = 1.0;
    const Trajectory walk = propagate(qsw_generator(g.without_hamiltonian(), space),
                                      DensityMatrix::basis_state(space, static_cast<std::size_t>(start)), times);
    const auto oracle = classical_oracle(g, p0, times);
    for (std::size_t k = 0; k < times.size(); ++k)
      classical = std::max(classical, (walk.states[k].populations() - oracle[k]).cwiseAbs().maxCoeff());

    const Matrix h = graph_hamiltonian(g, space).matrix();
    Vector psi = Vector::Zero(n);
    psi(start) = 1.0;
    const Trajectory unitary = propagate(qsw_generator(g.without_jumps(), space),
                                         DensityMatrix::pure(space, psi), times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const Vector phi = (cplx(0.0, -times[k]) * h).exp() * psi;
      quantum = std::max(quantum, (unitary.states[k].populations() - phi.cwiseAbs2()).cwiseAbs().maxCoeff());
    }
  }
  return {classical <= 1e-8 && quantum <= 1e-9,
          "20 graphs each, classical deviation " + num(classical) + ", unitary deviation " + num(quantum)};
}

Outcome from_suite(const SuiteResult& s, double budget_seconds, Clock::time_point start) {
  const double elapsed = seconds_since(start);
  std::string detail = s.name + ", " + std::to_string(s.instances) + " instances, worst " + num(s.worst) +
                       " vs bound " + num(s.bound) + ", " + num(elapsed) + " s";
  for (const auto& m : s.messages) detail += "; " + m;
  return {s.passed && elapsed < budget_seconds, detail};
}

Outcome engineering(std::uint64_t) {
  const auto start = Clock::now();
  const auto space = HilbertSpace::sectors(3, {1});
  const Graph g(3, {0.0, 0.41, 0.97},
                {{0, 1, cplx{0.3, 0.1}}, {1, 2, cplx{0.25, -0.05}}, {0, 2, cplx{0.2, 0.0}}}, {});
  const Operator h = graph_hamiltonian(g, space);
  const std::size_t a = space.index_of("100"), b = space.index_of("010"), c = space.index_of("001");
  const EngineeringProblem problem{h, {{b, a, 0.05}}, {{a, b}, {a, c}, {b, c}}, 3,
                                   SpectralModel{SpectralFamily::ohmic, 0.1, 5.0}, 0.5};
  const EngineeringSolution sol = solve(problem, 7);

  const RateReport fresh = analyze(h, sol.spec());
  double dephasing = 0.0;
  for (const auto& p : problem.zero_dephasing_pairs)
    dephasing = std::max(dephasing, std::abs(fresh.local_dephasing(static_cast<Eigen::Index>(p.m),
                                                                   static_cast<Eigen::Index>(p.n))));
  const double achieved = fresh.local_rates(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a));
  const double rel = std::abs(achieved - 0.05) / 0.05;
  const double elapsed = seconds_since(start);

  bool invalid_target = false;
  try {
    const auto full = HilbertSpace::full(3);
    solve({graph_hamiltonian(g, full), {{full.index_of("100"), full.index_of("000"), 0.05}}, {}, 3,
           problem.spectral, problem.temperature},
          7);
  } catch (const InvalidTarget&) {
    invalid_target = true;
  }

  const bool pass = sol.status == SolveStatus::converged && dephasing < 1e-8 && rel < 1e-4 &&
                    elapsed < 300.0 && invalid_target;
  std::string detail = "status " + to_string(sol.status) + ", objective " + num(sol.objective) +
                       ", max |dephasing| " + num(dephasing) + ", rate error " + num(rel) + ", " +
                       num(elapsed) + " s, number-violating target " +
                       (invalid_target ? "rejected" : "NOT rejected");
  if (sol.certificate.applies)
    detail += "; objective lower bound " + num(sol.certificate.objective_lower_bound) + ": " + sol.certificate.reason;
  return {pass, detail};
}

BathCouplingSpec merge(const std::vector<BathCouplingSpec>& parts) {
  std::vector<Bath> baths;
  for (const auto& p : parts) baths.insert(baths.end(), p.baths().begin(), p.baths().end());
  return BathCouplingSpec(parts.front().node_count(), baths, parts.front().spectral(), parts.front().temperature());
}

Outcome depolarizing_union(std::uint64_t seed) {
  Rng rng(seed);
  int consistent = 0, sector_preserving = 0;
  RandomGraphOptions gopt;
  gopt.incoherent_density = 0.5;
  const SpectralModel spectral{SpectralFamily::ohmic, 0.1, 5.0};
  for (int i = 0; i < 10; ++i) {
    const int n = i % 3 == 0 ? 1 : 3;
    const Graph g = random_graph(rng, n, gopt);
    RandomSpecOptions zopt;
    zopt.spectral = spectral;
    BathCouplingSpec spec = [&] {
      if (i % 2 == 0) {
        RandomSpecOptions opt = zopt;
        opt.kinds = {CouplingKind::x, CouplingKind::y, CouplingKind::z};
        return random_spec(rng, n, opt);
      }
      return merge({zero_sum_spec(rng, n, CouplingKind::x, 2, spectral, 0.5),
                    zero_sum_spec(rng, n, CouplingKind::y, 2, spectral, 0.5), random_spec(rng, n, zopt)});
    }();
    const RealizabilityReport rep = classify_realizability(g, spec);
    bool sector = true, decay = true, dephasing = true;
    for (const Verdict& v : rep.per_kind) {
      sector = sector && v.sector_preserving;
      decay = decay && v.decay_decoupled;
      dephasing = dephasing && v.dephasing_free;
    }
    const bool ok = rep.per_kind.size() == 3 && rep.union_consistent &&
                    sector == rep.combined.sector_preserving && decay == rep.combined.decay_decoupled &&
                    dephasing == rep.combined.dephasing_free;
    consistent += ok ? 1 : 0;
    sector_preserving += rep.combined.sector_preserving ? 1 : 0;
  }
  return {consistent == 10, std::to_string(consistent) + "/10 reports equal the per-kind conjunction (" +
                                std::to_string(sector_preserving) + " sector-preserving)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome cli_reproducibility(std::uint64_t) {
  const fs::path root = fs::temp_directory_path() / ("qsw_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const std::string exe = QSW_CLI_PATH;
  const fs::path configs = QSW_CONFIG_DIR;
  const auto run = [&](const std::string& job, const std::string& cfg, const fs::path& out) {
    return shell("\"" + exe + "\" " + job + " --config \"" + (configs / cfg).string() + "\" --out \"" +
                 out.string() + "\" > /dev/null 2>&1");
  };
  bool identical = true;
  std::string detail;
  const std::pair<const char*, const char*> jobs[] = {{"analyze", "depolarizing"},
                                                      {"engineer", "engineer_spectator"},
                                                      {"simulate", "ring_qsw"}};
  for (const auto& [job, stem] : jobs) {
    const std::string cfg = std::string(stem) + ".json";
    const int first = run(job, cfg, root / "a");
    const int second = run(job, cfg, root / "b");
    bool same = first == 0 && second == 0;
    for (const auto& e : fs::directory_iterator(root / "a"))
      same = same && slurp(e.path()) == slurp(root / "b" / e.path().filename());
    identical = identical && same;
    detail += std::string(stem) + (same ? " identical, " : " DIFFERS, ");
    fs::remove_all(root / "a");
    fs::remove_all(root / "b");
  }
  const int verify = run("verify", "verify.json", root / "v");
  fs::remove_all(root);
  detail += "verify exit " + std::to_string(verify);
  return {identical && verify == 0, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> criteria;
  std::uint64_t seed = 20240601;
  app.add_option("--criterion", criteria, "criterion number (repeatable; default all)")
      ->check(CLI::Range(1, 9));
  app.add_option("--seed", seed, "base seed");
  CLI11_PARSE(app, argc, argv);
  if (criteria.empty()) criteria = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  const std::vector<std::pair<std::string, std::function<Outcome(std::uint64_t)>>> checks = {
      {"dynamics fidelity", dynamics_fidelity},
      {"limiting cases", limiting_cases},
      {"decoupling theorem",
       [](std::uint64_t s) { const auto t = Clock::now(); return from_suite(decoupling_suite(s), 1e9, t); }},
      {"sector selection rule",
       [](std::uint64_t s) { const auto t = Clock::now(); return from_suite(sector_suite(s), 1e9, t); }},
      {"oracle equivalence",
       [](std::uint64_t s) { const auto t = Clock::now(); return from_suite(oracle_suite(s), 120.0, t); }},
      {"detailed balance",
       [](std::uint64_t s) { const auto t = Clock::now(); return from_suite(detailed_balance_suite(s), 1e9, t); }},
      {"engineering solver", engineering},
      {"depolarizing union", depolarizing_union},
      {"cli reproducibility", cli_reproducibility},
  };

  bool all = true;
  for (int c : criteria) {
    const auto& [name, fn] = checks[static_cast<std::size_t>(c - 1)];
    Outcome o;
    try {
      o = fn(seed + static_cast<std::uint64_t>(c));
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c << " (" << name << "): " << o.detail << '\n';
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
