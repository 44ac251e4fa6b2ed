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

#include "qsw/cli.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "qsw/engineer.hpp"
#include "qsw/errors.hpp"
#include "qsw/serialize.hpp"
#include "qsw/verify.hpp"

namespace qsw {

namespace fs = std::filesystem;

namespace {

Json metadata(const ExperimentConfig& cfg) {
  return Json{{"tool", kToolName},
              {"version", kToolVersion},
              {"job", to_string(cfg.job)},
              {"config_hash", cfg.hash()},
              {"seed", cfg.seed}};
}

std::string comment_block(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "# tool=" << kToolName << " version=" << kToolVersion << '\n'
     << "# job=" << to_string(cfg.job) << " config_hash=" << cfg.hash() << '\n'
     << "# seed=" << cfg.seed << '\n';
  return os.str();
}

Json populations(const HilbertSpace& space, const RealVector& p) {
  Json out = Json::object();
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    out[space.label(i)] = p(static_cast<Eigen::Index>(i));
  }
  return out;
}

JobResult simulate(const ExperimentConfig& cfg) {
  const HilbertSpace space = cfg.resolve_space();
  const LindbladModel model = qsw_generator(*cfg.graph, space);
  Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(space.dimension()),
                            static_cast<Eigen::Index>(space.dimension()));
  for (const auto& [l, w] : cfg.initial) {
    const auto i = static_cast<Eigen::Index>(space.index_of(l));
    rho(i, i) += w;
  }
  PropagationOptions opt;
  opt.method = cfg.integrator;
  opt.rtol = cfg.tolerances.rtol;
  opt.atol = cfg.tolerances.atol;
  opt.check_tolerance = cfg.tolerances.check;
  const Trajectory traj = propagate(model, DensityMatrix(space, rho), cfg.times, opt);

  Json summary = metadata(cfg);
  summary["basis"] = space.labels();
  summary["samples"] = traj.times.size();
  summary["propagation"] = to_json(traj.metadata);
  summary["final_time"] = traj.times.back();
  summary["final_populations"] = populations(space, traj.states.back().populations());
  if (cfg.steady_state) {
    const SteadyState ss = steady_state(model);
    summary["steady_state"] = Json{{"populations", populations(space, ss.state.populations())},
                                   {"residual", ss.residual},
                                   {"gap", ss.gap}};
  }
  JobResult r;
  r.files.emplace_back(cfg.stem + ".trajectory.csv",
                       trajectory_csv(traj, cfg.coherences, comment_block(cfg)));
  r.files.emplace_back(cfg.stem + ".summary.json", dump_json(summary));
  return r;
}

JobResult analyze_job(const ExperimentConfig& cfg) {
  RealizabilityOptions opt;
  opt.verdict_tolerance = cfg.tolerances.verdict;
  opt.target_relative_tolerance = cfg.tolerances.target_relative;
  opt.tol_freq = cfg.tolerances.tol_freq;
  opt.space = cfg.resolve_space();
  const BathCouplingSpec spec = cfg.bath_spec();
  const RealizabilityReport rep = classify_realizability(*cfg.graph, spec, opt);
  Json report = metadata(cfg);
  report["spec"] = to_json(spec);
  report["report"] = to_json(rep);
  JobResult r;
  r.files.emplace_back(cfg.stem + ".report.json", dump_json(report));
  r.files.emplace_back(cfg.stem + ".verdicts.txt", comment_block(cfg) + verdict_table(rep));
  return r;
}

JobResult engineer_job(const ExperimentConfig& cfg) {
  const HilbertSpace space = cfg.resolve_space();
  EngineeringProblem problem{graph_hamiltonian(*cfg.graph, space), {}, {},
                             cfg.engineer.bath_count, cfg.spectral, cfg.temperature};
  for (const auto& t : cfg.engineer.targets) {
    problem.targets.push_back({space.index_of(t.to), space.index_of(t.from), t.rate});
  }
  for (const auto& [m, n] : cfg.engineer.zero_dephasing) {
    problem.zero_dephasing_pairs.push_back({space.index_of(m), space.index_of(n)});
  }
  SolverOptions opt;
  opt.starts = cfg.engineer.starts;
  opt.max_iterations = cfg.engineer.max_iterations;
  opt.convergence = cfg.tolerances.convergence;
  opt.tol_freq = cfg.tolerances.tol_freq;
  const EngineeringSolution sol = solve(problem, cfg.seed, opt);
  Json doc = metadata(cfg);
  doc["solution"] = to_json(sol);
  JobResult r;
  r.files.emplace_back(cfg.stem + ".solution.json", dump_json(doc));
  r.files.emplace_back(cfg.stem + ".trace.csv", trace_csv(sol, comment_block(cfg)));
  if (sol.status != SolveStatus::converged) {
    r.code = kExitNotConverged;
    r.message = "solver finished with status " + to_string(sol.status);
    if (!sol.certificate.reason.empty()) r.message += " (" + sol.certificate.reason + ")";
  }
  return r;
}

JobResult verify_job(const ExperimentConfig& cfg) {
  const auto suites = run_verification(cfg.seed);
  Json doc = metadata(cfg);
  Json list = Json::array();
  bool ok = true;
  std::ostringstream msg;
  for (const auto& s : suites) {
    list.push_back(to_json(s));
    ok = ok && s.passed;
    msg << s.name << ": " << (s.passed ? "PASS" : "FAIL") << " (" << s.instances
        << " instances, worst " << format_double(s.worst) << ", bound " << format_double(s.bound)
        << ")\n";
  }
  doc["suites"] = std::move(list);
  doc["passed"] = ok;
  JobResult r;
  r.files.emplace_back(cfg.stem + ".verify.json", dump_json(doc));
  r.message = msg.str();
  if (!ok) r.code = kExitVerification;
  return r;
}

}  // namespace

JobResult run_job(const ExperimentConfig& cfg) {
  try {
    switch (cfg.job) {
      case JobKind::simulate: return simulate(cfg);
      case JobKind::analyze: return analyze_job(cfg);
      case JobKind::engineer: return engineer_job(cfg);
      case JobKind::verify: return verify_job(cfg);
    }
  } catch (const ConfigInvalid& e) {
    return {kExitConfig, e.what(), {}};
  } catch (const DegenerateTransitions& e) {
    return {kExitDegenerate, e.what(), {}};
  } catch (const InvalidTarget& e) {
    return {kExitInvalidTarget, e.what(), {}};
  } catch (const SectorViolation& e) {
    return {kExitInvalidTarget, e.what(), {}};
  } catch (const ToleranceNotMet& e) {
    return {kExitTolerance, e.what(), {}};
  } catch (const DegenerateSteadyState& e) {
    return {kExitSteadyState, e.what(), {}};
  } catch (const InvalidArgument& e) {
    return {kExitConfig, e.what(), {}};
  } catch (const std::exception& e) {
    return {kExitInternal, e.what(), {}};
  }
  return {kExitInternal, "unknown job", {}};
}

void write_atomically(const std::string& directory,
                      const std::vector<std::pair<std::string, std::string>>& files) {
  static std::atomic<unsigned long long> counter{0};
  const fs::path dir(directory);
  fs::create_directories(dir);
  std::vector<std::pair<fs::path, fs::path>> staged;
  try {
    for (const auto& [name, content] : files) {
      const fs::path final_path = dir / name;
      fs::path tmp = final_path;
      tmp += ".tmp" + std::to_string(counter++);
      staged.emplace_back(tmp, final_path);
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << content;
      out.close();
      if (!out) throw Error("cannot write " + tmp.string());
    }
    for (const auto& [tmp, final_path] : staged) fs::rename(tmp, final_path);
  } catch (...) {
    std::error_code ec;
    for (const auto& [tmp, final_path] : staged) fs::remove(tmp, ec);
    throw;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum stochastic walks: simulation, rate analysis and coupling engineering",
               kToolName};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1, 1);
  std::vector<std::string> configs;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::vector<std::string> tols;
  const std::pair<const char*, const char*> subcommands[] = {
      {"simulate", "propagate a walk and write its trajectory"},
      {"analyze", "microscopic rates and realizability verdicts"},
      {"engineer", "solve for z couplings that meet rate and dephasing targets"},
      {"verify", "run the built-in invariant suites"}};
  for (const auto& [name, help] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", configs, "experiment config (JSON); repeat for sweeps")
        ->required();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--jobs", jobs, "configs processed concurrently")
        ->check(CLI::Range(1, 1024))
        ->capture_default_str();
    sub->add_option("--tol", tols, "tolerance override: FLOAT or key=FLOAT (repeatable)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string sub = app.get_subcommands().front()->get_name();
  ConfigOverrides overrides;
  overrides.job = job_from_string(sub);
  overrides.seed = seed;
  overrides.tolerances = tols;

  std::vector<int> codes(configs.size(), kExitOk);
  std::vector<std::string> messages(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      std::ostringstream msg;
      try {
        const ExperimentConfig cfg = load_config(configs[i], overrides);
        JobResult r = run_job(cfg);
        if (!r.files.empty() && (r.code == kExitOk || r.code == kExitNotConverged ||
                                 r.code == kExitVerification)) {
          write_atomically(out_dir, r.files);
        }
        codes[i] = r.code;
        msg << configs[i] << ": " << (r.code == kExitOk ? "ok" : "failed (exit " +
                                                                     std::to_string(r.code) + ")");
        for (const auto& f : r.files) msg << ' ' << (fs::path(out_dir) / f.first).string();
        msg << '\n';
        if (!r.message.empty()) msg << r.message << (r.message.back() == '\n' ? "" : "\n");
      } catch (const ConfigInvalid& e) {
        codes[i] = kExitConfig;
        msg << configs[i] << ": invalid config: " << e.what() << '\n';
      } catch (const std::exception& e) {
        codes[i] = kExitInternal;
        msg << configs[i] << ": error: " << e.what() << '\n';
      }
      messages[i] = msg.str();
    }
  };
  const int nthreads = std::min<int>(jobs, static_cast<int>(configs.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  int status = kExitOk;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    (codes[i] == kExitOk ? out : err) << messages[i];
    if (status == kExitOk) status = codes[i];
  }
  return status;
}

}  // namespace qsw
