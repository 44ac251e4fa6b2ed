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

#include "qsw/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace qsw {

namespace {

void write(const Json& v, int indent, int depth, std::string& out) {
  const bool pretty = indent > 0;
  auto newline = [&](int d) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(d * indent), ' ');
  };
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += pretty ? ": " : ":";
        write(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(v.begin(), v.end(),
                                     [](const Json& e) { return e.is_structured(); });
      out += '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += pretty && flat ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        write(e, indent, depth + 1, out);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += format_double(v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

Json matrix_rows(const RealMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json cplx_json(cplx z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json verdict_json(const Verdict& v) {
  return Json{{"kind", v.kind},
              {"sector_preserving", v.sector_preserving},
              {"decay_decoupled", v.decay_decoupled},
              {"dephasing_free", v.dephasing_free},
              {"targets_reproduced", v.targets_reproduced},
              {"nontrivial_transfer", v.nontrivial_transfer},
              {"max_forbidden_rate", v.max_forbidden_rate},
              {"max_local_dephasing", v.max_local_dephasing},
              {"max_transfer_rate", v.max_transfer_rate}};
}

std::string csv_number(double v) { return format_double(v); }

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dump_json(const Json& value, int indent) {
  std::string out;
  write(value, indent, 0, out);
  if (indent > 0) out += '\n';
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

Json to_json(const RealMatrix& m) { return matrix_rows(m); }

Json to_json(const Matrix& m) {
  return Json{{"re", matrix_rows(m.real())}, {"im", matrix_rows(m.imag())}};
}

Json to_json(const RealVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const BathCouplingSpec& spec) {
  Json baths = Json::array();
  for (const auto& b : spec.baths()) {
    baths.push_back(Json{{"kind", to_string(b.kind)}, {"coefficients", b.coefficients}});
  }
  return Json{{"nodes", spec.node_count()},
              {"baths", std::move(baths)},
              {"spectral",
               {{"family", to_string(spec.spectral().family)},
                {"prefactor", spec.spectral().prefactor},
                {"cutoff", spec.spectral().cutoff}}},
              {"temperature", spec.temperature()}};
}

Json to_json(const RateReport& r) {
  const HilbertSpace& s = r.space();
  Json eig{{"energies", to_json(r.eig.energies)}, {"sector", r.eig.sector},
           {"frequency_tolerance", r.eig.frequency_tolerance}};
  Json local = Json::array();
  const auto d = static_cast<Eigen::Index>(s.dimension());
  for (Eigen::Index n = 0; n < d; ++n) {
    for (Eigen::Index m = 0; m < d; ++m) {
      if (m == n) continue;
      const double g = r.local_rates(m, n);
      const cplx gt = r.local_dephasing(m, n);
      if (g == 0.0 && gt == cplx{0.0, 0.0}) continue;
      local.push_back(Json{{"m", s.label(static_cast<std::size_t>(m))},
                           {"n", s.label(static_cast<std::size_t>(n))},
                           {"rate", g},
                           {"dephasing", cplx_json(gt)}});
    }
  }
  return Json{{"basis", s.labels()},
              {"eigensystem", std::move(eig)},
              {"eigen_rates", to_json(r.eigen.transition)},
              {"eigen_dephasing", to_json(r.eigen.dephasing)},
              {"local_rates", to_json(r.local_rates)},
              {"local_dephasing", to_json(r.local_dephasing)},
              {"local_entries", std::move(local)},
              {"imaginary_residue", r.imaginary_residue},
              {"rate_scale", r.rate_scale}};
}

Json to_json(const RealizabilityReport& rep) {
  Json per_kind = Json::array();
  for (const auto& v : rep.per_kind) per_kind.push_back(verdict_json(v));
  Json transfers = Json::array();
  for (const auto& t : rep.transfers) {
    transfers.push_back(Json{{"from", t.from},
                             {"to", t.to},
                             {"requested", t.requested},
                             {"achieved", t.achieved},
                             {"relative_error", t.relative_error},
                             {"matches", t.matches}});
  }
  const DecouplingVerdict& dv = rep.decoupling;
  Json nonzero = Json::array();
  for (const auto& e : dv.nonzero_eigen_rates) {
    nonzero.push_back(Json{{"to", e.to}, {"from", e.from}, {"rate", e.rate}});
  }
  Json forbidden = Json::array();
  for (const auto& e : dv.forbidden_local_transitions) {
    forbidden.push_back(Json{{"to", e.to}, {"from", e.from}, {"rate", e.rate}});
  }
  return Json{{"rates", to_json(rep.rates)},
              {"combined", verdict_json(rep.combined)},
              {"per_kind", std::move(per_kind)},
              {"union_consistent", rep.union_consistent},
              {"transfers", std::move(transfers)},
              {"decoupling",
               {{"applicable", dv.applicable},
                {"decoupled", dv.decoupled},
                {"x_node_sums", dv.x_node_sums},
                {"y_node_sums", dv.y_node_sums},
                {"max_eigen_rate", dv.max_eigen_rate},
                {"numerically_confirmed", dv.numerically_confirmed},
                {"nonzero_eigen_rates", std::move(nonzero)},
                {"forbidden_local_transitions", std::move(forbidden)}}},
              {"realizable", rep.realizable},
              {"notes", rep.notes}};
}

Json to_json(const EngineeringSolution& sol) {
  const HilbertSpace& s = sol.space;
  Json baths = Json::array();
  for (const auto& b : sol.baths) {
    baths.push_back(Json{{"kind", to_string(b.kind)}, {"coefficients", b.coefficients}});
  }
  Json targets = Json::array();
  for (const auto& t : sol.targets) {
    targets.push_back(Json{{"from", s.label(t.target.from)},
                           {"to", s.label(t.target.to)},
                           {"requested", t.target.rate},
                           {"achieved", t.achieved},
                           {"relative_error", t.relative_error}});
  }
  Json dephasing = Json::array();
  for (const auto& z : sol.dephasing) {
    dephasing.push_back(Json{{"m", s.label(z.pair.m)},
                             {"n", s.label(z.pair.n)},
                             {"achieved", cplx_json(z.achieved)}});
  }
  return Json{{"status", to_string(sol.status)},
              {"objective", sol.objective},
              {"rate_reference", sol.rate_reference},
              {"reduced_basis", sol.reduced_space.labels()},
              {"baths", std::move(baths)},
              {"coefficients", sol.coefficients},
              {"node_coupling", sol.node_coupling},
              {"targets", std::move(targets)},
              {"dephasing", std::move(dephasing)},
              {"residuals", sol.residuals},
              {"best_start", sol.best_start},
              {"iterations", sol.iterations},
              {"certificate",
               {{"applies", sol.certificate.applies},
                {"objective_lower_bound", sol.certificate.objective_lower_bound},
                {"reason", sol.certificate.reason}}},
              {"recomputation_error", sol.recomputation_error},
              {"spectral",
               {{"family", to_string(sol.spectral.family)},
                {"prefactor", sol.spectral.prefactor},
                {"cutoff", sol.spectral.cutoff}}},
              {"temperature", sol.temperature}};
}

Json to_json(const SuiteResult& r) {
  return Json{{"name", r.name},   {"passed", r.passed}, {"instances", r.instances},
              {"failures", r.failures}, {"worst", r.worst},   {"bound", r.bound},
              {"messages", r.messages}};
}

Json to_json(const PropagationMetadata& m) {
  return Json{{"method", to_string(m.method)},
              {"rtol", m.rtol},
              {"atol", m.atol},
              {"accepted_steps", m.accepted_steps},
              {"rejected_steps", m.rejected_steps},
              {"exponentials", m.exponentials},
              {"max_trace_error", m.max_trace_error},
              {"max_hermiticity_error", m.max_hermiticity_error},
              {"min_eigenvalue", m.min_eigenvalue}};
}

std::string verdict_table(const RealizabilityReport& rep) {
  std::ostringstream os;
  auto yes = [](bool b) { return b ? "true" : "false"; };
  os << std::left << std::setw(10) << "kind" << std::setw(19) << "sector_preserving"
     << std::setw(17) << "decay_decoupled" << std::setw(16) << "dephasing_free"
     << std::setw(20) << "targets_reproduced" << "nontrivial_transfer\n";
  auto row = [&](const Verdict& v) {
    os << std::left << std::setw(10) << v.kind << std::setw(19) << yes(v.sector_preserving)
       << std::setw(17) << yes(v.decay_decoupled) << std::setw(16) << yes(v.dephasing_free)
       << std::setw(20) << yes(v.targets_reproduced) << yes(v.nontrivial_transfer) << '\n';
  };
  row(rep.combined);
  for (const auto& v : rep.per_kind) row(v);
  os << '\n';
  if (rep.decoupling.applicable) os << "decoupled = " << yes(rep.decoupling.decoupled) << '\n';
  os << "union_consistent = " << yes(rep.union_consistent) << '\n';
  os << "realizable = " << yes(rep.realizable) << '\n';
  if (!rep.transfers.empty()) {
    os << "\nfrom  to    requested               achieved                relative_error\n";
    for (const auto& t : rep.transfers) {
      os << std::left << std::setw(6) << t.from << std::setw(6) << t.to << std::setw(24)
         << format_double(t.requested) << std::setw(24) << format_double(t.achieved)
         << format_double(t.relative_error) << '\n';
    }
  }
  os << '\n';
  for (const auto& n : rep.notes) os << "note: " << n << '\n';
  return os.str();
}

std::string trajectory_csv(const Trajectory& traj, bool coherences,
                           const std::string& comment_block) {
  std::ostringstream os;
  os << comment_block;
  if (traj.states.empty()) {
    os << "time\n";
    return os.str();
  }
  const HilbertSpace& s = traj.states.front().space();
  const std::size_t d = s.dimension();
  os << "time";
  for (std::size_t i = 0; i < d; ++i) os << ",p_" << s.label(i);
  if (coherences) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) {
        os << ",re_" << s.label(i) << '_' << s.label(j) << ",im_" << s.label(i) << '_'
           << s.label(j);
      }
    }
  }
  os << '\n';
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const Matrix& rho = traj.states[k].matrix();
    os << csv_number(traj.times[k]);
    for (std::size_t i = 0; i < d; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      os << ',' << csv_number(rho(ii, ii).real());
    }
    if (coherences) {
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
          const cplx z = rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          os << ',' << csv_number(z.real()) << ',' << csv_number(z.imag());
        }
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string trace_csv(const EngineeringSolution& sol, const std::string& comment_block) {
  std::ostringstream os;
  os << comment_block << "start,iteration,objective\n";
  for (const auto& t : sol.trace) {
    os << t.start << ',' << t.iteration << ',' << csv_number(t.objective) << '\n';
  }
  return os.str();
}

}  // namespace qsw
