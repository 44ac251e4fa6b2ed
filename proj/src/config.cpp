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

#include "qsw/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "qsw/errors.hpp"
#include "qsw/serialize.hpp"

namespace qsw {

using nlohmann::json;

std::string to_string(JobKind job) {
  switch (job) {
    case JobKind::simulate: return "simulate";
    case JobKind::analyze: return "analyze";
    case JobKind::engineer: return "engineer";
    case JobKind::verify: return "verify";
  }
  return "?";
}

JobKind job_from_string(const std::string& name) {
  if (name == "simulate") return JobKind::simulate;
  if (name == "analyze") return JobKind::analyze;
  if (name == "engineer") return JobKind::engineer;
  if (name == "verify") return JobKind::verify;
  throw InvalidArgument("unknown job '" + name + "'");
}

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
  throw ConfigInvalid(path.empty() ? "/" : path, msg);
}

std::string at(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string at(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

void expect_object(const json& v, const std::string& path, const std::set<std::string>& allowed) {
  if (!v.is_object()) bad(path, "expected an object");
  for (auto it = v.begin(); it != v.end(); ++it) {
    if (!allowed.count(it.key())) bad(at(path, it.key()), "unknown key");
  }
}

const json* find(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& require(const json& obj, const std::string& path, const std::string& key) {
  const json* v = find(obj, key);
  if (!v) bad(at(path, key), "required key is missing");
  return *v;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(path, "must be finite");
  return x;
}

double nonnegative(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (x < 0.0) bad(path, "must be >= 0");
  return x;
}

double positive(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x > 0.0)) bad(path, "must be > 0");
  return x;
}

long long integer(const json& v, const std::string& path, long long lo, long long hi) {
  if (!v.is_number_integer()) bad(path, "expected an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi) {
    bad(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return x;
}

bool boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) bad(path, "expected true or false");
  return v.get<bool>();
}

std::string string(const json& v, const std::string& path) {
  if (!v.is_string()) bad(path, "expected a string");
  return v.get<std::string>();
}

const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) bad(path, "expected an array");
  return v;
}

std::string label(const json& v, const std::string& path, int nodes) {
  const std::string s = string(v, path);
  if (static_cast<int>(s.size()) != nodes || s.find_first_not_of("01") != std::string::npos) {
    bad(path, "expected a " + std::to_string(nodes) + "-character string of 0/1");
  }
  return s;
}

void check_units(const json& doc) {
  const std::string path = "/units";
  const json& u = require(doc, "", "units");
  expect_object(u, path, {"time", "energy", "rate", "temperature"});
  const std::string time = string(require(u, path, "time"), at(path, "time"));
  if (time.empty()) bad(at(path, "time"), "must name the time unit");
  const std::string inverse = "1/" + time;
  for (const char* key : {"energy", "rate", "temperature"}) {
    const std::string v = string(require(u, path, key), at(path, key));
    if (v != inverse) {
      bad(at(path, key), "must be '" + inverse + "' (hbar = k_B = 1, inverse-time base unit)");
    }
  }
}

Graph parse_graph(const json& g) {
  const std::string path = "/graph";
  expect_object(g, path, {"nodes", "onsite", "coherent", "incoherent"});
  const int n = static_cast<int>(integer(require(g, path, "nodes"), at(path, "nodes"), 1, 24));
  auto node = [&](const json& v, const std::string& p) {
    return static_cast<int>(integer(v, p, 0, n - 1));
  };
  std::vector<double> onsite(static_cast<std::size_t>(n), 0.0);
  if (const json* o = find(g, "onsite")) {
    const std::string p = at(path, "onsite");
    if (array(*o, p).size() != static_cast<std::size_t>(n)) bad(p, "needs one energy per node");
    for (std::size_t i = 0; i < o->size(); ++i) onsite[i] = number((*o)[i], at(p, i));
  }
  std::vector<CoherentEdge> coherent;
  if (const json* c = find(g, "coherent")) {
    const std::string p = at(path, "coherent");
    for (std::size_t i = 0; i < array(*c, p).size(); ++i) {
      const std::string e = at(p, i);
      const json& edge = (*c)[i];
      expect_object(edge, e, {"a", "b", "re", "im"});
      CoherentEdge ce;
      ce.a = node(require(edge, e, "a"), at(e, "a"));
      ce.b = node(require(edge, e, "b"), at(e, "b"));
      const double re = number(require(edge, e, "re"), at(e, "re"));
      const double im = find(edge, "im") ? number(edge["im"], at(e, "im")) : 0.0;
      ce.weight = {re, im};
      if (ce.a == ce.b) bad(e, "coherent edge joins a node to itself");
      coherent.push_back(ce);
    }
  }
  std::vector<IncoherentEdge> incoherent;
  if (const json* c = find(g, "incoherent")) {
    const std::string p = at(path, "incoherent");
    for (std::size_t i = 0; i < array(*c, p).size(); ++i) {
      const std::string e = at(p, i);
      const json& edge = (*c)[i];
      expect_object(edge, e, {"from", "to", "rate"});
      IncoherentEdge ie;
      ie.from = node(require(edge, e, "from"), at(e, "from"));
      ie.to = node(require(edge, e, "to"), at(e, "to"));
      ie.rate = nonnegative(require(edge, e, "rate"), at(e, "rate"));
      if (ie.from == ie.to) bad(e, "incoherent edge is a self-loop");
      incoherent.push_back(ie);
    }
  }
  try {
    return Graph(n, std::move(onsite), std::move(coherent), std::move(incoherent));
  } catch (const Error& err) {
    bad(path, err.what());
  }
}

SpaceChoice parse_space(const json& v) {
  const std::string path = "/space";
  SpaceChoice s;
  if (v.is_string()) {
    const std::string k = v.get<std::string>();
    if (k == "full") s.kind = SpaceChoice::Kind::full;
    else if (k == "walker") s.kind = SpaceChoice::Kind::walker;
    else bad(path, "expected 'full', 'walker' or {\"sectors\": [...]}");
    return s;
  }
  expect_object(v, path, {"sectors"});
  const std::string p = at(path, "sectors");
  const json& list = array(require(v, path, "sectors"), p);
  if (list.empty()) bad(p, "needs at least one excitation number");
  s.kind = SpaceChoice::Kind::sectors;
  for (std::size_t i = 0; i < list.size(); ++i) {
    s.sectors.push_back(static_cast<int>(integer(list[i], at(p, i), 0, 24)));
  }
  return s;
}

std::vector<double> parse_times(const json& v) {
  const std::string path = "/times";
  if (!v.is_object()) bad(path, "expected an object");
  std::vector<double> t;
  if (find(v, "values")) {
    expect_object(v, path, {"values"});
    const std::string p = at(path, "values");
    const json& list = array(v["values"], p);
    if (list.empty()) bad(p, "needs at least one time");
    for (std::size_t i = 0; i < list.size(); ++i) {
      t.push_back(nonnegative(list[i], at(p, i)));
      if (i > 0 && t[i] < t[i - 1]) bad(at(p, i), "times must be ascending");
    }
    return t;
  }
  expect_object(v, path, {"start", "stop", "count"});
  const double start = nonnegative(require(v, path, "start"), at(path, "start"));
  const double stop = nonnegative(require(v, path, "stop"), at(path, "stop"));
  const auto count = integer(require(v, path, "count"), at(path, "count"), 1, 1'000'000);
  if (stop < start) bad(at(path, "stop"), "must be >= start");
  if (count == 1) return {start};
  for (long long i = 0; i < count; ++i) {
    t.push_back(i == count - 1 ? stop
                               : start + (stop - start) * static_cast<double>(i) /
                                             static_cast<double>(count - 1));
  }
  return t;
}

std::vector<Bath> parse_baths(const json& v, int nodes, bool z_only) {
  const std::string path = "/baths";
  std::vector<Bath> out;
  for (std::size_t i = 0; i < array(v, path).size(); ++i) {
    const std::string p = at(path, i);
    expect_object(v[i], p, {"kind", "coefficients"});
    Bath b;
    const std::string kind = string(require(v[i], p, "kind"), at(p, "kind"));
    if (kind != "x" && kind != "y" && kind != "z") bad(at(p, "kind"), "expected x, y or z");
    b.kind = coupling_kind_from_string(kind);
    if (z_only && b.kind != CouplingKind::z) bad(at(p, "kind"), "only z baths are allowed here");
    const std::string cp = at(p, "coefficients");
    const json& c = array(require(v[i], p, "coefficients"), cp);
    if (c.size() != static_cast<std::size_t>(nodes)) bad(cp, "needs one coefficient per node");
    for (std::size_t j = 0; j < c.size(); ++j) b.coefficients.push_back(number(c[j], at(cp, j)));
    out.push_back(std::move(b));
  }
  return out;
}

SpectralModel parse_spectral(const json& v) {
  const std::string path = "/spectral";
  expect_object(v, path, {"family", "prefactor", "cutoff"});
  SpectralModel s;
  const std::string fam = string(require(v, path, "family"), at(path, "family"));
  if (fam != "ohmic" && fam != "flat") bad(at(path, "family"), "expected 'ohmic' or 'flat'");
  s.family = spectral_family_from_string(fam);
  s.prefactor = nonnegative(require(v, path, "prefactor"), at(path, "prefactor"));
  s.cutoff = positive(require(v, path, "cutoff"), at(path, "cutoff"));
  return s;
}

const std::set<std::string> kToleranceKeys = {"tol_freq", "verdict", "target_relative", "rtol",
                                              "atol",     "check",   "convergence"};

Tolerances parse_tolerances(const json& v) {
  const std::string path = "/tolerances";
  expect_object(v, path, kToleranceKeys);
  Tolerances t;
  auto get = [&](const char* key, double& slot) {
    if (const json* x = find(v, key)) slot = positive(*x, at(path, key));
  };
  get("tol_freq", t.tol_freq);
  get("verdict", t.verdict);
  get("target_relative", t.target_relative);
  get("rtol", t.rtol);
  get("atol", t.atol);
  get("check", t.check);
  get("convergence", t.convergence);
  return t;
}

EngineerSettings parse_engineer(const json& v, int nodes) {
  const std::string path = "/engineer";
  expect_object(v, path, {"targets", "zero_dephasing", "bath_count", "starts", "max_iterations"});
  EngineerSettings e;
  if (const json* t = find(v, "targets")) {
    const std::string p = at(path, "targets");
    for (std::size_t i = 0; i < array(*t, p).size(); ++i) {
      const std::string q = at(p, i);
      expect_object((*t)[i], q, {"from", "to", "rate"});
      e.targets.push_back({label(require((*t)[i], q, "from"), at(q, "from"), nodes),
                           label(require((*t)[i], q, "to"), at(q, "to"), nodes),
                           nonnegative(require((*t)[i], q, "rate"), at(q, "rate"))});
    }
  }
  if (const json* z = find(v, "zero_dephasing")) {
    const std::string p = at(path, "zero_dephasing");
    for (std::size_t i = 0; i < array(*z, p).size(); ++i) {
      const std::string q = at(p, i);
      if (!(*z)[i].is_array() || (*z)[i].size() != 2) bad(q, "expected a pair of labels");
      e.zero_dephasing.emplace_back(label((*z)[i][0], at(q, 0), nodes),
                                    label((*z)[i][1], at(q, 1), nodes));
    }
  }
  if (const json* b = find(v, "bath_count")) {
    e.bath_count = static_cast<int>(integer(*b, at(path, "bath_count"), 1, 64));
  } else {
    e.bath_count = nodes;
  }
  if (const json* s = find(v, "starts")) {
    e.starts = static_cast<int>(integer(*s, at(path, "starts"), 1, 10000));
  }
  if (const json* m = find(v, "max_iterations")) {
    e.max_iterations = static_cast<int>(integer(*m, at(path, "max_iterations"), 1, 1'000'000));
  }
  return e;
}

double parse_tolerance_value(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(v) || !(v > 0.0)) {
    bad("--tol", "'" + text + "' is not a positive number");
  }
  return v;
}

std::string primary_tolerance(JobKind job) {
  switch (job) {
    case JobKind::simulate: return "rtol";
    case JobKind::analyze: return "verdict";
    case JobKind::engineer: return "convergence";
    case JobKind::verify: break;
  }
  bad("--tol", "the verify job has no adjustable tolerance");
}

void apply_overrides(json& doc, const ConfigOverrides& o) {
  if (!doc.is_object()) bad("", "config must be a JSON object");
  JobKind job;
  if (const json* j = find(doc, "job")) {
    const std::string name = string(*j, "/job");
    try {
      job = job_from_string(name);
    } catch (const Error&) {
      bad("/job", "expected simulate, analyze, engineer or verify");
    }
    if (o.job && *o.job != job) {
      bad("/job", "config describes a " + name + " job but was run as " + to_string(*o.job));
    }
  } else if (o.job) {
    job = *o.job;
    doc["job"] = to_string(job);
  } else {
    bad("/job", "required key is missing");
  }
  if (o.seed) doc["seed"] = *o.seed;
  for (const std::string& t : o.tolerances) {
    const auto eq = t.find('=');
    std::string key = eq == std::string::npos ? primary_tolerance(job) : t.substr(0, eq);
    const std::string value = eq == std::string::npos ? t : t.substr(eq + 1);
    if (!kToleranceKeys.count(key)) bad("--tol", "unknown tolerance '" + key + "'");
    if (job == JobKind::verify) bad("--tol", "the verify job has no adjustable tolerance");
    doc["tolerances"][key] = parse_tolerance_value(value);
  }
}

}  // namespace

std::string ExperimentConfig::hash() const { return fnv1a_hex(canonical.dump()); }

HilbertSpace ExperimentConfig::resolve_space() const {
  const int n = graph ? graph->node_count() : 1;
  switch (space.kind) {
    case SpaceChoice::Kind::full: return HilbertSpace::full(n);
    case SpaceChoice::Kind::walker: return HilbertSpace::walker(n);
    case SpaceChoice::Kind::sectors: return HilbertSpace::sectors(n, space.sectors);
    case SpaceChoice::Kind::automatic: break;
  }
  if (job == JobKind::analyze) {
    for (const auto& b : baths) {
      if (b.kind != CouplingKind::z) return HilbertSpace::full(n);
    }
  }
  return HilbertSpace::walker(n);
}

BathCouplingSpec ExperimentConfig::bath_spec() const {
  return BathCouplingSpec(graph ? graph->node_count() : 1, baths, spectral, temperature);
}

ExperimentConfig parse_config(const json& document, const ConfigOverrides& overrides,
                              const std::string& default_stem) {
  json doc = document;
  apply_overrides(doc, overrides);
  ExperimentConfig cfg;
  cfg.job = job_from_string(doc["job"].get<std::string>());

  std::set<std::string> allowed = {"job", "description", "units", "seed", "output"};
  switch (cfg.job) {
    case JobKind::simulate:
      allowed.insert({"graph", "space", "initial", "times", "integrator", "coherences",
                      "steady_state", "tolerances"});
      break;
    case JobKind::analyze:
      allowed.insert({"graph", "space", "baths", "spectral", "temperature", "tolerances"});
      break;
    case JobKind::engineer:
      allowed.insert({"graph", "space", "spectral", "temperature", "engineer", "tolerances"});
      break;
    case JobKind::verify: break;
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!allowed.count(it.key())) {
      bad("/" + it.key(), "unknown key for a " + to_string(cfg.job) + " job");
    }
  }
  if (const json* d = find(doc, "description")) string(*d, "/description");
  if (cfg.job != JobKind::verify || find(doc, "units")) check_units(doc);
  if (const json* s = find(doc, "seed")) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0)) {
      bad("/seed", "expected a non-negative integer");
    }
    cfg.seed = s->get<std::uint64_t>();
  }
  cfg.stem = default_stem;
  if (const json* o = find(doc, "output")) {
    expect_object(*o, "/output", {"stem"});
    if (const json* s = find(*o, "stem")) {
      cfg.stem = string(*s, "/output/stem");
      if (!std::regex_match(cfg.stem, std::regex("[A-Za-z0-9._-]+"))) {
        bad("/output/stem", "use letters, digits, '.', '_' or '-'");
      }
    }
  }
  if (const json* t = find(doc, "tolerances")) cfg.tolerances = parse_tolerances(*t);

  if (cfg.job != JobKind::verify) {
    cfg.graph = parse_graph(require(doc, "", "graph"));
    if (const json* s = find(doc, "space")) cfg.space = parse_space(*s);
  }
  const int n = cfg.graph ? cfg.graph->node_count() : 1;
  std::optional<HilbertSpace> space;
  if (cfg.graph) {
    try {
      space = cfg.resolve_space();
    } catch (const Error& e) {
      bad("/space", e.what());
    }
  }
  auto in_space = [&](const std::string& l, const std::string& path) {
    if (!space->find(parse_label(l))) bad(path, "state " + l + " is not in the chosen space");
  };

  if (cfg.job == JobKind::simulate) {
    const json& init = require(doc, "", "initial");
    if (!init.is_object()) bad("/initial", "expected an object");
    if (find(init, "label")) {
      expect_object(init, "/initial", {"label"});
      cfg.initial.emplace_back(label(init["label"], "/initial/label", n), 1.0);
      in_space(cfg.initial.back().first, "/initial/label");
    } else {
      expect_object(init, "/initial", {"mixture"});
      const std::string p = "/initial/mixture";
      const json& mix = array(require(init, "/initial", "mixture"), p);
      if (mix.empty()) bad(p, "needs at least one component");
      double total = 0.0;
      for (std::size_t i = 0; i < mix.size(); ++i) {
        const std::string q = at(p, i);
        expect_object(mix[i], q, {"label", "weight"});
        const std::string l = label(require(mix[i], q, "label"), at(q, "label"), n);
        in_space(l, at(q, "label"));
        const double w = nonnegative(require(mix[i], q, "weight"), at(q, "weight"));
        total += w;
        cfg.initial.emplace_back(l, w);
      }
      if (std::abs(total - 1.0) > 1e-12) bad(p, "weights must sum to 1");
    }
    cfg.times = parse_times(require(doc, "", "times"));
    if (const json* m = find(doc, "integrator")) {
      const std::string name = string(*m, "/integrator");
      try {
        cfg.integrator = integrator_from_string(name);
      } catch (const Error&) {
        bad("/integrator", "expected automatic, expm or rk45");
      }
    }
    if (const json* c = find(doc, "coherences")) cfg.coherences = boolean(*c, "/coherences");
    if (const json* s = find(doc, "steady_state")) cfg.steady_state = boolean(*s, "/steady_state");
  }

  if (cfg.job == JobKind::analyze || cfg.job == JobKind::engineer) {
    cfg.spectral = parse_spectral(require(doc, "", "spectral"));
    cfg.temperature = nonnegative(require(doc, "", "temperature"), "/temperature");
    if (cfg.spectral.family == SpectralFamily::flat && cfg.temperature > 0.0) {
      bad("/temperature", "the flat spectral density is only defined at temperature 0");
    }
  }
  if (cfg.job == JobKind::analyze) {
    cfg.baths = parse_baths(require(doc, "", "baths"), n, false);
    space = cfg.resolve_space();
    for (std::size_t i = 0; i < cfg.baths.size(); ++i) {
      if (cfg.baths[i].kind != CouplingKind::z && space->mode() != SpaceMode::full) {
        bad(at("/baths", i) + "/kind", "x/y baths need the full space");
      }
    }
  }
  if (cfg.job == JobKind::engineer) {
    cfg.engineer = parse_engineer(require(doc, "", "engineer"), n);
    for (std::size_t i = 0; i < cfg.engineer.targets.size(); ++i) {
      const std::string q = at("/engineer/targets", i);
      in_space(cfg.engineer.targets[i].from, at(q, "from"));
      in_space(cfg.engineer.targets[i].to, at(q, "to"));
    }
    for (std::size_t i = 0; i < cfg.engineer.zero_dephasing.size(); ++i) {
      const std::string q = at("/engineer/zero_dephasing", i);
      in_space(cfg.engineer.zero_dephasing[i].first, at(q, 0));
      in_space(cfg.engineer.zero_dephasing[i].second, at(q, 1));
    }
  }
  cfg.canonical = doc;
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigInvalid(path, "cannot read config file");
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(path, std::string("not valid JSON: ") + e.what());
  }
  return parse_config(doc, overrides, std::filesystem::path(path).stem().string());
}

}  // namespace qsw
