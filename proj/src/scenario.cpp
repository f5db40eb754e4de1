#include "hocm/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "hocm/criteria.hpp"

namespace hocm {

using nlohmann::json;

std::vector<double> XiGrid::points() const {
  std::vector<double> out;
  const long n = std::lround(std::floor((stop - start) / step + 1e-9)) + 1;
  for (long i = 0; i < n; ++i) out.push_back(std::round((start + i * step) * 1e12) / 1e12);
  return out;
}

FockCutoffs ScenarioConfig::cutoffs() const {
  return native_cutoffs(hamiltonian, cutoff_a, cutoff_b, cutoff_p);
}

namespace {

std::vector<ModeId> system_modes(const std::vector<ModeId>& modes, const HamiltonianSpec& h) {
  std::vector<ModeId> out;
  for (const auto& m : modes)
    if (!(h.pump == PumpKind::Quantum && m == h.mode_p)) out.push_back(m);
  return out;
}

}  // namespace

void ScenarioConfig::validate() const {
  try {
    hamiltonian.validate();
    if (cutoff_a < 0 || cutoff_b < 0 || cutoff_p < 0) throw ConfigError("cutoffs must be >= 0");
    if (!(xi.step > 0) || xi.stop < xi.start || xi.start < 0)
      throw ConfigError("xi grid must satisfy 0 <= start <= stop and step > 0");
    if (hamiltonian.pump == PumpKind::Quantum) {
      const int need = required_pump_cutoff(hamiltonian.alpha_p);
      if (cutoff_p < need)
        throw ConfigError("pump cutoff " + std::to_string(cutoff_p) +
                          " is too small; required cutoff is " + std::to_string(need));
    }
    const auto natives = hamiltonian.modes();
    const auto net = compile_network(network, natives);
    if (vectors.empty()) throw ConfigError("scenario has no vectors");
    std::set<std::string> names;
    for (const auto& v : vectors) {
      if (!names.insert(v.spec.name).second)
        throw ConfigError("vector name '" + v.spec.name + "' used twice");
      validate_vector(v.spec);
      const auto outs = v.reference ? natives : net.outputs();
      for (const auto& m : v.spec.modes())
        if (std::find(outs.begin(), outs.end(), m) == outs.end())
          throw ConfigError("vector '" + v.spec.name + "' uses unknown mode '" + m + "'");
      const auto sys = system_modes(outs, hamiltonian);
      for (const auto& lists : {v.bipartitions, v.primary}) {
        for (const auto& label : lists) {
          const auto bip = parse_bipartition(label, sys);
          const auto bad = validate_locality(v.spec, bip);
          if (!bad.empty())
            throw ConfigError("vector '" + v.spec.name + "' is not local for " + bip.label +
                              " (" + bad.front() + ")");
        }
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

std::vector<std::string> string_list(const json& j, const std::string& where) {
  if (j.is_string()) {
    if (j.get<std::string>() == "all") return {};
    return {j.get<std::string>()};
  }
  if (!j.is_array()) throw ConfigError(where + " must be \"all\" or a list of labels");
  return j.get<std::vector<std::string>>();
}

}  // namespace

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig c;
  try {
    check_keys(j, {"name", "hamiltonian", "cutoffs", "network", "vectors", "xi", "tolerances",
                   "flags", "threads", "memory_budget_mb"},
               "scenario");
    read(j, "name", c.name);
    if (j.contains("hamiltonian")) {
      const auto& h = j.at("hamiltonian");
      check_keys(h, {"k", "l", "coupling", "pump", "alpha_p", "modes"}, "hamiltonian");
      read(h, "k", c.hamiltonian.k);
      read(h, "l", c.hamiltonian.l);
      read(h, "coupling", c.hamiltonian.coupling);
      read(h, "alpha_p", c.hamiltonian.alpha_p);
      if (h.contains("pump")) {
        const auto p = h.at("pump").get<std::string>();
        if (p == "quantum") c.hamiltonian.pump = PumpKind::Quantum;
        else if (p == "classical") c.hamiltonian.pump = PumpKind::Classical;
        else throw ConfigError("pump must be \"quantum\" or \"classical\"");
      }
      if (h.contains("modes")) {
        auto m = h.at("modes").get<std::vector<std::string>>();
        if (m.size() != 3) throw ConfigError("hamiltonian.modes needs three labels (a, b, pump)");
        c.hamiltonian.mode_a = m[0];
        c.hamiltonian.mode_b = m[1];
        c.hamiltonian.mode_p = m[2];
      }
    }
    if (j.contains("cutoffs")) {
      const auto& cj = j.at("cutoffs");
      check_keys(cj, {"a", "b", "p"}, "cutoffs");
      read(cj, "a", c.cutoff_a);
      read(cj, "b", c.cutoff_b);
      read(cj, "p", c.cutoff_p);
    }
    if (j.contains("network")) {
      const auto& nj = j.at("network");
      check_keys(nj, {"convention", "ops"}, "network");
      if (nj.contains("convention")) c.network.convention = parse_convention(nj.at("convention"));
      if (nj.contains("ops")) {
        for (const auto& op : nj.at("ops")) {
          check_keys(op, {"bs", "T", "out"}, "network op");
          BeamSplitter bs;
          auto ports = op.at("bs").get<std::vector<std::string>>();
          if (ports.size() != 2) throw ConfigError("bs needs two mode labels");
          bs.first = ports[0];
          bs.second = ports[1];
          bs.transmittance = op.at("T").get<double>();
          if (op.contains("out")) {
            auto o = op.at("out").get<std::vector<std::string>>();
            if (o.size() != 2) throw ConfigError("out needs two labels");
            bs.out = std::make_pair(o[0], o[1]);
          }
          c.network.ops.push_back(bs);
        }
      }
    }
    if (j.contains("vectors")) {
      for (const auto& vj : j.at("vectors")) {
        check_keys(vj, {"name", "elements", "bipartitions", "primary", "reference"}, "vector");
        VectorEntry v;
        v.spec = parse_vector(vj.at("name").get<std::string>(), vj.at("elements").get<std::string>());
        if (vj.contains("bipartitions")) v.bipartitions = string_list(vj.at("bipartitions"), "bipartitions");
        if (vj.contains("primary")) v.primary = string_list(vj.at("primary"), "primary");
        read(vj, "reference", v.reference);
        c.vectors.push_back(std::move(v));
      }
    }
    if (j.contains("xi")) {
      const auto& x = j.at("xi");
      check_keys(x, {"start", "stop", "step"}, "xi");
      read(x, "start", c.xi.start);
      read(x, "stop", c.xi.stop);
      read(x, "step", c.xi.step);
    }
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      check_keys(t, {"entanglement", "leakage", "integrator", "threshold_xi"}, "tolerances");
      read(t, "entanglement", c.tol.entanglement);
      read(t, "leakage", c.tol.leakage);
      read(t, "integrator", c.tol.integrator);
      read(t, "threshold_xi", c.tol.threshold_xi);
    }
    if (j.contains("flags")) {
      const auto& f = j.at("flags");
      check_keys(f, {"oracle_check", "convergence_check", "both_conventions"}, "flags");
      read(f, "oracle_check", c.flags.oracle_check);
      read(f, "convergence_check", c.flags.convergence_check);
      read(f, "both_conventions", c.flags.both_conventions);
    }
    read(j, "threads", c.threads);
    read(j, "memory_budget_mb", c.memory_budget_mb);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

json config_to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["hamiltonian"] = {{"k", c.hamiltonian.k},
                      {"l", c.hamiltonian.l},
                      {"coupling", c.hamiltonian.coupling},
                      {"pump", c.hamiltonian.pump == PumpKind::Quantum ? "quantum" : "classical"},
                      {"alpha_p", c.hamiltonian.alpha_p},
                      {"modes", {c.hamiltonian.mode_a, c.hamiltonian.mode_b, c.hamiltonian.mode_p}}};
  j["cutoffs"] = {{"a", c.cutoff_a}, {"b", c.cutoff_b}, {"p", c.cutoff_p}};
  json ops = json::array();
  for (const auto& op : c.network.ops) {
    json o = {{"bs", {op.first, op.second}}, {"T", op.transmittance}};
    if (op.out) o["out"] = {op.out->first, op.out->second};
    ops.push_back(o);
  }
  j["network"] = {{"convention", convention_name(c.network.convention)}, {"ops", ops}};
  json vs = json::array();
  for (const auto& v : c.vectors) {
    json e = {{"name", v.spec.name}, {"elements", v.spec.to_string()}};
    e["bipartitions"] = v.bipartitions.empty() ? json("all") : json(v.bipartitions);
    if (!v.primary.empty()) e["primary"] = v.primary;
    if (v.reference) e["reference"] = true;
    vs.push_back(e);
  }
  j["vectors"] = vs;
  j["xi"] = {{"start", c.xi.start}, {"stop", c.xi.stop}, {"step", c.xi.step}};
  j["tolerances"] = {{"entanglement", c.tol.entanglement},
                     {"leakage", c.tol.leakage},
                     {"integrator", c.tol.integrator},
                     {"threshold_xi", c.tol.threshold_xi}};
  j["flags"] = {{"oracle_check", c.flags.oracle_check},
                {"convergence_check", c.flags.convergence_check},
                {"both_conventions", c.flags.both_conventions}};
  j["threads"] = c.threads;
  j["memory_budget_mb"] = c.memory_budget_mb;
  return j;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

namespace {

const char* kR12 = "Q{1 a1}; P{1 a1}; Q{1 a2}; P{1 a2}; Q{2 b1}; P{2 b1}; Q{2 b2}; P{2 b2}";
const char* kI1 = "Q{1 a1}; P{1 a1}; Q{1 a2}; P{1 a2}; Q{1 b1, 1 b2}; P{1 b1, 1 b2}";
const char* kI2 = "Q{1 a1}; P{1 a1}; Q{1 a2, 1 b1}; P{1 a2, 1 b1}; Q{1 b2}; P{1 b2}";
const char* kI3 = "Q{1 a1}; P{1 a1}; Q{1 b1}; P{1 b1}; Q{1 a2, 1 b2}; P{1 a2, 1 b2}";
const char* kOriginal = "Q{1 a}; P{1 a}; Q{2 b}; P{2 b}";

VectorEntry entry(const std::string& name, const std::string& text, int lift = 1,
                  std::vector<std::string> bips = {}, std::vector<std::string> primary = {},
                  bool reference = false) {
  VectorEntry v;
  v.spec = parse_vector(name, text);
  if (lift != 1) v.spec = lift_power(v.spec, lift, name);
  v.bipartitions = std::move(bips);
  v.primary = std::move(primary);
  v.reference = reference;
  return v;
}

ScenarioConfig four_mode_base(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  c.network.ops.push_back({"a", "vac", 0.75, std::make_pair("a1", "a2")});
  c.network.ops.push_back({"b", "vac", 0.75, std::make_pair("b1", "b2")});
  return c;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"fig2b", "fig2c", "fig2d", "fig2e", "fig2f", "fig2f-alt", "original2mode"};
}

ScenarioConfig builtin_scenario(const std::string& name) {
  ScenarioConfig c = four_mode_base(name);
  if (name == "fig2b" || name == "fig2c") {
    const int s = name == "fig2b" ? 1 : 2;
    const std::string suffix = s == 1 ? "" : "_s2";
    c.vectors.push_back(entry("R12" + suffix, kR12, s));
    c.vectors.push_back(entry("original" + suffix, kOriginal, s, {"a|b"}, {}, true));
  } else if (name == "fig2d" || name == "fig2e") {
    const int s = name == "fig2d" ? 1 : 2;
    const std::string suffix = s == 1 ? "" : "_s2";
    c.vectors.push_back(entry("R12_I1" + suffix, kI1, s, {}, {"a1|a2b1b2", "a2|a1b1b2", "a1a2|b1b2"}));
    c.vectors.push_back(entry("R12_I2" + suffix, kI2, s, {}, {"b2|a1a2b1", "a1b2|a2b1"}));
    c.vectors.push_back(entry("R12_I3" + suffix, kI3, s, {}, {"b1|a1a2b2", "a1b1|a2b2"}));
  } else if (name == "fig2f") {
    const std::vector<std::pair<std::string, std::string>> type3 = {
        {"Q{1 a1}; P{1 a1}; Q{1 a2, 1 b1, 3 b2}; P{1 a2, 1 b1, 3 b2}", "a1|a2b1b2"},
        {"Q{1 a2}; P{1 a2}; Q{1 a1, 1 b1, 3 b2}; P{1 a1, 1 b1, 3 b2}", "a2|a1b1b2"},
        {"Q{1 b1}; P{1 b1}; Q{1 a1, 1 a2, 3 b2}; P{1 a1, 1 a2, 3 b2}", "b1|a1a2b2"},
        {"Q{3 b2}; P{3 b2}; Q{1 a1, 1 a2, 1 b1}; P{1 a1, 1 a2, 1 b1}", "b2|a1a2b1"},
        {"Q{1 a1, 1 a2}; P{1 a1, 1 a2}; Q{1 b1, 3 b2}; P{1 b1, 3 b2}", "a1a2|b1b2"},
        {"Q{1 a1, 1 b1}; P{1 a1, 1 b1}; Q{1 a2, 3 b2}; P{1 a2, 3 b2}", "a1b1|a2b2"},
        {"Q{1 a1, 3 b2}; P{1 a1, 3 b2}; Q{1 b1, 1 a2}; P{1 b1, 1 a2}", "a1b2|a2b1"},
    };
    for (std::size_t i = 0; i < type3.size(); ++i)
      c.vectors.push_back(entry("R24_II" + std::to_string(i + 1), type3[i].first, 1, {type3[i].second}));
  } else if (name == "fig2f-alt") {
    c.vectors.push_back(entry("R24_II8", "Q{1 a1}; P{1 a1}; Q{1 a2, 3 b1, 1 b2}; P{1 a2, 3 b1, 1 b2}",
                              1, {"a1|a2b1b2"}));
  } else if (name == "original2mode") {
    c.network.ops.clear();
    c.vectors.push_back(entry("original", kOriginal, 1, {"a|b"}));
    c.vectors.push_back(entry("original_s2", kOriginal, 2, {"a|b"}));
  } else {
    std::string list;
    for (const auto& n : builtin_names()) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown builtin scenario '" + name + "' (known: " + list + ")");
  }
  c.validate();
  return c;
}

}  // namespace hocm
