#include "hocm/network.hpp"

#include <cmath>
#include <set>

namespace hocm {

BsConvention parse_convention(const std::string& name) {
  if (name == "real") return BsConvention::Real;
  if (name == "real_alt") return BsConvention::RealAlt;
  if (name == "symmetric") return BsConvention::Symmetric;
  throw NetworkError("unknown beam-splitter convention '" + name +
                     "' (expected real, real_alt or symmetric)");
}

std::string convention_name(BsConvention c) {
  switch (c) {
    case BsConvention::Real: return "real";
    case BsConvention::RealAlt: return "real_alt";
    case BsConvention::Symmetric: return "symmetric";
  }
  return "real";
}

BsMatrix bs_matrix(double transmittance, BsConvention c) {
  if (!(transmittance >= 0.0 && transmittance <= 1.0))
    throw NetworkError("transmittance " + std::to_string(transmittance) + " outside [0, 1]");
  const double t = std::sqrt(transmittance), r = std::sqrt(1.0 - transmittance);
  switch (c) {
    case BsConvention::Real: return {{{t, r}, {-r, t}}};
    case BsConvention::RealAlt: return {{{t, -r}, {r, t}}};
    case BsConvention::Symmetric: return {{{t, Complex(0, r)}, {Complex(0, r), t}}};
  }
  return {};
}

namespace {

using Row = std::vector<std::pair<ModeId, Complex>>;

Row combine(Complex cx, const Row& x, Complex cy, const Row& y) {
  std::map<ModeId, Complex> acc;
  for (const auto& [m, a] : x) acc[m] += cx * a;
  for (const auto& [m, a] : y) acc[m] += cy * a;
  Row out;
  for (const auto& [m, a] : acc)
    if (std::abs(a) > kPruneThreshold) out.emplace_back(m, a);
  return out;
}

}  // namespace

CompiledNetwork compile_network(const NetworkSpec& spec, const std::vector<ModeId>& natives) {
  CompiledNetwork net;
  net.natives = natives;
  std::set<ModeId> used(natives.begin(), natives.end());
  if (used.size() != natives.size()) throw NetworkError("duplicate native mode label");
  std::map<ModeId, Row> live;
  for (const auto& n : natives) {
    live[n] = {{n, 1.0}};
    net.slot[n] = n;
  }
  int next_ancilla = 1;
  for (std::size_t i = 0; i < spec.ops.size(); ++i) {
    const auto& op = spec.ops[i];
    const std::string where = "beam splitter " + std::to_string(i + 1);
    if (!live.count(op.first))
      throw NetworkError(where + ": mode '" + op.first + "' is not an available mode");
    ModeId second = op.second;
    if (second == "vac") {
      second = "v" + std::to_string(next_ancilla++);
      if (used.count(second)) throw NetworkError(where + ": ancilla label '" + second + "' is taken");
      used.insert(second);
      net.ancillas.push_back(second);
      net.map.ancillas.insert(second);
      live[second] = {{second, 1.0}};
      net.slot[second] = second;
    } else if (!live.count(second)) {
      throw NetworkError(where + ": mode '" + second + "' is not an available mode");
    }
    if (second == op.first) throw NetworkError(where + ": both ports use mode '" + second + "'");

    const BsMatrix m = bs_matrix(op.transmittance, spec.convention);
    const auto [o1, o2] = op.out.value_or(std::make_pair(op.first + "1", op.first + "2"));
    if (o1 == o2) throw NetworkError(where + ": output labels coincide");
    for (const auto& o : {o1, o2}) {
      if (o != op.first && o != second && (live.count(o) || used.count(o)))
        throw NetworkError(where + ": output label '" + o + "' is already in use");
    }
    Row r1 = combine(m[0][0], live[op.first], m[0][1], live[second]);
    Row r2 = combine(m[1][0], live[op.first], m[1][1], live[second]);
    const ModeId sx = net.slot.at(op.first), sy = net.slot.at(second);
    net.stages.emplace_back(sx, sy, m);
    live.erase(op.first);
    live.erase(second);
    live[o1] = std::move(r1);
    live[o2] = std::move(r2);
    net.slot[o1] = sx;
    net.slot[o2] = sy;
    used.insert(o1);
    used.insert(o2);
  }
  for (auto& [label, row] : live) net.map.rows[label] = std::move(row);
  // keep only live labels in the slot table
  std::map<ModeId, ModeId> slot;
  for (const auto& [label, row] : net.map.rows) slot[label] = net.slot.at(label);
  net.slot = std::move(slot);
  return net;
}

CompiledNetwork identity_network(const std::vector<ModeId>& natives) {
  return compile_network(NetworkSpec{}, natives);
}

NormalPoly pushforward(const NormalPoly& q, const CompiledNetwork& net) {
  std::set<ModeId> anc(net.ancillas.begin(), net.ancillas.end());
  return vacuum_project(substitute(q, net.map), anc);
}

Complex pushforward_moment(const MomentEvaluator& eval, const CompiledNetwork& net,
                           const NormalPoly& q) {
  return eval(pushforward(q, net));
}

DirectOracle::DirectOracle(const StateVector& native, const CompiledNetwork& net,
                           std::size_t memory_budget_bytes)
    : slot_(net.slot) {
  std::map<ModeId, int> cap;
  for (const auto& n : net.natives) cap[n] = native.cutoffs.cutoff(n);
  for (const auto& a : net.ancillas) cap[a] = 0;
  for (const auto& [sx, sy, m] : net.stages) {
    const int total = cap.at(sx) + cap.at(sy);
    cap[sx] = cap[sy] = total;
  }
  std::vector<ModeId> modes = native.cutoffs.modes;
  std::vector<int> max;
  for (const auto& mode : modes) max.push_back(cap.count(mode) ? cap[mode] : native.cutoffs.cutoff(mode));
  for (const auto& a : net.ancillas) {
    modes.push_back(a);
    max.push_back(cap[a]);
  }
  FockCutoffs ext(modes, max);
  const double bytes = double(ext.dim()) * sizeof(Complex);
  if (bytes > double(memory_budget_bytes)) {
    throw NetworkError("direct oracle needs " + std::to_string(bytes / (1 << 20)) +
                       " MiB, above the budget of " +
                       std::to_string(memory_budget_bytes >> 20) + " MiB");
  }
  StateVector psi = native.embed(ext);
  for (const auto& [sx, sy, m] : net.stages) psi = apply_bs_unitary(psi, sx, sy, m);
  state_ = std::make_shared<const StateVector>(std::move(psi));
  eval_ = std::make_unique<MomentEvaluator>(state_);
}

Complex DirectOracle::moment(const NormalPoly& q) const {
  for (const auto& m : q.modes())
    if (!slot_.count(m)) throw NetworkError("mode '" + m + "' is not a network output");
  return (*eval_)(rename_modes(q, slot_));
}

Complex direct_oracle_moment(const StateVector& native, const CompiledNetwork& net,
                             const NormalPoly& q) {
  return DirectOracle(native, net).moment(q);
}

}  // namespace hocm
