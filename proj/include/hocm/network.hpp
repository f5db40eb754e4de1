// Beam-splitter networks: compilation to a linear mode map, moment pushforward
// through the map, and a direct multimode-unitary oracle.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hocm/algebra.hpp"
#include "hocm/fock.hpp"

namespace hocm {

class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Phase conventions for the 2x2 Heisenberg matrix, t = sqrt(T), r = sqrt(1-T):
///   Real       [[t, r], [-r, t]]
///   RealAlt    [[t, -r], [r, t]]
///   Symmetric  [[t, ir], [ir, t]]
enum class BsConvention { Real, RealAlt, Symmetric };

BsConvention parse_convention(const std::string& name);
std::string convention_name(BsConvention c);
BsMatrix bs_matrix(double transmittance, BsConvention c);

struct BeamSplitter {
  ModeId first;
  ModeId second;  // "vac" requests a fresh vacuum ancilla
  double transmittance = 1.0;
  /// Output labels (port of `first`, port of `second`); defaults to first+"1", first+"2".
  std::optional<std::pair<ModeId, ModeId>> out;
};

struct NetworkSpec {
  std::vector<BeamSplitter> ops;
  BsConvention convention = BsConvention::Real;
};

/// Compiled network over the given native modes. Native modes untouched by any
/// beam splitter pass through as identity outputs.
struct CompiledNetwork {
  LinearModeMap map;
  std::vector<ModeId> natives;
  std::vector<ModeId> ancillas;  // v1, v2, ... in op order
  /// Output label -> physical slot it occupies when the network acts in place.
  std::map<ModeId, ModeId> slot;
  /// Per op: (slot x, slot y, matrix) for the direct oracle.
  std::vector<std::tuple<ModeId, ModeId, BsMatrix>> stages;

  std::vector<ModeId> outputs() const { return map.outputs(); }
};

CompiledNetwork compile_network(const NetworkSpec& spec, const std::vector<ModeId>& natives);

/// The trivial network: every native mode is its own output.
CompiledNetwork identity_network(const std::vector<ModeId>& natives);

/// Output-mode polynomial mapped onto native modes, ancillas already projected
/// onto vacuum.
NormalPoly pushforward(const NormalPoly& q, const CompiledNetwork& net);

Complex pushforward_moment(const MomentEvaluator& eval, const CompiledNetwork& net,
                           const NormalPoly& q);

/// Moment evaluation by explicitly applying the beam-splitter unitaries to the
/// native state extended with vacuum ancillas.
class DirectOracle {
 public:
  DirectOracle(const StateVector& native, const CompiledNetwork& net,
               std::size_t memory_budget_bytes = std::size_t(1) << 30);

  Complex moment(const NormalPoly& q) const;
  const StateVector& state() const { return *state_; }

 private:
  std::map<ModeId, ModeId> slot_;
  std::shared_ptr<const StateVector> state_;
  std::unique_ptr<MomentEvaluator> eval_;
};

Complex direct_oracle_moment(const StateVector& native, const CompiledNetwork& net,
                             const NormalPoly& q);

}  // namespace hocm
