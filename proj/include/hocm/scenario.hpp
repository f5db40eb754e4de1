// Scenario configuration (JSON) and the built-in four-mode scenarios.

#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "hocm/fock.hpp"
#include "hocm/network.hpp"
#include "hocm/quadrature.hpp"

namespace hocm {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VectorEntry {
  QuadratureVectorSpec spec;
  /// Bipartition labels; empty means every bipartition the vector is local for.
  std::vector<std::string> bipartitions;
  /// Bipartitions for which this vector gives the plotted curve; empty means all.
  std::vector<std::string> primary;
  /// Reference vectors live on the native modes and bypass the network.
  bool reference = false;
};

struct XiGrid {
  double start = 0.0;
  double stop = 1.4;
  double step = 0.02;

  std::vector<double> points() const;
};

struct Tolerances {
  double entanglement = 1e-8;
  double leakage = 1e-8;
  double integrator = 1e-10;
  double threshold_xi = 1e-3;
};

struct ScenarioFlags {
  bool oracle_check = false;
  bool convergence_check = false;
  bool both_conventions = false;
};

struct ScenarioConfig {
  std::string name = "custom";
  HamiltonianSpec hamiltonian;
  int cutoff_a = 64;
  int cutoff_b = 128;
  int cutoff_p = 64;
  NetworkSpec network;
  std::vector<VectorEntry> vectors;
  XiGrid xi;
  Tolerances tol;
  ScenarioFlags flags;
  int threads = 0;  // 0: hardware concurrency
  std::size_t memory_budget_mb = 1024;

  FockCutoffs cutoffs() const;
  /// Throws ConfigError on any inconsistency.
  void validate() const;
};

ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& c);
ScenarioConfig load_config(const std::string& path);

std::vector<std::string> builtin_names();
ScenarioConfig builtin_scenario(const std::string& name);

}  // namespace hocm
