// Sweeps over the interaction strength, threshold refinement and per-point diagnostics.

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "hocm/criteria.hpp"
#include "hocm/scenario.hpp"

namespace hocm {

struct ScanRow {
  double xi = 0.0;
  std::string vector;
  int order = 0;
  std::string bipartition;
  double nu_min = 0.0;
  SufficiencyClass sufficiency = SufficiencyClass::NecessaryOnly;
  Verdict verdict = Verdict::Undecided;
  bool leakage_flag = false;
  bool primary = true;
  bool reference = false;
  double nu_block = 0.0;
  bool forms_agree = true;
  double tol = kEntanglementTolerance;

  bool entangled() const { return verdict == Verdict::Entangled; }
};

struct Crossing {
  std::string vector;
  std::string bipartition;
  double xi = 0.0;
  double lo = 0.0;  // bracket after refinement
  double hi = 0.0;
  std::string direction;  // toward_entangled | toward_positive
};

/// Per-point physics checks on the evolved state and every bundle.
struct PointDiagnostics {
  double xi = 0.0;
  double norm_drift = 0.0;
  double leakage = 0.0;
  bool leakage_flag = false;
  int steps = 0;
  double n_a = 0.0, n_b = 0.0, n_p = 0.0;
  double manley_rowe_ab = 0.0;  // l n_a - k n_b, conserved at 0
  double manley_rowe_ap = 0.0;  // n_a + k n_p minus its initial value
  double min_uncertainty = 0.0;  // smallest min eig of V + (i/2) Omega over vectors
  double max_mean = 0.0;         // largest |<R_i>| over vector elements
};

struct PointResult {
  std::vector<ScanRow> rows;
  PointDiagnostics diag;
  std::vector<HOCMBundle> bundles;  // one per vector, config order
};

struct ScanResult {
  std::string scenario;
  std::vector<ScanRow> rows;
  std::vector<Crossing> crossings;
  std::vector<PointDiagnostics> points;
};

struct ScanOptions {
  bool refine = true;
  int threads = 0;  // 0 takes the config value
  std::function<void(const std::string&)> progress;
};

/// Everything needed to evaluate a scenario at arbitrary xi. Each point
/// re-evolves from the initial state; results are cached by xi.
class ScanEngine {
 public:
  explicit ScanEngine(ScenarioConfig config, bool strict_pump = true);

  const ScenarioConfig& config() const { return config_; }
  const CompiledNetwork& network() const { return net_; }

  /// (vector name, bipartition label) in row order.
  std::vector<std::pair<std::string, std::string>> series() const;

  std::shared_ptr<const PointResult> evaluate(double xi);
  /// Evaluates the missing points on a worker pool.
  void evaluate_all(const std::vector<double>& xis, int threads);

  /// Evolved native state at xi (not cached).
  EvolutionResult state(double xi) const;

  /// Refines a bracket whose ends disagree on the entangled flag until hi - lo < tol.
  Crossing bisect(const std::string& vector, const std::string& bipartition, double lo, double hi,
                  double tol, int threads = 1);

 private:
  struct Task {
    std::string vector;
    bool reference = false;
    std::unique_ptr<HocmPlan> plan;
    std::vector<Bipartition> bips;
    std::vector<bool> primary;
  };

  std::shared_ptr<const PointResult> compute(double xi) const;
  bool entangled_at(double xi, const std::string& vector, const std::string& bipartition);

  ScenarioConfig config_;
  bool strict_;
  CompiledNetwork net_;
  CompiledNetwork native_net_;
  StateVector initial_;
  std::vector<Task> tasks_;
  std::mutex mu_;
  std::map<double, std::shared_ptr<const PointResult>> cache_;
};

ScanResult run_scan(const ScenarioConfig& config, const ScanOptions& options = {});
/// Same, reusing (and filling) the engine's point cache.
ScanResult run_scan(ScanEngine& engine, const ScanOptions& options = {});

/// Crossings from grid rows: consecutive points whose entangled flags differ.
/// Brackets starting at xi = 0 are skipped (the product vacuum sits at nu = 0).
std::vector<Crossing> grid_brackets(const std::vector<ScanRow>& rows);

int resolve_threads(int requested);

}  // namespace hocm
