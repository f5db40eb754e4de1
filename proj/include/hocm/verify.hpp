// Verification suite: oracle agreement, cutoff convergence, invariants and
// beam-splitter convention independence.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hocm/scan.hpp"

namespace hocm {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  bool skipped = false;
  std::string detail;
};

struct VerifyReport {
  std::string scenario;
  std::vector<VerifyCheck> checks;

  bool passed() const;
};

struct VerifyOptions {
  bool fast = false;
  int threads = 0;
  std::function<void(const std::string&)> progress;
};

/// Largest |entry difference| over V and Omega of pushforward vs direct-unitary
/// bundles for every non-reference vector, at the given cutoffs and xi values.
double oracle_discrepancy(const ScenarioConfig& config, int n_a, int n_b, int n_p,
                          const std::vector<double>& xis);

/// Largest |nu| difference between the configured convention and `other`.
double convention_discrepancy(const ScenarioConfig& config, BsConvention other,
                              const std::vector<double>& xis);

/// Crossings of `base` recomputed with every cutoff doubled, bisecting inside
/// [xi - window, xi + window]. Returns the largest shift, or +inf when a crossing
/// leaves its window.
double convergence_shift(const ScenarioConfig& config, const std::vector<Crossing>& base,
                         double window = 0.01, std::string* detail = nullptr);

VerifyReport verify(const ScenarioConfig& config, const VerifyOptions& options = {});

}  // namespace hocm
