#include "hocm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace hocm {

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const VerifyCheck& c) { return c.passed || c.skipped; });
}

namespace {

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double bundle_distance(const HOCMBundle& x, const HOCMBundle& y) {
  double d = (x.V - y.V).cwiseAbs().maxCoeff();
  d = std::max(d, (x.Omega - y.Omega).cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < x.means.size(); ++i) d = std::max(d, std::abs(x.means[i] - y.means[i]));
  return d;
}

ScenarioConfig with_cutoffs(ScenarioConfig c, int n_a, int n_b, int n_p) {
  c.cutoff_a = n_a;
  c.cutoff_b = n_b;
  c.cutoff_p = n_p;
  return c;
}

}  // namespace

double oracle_discrepancy(const ScenarioConfig& config, int n_a, int n_b, int n_p,
                          const std::vector<double>& xis) {
  const ScenarioConfig reduced = with_cutoffs(config, n_a, n_b, n_p);
  ScanEngine engine(reduced, false);
  const auto& net = engine.network();
  std::vector<HocmPlan> plans;
  for (const auto& v : reduced.vectors)
    if (!v.reference) plans.emplace_back(v.spec, net);
  double worst = 0.0;
  for (double xi : xis) {
    auto psi = std::make_shared<const StateVector>(engine.state(xi).state);
    MomentEvaluator eval(psi);
    DirectOracle oracle(*psi, net, reduced.memory_budget_mb << 20);
    for (const auto& plan : plans) {
      const HOCMBundle fast = plan.evaluate(eval, xi);
      const HOCMBundle direct =
          build_hocm(plan.spec(), [&](const NormalPoly& q) { return oracle.moment(q); }, xi);
      worst = std::max(worst, bundle_distance(fast, direct));
    }
  }
  return worst;
}

double convention_discrepancy(const ScenarioConfig& config, BsConvention other,
                              const std::vector<double>& xis) {
  ScenarioConfig alt = config;
  alt.network.convention = other;
  ScanEngine a(config), b(alt);
  double worst = 0.0;
  for (double xi : xis) {
    const auto& ra = a.evaluate(xi)->rows;
    const auto& rb = b.evaluate(xi)->rows;
    if (ra.size() != rb.size()) return std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ra.size(); ++i) worst = std::max(worst, std::abs(ra[i].nu_min - rb[i].nu_min));
  }
  return worst;
}

double convergence_shift(const ScenarioConfig& config, const std::vector<Crossing>& base,
                         double window, std::string* detail) {
  ScanEngine fine(with_cutoffs(config, 2 * config.cutoff_a, 2 * config.cutoff_b, 2 * config.cutoff_p));
  double worst = 0.0;
  for (const auto& c : base) {
    const double lo = std::max(c.xi - window, 0.5 * c.xi), hi = c.xi + window;
    double shift;
    try {
      shift = std::abs(fine.bisect(c.vector, c.bipartition, lo, hi, config.tol.threshold_xi).xi - c.xi);
    } catch (const CriteriaError&) {
      shift = std::numeric_limits<double>::infinity();
    }
    if (detail && shift > worst)
      *detail = c.vector + " " + c.bipartition + " at xi " + fmt("%.4f", c.xi) + " shifts by " +
                fmt("%.2e", shift);
    worst = std::max(worst, shift);
  }
  return worst;
}

VerifyReport verify(const ScenarioConfig& config, const VerifyOptions& options) {
  VerifyReport report;
  report.scenario = config.name;
  auto note = [&](const std::string& s) {
    if (options.progress) options.progress(s);
  };

  // Invariants on the scan grid; --fast thins the grid to at most six points.
  ScenarioConfig grid_config = config;
  if (options.fast) {
    grid_config.xi.step = std::max(config.xi.step, (config.xi.stop - config.xi.start) / 5.0);
  }
  note("scanning " + std::to_string(grid_config.xi.points().size()) + " grid points");
  ScanOptions so;
  so.threads = options.threads;
  so.refine = !options.fast;
  const ScanResult scan = run_scan(grid_config, so);

  {
    VerifyCheck c;
    c.name = "unitarity";
    double worst = 0.0;
    for (const auto& p : scan.points) worst = std::max(worst, p.norm_drift);
    c.passed = worst < 1e-9;
    c.detail = "max norm drift " + fmt("%.2e", worst);
    report.checks.push_back(c);
  }
  {
    VerifyCheck c;
    c.name = "leakage";
    double worst = 0.0;
    for (const auto& p : scan.points) worst = std::max(worst, p.leakage);
    c.passed = worst < config.tol.leakage;
    c.detail = "max boundary probability " + fmt("%.2e", worst);
    report.checks.push_back(c);
  }
  {
    VerifyCheck c;
    c.name = "manley_rowe";
    double worst = 0.0;
    for (const auto& p : scan.points)
      worst = std::max({worst, std::abs(p.manley_rowe_ab), std::abs(p.manley_rowe_ap)});
    c.passed = worst < 1e-6;
    c.detail = "max invariant drift " + fmt("%.2e", worst);
    report.checks.push_back(c);
  }
  {
    VerifyCheck c;
    c.name = "uncertainty_principle";
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& p : scan.points) worst = std::min(worst, p.min_uncertainty);
    c.passed = worst >= -1e-8;
    c.detail = "min eig of V + i Omega/2 " + fmt("%.3e", worst);
    report.checks.push_back(c);
  }
  {
    VerifyCheck c;
    c.name = "zero_means";
    double worst = 0.0;
    for (const auto& p : scan.points) worst = std::max(worst, p.max_mean);
    c.passed = worst < 1e-8;
    c.detail = "max |<R_i>| " + fmt("%.2e", worst);
    report.checks.push_back(c);
  }
  {
    VerifyCheck c;
    c.name = "verdict_consistency";
    std::size_t bad_forms = 0, bad_sep = 0;
    for (const auto& r : scan.rows) {
      bad_forms += !r.forms_agree;
      bad_sep += r.verdict == Verdict::Separable && r.sufficiency == SufficiencyClass::NecessaryOnly;
    }
    c.passed = bad_forms == 0 && bad_sep == 0;
    c.detail = std::to_string(bad_forms) + " form disagreements, " + std::to_string(bad_sep) +
               " unsupported separable verdicts over " + std::to_string(scan.rows.size()) + " rows";
    report.checks.push_back(c);
  }
  {
    VerifyCheck c;
    c.name = "oracle_agreement";
    note("oracle check at cutoffs (8, 16, 30)");
    try {
      const double d = oracle_discrepancy(config, 8, 16, 30, {0.1, 0.4, 0.7, 1.0, 1.3});
      c.passed = d < 1e-8;
      c.detail = "max |pushforward - direct| " + fmt("%.2e", d);
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    report.checks.push_back(c);
  }
  for (BsConvention other : {BsConvention::RealAlt, BsConvention::Symmetric}) {
    if (other == config.network.convention) continue;
    VerifyCheck c;
    c.name = "convention_" + convention_name(other);
    note("convention check against " + convention_name(other));
    const double d = convention_discrepancy(config, other, {0.3, 0.7, 1.1});
    c.passed = d < 1e-8;
    c.detail = "max |nu difference| " + fmt("%.2e", d);
    report.checks.push_back(c);
  }
  {
    VerifyCheck c;
    c.name = "cutoff_convergence";
    if (options.fast) {
      c.skipped = true;
      c.detail = "skipped (--fast)";
    } else {
      note("convergence check on " + std::to_string(scan.crossings.size()) + " crossing(s)");
      std::string where;
      const double shift = convergence_shift(config, scan.crossings, 0.01, &where);
      c.passed = shift < 0.01;
      c.detail = scan.crossings.empty() ? "no crossings"
                                        : "max threshold shift " + fmt("%.2e", shift) +
                                              (where.empty() ? "" : " (" + where + ")");
    }
    report.checks.push_back(c);
  }
  return report;
}

}  // namespace hocm
