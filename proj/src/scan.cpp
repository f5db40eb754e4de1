#include "hocm/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

namespace hocm {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

namespace {

std::vector<ModeId> without_pump(const std::vector<ModeId>& modes, const HamiltonianSpec& h) {
  std::vector<ModeId> out;
  for (const auto& m : modes)
    if (!(h.pump == PumpKind::Quantum && m == h.mode_p)) out.push_back(m);
  return out;
}

NormalPoly number_op(const ModeId& m) { return NormalPoly::monomial({{m, 1, 1}}); }

template <typename F>
void parallel_for(std::size_t n, int threads, F&& f) {
  threads = std::max(1, std::min<int>(threads, int(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

ScanEngine::ScanEngine(ScenarioConfig config, bool strict_pump)
    : config_(std::move(config)), strict_(strict_pump) {
  const auto natives = config_.hamiltonian.modes();
  net_ = compile_network(config_.network, natives);
  native_net_ = identity_network(natives);
  initial_ = initial_state(config_.cutoffs(), config_.hamiltonian, strict_);
  const auto outputs = without_pump(net_.outputs(), config_.hamiltonian);
  const auto native_modes = without_pump(natives, config_.hamiltonian);
  for (const auto& v : config_.vectors) {
    Task t;
    t.vector = v.spec.name;
    t.reference = v.reference;
    const auto& modes = v.reference ? native_modes : outputs;
    t.plan = std::make_unique<HocmPlan>(v.spec, v.reference ? native_net_ : net_);
    if (v.bipartitions.empty()) {
      for (auto& b : enumerate_bipartitions(modes))
        if (validate_locality(v.spec, b).empty()) t.bips.push_back(std::move(b));
    } else {
      for (const auto& label : v.bipartitions) t.bips.push_back(parse_bipartition(label, modes));
    }
    std::set<std::string> primary;
    for (const auto& label : v.primary) primary.insert(parse_bipartition(label, modes).label);
    for (const auto& b : t.bips) t.primary.push_back(primary.empty() || primary.count(b.label));
    tasks_.push_back(std::move(t));
  }
}

std::vector<std::pair<std::string, std::string>> ScanEngine::series() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& t : tasks_)
    for (const auto& b : t.bips) out.emplace_back(t.vector, b.label);
  return out;
}

EvolutionResult ScanEngine::state(double xi) const {
  EvolutionParams params;
  params.tolerance = config_.tol.integrator;
  params.leakage_threshold = config_.tol.leakage;
  try {
    return evolve(initial_, config_.hamiltonian, config_.hamiltonian.tau(xi), params);
  } catch (const FockError& e) {
    throw FockError("xi = " + std::to_string(xi) + ": " + e.what());
  }
}

std::shared_ptr<const PointResult> ScanEngine::compute(double xi) const {
  EvolutionResult evo = state(xi);
  auto res = std::make_shared<PointResult>();
  auto& d = res->diag;
  d.xi = xi;
  d.norm_drift = evo.norm_drift;
  d.leakage = evo.leakage;
  d.leakage_flag = evo.leakage_flag;
  d.steps = evo.steps;

  auto psi = std::make_shared<const StateVector>(std::move(evo.state));
  MomentEvaluator eval(psi);
  const auto& h = config_.hamiltonian;
  d.n_a = eval(number_op(h.mode_a)).real();
  d.n_b = eval(number_op(h.mode_b)).real();
  d.manley_rowe_ab = h.l * d.n_a - h.k * d.n_b;
  if (h.pump == PumpKind::Quantum) {
    d.n_p = eval(number_op(h.mode_p)).real();
    const double n_p0 = moment(initial_, number_op(h.mode_p)).real();
    d.manley_rowe_ap = d.n_a + h.k * d.n_p - h.k * n_p0;
  }
  d.min_uncertainty = std::numeric_limits<double>::infinity();

  for (const auto& t : tasks_) {
    HOCMBundle b = t.plan->evaluate(eval, xi, config_.name);
    d.min_uncertainty = std::min(d.min_uncertainty, uncertainty_check(b));
    for (double m : b.means) d.max_mean = std::max(d.max_mean, std::abs(m));
    for (std::size_t i = 0; i < t.bips.size(); ++i) {
      const PPTVerdict v = ppt_min_eig(b, t.bips[i]);
      ScanRow r;
      r.xi = xi;
      r.vector = t.vector;
      r.order = v.order;
      r.bipartition = t.bips[i].label;
      r.nu_min = v.nu_min;
      r.sufficiency = v.sufficiency;
      r.verdict = v.verdict;
      r.leakage_flag = d.leakage_flag;
      r.primary = t.primary[i];
      r.reference = t.reference;
      r.nu_block = v.nu_block;
      r.forms_agree = v.forms_agree;
      r.tol = v.tol;
      res->rows.push_back(std::move(r));
    }
    res->bundles.push_back(std::move(b));
  }
  return res;
}

std::shared_ptr<const PointResult> ScanEngine::evaluate(double xi) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(xi);
    if (it != cache_.end()) return it->second;
  }
  auto res = compute(xi);
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.emplace(xi, std::move(res)).first->second;
}

void ScanEngine::evaluate_all(const std::vector<double>& xis, int threads) {
  std::vector<double> todo;
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (double x : xis)
      if (!cache_.count(x) && std::find(todo.begin(), todo.end(), x) == todo.end()) todo.push_back(x);
  }
  parallel_for(todo.size(), threads, [&](std::size_t i) { evaluate(todo[i]); });
}

bool ScanEngine::entangled_at(double xi, const std::string& vector, const std::string& bipartition) {
  for (const auto& r : evaluate(xi)->rows)
    if (r.vector == vector && r.bipartition == bipartition) return r.entangled();
  throw CriteriaError("no series " + vector + " / " + bipartition);
}

Crossing ScanEngine::bisect(const std::string& vector, const std::string& bipartition, double lo,
                            double hi, double tol, int threads) {
  evaluate_all({lo, hi}, threads);
  const bool flag_lo = entangled_at(lo, vector, bipartition);
  const bool flag_hi = entangled_at(hi, vector, bipartition);
  if (flag_lo == flag_hi)
    throw CriteriaError("bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "] for " +
                        vector + " " + bipartition + " has no sign change");
  while (hi - lo >= tol) {
    const double mid = 0.5 * (lo + hi);
    if (entangled_at(mid, vector, bipartition) == flag_lo) lo = mid;
    else hi = mid;
  }
  Crossing c;
  c.vector = vector;
  c.bipartition = bipartition;
  c.lo = lo;
  c.hi = hi;
  c.xi = 0.5 * (lo + hi);
  c.direction = flag_hi ? "toward_entangled" : "toward_positive";
  return c;
}

std::vector<Crossing> grid_brackets(const std::vector<ScanRow>& rows) {
  std::map<std::pair<std::string, std::string>, std::vector<const ScanRow*>> series;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& r : rows) {
    auto key = std::make_pair(r.vector, r.bipartition);
    if (!series.count(key)) order.push_back(key);
    series[key].push_back(&r);
  }
  std::vector<Crossing> out;
  for (const auto& key : order) {
    auto pts = series[key];
    std::stable_sort(pts.begin(), pts.end(), [](auto* x, auto* y) { return x->xi < y->xi; });
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (pts[i - 1]->entangled() == pts[i]->entangled() || pts[i - 1]->xi == 0.0) continue;
      Crossing c;
      c.vector = key.first;
      c.bipartition = key.second;
      c.lo = pts[i - 1]->xi;
      c.hi = pts[i]->xi;
      c.xi = 0.5 * (c.lo + c.hi);
      c.direction = pts[i]->entangled() ? "toward_entangled" : "toward_positive";
      out.push_back(c);
    }
  }
  return out;
}

ScanResult run_scan(const ScenarioConfig& config, const ScanOptions& options) {
  ScanEngine engine(config);
  return run_scan(engine, options);
}

ScanResult run_scan(ScanEngine& engine, const ScanOptions& options) {
  const ScenarioConfig& config = engine.config();
  const int threads = resolve_threads(options.threads > 0 ? options.threads : config.threads);
  const auto grid = config.xi.points();
  if (options.progress)
    options.progress("evolving " + std::to_string(grid.size()) + " grid points on " +
                     std::to_string(threads) + " thread(s)");
  engine.evaluate_all(grid, threads);

  ScanResult out;
  out.scenario = config.name;
  for (double xi : grid) {
    auto p = engine.evaluate(xi);
    out.rows.insert(out.rows.end(), p->rows.begin(), p->rows.end());
    out.points.push_back(p->diag);
  }
  out.crossings = grid_brackets(out.rows);
  if (!options.refine) return out;

  // Refine all brackets together: each round evaluates every pending midpoint once.
  struct Pending {
    Crossing c;
    bool flag_lo;
  };
  std::vector<Pending> pending;
  for (const auto& c : out.crossings) pending.push_back({c, c.direction == "toward_positive"});
  if (options.progress && !pending.empty())
    options.progress("refining " + std::to_string(pending.size()) + " crossing(s)");
  for (;;) {
    std::vector<double> mids;
    for (const auto& p : pending)
      if (p.c.hi - p.c.lo >= config.tol.threshold_xi) mids.push_back(0.5 * (p.c.lo + p.c.hi));
    if (mids.empty()) break;
    engine.evaluate_all(mids, threads);
    for (auto& p : pending) {
      if (p.c.hi - p.c.lo < config.tol.threshold_xi) continue;
      const double mid = 0.5 * (p.c.lo + p.c.hi);
      bool flag = false;
      for (const auto& r : engine.evaluate(mid)->rows)
        if (r.vector == p.c.vector && r.bipartition == p.c.bipartition) flag = r.entangled();
      (flag == p.flag_lo ? p.c.lo : p.c.hi) = mid;
    }
  }
  out.crossings.clear();
  for (auto& p : pending) {
    p.c.xi = 0.5 * (p.c.lo + p.c.hi);
    out.crossings.push_back(p.c);
  }
  return out;
}

}  // namespace hocm
