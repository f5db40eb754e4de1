#include "hocm/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

namespace hocm {

namespace {

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// sqrt((n+1)(n+2)...(n+r)), the matrix element of a^dag^r on |n>.
double raise_factor(int n, int r) {
  double f = 1.0;
  for (int i = 1; i <= r; ++i) f *= std::sqrt(static_cast<double>(n + i));
  return f;
}

}  // namespace

FockCutoffs::FockCutoffs(std::vector<ModeId> m, std::vector<int> n)
    : modes(std::move(m)), max(std::move(n)) {
  if (modes.size() != max.size()) throw FockError("cutoffs: mode/cutoff count mismatch");
  for (std::size_t i = 0; i < max.size(); ++i) {
    if (max[i] < 0) throw FockError("cutoff for mode '" + modes[i] + "' is negative");
    for (std::size_t j = 0; j < i; ++j)
      if (modes[j] == modes[i]) throw FockError("mode '" + modes[i] + "' listed twice");
  }
}

std::size_t FockCutoffs::dim() const {
  std::size_t d = 1;
  for (int n : max) d *= static_cast<std::size_t>(n + 1);
  return d;
}

int FockCutoffs::find(const ModeId& mode) const {
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (modes[i] == mode) return static_cast<int>(i);
  return -1;
}

int FockCutoffs::cutoff(const ModeId& mode) const {
  int i = find(mode);
  if (i < 0) throw FockError("mode '" + mode + "' is not part of the state");
  return max[i];
}

std::vector<std::size_t> FockCutoffs::strides() const {
  std::vector<std::size_t> s(max.size(), 1);
  for (int i = static_cast<int>(max.size()) - 2; i >= 0; --i)
    s[i] = s[i + 1] * static_cast<std::size_t>(max[i + 1] + 1);
  return s;
}

std::size_t FockCutoffs::index(const std::vector<int>& occupation) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < max.size(); ++i) idx = idx * (max[i] + 1) + occupation[i];
  return idx;
}

std::vector<int> FockCutoffs::occupation(std::size_t index) const {
  std::vector<int> occ(max.size());
  for (int i = static_cast<int>(max.size()) - 1; i >= 0; --i) {
    occ[i] = static_cast<int>(index % (max[i] + 1));
    index /= (max[i] + 1);
  }
  return occ;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& c : amp) s += std::norm(c);
  return std::sqrt(s);
}

Complex StateVector::inner(const StateVector& other) const {
  if (!(cutoffs == other.cutoffs)) throw FockError("inner product: cutoff mismatch");
  Complex s{};
  for (std::size_t i = 0; i < amp.size(); ++i) s += std::conj(amp[i]) * other.amp[i];
  return s;
}

double StateVector::boundary_probability(const ModeId& mode) const {
  const int m = cutoffs.find(mode);
  if (m < 0) throw FockError("mode '" + mode + "' is not part of the state");
  const auto strides = cutoffs.strides();
  const std::size_t d = cutoffs.max[m] + 1;
  double p = 0.0;
  for (std::size_t i = 0; i < amp.size(); ++i)
    if ((i / strides[m]) % d == d - 1) p += std::norm(amp[i]);
  return p;
}

double StateVector::max_boundary_probability() const {
  double p = 0.0;
  for (const auto& m : cutoffs.modes) p = std::max(p, boundary_probability(m));
  return p;
}

StateVector StateVector::embed(const FockCutoffs& target) const {
  std::vector<int> where(cutoffs.size());
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    where[i] = target.find(cutoffs.modes[i]);
    if (where[i] < 0) throw FockError("embed: target lacks mode '" + cutoffs.modes[i] + "'");
    if (target.max[where[i]] < cutoffs.max[i])
      throw FockError("embed: target cutoff for '" + cutoffs.modes[i] + "' is smaller");
  }
  StateVector out{target, std::vector<Complex>(target.dim())};
  const auto tstrides = target.strides();
  for (std::size_t i = 0; i < amp.size(); ++i) {
    if (amp[i] == Complex{}) continue;
    const auto occ = cutoffs.occupation(i);
    std::size_t j = 0;
    for (std::size_t m = 0; m < occ.size(); ++m) j += occ[m] * tstrides[where[m]];
    out.amp[j] = amp[i];
  }
  return out;
}

void HamiltonianSpec::validate() const {
  if (k < 1 || l < 1) throw FockError("Hamiltonian exponents k and l must be positive");
  if (alpha_p < 0) throw FockError("pump amplitude must be non-negative");
  if (!(coupling > 0)) throw FockError("coupling must be positive");
  if (mode_a == mode_b || mode_a == mode_p || mode_b == mode_p)
    throw FockError("Hamiltonian mode labels must be distinct");
}

std::vector<ModeId> HamiltonianSpec::modes() const {
  if (pump == PumpKind::Quantum) return {mode_a, mode_b, mode_p};
  return {mode_a, mode_b};
}

int required_pump_cutoff(double alpha_p, double deficit) {
  if (alpha_p == 0.0) return 0;
  const double lam = alpha_p * alpha_p;
  auto log_pmf = [&](int n) { return -lam + n * std::log(lam) - log_factorial(n); };
  for (int n = 0; n < 100000; ++n) {
    // survival function sum_{j>n} pmf(j); terms decay geometrically once j > lam
    double sf = 0.0;
    for (int j = n + 1;; ++j) {
      double t = std::exp(log_pmf(j));
      sf += t;
      if (j > lam && t < 1e-18 * std::max(sf, 1e-300)) break;
      if (j > n + 100000) break;
    }
    const double norm_deficit = -std::expm1(0.5 * std::log1p(-std::min(sf, 1.0)));
    if (norm_deficit < deficit) return n;
  }
  throw FockError("pump amplitude too large");
}

FockCutoffs native_cutoffs(const HamiltonianSpec& spec, int n_a, int n_b, int n_p) {
  if (spec.pump == PumpKind::Quantum) return FockCutoffs(spec.modes(), {n_a, n_b, n_p});
  return FockCutoffs(spec.modes(), {n_a, n_b});
}

StateVector initial_state(const FockCutoffs& cutoffs, const HamiltonianSpec& spec, bool strict) {
  spec.validate();
  for (const auto& m : spec.modes())
    if (cutoffs.find(m) < 0) throw FockError("cutoffs lack mode '" + m + "'");
  StateVector psi{cutoffs, std::vector<Complex>(cutoffs.dim())};
  if (spec.pump == PumpKind::Classical) {
    psi.amp[0] = 1.0;
    return psi;
  }
  const int np = cutoffs.cutoff(spec.mode_p);
  const int need = strict ? required_pump_cutoff(spec.alpha_p) : 0;
  if (np < need) {
    throw FockError("pump cutoff " + std::to_string(np) + " too small for alpha_p = " +
                    std::to_string(spec.alpha_p) + "; required cutoff is " + std::to_string(need));
  }
  const auto strides = cutoffs.strides();
  const std::size_t sp = strides[cutoffs.find(spec.mode_p)];
  const double lam = spec.alpha_p * spec.alpha_p;
  double norm2 = 0.0;
  std::vector<double> c(np + 1);
  for (int n = 0; n <= np; ++n) {
    if (spec.alpha_p == 0.0) {
      c[n] = n == 0 ? 1.0 : 0.0;
    } else {
      c[n] = std::exp(-lam / 2 + n * std::log(spec.alpha_p) - 0.5 * log_factorial(n));
    }
    norm2 += c[n] * c[n];
  }
  const double scale = 1.0 / std::sqrt(norm2);
  for (int n = 0; n <= np; ++n) psi.amp[n * sp] = c[n] * scale;
  return psi;
}

StateVector apply_hamiltonian(const HamiltonianSpec& spec, const StateVector& psi) {
  spec.validate();
  const auto& cut = psi.cutoffs;
  const int ia = cut.find(spec.mode_a), ib = cut.find(spec.mode_b);
  const int ip = spec.pump == PumpKind::Quantum ? cut.find(spec.mode_p) : -1;
  if (ia < 0 || ib < 0 || (spec.pump == PumpKind::Quantum && ip < 0))
    throw FockError("apply_hamiltonian: state lacks a Hamiltonian mode");
  const auto strides = cut.strides();
  const int k = spec.k, l = spec.l;
  const double g = spec.coupling * (spec.pump == PumpKind::Classical ? spec.alpha_p : 1.0);
  const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(k * strides[ia] + l * strides[ib]) -
                               (ip >= 0 ? static_cast<std::ptrdiff_t>(strides[ip]) : 0);

  StateVector out{cut, std::vector<Complex>(psi.amp.size())};
  const Complex ig(0.0, g);
  for (std::size_t i = 0; i < psi.amp.size(); ++i) {
    const Complex c = psi.amp[i];
    if (c == Complex{}) continue;
    const int na = static_cast<int>((i / strides[ia]) % (cut.max[ia] + 1));
    const int nb = static_cast<int>((i / strides[ib]) % (cut.max[ib] + 1));
    const int np = ip >= 0 ? static_cast<int>((i / strides[ip]) % (cut.max[ip] + 1)) : 0;
    // forward: a^dag^k b^dag^l p
    if (na + k <= cut.max[ia] && nb + l <= cut.max[ib] && (ip < 0 || np >= 1)) {
      double f = raise_factor(na, k) * raise_factor(nb, l) * (ip >= 0 ? std::sqrt(np) : 1.0);
      out.amp[i + shift] += ig * f * c;
    }
    // backward: a^k b^l p^dag
    if (na >= k && nb >= l && (ip < 0 || np + 1 <= cut.max[ip])) {
      double f = raise_factor(na - k, k) * raise_factor(nb - l, l) *
                 (ip >= 0 ? std::sqrt(np + 1.0) : 1.0);
      out.amp[i - shift] -= ig * f * c;
    }
  }
  return out;
}

StateVector apply_bs_unitary(const StateVector& psi, const ModeId& x, const ModeId& y,
                             const BsMatrix& m) {
  const auto& cut = psi.cutoffs;
  const int ix = cut.find(x), iy = cut.find(y);
  if (ix < 0 || iy < 0 || ix == iy)
    throw FockError("beam splitter modes '" + x + "', '" + y + "' not both in the state");
  const auto strides = cut.strides();
  const int nx = cut.max[ix], ny = cut.max[iy];
  const std::size_t sx = strides[ix], sy = strides[iy];

  std::vector<std::size_t> bases;
  for (std::size_t i = 0; i < psi.amp.size(); ++i)
    if ((i / sx) % (nx + 1) == 0 && (i / sy) % (ny + 1) == 0) bases.push_back(i);

  StateVector out{cut, std::vector<Complex>(psi.amp.size())};
  // Column n1 of sector N holds U|n1, N-n1> over |m1, N-m1>, built by
  // U|n1,n2> = (m00 x^dag + m10 y^dag) U|n1-1,n2> / sqrt(n1).
  std::vector<std::vector<Complex>> prev{{Complex(1.0)}};
  std::vector<Complex> in, res;
  for (int total = 0; total <= nx + ny; ++total) {
    std::vector<std::vector<Complex>> cur(total + 1, std::vector<Complex>(total + 1));
    if (total == 0) {
      cur = prev;
    } else {
      auto raise = [&](const std::vector<Complex>& v, Complex cx, Complex cy, double scale,
                       std::vector<Complex>& dst) {
        const int n = total - 1;
        for (int m1 = 0; m1 <= n; ++m1) {
          const int m2 = n - m1;
          dst[m1 + 1] += cx * std::sqrt(m1 + 1.0) * scale * v[m1];
          dst[m1] += cy * std::sqrt(m2 + 1.0) * scale * v[m1];
        }
      };
      raise(prev[0], m[0][1], m[1][1], 1.0 / std::sqrt(double(total)), cur[0]);
      for (int n1 = 1; n1 <= total; ++n1)
        raise(prev[n1 - 1], m[0][0], m[1][0], 1.0 / std::sqrt(double(n1)), cur[n1]);
    }
    const int lo = std::max(0, total - ny), hi = std::min(total, nx);
    if (lo <= hi) {
      for (std::size_t base : bases) {
        for (int n1 = lo; n1 <= hi; ++n1) {
          const Complex c = psi.amp[base + n1 * sx + (total - n1) * sy];
          if (c == Complex{}) continue;
          const auto& col = cur[n1];
          for (int m1 = lo; m1 <= hi; ++m1)
            out.amp[base + m1 * sx + (total - m1) * sy] += col[m1] * c;
        }
      }
    }
    prev = std::move(cur);
  }
  return out;
}

MomentEvaluator::MomentEvaluator(std::shared_ptr<const StateVector> psi) : psi_(std::move(psi)) {
  const auto& cut = psi_->cutoffs;
  if (cut.dim() > 0xffffffffu) throw FockError("state too large for moment evaluation");
  strides_ = cut.strides();
  digits_.assign(cut.size(), {});
  for (std::size_t i = 0; i < psi_->amp.size(); ++i) {
    if (psi_->amp[i] == Complex{}) continue;
    support_.push_back(static_cast<std::uint32_t>(i));
    for (std::size_t m = 0; m < cut.size(); ++m)
      digits_[m].push_back(static_cast<int>((i / strides_[m]) % (cut.max[m] + 1)));
  }
}

Complex MomentEvaluator::operator()(const NormalPoly& p) const {
  Complex s{};
  for (const auto& [key, c] : p.terms()) s += c * monomial(key);
  return s;
}

Complex MomentEvaluator::monomial(const MonomialKey& key) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  const Complex v = compute(key);
  std::lock_guard<std::mutex> lock(mu_);
  cache_.emplace(key, v);
  return v;
}

double MomentEvaluator::worst_margin() const {
  std::lock_guard<std::mutex> lock(mu_);
  return worst_margin_;
}

Complex MomentEvaluator::compute(const MonomialKey& key) const {
  if (key.empty()) {
    double s = 0.0;
    for (auto i : support_) s += std::norm(psi_->amp[i]);
    return s;
  }
  const auto& cut = psi_->cutoffs;
  struct Factor {
    int mode, cre, ann;
    std::vector<double> table;  // indexed by occupation n
  };
  std::vector<Factor> factors;
  std::ptrdiff_t shift = 0;
  double margin = 0.0;
  for (const auto& mp : key) {
    const int m = cut.find(mp.mode);
    if (m < 0) throw FockError("moment: mode '" + mp.mode + "' is not part of the state");
    const int nmax = cut.max[m];
    const int e = std::max(mp.cre, mp.ann);
    if (e > nmax) {
      throw FockError("moment: exponent " + std::to_string(e) + " on mode '" + mp.mode +
                      "' exceeds its cutoff " + std::to_string(nmax) +
                      "; requires cutoff >= " + std::to_string(e));
    }
    margin = std::max(margin, nmax > 0 ? double(e) / nmax : 0.0);
    Factor f{m, mp.cre, mp.ann, std::vector<double>(nmax + 1, 0.0)};
    for (int n = mp.ann; n <= nmax; ++n) {
      const int n2 = n - mp.ann + mp.cre;
      if (n2 > nmax) continue;
      const double base = log_factorial(n - mp.ann);
      f.table[n] = std::exp(0.5 * (log_factorial(n) - base) + 0.5 * (log_factorial(n2) - base));
    }
    shift += static_cast<std::ptrdiff_t>(strides_[m]) * (mp.cre - mp.ann);
    factors.push_back(std::move(f));
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    worst_margin_ = std::max(worst_margin_, margin);
  }
  Complex s{};
  const auto& amp = psi_->amp;
  for (std::size_t k = 0; k < support_.size(); ++k) {
    double w = 1.0;
    for (const auto& f : factors) {
      w *= f.table[digits_[f.mode][k]];
      if (w == 0.0) break;
    }
    if (w == 0.0) continue;
    const std::size_t i = support_[k];
    s += std::conj(amp[i + shift]) * amp[i] * w;
  }
  return s;
}

Complex moment(const StateVector& psi, const NormalPoly& p) {
  MomentEvaluator eval(std::shared_ptr<const StateVector>(&psi, [](const StateVector*) {}));
  return eval(p);
}

void write_state(std::ostream& out, const StateVector& psi) {
  out << "FOCK";
  for (int n : psi.cutoffs.max) out << ' ' << n;
  out << '\n';
  static_assert(std::endian::native == std::endian::little, "little-endian host expected");
  for (const auto& c : psi.amp) {
    double re = c.real(), im = c.imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof re);
    out.write(reinterpret_cast<const char*>(&im), sizeof im);
  }
  if (!out) throw FockError("failed to write state");
}

StateVector read_state(std::istream& in, const std::vector<ModeId>& modes) {
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string tag;
  hs >> tag;
  if (tag != "FOCK") throw FockError("state dump: missing FOCK header");
  std::vector<int> max;
  for (int n; hs >> n;) max.push_back(n);
  if (max.size() != modes.size()) throw FockError("state dump: mode count mismatch");
  StateVector psi{FockCutoffs(modes, max), {}};
  psi.amp.resize(psi.cutoffs.dim());
  for (auto& c : psi.amp) {
    double re, im;
    in.read(reinterpret_cast<char*>(&re), sizeof re);
    in.read(reinterpret_cast<char*>(&im), sizeof im);
    if (!in) throw FockError("state dump: truncated amplitude data");
    c = Complex(re, im);
  }
  return psi;
}

}  // namespace hocm
