#include "hocm/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace hocm {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// a^j a^{dag k} = sum_t C(j,t) C(k,t) t! a^{dag (k-t)} a^{j-t}
double reorder_weight(int j, int k, int t) {
  double f = 1.0;
  for (int i = 2; i <= t; ++i) f *= i;
  return binomial(j, t) * binomial(k, t) * f;
}

struct PartialTerm {
  MonomialKey key;
  double weight;
};

// Normal-ordered product of two monomials. Keys are merged mode by mode; a mode
// shared by both sides contributes a sum over contraction counts.
void multiply_monomials(const MonomialKey& x, const MonomialKey& y, Complex c, NormalPoly& out) {
  std::vector<PartialTerm> partial{{{}, 1.0}};
  auto extend_all = [&partial](const ModePower& mp) {
    for (auto& pt : partial) pt.key.push_back(mp);
  };
  std::size_t ix = 0, iy = 0;
  while (ix < x.size() || iy < y.size()) {
    if (iy == y.size() || (ix < x.size() && x[ix].mode < y[iy].mode)) {
      extend_all(x[ix++]);
    } else if (ix == x.size() || y[iy].mode < x[ix].mode) {
      extend_all(y[iy++]);
    } else {
      const ModePower& l = x[ix++];
      const ModePower& r = y[iy++];
      const int tmax = std::min(l.ann, r.cre);
      std::vector<PartialTerm> next;
      next.reserve(partial.size() * (tmax + 1));
      for (const auto& pt : partial) {
        for (int t = 0; t <= tmax; ++t) {
          PartialTerm nt = pt;
          nt.weight *= reorder_weight(l.ann, r.cre, t);
          ModePower mp{l.mode, l.cre + r.cre - t, l.ann + r.ann - t};
          if (mp.cre != 0 || mp.ann != 0) nt.key.push_back(std::move(mp));
          next.push_back(std::move(nt));
        }
      }
      partial = std::move(next);
    }
  }
  for (const auto& pt : partial) out.add_term(pt.key, c * pt.weight);
}

// Single-mode normal-ordered polynomial keyed by (cre, ann).
using SingleMode = std::map<std::pair<int, int>, double>;

SingleMode order_single_mode(const std::vector<LetterKind>& letters) {
  SingleMode poly{{{0, 0}, 1.0}};
  for (LetterKind kind : letters) {
    SingleMode next;
    for (const auto& [ij, c] : poly) {
      const auto [i, j] = ij;
      if (kind == LetterKind::Annihilate) {
        next[{i, j + 1}] += c;
      } else {
        // a^{dag i} a^j a^dag = a^{dag (i+1)} a^j + j a^{dag i} a^{j-1}
        next[{i + 1, j}] += c;
        if (j > 0) next[{i, j - 1}] += c * j;
      }
    }
    poly = std::move(next);
  }
  return poly;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

NormalPoly NormalPoly::constant(Complex c) {
  NormalPoly p;
  p.add_term({}, c);
  return p;
}

NormalPoly NormalPoly::annihilator(const ModeId& mode) { return monomial({{mode, 0, 1}}); }

NormalPoly NormalPoly::creator(const ModeId& mode) { return monomial({{mode, 1, 0}}); }

NormalPoly NormalPoly::monomial(MonomialKey key, Complex c) {
  std::sort(key.begin(), key.end());
  MonomialKey clean;
  for (auto& mp : key) {
    if (mp.cre < 0 || mp.ann < 0) throw AlgebraError("negative exponent in monomial");
    if (!clean.empty() && clean.back().mode == mp.mode)
      throw AlgebraError("mode '" + mp.mode + "' repeated in monomial key");
    if (mp.cre != 0 || mp.ann != 0) clean.push_back(std::move(mp));
  }
  NormalPoly p;
  p.add_term(clean, c);
  return p;
}

Complex NormalPoly::coefficient(const MonomialKey& key) const {
  auto it = terms_.find(key);
  return it == terms_.end() ? Complex{} : it->second;
}

std::set<ModeId> NormalPoly::modes() const {
  std::set<ModeId> out;
  for (const auto& [key, c] : terms_)
    for (const auto& mp : key) out.insert(mp.mode);
  return out;
}

int NormalPoly::degree() const {
  int d = 0;
  for (const auto& [key, c] : terms_) {
    int n = 0;
    for (const auto& mp : key) n += mp.cre + mp.ann;
    d = std::max(d, n);
  }
  return d;
}

int NormalPoly::max_exponent(const ModeId& mode) const {
  int e = 0;
  for (const auto& [key, c] : terms_)
    for (const auto& mp : key)
      if (mp.mode == mode) e = std::max({e, mp.cre, mp.ann});
  return e;
}

void NormalPoly::add_term(const MonomialKey& key, Complex c) {
  if (c == Complex{}) return;
  auto [it, inserted] = terms_.try_emplace(key, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) <= kPruneThreshold) terms_.erase(it);
}

NormalPoly& NormalPoly::operator+=(const NormalPoly& other) {
  for (const auto& [key, c] : other.terms_) add_term(key, c);
  return *this;
}

NormalPoly& NormalPoly::operator-=(const NormalPoly& other) {
  for (const auto& [key, c] : other.terms_) add_term(key, -c);
  return *this;
}

NormalPoly& NormalPoly::operator*=(Complex s) {
  TermMap scaled;
  for (const auto& [key, c] : terms_) {
    const Complex v = c * s;
    if (std::abs(v) > kPruneThreshold) scaled.emplace(key, v);
  }
  terms_ = std::move(scaled);
  return *this;
}

double NormalPoly::distance(const NormalPoly& other) const {
  double d = 0.0;
  for (const auto& [key, c] : terms_) d = std::max(d, std::abs(c - other.coefficient(key)));
  for (const auto& [key, c] : other.terms_)
    if (!terms_.count(key)) d = std::max(d, std::abs(c));
  return d;
}

std::string NormalPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [key, c] : terms_) {
    std::string coeff;
    bool negative = false;
    if (c.imag() == 0.0) {
      negative = c.real() < 0.0;
      coeff = format_real(std::abs(c.real()));
    } else {
      coeff = "(" + format_real(c.real()) + "," + format_real(c.imag()) + ")";
    }
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    out += coeff;
    for (const auto& mp : key) {
      if (mp.cre > 0) out += "*" + mp.mode + "'" + (mp.cre > 1 ? "^" + std::to_string(mp.cre) : "");
      if (mp.ann > 0) out += "*" + mp.mode + (mp.ann > 1 ? "^" + std::to_string(mp.ann) : "");
    }
  }
  return out;
}

std::vector<ModeId> LinearModeMap::outputs() const {
  std::vector<ModeId> out;
  for (const auto& [mode, row] : rows) out.push_back(mode);
  return out;
}

std::vector<ModeId> LinearModeMap::inputs() const {
  std::set<ModeId> in;
  for (const auto& [mode, row] : rows)
    for (const auto& [input, amp] : row) in.insert(input);
  return {in.begin(), in.end()};
}

double LinearModeMap::unitarity_residual() const {
  const auto out = outputs();
  double r = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < out.size(); ++j) {
      Complex s{};
      for (const auto& [in_i, ai] : rows.at(out[i]))
        for (const auto& [in_j, aj] : rows.at(out[j]))
          if (in_i == in_j) s += ai * std::conj(aj);
      if (i == j) s -= 1.0;
      r = std::max(r, std::abs(s));
    }
  }
  return r;
}

NormalPoly normal_order(const LadderWord& word) {
  std::map<ModeId, std::vector<LetterKind>> per_mode;
  for (const auto& letter : word.letters) per_mode[letter.mode].push_back(letter.kind);

  NormalPoly result = NormalPoly::constant(word.coeff);
  for (const auto& [mode, letters] : per_mode) {
    NormalPoly factor;
    for (const auto& [ij, c] : order_single_mode(letters)) {
      MonomialKey key;
      if (ij.first != 0 || ij.second != 0) key.push_back({mode, ij.first, ij.second});
      factor.add_term(key, c);
    }
    result = multiply(result, factor);
  }
  return result;
}

NormalPoly normal_order(const std::vector<LadderWord>& words) {
  NormalPoly sum;
  for (const auto& w : words) sum += normal_order(w);
  return sum;
}

NormalPoly multiply(const NormalPoly& p, const NormalPoly& q) {
  NormalPoly out;
  for (const auto& [kp, cp] : p.terms())
    for (const auto& [kq, cq] : q.terms()) multiply_monomials(kp, kq, cp * cq, out);
  return out;
}

NormalPoly power(const NormalPoly& p, int n) {
  if (n < 0) throw AlgebraError("negative power");
  NormalPoly r = NormalPoly::constant(1.0);
  for (int i = 0; i < n; ++i) r = multiply(r, p);
  return r;
}

NormalPoly commutator(const NormalPoly& p, const NormalPoly& q) {
  return multiply(p, q) - multiply(q, p);
}

NormalPoly dagger(const NormalPoly& p) {
  NormalPoly out;
  for (const auto& [key, c] : p.terms()) {
    MonomialKey k = key;
    for (auto& mp : k) std::swap(mp.cre, mp.ann);
    out.add_term(k, std::conj(c));
  }
  return out;
}

NormalPoly substitute(const NormalPoly& p, const LinearModeMap& map) {
  std::map<std::tuple<ModeId, bool, int>, NormalPoly> powers;
  auto linear_power = [&](const ModeId& mode, bool create, int n) -> const NormalPoly& {
    auto key = std::make_tuple(mode, create, n);
    auto it = powers.find(key);
    if (it != powers.end()) return it->second;
    auto row = map.rows.find(mode);
    if (row == map.rows.end())
      throw AlgebraError("mode '" + mode + "' is not an output of the linear map");
    NormalPoly lin;
    for (const auto& [input, amp] : row->second) {
      lin += create ? NormalPoly::creator(input) * std::conj(amp)
                    : NormalPoly::annihilator(input) * amp;
    }
    return powers.emplace(key, power(lin, n)).first->second;
  };

  NormalPoly out;
  for (const auto& [key, c] : p.terms()) {
    NormalPoly cre = NormalPoly::constant(c);
    NormalPoly ann = NormalPoly::constant(1.0);
    for (const auto& mp : key) {
      if (mp.cre > 0) cre = multiply(cre, linear_power(mp.mode, true, mp.cre));
      if (mp.ann > 0) ann = multiply(ann, linear_power(mp.mode, false, mp.ann));
    }
    out += multiply(cre, ann);
  }
  return out;
}

NormalPoly vacuum_project(const NormalPoly& p, const std::set<ModeId>& ancillas) {
  NormalPoly out;
  for (const auto& [key, c] : p.terms()) {
    bool keep = std::none_of(key.begin(), key.end(),
                             [&](const ModePower& mp) { return ancillas.count(mp.mode) > 0; });
    if (keep) out.add_term(key, c);
  }
  return out;
}

NormalPoly rename_modes(const NormalPoly& p, const std::map<ModeId, ModeId>& rename) {
  NormalPoly out;
  for (const auto& [key, c] : p.terms()) {
    MonomialKey k = key;
    for (auto& mp : k) {
      auto it = rename.find(mp.mode);
      if (it != rename.end()) mp.mode = it->second;
    }
    out += NormalPoly::monomial(std::move(k), c);
  }
  return out;
}

}  // namespace hocm
