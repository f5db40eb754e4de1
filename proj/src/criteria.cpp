#include "hocm/criteria.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <tuple>

#include "hocm/linalg.hpp"

namespace hocm {

std::string bipartition_label(const std::set<ModeId>& side_a, const std::set<ModeId>& side_b,
                              const std::vector<ModeId>& modes) {
  std::string a, b;
  for (const auto& m : modes) {
    if (side_a.count(m)) a += m;
    if (side_b.count(m)) b += m;
  }
  return a + "|" + b;
}

namespace {

std::set<ModeId> parse_side(const std::string& text, const std::vector<ModeId>& modes,
                            const std::string& whole) {
  std::set<ModeId> side;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
      continue;
    }
    const ModeId* best = nullptr;
    for (const auto& m : modes)
      if (text.compare(pos, m.size(), m) == 0 && (!best || m.size() > best->size())) best = &m;
    if (!best)
      throw CriteriaError("bipartition '" + whole + "': unknown mode at '" + text.substr(pos) + "'");
    if (!side.insert(*best).second)
      throw CriteriaError("bipartition '" + whole + "': mode '" + *best + "' repeated");
    pos += best->size();
  }
  return side;
}

enum class Side { A, B, Both };

Side element_side(const QuadratureElement& e, const Bipartition& bip) {
  bool in_a = false, in_b = false;
  for (const auto& f : e.factors) {
    if (bip.side_a.count(f.mode)) in_a = true;
    else if (bip.side_b.count(f.mode)) in_b = true;
    else throw CriteriaError("mode '" + f.mode + "' is in neither side of " + bip.label);
  }
  if (in_a && in_b) return Side::Both;
  return in_a ? Side::A : Side::B;
}

void require_local(const QuadratureVectorSpec& spec, const Bipartition& bip) {
  auto bad = validate_locality(spec, bip);
  if (bad.empty()) return;
  std::string list;
  for (const auto& s : bad) list += (list.empty() ? "" : ", ") + s;
  throw CriteriaError("vector '" + spec.name + "' is not local for " + bip.label + ": " + list);
}

double real_checked(Complex v, double& max_imag, const char* what) {
  const double rel = std::abs(v.imag()) / std::max(1.0, std::abs(v.real()));
  max_imag = std::max(max_imag, rel);
  if (rel > 1e-10)
    throw CriteriaError(std::string("non-real ") + what + " moment (imaginary part " +
                        std::to_string(v.imag()) + ")");
  return v.real();
}

HOCMBundle assemble(const QuadratureVectorSpec& spec, const std::vector<Complex>& mean,
                    const std::vector<std::vector<Complex>>& sym,
                    const std::vector<std::vector<Complex>>& comm, double xi,
                    const std::string& scenario) {
  const int d = static_cast<int>(spec.dim());
  HOCMBundle b;
  b.spec = spec;
  b.xi = xi;
  b.scenario = scenario;
  b.V.resize(d, d);
  b.Omega.resize(d, d);
  for (int i = 0; i < d; ++i) b.means.push_back(real_checked(mean[i], b.max_imag, "mean"));
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      const double v = real_checked(sym[i][j], b.max_imag, "covariance") - b.means[i] * b.means[j];
      b.V(i, j) = b.V(j, i) = v;
      const double o = i == j ? 0.0 : real_checked(comm[i][j], b.max_imag, "commutator");
      b.Omega(i, j) = o;
      b.Omega(j, i) = -o;
    }
  }
  return b;
}

struct ElementPolys {
  std::vector<NormalPoly> r;
  std::vector<std::vector<NormalPoly>> sym, comm;
};

ElementPolys element_polys(const QuadratureVectorSpec& spec) {
  validate_vector(spec);
  ElementPolys e;
  for (const auto& el : spec.elements) e.r.push_back(quadrature_poly(el));
  const std::size_t d = e.r.size();
  e.sym.assign(d, std::vector<NormalPoly>(d));
  e.comm.assign(d, std::vector<NormalPoly>(d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      const NormalPoly ij = multiply(e.r[i], e.r[j]);
      const NormalPoly ji = i == j ? ij : multiply(e.r[j], e.r[i]);
      e.sym[i][j] = (ij + ji) * Complex(0.5, 0.0);
      e.comm[i][j] = (ij - ji) * Complex(0.0, -1.0);
    }
  }
  return e;
}

Eigen::MatrixXcd hermitian_form(const Eigen::MatrixXd& v, const Eigen::MatrixXd& omega) {
  return v.cast<Complex>() + Complex(0.0, 0.5) * omega.cast<Complex>();
}

}  // namespace

Bipartition parse_bipartition(const std::string& text, const std::vector<ModeId>& modes) {
  const auto bar = text.find('|');
  if (bar == std::string::npos || text.find('|', bar + 1) != std::string::npos)
    throw CriteriaError("bipartition '" + text + "' must contain exactly one '|'");
  Bipartition bip;
  bip.side_a = parse_side(text.substr(0, bar), modes, text);
  bip.side_b = parse_side(text.substr(bar + 1), modes, text);
  if (bip.side_a.empty() || bip.side_b.empty())
    throw CriteriaError("bipartition '" + text + "' has an empty side");
  for (const auto& m : bip.side_a)
    if (bip.side_b.count(m)) throw CriteriaError("bipartition '" + text + "': sides overlap");
  if (bip.side_a.size() + bip.side_b.size() != modes.size())
    throw CriteriaError("bipartition '" + text + "' does not cover every mode");
  bip.label = bipartition_label(bip.side_a, bip.side_b, modes);
  return bip;
}

std::vector<Bipartition> enumerate_bipartitions(const std::vector<ModeId>& modes) {
  const int m = static_cast<int>(modes.size());
  std::vector<Bipartition> out;
  for (int size = 1; 2 * size <= m; ++size) {
    std::vector<int> pick(size);
    for (int i = 0; i < size; ++i) pick[i] = i;
    while (true) {
      if (!(2 * size == m && pick[0] != 0)) {
        Bipartition bip;
        for (int i = 0; i < m; ++i) {
          if (std::find(pick.begin(), pick.end(), i) != pick.end()) bip.side_a.insert(modes[i]);
          else bip.side_b.insert(modes[i]);
        }
        bip.label = bipartition_label(bip.side_a, bip.side_b, modes);
        out.push_back(std::move(bip));
      }
      int i = size - 1;
      while (i >= 0 && pick[i] == m - size + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

HOCMBundle build_hocm(const QuadratureVectorSpec& spec, const MomentFn& moment, double xi,
                      const std::string& scenario) {
  const ElementPolys e = element_polys(spec);
  const std::size_t d = e.r.size();
  std::vector<Complex> mean(d);
  std::vector<std::vector<Complex>> sym(d, std::vector<Complex>(d)), comm = sym;
  for (std::size_t i = 0; i < d; ++i) {
    mean[i] = moment(e.r[i]);
    for (std::size_t j = i; j < d; ++j) {
      sym[i][j] = moment(e.sym[i][j]);
      if (j != i) comm[i][j] = moment(e.comm[i][j]);
    }
  }
  return assemble(spec, mean, sym, comm, xi, scenario);
}

HocmPlan::HocmPlan(QuadratureVectorSpec spec, const CompiledNetwork& net) : spec_(std::move(spec)) {
  for (const auto& m : spec_.modes())
    if (!net.map.rows.count(m))
      throw CriteriaError("vector '" + spec_.name + "' uses mode '" + m +
                          "' which is not a network output");
  const ElementPolys e = element_polys(spec_);
  const std::size_t d = e.r.size();
  sym_.assign(d, std::vector<NormalPoly>(d));
  comm_ = sym_;
  for (std::size_t i = 0; i < d; ++i) {
    mean_.push_back(pushforward(e.r[i], net));
    for (std::size_t j = i; j < d; ++j) {
      sym_[i][j] = pushforward(e.sym[i][j], net);
      if (j != i) comm_[i][j] = pushforward(e.comm[i][j], net);
    }
  }
}

HOCMBundle HocmPlan::evaluate(const MomentEvaluator& eval, double xi,
                              const std::string& scenario) const {
  const std::size_t d = mean_.size();
  std::vector<Complex> mean(d);
  std::vector<std::vector<Complex>> sym(d, std::vector<Complex>(d)), comm = sym;
  for (std::size_t i = 0; i < d; ++i) {
    mean[i] = eval(mean_[i]);
    for (std::size_t j = i; j < d; ++j) {
      sym[i][j] = eval(sym_[i][j]);
      if (j != i) comm[i][j] = eval(comm_[i][j]);
    }
  }
  return assemble(spec_, mean, sym, comm, xi, scenario);
}

double uncertainty_check(const HOCMBundle& b) {
  return hermitian_eigen(hermitian_form(b.V, b.Omega)).values.front();
}

std::vector<std::string> validate_locality(const QuadratureVectorSpec& spec,
                                           const Bipartition& bip) {
  std::vector<std::string> bad;
  for (std::size_t i = 0; i < spec.elements.size(); ++i)
    if (element_side(spec.elements[i], bip) == Side::Both)
      bad.push_back("element " + std::to_string(i + 1) + " " + spec.elements[i].to_string());
  return bad;
}

Eigen::VectorXd mirror_signs(const QuadratureVectorSpec& spec, const Bipartition& bip) {
  require_local(spec, bip);
  Eigen::VectorXd t = Eigen::VectorXd::Ones(spec.dim());
  for (std::size_t i = 0; i < spec.elements.size(); ++i) {
    const auto& e = spec.elements[i];
    if (e.kind == QuadratureElement::Kind::P && element_side(e, bip) == Side::B) t[i] = -1.0;
  }
  return t;
}

HOCMBundle partial_transpose(const HOCMBundle& b, const Bipartition& bip) {
  const Eigen::VectorXd t = mirror_signs(b.spec, bip);
  HOCMBundle out = b;
  out.V = t.asDiagonal() * b.V * t.asDiagonal();
  return out;
}

std::string to_string(SufficiencyClass c) {
  switch (c) {
    case SufficiencyClass::Iff1xN: return "iff_1xn";
    case SufficiencyClass::IffMultimodePairs: return "iff_multimode_pairs";
    case SufficiencyClass::IffBisymmetric: return "iff_bisymmetric";
    case SufficiencyClass::NecessaryOnly: return "necessary_only";
  }
  return "necessary_only";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Entangled: return "entangled";
    case Verdict::Separable: return "separable";
    case Verdict::Undecided: return "undecided";
  }
  return "undecided";
}

namespace {

// Swapping modes x and y inside every element; returns the induced permutation
// of element indices, or nothing if the element set is not mapped onto itself.
std::optional<std::vector<int>> swap_permutation(const QuadratureVectorSpec& spec, const ModeId& x,
                                                 const ModeId& y) {
  auto key = [](std::vector<QuadratureFactor> f) {
    std::sort(f.begin(), f.end(), [](const auto& p, const auto& q) {
      return std::tie(p.mode, p.exponent) < std::tie(q.mode, q.exponent);
    });
    return f;
  };
  const int d = static_cast<int>(spec.dim());
  std::vector<int> perm(d, -1);
  for (int i = 0; i < d; ++i) {
    const auto& e = spec.elements[i];
    auto swapped = e.factors;
    for (auto& f : swapped) {
      if (f.mode == x) f.mode = y;
      else if (f.mode == y) f.mode = x;
    }
    swapped = key(swapped);
    for (int j = 0; j < d; ++j) {
      const auto& g = spec.elements[j];
      if (g.kind == e.kind && g.power == e.power && key(g.factors) == swapped) {
        perm[i] = j;
        break;
      }
    }
    if (perm[i] < 0) return std::nullopt;
  }
  return perm;
}

}  // namespace

SufficiencyClass classify_sufficiency(const QuadratureVectorSpec& spec, const Bipartition& bip,
                                      const HOCMBundle& b) {
  require_local(spec, bip);
  int pairs_a = 0, pairs_b = 0;
  bool multimode_a = true, multimode_b = true;
  for (std::size_t i = 0; i < spec.elements.size(); i += 2) {
    const auto& e = spec.elements[i];
    const bool multimode = e.support().size() >= 2;
    if (element_side(e, bip) == Side::A) {
      ++pairs_a;
      multimode_a = multimode_a && multimode;
    } else {
      ++pairs_b;
      multimode_b = multimode_b && multimode;
    }
  }
  if (pairs_a == 1 && pairs_b == 1 && multimode_a && multimode_b)
    return SufficiencyClass::IffMultimodePairs;
  if (pairs_a == 1 || pairs_b == 1) return SufficiencyClass::Iff1xN;

  const auto used = spec.modes();
  int swaps = 0;
  for (const auto* side : {&bip.side_a, &bip.side_b}) {
    std::vector<ModeId> ms;
    for (const auto& m : *side)
      if (used.count(m)) ms.push_back(m);
    for (std::size_t i = 0; i < ms.size(); ++i) {
      for (std::size_t j = i + 1; j < ms.size(); ++j) {
        auto perm = swap_permutation(spec, ms[i], ms[j]);
        if (!perm) return SufficiencyClass::NecessaryOnly;
        const int d = static_cast<int>(spec.dim());
        for (int r = 0; r < d; ++r) {
          for (int c = 0; c < d; ++c) {
            const int pr = (*perm)[r], pc = (*perm)[c];
            if (std::abs(b.V(pr, pc) - b.V(r, c)) > 1e-8 ||
                std::abs(b.Omega(pr, pc) - b.Omega(r, c)) > 1e-8)
              return SufficiencyClass::NecessaryOnly;
          }
        }
        ++swaps;
      }
    }
  }
  return swaps > 0 ? SufficiencyClass::IffBisymmetric : SufficiencyClass::NecessaryOnly;
}

PPTVerdict ppt_min_eig(const HOCMBundle& b, const Bipartition& bip) {
  const Eigen::VectorXd t = mirror_signs(b.spec, bip);
  PPTVerdict out;
  out.order = b.spec.order();
  out.bipartition = bip.label;

  const Eigen::MatrixXd vt = t.asDiagonal() * b.V * t.asDiagonal();
  const Eigen::MatrixXcd m = hermitian_form(vt, b.Omega);
  out.hermiticity = hermiticity_defect(m);
  const HermitianEigen eig = hermitian_eigen(m);
  out.nu_min = eig.values.front();
  out.residual = (m * eig.vectors.col(0) - out.nu_min * eig.vectors.col(0)).norm();
  const double scale = std::max(1.0, std::max(std::abs(eig.values.front()), std::abs(eig.values.back())));
  out.tol = kEntanglementTolerance * scale;

  // block form: Omega_A on side A rows, -Omega_B on side B rows, no cross terms
  const int d = static_cast<int>(b.spec.dim());
  Eigen::MatrixXd omega_block = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const Side si = element_side(b.spec.elements[i], bip);
      const Side sj = element_side(b.spec.elements[j], bip);
      if (si != sj) continue;
      omega_block(i, j) = si == Side::A ? b.Omega(i, j) : -b.Omega(i, j);
    }
  }
  out.nu_block = hermitian_eigen(hermitian_form(b.V, omega_block)).values.front();
  out.forms_agree = (out.nu_min < -out.tol) == (out.nu_block < -out.tol);

  out.sufficiency = classify_sufficiency(b.spec, bip, b);
  if (out.nu_min < -out.tol) out.verdict = Verdict::Entangled;
  else if (out.sufficiency != SufficiencyClass::NecessaryOnly) out.verdict = Verdict::Separable;
  else out.verdict = Verdict::Undecided;
  return out;
}

SchurBound schur_bound(const HOCMBundle& b, const Bipartition& bip) {
  require_local(b.spec, bip);
  std::vector<int> ia, ib;
  for (int i = 0; i < static_cast<int>(b.spec.dim()); ++i)
    (element_side(b.spec.elements[i], bip) == Side::A ? ia : ib).push_back(i);
  auto block = [](const Eigen::MatrixXd& m, const std::vector<int>& r, const std::vector<int>& c) {
    Eigen::MatrixXd out(r.size(), c.size());
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t j = 0; j < c.size(); ++j) out(i, j) = m(r[i], c[j]);
    return out;
  };
  const Eigen::MatrixXd A = block(b.V, ia, ia), B = block(b.V, ib, ib), C = block(b.V, ia, ib);
  const Eigen::MatrixXd OA = block(b.Omega, ia, ia), OB = block(b.Omega, ib, ib);

  SchurBound out;
  out.dim_b = static_cast<int>(ib.size());
  const Eigen::MatrixXcd X = B.cast<Complex>() - Complex(0.0, 0.5) * OB.cast<Complex>();
  const HermitianEigen ex = hermitian_eigen(X);
  double top = 0.0;
  for (double v : ex.values) top = std::max(top, std::abs(v));
  const double cut = 1e-12 * std::max(top, 1e-300);
  Eigen::MatrixXcd inv = Eigen::MatrixXcd::Zero(X.rows(), X.cols());
  for (int k = 0; k < out.dim_b; ++k) {
    if (std::abs(ex.values[k]) <= cut) continue;
    ++out.rank_b;
    inv += ex.vectors.col(k) * (1.0 / ex.values[k]) * ex.vectors.col(k).adjoint();
  }
  out.pseudo_inverse = out.rank_b < out.dim_b;
  const Eigen::MatrixXcd Cc = C.cast<Complex>();
  out.S = A.cast<Complex>() - Cc * inv * Cc.transpose() + Complex(0.0, 0.5) * OA.cast<Complex>();
  out.S = 0.5 * (out.S + out.S.adjoint()).eval();
  out.min_eig = hermitian_eigen(out.S).values.front();
  return out;
}

}  // namespace hocm
