// Truncated-matrix representations used as independent oracles in tests.

#pragma once

#include <Eigen/Sparse>
#include <random>
#include <vector>

#include "hocm/algebra.hpp"

namespace oracle {

using hocm::Complex;
using SpMat = Eigen::SparseMatrix<Complex>;

/// Ladder matrices on the product space of `modes`, each truncated at n photons.
class Truncated {
 public:
  Truncated(std::vector<hocm::ModeId> modes, int n) : modes_(std::move(modes)), n_(n) {
    dim_ = 1;
    for (std::size_t i = 0; i < modes_.size(); ++i) dim_ *= n_ + 1;
  }

  int dim() const { return dim_; }
  int cutoff() const { return n_; }

  int occupation(int index, std::size_t mode) const {
    for (std::size_t k = modes_.size() - 1; k > mode; --k) index /= n_ + 1;
    return index % (n_ + 1);
  }

  SpMat identity() const {
    SpMat m(dim_, dim_);
    m.setIdentity();
    return m;
  }

  SpMat annihilator(const hocm::ModeId& mode) const {
    const std::size_t k = position(mode);
    int stride = 1;
    for (std::size_t j = k + 1; j < modes_.size(); ++j) stride *= n_ + 1;
    std::vector<Eigen::Triplet<Complex>> t;
    for (int i = 0; i < dim_; ++i) {
      const int occ = occupation(i, k);
      if (occ > 0) t.emplace_back(i - stride, i, std::sqrt(double(occ)));
    }
    SpMat m(dim_, dim_);
    m.setFromTriplets(t.begin(), t.end());
    return m;
  }

  SpMat creator(const hocm::ModeId& mode) const { return SpMat(annihilator(mode).adjoint()); }

  SpMat word(const hocm::LadderWord& w) const {
    SpMat m = identity();
    for (const auto& l : w.letters)
      m = m * (l.kind == hocm::LetterKind::Create ? creator(l.mode) : annihilator(l.mode));
    return m * w.coeff;
  }

  SpMat words(const std::vector<hocm::LadderWord>& ws) const {
    SpMat m(dim_, dim_);
    for (const auto& w : ws) m += word(w);
    return m;
  }

  SpMat poly(const hocm::NormalPoly& p) const {
    SpMat m(dim_, dim_);
    for (const auto& [key, c] : p.terms()) {
      SpMat t = identity();
      for (const auto& mp : key) {
        for (int i = 0; i < mp.cre; ++i) t = t * creator(mp.mode);
        for (int i = 0; i < mp.ann; ++i) t = t * annihilator(mp.mode);
      }
      m += t * c;
    }
    return m;
  }

  /// Max |A - B| over entries whose row and column occupations all stay at or
  /// below cutoff - margin.
  double interior_distance(const SpMat& a, const SpMat& b, int margin) const {
    const SpMat d = a - b;
    double worst = 0.0;
    for (int k = 0; k < d.outerSize(); ++k) {
      for (SpMat::InnerIterator it(d, k); it; ++it) {
        if (inside(int(it.row()), margin) && inside(int(it.col()), margin))
          worst = std::max(worst, std::abs(it.value()));
      }
    }
    return worst;
  }

 private:
  std::size_t position(const hocm::ModeId& mode) const {
    for (std::size_t i = 0; i < modes_.size(); ++i)
      if (modes_[i] == mode) return i;
    throw std::runtime_error("oracle: unknown mode " + mode);
  }

  bool inside(int index, int margin) const {
    for (std::size_t k = 0; k < modes_.size(); ++k)
      if (occupation(index, k) > n_ - margin) return false;
    return true;
  }

  std::vector<hocm::ModeId> modes_;
  int n_;
  int dim_;
};

/// Random word with `letters` letters over `modes`, coefficient in the unit box.
inline hocm::LadderWord random_word(std::mt19937_64& rng, const std::vector<hocm::ModeId>& modes,
                                    int letters) {
  std::uniform_int_distribution<std::size_t> pick(0, modes.size() - 1);
  std::uniform_int_distribution<int> kind(0, 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  hocm::LadderWord w;
  w.coeff = Complex(u(rng), u(rng));
  for (int i = 0; i < letters; ++i)
    w.letters.push_back({modes[pick(rng)], kind(rng) ? hocm::LetterKind::Create : hocm::LetterKind::Annihilate});
  return w;
}

}  // namespace oracle
