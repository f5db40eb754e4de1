// Higher-order covariance matrices and partial-transpose criteria.

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "hocm/fock.hpp"
#include "hocm/network.hpp"
#include "hocm/quadrature.hpp"

namespace hocm {

class CriteriaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Bipartition {
  std::set<ModeId> side_a;
  std::set<ModeId> side_b;
  std::string label;  // e.g. "a1b1|a2b2"
};

/// Label with each side written in the order of `modes`.
std::string bipartition_label(const std::set<ModeId>& side_a, const std::set<ModeId>& side_b,
                              const std::vector<ModeId>& modes);

/// Parses "a1b2|a2b1"; each side is a concatenation of labels from `modes`.
Bipartition parse_bipartition(const std::string& text, const std::vector<ModeId>& modes);

/// All 2^(m-1) - 1 bipartitions: side A by size, then in mode order, with
/// half-size side A restricted to sets that contain the first mode.
std::vector<Bipartition> enumerate_bipartitions(const std::vector<ModeId>& modes);

struct HOCMBundle {
  Eigen::MatrixXd V;
  Eigen::MatrixXd Omega;
  std::vector<double> means;
  QuadratureVectorSpec spec;
  double xi = 0.0;
  std::string scenario;
  double max_imag = 0.0;  // largest dropped imaginary part, relative
};

using MomentFn = std::function<Complex(const NormalPoly&)>;

/// Covariance matrix V_ij = <R_i R_j + R_j R_i>/2 - <R_i><R_j> and
/// Omega_ij = -i <[R_i, R_j]>, with moments taken over the vector's own modes.
HOCMBundle build_hocm(const QuadratureVectorSpec& spec, const MomentFn& moment, double xi = 0.0,
                      const std::string& scenario = {});

/// The polynomials behind build_hocm pushed through a network once, so that
/// repeated evaluation over many states only costs moment lookups.
class HocmPlan {
 public:
  HocmPlan(QuadratureVectorSpec spec, const CompiledNetwork& net);

  const QuadratureVectorSpec& spec() const { return spec_; }
  HOCMBundle evaluate(const MomentEvaluator& eval, double xi = 0.0,
                      const std::string& scenario = {}) const;

 private:
  QuadratureVectorSpec spec_;
  std::vector<NormalPoly> mean_;
  std::vector<std::vector<NormalPoly>> sym_;   // upper triangle used
  std::vector<std::vector<NormalPoly>> comm_;  // upper triangle used
};

/// Minimum eigenvalue of V + (i/2) Omega.
double uncertainty_check(const HOCMBundle& b);

/// Elements whose support straddles the bipartition, as text; empty when local.
std::vector<std::string> validate_locality(const QuadratureVectorSpec& spec, const Bipartition& bip);

/// Diagonal of the mirror matrix: -1 on P rows of elements supported in side B.
Eigen::VectorXd mirror_signs(const QuadratureVectorSpec& spec, const Bipartition& bip);

/// V -> T V T; Omega unchanged.
HOCMBundle partial_transpose(const HOCMBundle& b, const Bipartition& bip);

enum class SufficiencyClass { Iff1xN, IffMultimodePairs, IffBisymmetric, NecessaryOnly };
enum class Verdict { Entangled, Separable, Undecided };

std::string to_string(SufficiencyClass c);
std::string to_string(Verdict v);

SufficiencyClass classify_sufficiency(const QuadratureVectorSpec& spec, const Bipartition& bip,
                                      const HOCMBundle& b);

inline constexpr double kEntanglementTolerance = 1e-8;

struct PPTVerdict {
  double nu_min = 0.0;    // min eig of T V T + (i/2) Omega
  double nu_block = 0.0;  // min eig of V + (i/2) diag(Omega_A, -Omega_B)
  bool forms_agree = true;
  int order = 0;
  std::string bipartition;
  SufficiencyClass sufficiency = SufficiencyClass::NecessaryOnly;
  Verdict verdict = Verdict::Undecided;
  double tol = kEntanglementTolerance;  // absolute threshold after norm scaling
  double residual = 0.0;
  double hermiticity = 0.0;
  bool entangled() const { return verdict == Verdict::Entangled; }
};

PPTVerdict ppt_min_eig(const HOCMBundle& b, const Bipartition& bip);

struct SchurBound {
  Eigen::MatrixXcd S;
  double min_eig = 0.0;
  int rank_b = 0;
  int dim_b = 0;
  bool pseudo_inverse = false;
};

/// S = A - C (B - (i/2) Omega_B)^{-1} C^T + (i/2) Omega_A.
SchurBound schur_bound(const HOCMBundle& b, const Bipartition& bip);

}  // namespace hocm
