// Truncated multimode Fock space: states, the cubic down-conversion Hamiltonian,
// time evolution and moment evaluation.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "hocm/algebra.hpp"

namespace hocm {

class FockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered modes with per-mode maximum photon number. Basis index is row-major
/// in mode order, the last mode varying fastest.
struct FockCutoffs {
  std::vector<ModeId> modes;
  std::vector<int> max;

  FockCutoffs() = default;
  FockCutoffs(std::vector<ModeId> m, std::vector<int> n);

  std::size_t size() const { return modes.size(); }
  std::size_t dim() const;
  /// Position of `mode` in `modes`, or -1.
  int find(const ModeId& mode) const;
  int cutoff(const ModeId& mode) const;
  std::vector<std::size_t> strides() const;
  std::size_t index(const std::vector<int>& occupation) const;
  std::vector<int> occupation(std::size_t index) const;

  bool operator==(const FockCutoffs&) const = default;
};

struct StateVector {
  FockCutoffs cutoffs;
  std::vector<Complex> amp;

  double norm() const;
  Complex inner(const StateVector& other) const;
  /// Probability on the layer n_mode = N_mode.
  double boundary_probability(const ModeId& mode) const;
  double max_boundary_probability() const;
  /// Same amplitudes embedded in larger (or equal) cutoffs, with optional extra vacuum modes appended.
  StateVector embed(const FockCutoffs& target) const;
};

enum class PumpKind { Quantum, Classical };

struct HamiltonianSpec {
  int k = 1;
  int l = 2;
  double coupling = 1.0;
  PumpKind pump = PumpKind::Quantum;
  double alpha_p = 5.0;
  ModeId mode_a = "a";
  ModeId mode_b = "b";
  ModeId mode_p = "p";

  void validate() const;
  /// Native modes in basis order: (a, b, p) or (a, b) for a classical pump.
  std::vector<ModeId> modes() const;
  double tau(double xi) const { return alpha_p > 0 ? xi / alpha_p : 0.0; }
};

struct EvolutionParams {
  double tolerance = 1e-10;  // local error per step
  int krylov_dim = 30;
  int max_steps = 100000;
  double leakage_threshold = 1e-8;
};

struct EvolutionResult {
  StateVector state;
  double norm_drift = 0.0;
  double leakage = 0.0;
  bool leakage_flag = false;
  int steps = 0;
  int rejected = 0;
  std::size_t subspace_dim = 0;
};

/// Smallest pump cutoff whose truncated coherent state keeps norm >= 1 - deficit.
int required_pump_cutoff(double alpha_p, double deficit = 1e-10);

/// With `strict` a pump cutoff below required_pump_cutoff() is an error; without
/// it the truncated coherent state is renormalized anyway (reduced-cutoff checks).
StateVector initial_state(const FockCutoffs& cutoffs, const HamiltonianSpec& spec,
                          bool strict = true);

/// Cutoffs over spec.modes() with the given per-mode maxima.
FockCutoffs native_cutoffs(const HamiltonianSpec& spec, int n_a, int n_b, int n_p);

/// H psi for H = i(a^dag^k b^dag^l p - h.c.) (times coupling), or the classical-pump form.
StateVector apply_hamiltonian(const HamiltonianSpec& spec, const StateVector& psi);

/// psi(tau) = exp(-i H tau) psi, Krylov short-iterate propagation on the subspace
/// reachable from the support of psi. No renormalization.
EvolutionResult evolve(const StateVector& psi, const HamiltonianSpec& spec, double tau,
                       const EvolutionParams& params = {});

/// Beam-splitter unitary on modes (x, y). `m` is the Heisenberg matrix:
/// x_out = m[0][0] x + m[0][1] y, y_out = m[1][0] x + m[1][1] y.
using BsMatrix = std::array<std::array<Complex, 2>, 2>;
StateVector apply_bs_unitary(const StateVector& psi, const ModeId& x, const ModeId& y,
                             const BsMatrix& m);

/// Expectation values of normal-ordered polynomials in a fixed state. Monomial
/// values are cached; safe to share between threads.
class MomentEvaluator {
 public:
  explicit MomentEvaluator(std::shared_ptr<const StateVector> psi);

  const StateVector& state() const { return *psi_; }
  Complex operator()(const NormalPoly& p) const;
  Complex monomial(const MonomialKey& key) const;
  /// Largest exponent-to-cutoff ratio seen so far (> 0.5 means a thin margin).
  double worst_margin() const;

 private:
  Complex compute(const MonomialKey& key) const;

  std::shared_ptr<const StateVector> psi_;
  std::vector<std::uint32_t> support_;  // indices with nonzero amplitude
  std::vector<std::vector<int>> digits_;  // per mode, occupation of each support entry
  std::vector<std::size_t> strides_;
  mutable std::mutex mu_;
  mutable std::map<MonomialKey, Complex> cache_;
  mutable double worst_margin_ = 0.0;
};

Complex moment(const StateVector& psi, const NormalPoly& p);

/// Binary dump: "FOCK <N_1> ... <N_m>\n" then little-endian f64 (re, im) pairs.
void write_state(std::ostream& out, const StateVector& psi);
StateVector read_state(std::istream& in, const std::vector<ModeId>& modes);

}  // namespace hocm
