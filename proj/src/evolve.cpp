// Krylov propagation of exp(-i H tau) on the invariant subspace reachable from
// the support of the initial state. H = i g (A - A^dag), so -i H = g (A - A^dag)
// is a real antisymmetric generator K.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "hocm/fock.hpp"

namespace hocm {

namespace {

double raise_factor(int n, int r) {
  double f = 1.0;
  for (int i = 1; i <= r; ++i) f *= std::sqrt(static_cast<double>(n + i));
  return f;
}

struct Generator {
  std::vector<std::size_t> global;  // local -> global basis index
  std::vector<std::size_t> row_start;
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  std::size_t dim() const { return global.size(); }

  // y = K x
  void apply(const std::vector<Complex>& x, std::vector<Complex>& y) const {
    for (std::size_t r = 0; r < global.size(); ++r) {
      Complex s{};
      for (std::size_t e = row_start[r]; e < row_start[r + 1]; ++e) s += val[e] * x[col[e]];
      y[r] = s;
    }
  }
};

Generator build_generator(const HamiltonianSpec& spec, const StateVector& psi) {
  const auto& cut = psi.cutoffs;
  const int ia = cut.find(spec.mode_a), ib = cut.find(spec.mode_b);
  const int ip = spec.pump == PumpKind::Quantum ? cut.find(spec.mode_p) : -1;
  if (ia < 0 || ib < 0 || (spec.pump == PumpKind::Quantum && ip < 0))
    throw FockError("evolve: state lacks a Hamiltonian mode");
  const auto strides = cut.strides();
  const int k = spec.k, l = spec.l;
  const double g = spec.coupling * (spec.pump == PumpKind::Classical ? spec.alpha_p : 1.0);
  const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(k * strides[ia] + l * strides[ib]) -
                               (ip >= 0 ? static_cast<std::ptrdiff_t>(strides[ip]) : 0);

  // Edges of K out of basis state i: (target, value) for A and -A^dag.
  auto edges = [&](std::size_t i, std::vector<std::pair<std::size_t, double>>& out) {
    out.clear();
    const int na = static_cast<int>((i / strides[ia]) % (cut.max[ia] + 1));
    const int nb = static_cast<int>((i / strides[ib]) % (cut.max[ib] + 1));
    const int np = ip >= 0 ? static_cast<int>((i / strides[ip]) % (cut.max[ip] + 1)) : 0;
    if (na + k <= cut.max[ia] && nb + l <= cut.max[ib] && (ip < 0 || np >= 1)) {
      double f = raise_factor(na, k) * raise_factor(nb, l) * (ip >= 0 ? std::sqrt(np) : 1.0);
      out.emplace_back(i + shift, g * f);
    }
    if (na >= k && nb >= l && (ip < 0 || np + 1 <= cut.max[ip])) {
      double f = raise_factor(na - k, k) * raise_factor(nb - l, l) *
                 (ip >= 0 ? std::sqrt(np + 1.0) : 1.0);
      out.emplace_back(i - shift, -g * f);
    }
  };

  Generator gen;
  std::unordered_map<std::size_t, std::uint32_t> local;
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < psi.amp.size(); ++i) {
    if (psi.amp[i] == Complex{}) continue;
    local.emplace(i, static_cast<std::uint32_t>(gen.global.size()));
    gen.global.push_back(i);
    queue.push_back(i);
  }
  std::vector<std::pair<std::size_t, double>> e;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    edges(i, e);
    for (const auto& [j, v] : e) {
      if (local.emplace(j, static_cast<std::uint32_t>(gen.global.size())).second) {
        gen.global.push_back(j);
        queue.push_back(j);
      }
    }
  }
  // K_{ji} = <j|K|i>: row j collects the edges pointing into j.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(gen.global.size());
  for (std::size_t c = 0; c < gen.global.size(); ++c) {
    edges(gen.global[c], e);
    for (const auto& [j, v] : e) rows[local.at(j)].emplace_back(static_cast<std::uint32_t>(c), v);
  }
  gen.row_start.push_back(0);
  for (auto& r : rows) {
    std::sort(r.begin(), r.end());
    for (const auto& [c, v] : r) {
      gen.col.push_back(c);
      gen.val.push_back(v);
    }
    gen.row_start.push_back(gen.col.size());
  }
  return gen;
}

double norm2(const std::vector<Complex>& v) {
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c);
  return std::sqrt(s);
}

Complex dot(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

EvolutionResult evolve(const StateVector& psi, const HamiltonianSpec& spec, double tau,
                       const EvolutionParams& params) {
  spec.validate();
  if (tau < 0) throw FockError("evolve: tau must be non-negative");
  EvolutionResult res;
  res.state = psi;
  const double norm0 = psi.norm();
  if (tau == 0.0 || norm0 == 0.0) {
    res.leakage = psi.max_boundary_probability();
    res.leakage_flag = res.leakage > params.leakage_threshold;
    return res;
  }

  const Generator gen = build_generator(spec, psi);
  const std::size_t n = gen.dim();
  res.subspace_dim = n;
  std::vector<Complex> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = psi.amp[gen.global[i]];

  const int mmax = static_cast<int>(std::min<std::size_t>(params.krylov_dim, n));
  std::vector<std::vector<Complex>> basis(mmax + 1, std::vector<Complex>(n));
  std::vector<Complex> w(n);
  double t = 0.0;
  double dt = tau;
  while (t < tau) {
    if (res.steps >= params.max_steps)
      throw FockError("evolve: step limit reached at tau = " + std::to_string(t) + " of " +
                      std::to_string(tau) + " (rejected " + std::to_string(res.rejected) + ")");
    // Lanczos on the Hermitian H = i K with full reorthogonalization.
    const double beta0 = norm2(v);
    for (std::size_t i = 0; i < n; ++i) basis[0][i] = v[i] / beta0;
    std::vector<double> alpha, beta;
    int m = 0;
    double beta_last = 0.0;
    for (int j = 0; j < mmax; ++j) {
      gen.apply(basis[j], w);
      for (auto& x : w) x *= Complex(0.0, 1.0);
      alpha.push_back(dot(basis[j], w).real());
      for (int pass = 0; pass < 2; ++pass) {
        for (int q = 0; q <= j; ++q) {
          const Complex h = dot(basis[q], w);
          for (std::size_t i = 0; i < n; ++i) w[i] -= h * basis[q][i];
        }
      }
      const double b = norm2(w);
      m = j + 1;
      beta_last = b;
      if (b < 1e-13 * std::max(1.0, std::abs(alpha.back()))) {
        beta_last = 0.0;  // invariant subspace found, the step is exact
        break;
      }
      if (j + 1 < mmax) {
        beta.push_back(b);
        for (std::size_t i = 0; i < n; ++i) basis[j + 1][i] = w[i] / b;
      }
    }
    Eigen::VectorXd diag(m), sub(std::max(m - 1, 0));
    for (int i = 0; i < m; ++i) diag[i] = alpha[i];
    for (int i = 0; i + 1 < m; ++i) sub[i] = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::MatrixXd& S = es.eigenvectors();
    const Eigen::VectorXd& lam = es.eigenvalues();

    dt = std::min(dt, tau - t);
    Eigen::VectorXcd y(m);
    while (true) {
      // y = exp(-i T dt) e1
      Eigen::VectorXcd c(m);
      for (int i = 0; i < m; ++i) c[i] = std::exp(Complex(0.0, -lam[i] * dt)) * S(0, i);
      y = S.cast<Complex>() * c;
      const double err = beta0 * beta_last * std::abs(y[m - 1]);
      if (err <= params.tolerance) break;
      if (dt <= 1e-12 * tau)
        throw FockError("evolve: step size collapsed at tau = " + std::to_string(t) +
                        " (error estimate " + std::to_string(err) + ", krylov dim " +
                        std::to_string(m) + ")");
      ++res.rejected;
      dt *= std::max(0.2, 0.9 * std::pow(params.tolerance / err, 1.0 / m));
    }
    std::fill(v.begin(), v.end(), Complex{});
    for (int q = 0; q < m; ++q)
      for (std::size_t i = 0; i < n; ++i) v[i] += beta0 * y[q] * basis[q][i];
    t += dt;
    ++res.steps;
    if (tau - t < 1e-15 * tau) t = tau;
    dt *= 1.5;
  }

  std::fill(res.state.amp.begin(), res.state.amp.end(), Complex{});
  for (std::size_t i = 0; i < n; ++i) res.state.amp[gen.global[i]] = v[i];
  res.norm_drift = std::abs(res.state.norm() - norm0);
  res.leakage = res.state.max_boundary_probability();
  res.leakage_flag = res.leakage > params.leakage_threshold;
  return res;
}

}  // namespace hocm
