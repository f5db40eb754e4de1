#include "hocm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hocm {

namespace {

// Classic cyclic Jacobi rotation sweep on a real symmetric matrix; returns sweeps used.
int jacobi(Eigen::MatrixXd& a, Eigen::MatrixXd& v) {
  const int n = static_cast<int>(a.rows());
  v.setIdentity(n, n);
  const double scale = std::max(a.norm(), 1e-300);
  for (int sweep = 1; sweep <= 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-16 * scale) return sweep - 1;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  throw LinalgError("Jacobi eigensolver did not converge in 100 sweeps");
}

}  // namespace

double hermiticity_defect(const Eigen::MatrixXcd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

HermitianEigen hermitian_eigen(const Eigen::MatrixXcd& m) {
  const int d = static_cast<int>(m.rows());
  if (m.cols() != d) throw LinalgError("hermitian_eigen: matrix is not square");
  HermitianEigen out;
  if (d == 0) return out;
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::MatrixXd big(2 * d, 2 * d);
  big << h.real(), -h.imag(), h.imag(), h.real();
  Eigen::MatrixXd vec;
  out.sweeps = jacobi(big, vec);

  std::vector<int> order(2 * d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return big(i, i) < big(j, j); });

  // Each eigenvalue of h appears twice, with vectors (x, y) and (-y, x) spanning
  // the same complex direction x + i y. Within a cluster of 2k (nearly) equal
  // values, pivoted Gram-Schmidt extracts k orthonormal complex vectors.
  out.vectors.resize(d, d);
  const double tol = 1e-9 * std::max(1.0, h.norm());
  int kept = 0;
  for (int begin = 0; begin < 2 * d;) {
    int end = begin + 1;
    while (end < 2 * d && big(order[end], order[end]) - big(order[end - 1], order[end - 1]) <= tol) ++end;
    std::vector<Eigen::VectorXcd> cand;
    for (int idx = begin; idx < end; ++idx) {
      const int c = order[idx];
      Eigen::VectorXcd z(d);
      for (int i = 0; i < d; ++i) z[i] = std::complex<double>(vec(i, c), vec(i + d, c));
      cand.push_back(z);
    }
    const int want = (end - begin) / 2;
    if ((end - begin) % 2) throw LinalgError("hermitian_eigen: odd eigenvalue cluster");
    for (int w = 0; w < want; ++w) {
      int best = -1;
      double best_norm = 0.0;
      for (int i = 0; i < static_cast<int>(cand.size()); ++i) {
        if (cand[i].norm() > best_norm) {
          best_norm = cand[i].norm();
          best = i;
        }
      }
      if (best < 0 || best_norm < 1e-6) throw LinalgError("hermitian_eigen: degenerate basis");
      const Eigen::VectorXcd z = cand[best] / best_norm;
      out.vectors.col(kept) = z;
      out.values.push_back(big(order[begin + 2 * w], order[begin + 2 * w]));
      ++kept;
      for (auto& c : cand) c -= z * z.dot(c);
    }
    begin = end;
  }
  for (int k = 0; k < d; ++k) {
    const double r = (h * out.vectors.col(k) - out.values[k] * out.vectors.col(k)).norm();
    out.residual = std::max(out.residual, r);
  }
  return out;
}

}  // namespace hocm
