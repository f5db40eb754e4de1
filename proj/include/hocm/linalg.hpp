// Small dense Hermitian eigenproblems.

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace hocm {

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HermitianEigen {
  std::vector<double> values;  // ascending
  Eigen::MatrixXcd vectors;    // column k belongs to values[k]
  double residual = 0.0;       // max_k |M v_k - lambda_k v_k|
  int sweeps = 0;
};

/// Cyclic Jacobi on the real symmetric embedding [[Re M, -Im M], [Im M, Re M]],
/// whose spectrum is that of M with every eigenvalue doubled.
HermitianEigen hermitian_eigen(const Eigen::MatrixXcd& m);

/// max |M - M^dag| entry.
double hermiticity_defect(const Eigen::MatrixXcd& m);

}  // namespace hocm
