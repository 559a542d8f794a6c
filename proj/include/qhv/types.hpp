#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qhv {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Absolute Frobenius-norm tolerances shared by all validation checks.
// `eig` is relative to max(1, ||matrix||_F).
struct Tolerances {
  double check = 1e-10;  // projector algebra, measure identities, scalars
  double herm = 1e-12;   // hermiticity residue
  double eig = 1e-8;     // eigenvalue clustering gap
};

// Invalid or inconsistent input data.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Work refused because it would exceed a configured cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on the caller was violated (e.g. non-commuting inputs
// where a joint measurement is required).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Numerical backend failure (eigensolver non-convergence and the like).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace qhv
