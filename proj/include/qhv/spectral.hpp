#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qhv/types.hpp"

namespace qhv {

// One clustered spectral point: eigenvalue representative (cluster mean)
// and the orthogonal projector onto the associated eigenspace.
struct SpectralLine {
  double value = 0.0;
  Matrix projector;
};

// A Hermitian matrix together with its clustered spectral decomposition.
// Construction validates hermiticity, projector idempotency, mutual
// orthogonality, completeness, reconstruction, and strictly increasing
// eigenvalues; instances are immutable afterwards.
class HermitianObservable {
 public:
  HermitianObservable(std::string label, Matrix matrix,
                      std::vector<SpectralLine> spectrum,
                      const Tolerances& tol = {});

  const std::string& label() const { return label_; }
  const Matrix& matrix() const { return matrix_; }
  const std::vector<SpectralLine>& spectrum() const { return spectrum_; }
  Eigen::Index dim() const { return matrix_.rows(); }
  std::size_t spectrum_size() const { return spectrum_.size(); }
  double eigenvalue(std::size_t k) const { return spectrum_[k].value; }
  const Matrix& projector(std::size_t k) const { return spectrum_[k].projector; }

  // P_X(B) for B given as spectral-point indices.
  Matrix projector_of(std::span<const std::size_t> points) const;

  // Index of the spectral point with exactly this canonical value, if any.
  bool find_value(double value, std::size_t* index) const;

 private:
  std::string label_;
  Matrix matrix_;
  std::vector<SpectralLine> spectrum_;
};

// A positive semidefinite trace-one matrix. Use validate_state to build.
class DensityState {
 public:
  DensityState(std::string label, Matrix matrix)
      : label_(std::move(label)), matrix_(std::move(matrix)) {}

  const std::string& label() const { return label_; }
  const Matrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

 private:
  std::string label_;
  Matrix matrix_;
};

// A real function given as a finite table over spectral points.
// Lookup compares canonical eigenvalues exactly.
class SpectrumFunction {
 public:
  SpectrumFunction() = default;
  explicit SpectrumFunction(std::vector<std::pair<double, double>> table);

  // Tabulates fn over the spectrum of source.
  template <typename Fn>
  static SpectrumFunction tabulate(const HermitianObservable& source, Fn&& fn) {
    std::vector<std::pair<double, double>> table;
    table.reserve(source.spectrum_size());
    for (const auto& line : source.spectrum()) {
      table.emplace_back(line.value, fn(line.value));
    }
    return SpectrumFunction(std::move(table));
  }

  bool defined_at(double x) const;
  double operator()(double x) const;  // throws ValidationError when undefined
  const std::vector<std::pair<double, double>>& table() const { return table_; }

  // Pointwise composition outer(inner(x)) on inner's domain.
  static SpectrumFunction compose(const SpectrumFunction& outer,
                                  const SpectrumFunction& inner);

 private:
  std::vector<std::pair<double, double>> table_;  // sorted by x, distinct x
};

// Spectral decomposition with relative-gap eigenvalue clustering.
HermitianObservable eigendecompose(const Matrix& matrix,
                                   const Tolerances& tol = {},
                                   std::string label = {});

// Validates positivity and unit trace; eigenvalues in [-tol.check, 0) are
// clamped to zero and the state renormalized.
DensityState validate_state(const Matrix& matrix, const Tolerances& tol = {},
                            std::string label = {});

// True iff every pair of spectral projectors commutes within tol.check.
bool commute_check(const HermitianObservable& x, const HermitianObservable& y,
                   const Tolerances& tol = {});

// phi(X) with equal phi-values merged, so the projector of a merged point
// is exactly the sum of the source projectors it absorbs.
HermitianObservable apply_function(const SpectrumFunction& phi,
                                   const HermitianObservable& x,
                                   const Tolerances& tol = {},
                                   std::string label = {});

// I (x) ... (x) X (x) ... (x) I with X at `site` (0-based) of `dims`.
HermitianObservable tensor_embed(const HermitianObservable& x, std::size_t site,
                                 std::span<const Eigen::Index> dims,
                                 const Tolerances& tol = {});

// tr[rho X]; the imaginary residue is discarded.
double expectation(const DensityState& rho, const HermitianObservable& x);

}  // namespace qhv
