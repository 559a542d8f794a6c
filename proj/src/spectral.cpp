#include "qhv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace qhv {

namespace {

std::string norm_str(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

void require_square(const Matrix& m, const std::string& what) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw ValidationError(what + ": matrix must be square and non-empty, got " +
                          std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()));
  }
}

double herm_residue(const Matrix& m) { return (m - m.adjoint()).norm(); }

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

HermitianObservable::HermitianObservable(std::string label, Matrix matrix,
                                         std::vector<SpectralLine> spectrum,
                                         const Tolerances& tol)
    : label_(std::move(label)),
      matrix_(std::move(matrix)),
      spectrum_(std::move(spectrum)) {
  require_square(matrix_, "observable '" + label_ + "'");
  const double hr = herm_residue(matrix_);
  if (hr > tol.herm) {
    throw ValidationError("observable '" + label_ +
                          "' is not Hermitian: ||A - A*|| = " + norm_str(hr));
  }
  if (spectrum_.empty()) {
    throw ValidationError("observable '" + label_ + "' has empty spectrum");
  }
  const Eigen::Index d = matrix_.rows();
  Matrix sum = Matrix::Zero(d, d);
  Matrix reconstruction = Matrix::Zero(d, d);
  for (std::size_t k = 0; k < spectrum_.size(); ++k) {
    const auto& line = spectrum_[k];
    if (line.projector.rows() != d || line.projector.cols() != d) {
      throw ValidationError("observable '" + label_ +
                            "': projector dimension mismatch");
    }
    if (k > 0 && !(spectrum_[k - 1].value < line.value)) {
      throw ValidationError("observable '" + label_ +
                            "': eigenvalues not strictly increasing");
    }
    const double idem = (line.projector * line.projector - line.projector).norm();
    if (idem > tol.check) {
      throw ValidationError("observable '" + label_ +
                            "': projector not idempotent: ||P^2 - P|| = " +
                            norm_str(idem));
    }
    for (std::size_t j = 0; j < k; ++j) {
      const double ortho = (spectrum_[j].projector * line.projector).norm();
      if (ortho > tol.check) {
        throw ValidationError("observable '" + label_ +
                              "': projectors not orthogonal: ||P_i P_j|| = " +
                              norm_str(ortho));
      }
    }
    sum += line.projector;
    reconstruction += line.value * line.projector;
  }
  const double complete = (sum - Matrix::Identity(d, d)).norm();
  if (complete > tol.check) {
    throw ValidationError("observable '" + label_ +
                          "': projectors do not resolve identity: ||sum P - I|| = " +
                          norm_str(complete));
  }
  const double recon = (reconstruction - matrix_).norm();
  if (recon > tol.check) {
    throw ValidationError("observable '" + label_ +
                          "': spectral reconstruction failed: ||sum xP - A|| = " +
                          norm_str(recon));
  }
}

Matrix HermitianObservable::projector_of(std::span<const std::size_t> points) const {
  Matrix out = Matrix::Zero(dim(), dim());
  for (std::size_t k : points) {
    if (k >= spectrum_.size()) {
      throw ValidationError("observable '" + label_ + "': spectral point index " +
                            std::to_string(k) + " out of range");
    }
    out += spectrum_[k].projector;
  }
  return out;
}

bool HermitianObservable::find_value(double value, std::size_t* index) const {
  for (std::size_t k = 0; k < spectrum_.size(); ++k) {
    if (spectrum_[k].value == value) {
      if (index != nullptr) *index = k;
      return true;
    }
  }
  return false;
}

SpectrumFunction::SpectrumFunction(std::vector<std::pair<double, double>> table)
    : table_(std::move(table)) {
  std::sort(table_.begin(), table_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t k = 1; k < table_.size(); ++k) {
    if (table_[k - 1].first == table_[k].first) {
      throw ValidationError("spectrum function: duplicate table point " +
                            std::to_string(table_[k].first));
    }
  }
}

bool SpectrumFunction::defined_at(double x) const {
  for (const auto& [key, _] : table_) {
    if (key == x) return true;
  }
  return false;
}

double SpectrumFunction::operator()(double x) const {
  for (const auto& [key, value] : table_) {
    if (key == x) return value;
  }
  throw ValidationError("spectrum function undefined at " + std::to_string(x));
}

SpectrumFunction SpectrumFunction::compose(const SpectrumFunction& outer,
                                           const SpectrumFunction& inner) {
  std::vector<std::pair<double, double>> table;
  table.reserve(inner.table().size());
  for (const auto& [x, y] : inner.table()) {
    table.emplace_back(x, outer(y));
  }
  return SpectrumFunction(std::move(table));
}

HermitianObservable eigendecompose(const Matrix& matrix, const Tolerances& tol,
                                   std::string label) {
  require_square(matrix, "eigendecompose");
  const double hr = herm_residue(matrix);
  if (hr > tol.herm) {
    throw ValidationError("eigendecompose('" + label +
                          "'): matrix not Hermitian: ||A - A*|| = " + norm_str(hr));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigendecompose('" + label + "'): solver did not converge");
  }
  const Eigen::VectorXd values = solver.eigenvalues();
  const Matrix vectors = solver.eigenvectors();
  const double gap = tol.eig * std::max(1.0, matrix.norm());

  std::vector<SpectralLine> spectrum;
  Eigen::Index start = 0;
  while (start < values.size()) {
    Eigen::Index stop = start + 1;
    while (stop < values.size() && values(stop) - values(stop - 1) <= gap) {
      ++stop;
    }
    const Eigen::Index width = stop - start;
    SpectralLine line;
    line.value = values.segment(start, width).mean();
    const Matrix block = vectors.middleCols(start, width);
    line.projector = block * block.adjoint();
    spectrum.push_back(std::move(line));
    start = stop;
  }
  return HermitianObservable(std::move(label), matrix, std::move(spectrum), tol);
}

DensityState validate_state(const Matrix& matrix, const Tolerances& tol,
                            std::string label) {
  require_square(matrix, "state '" + label + "'");
  const double hr = herm_residue(matrix);
  if (hr > tol.herm) {
    throw ValidationError("state '" + label +
                          "' is not Hermitian: ||A - A*|| = " + norm_str(hr));
  }
  const double trace = matrix.trace().real();
  if (std::abs(trace - 1.0) > tol.check) {
    throw ValidationError("state '" + label + "' has trace " +
                          std::to_string(trace) + ", expected 1");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("state '" + label + "': eigensolver did not converge");
  }
  const Eigen::VectorXd values = solver.eigenvalues();
  bool clamped = false;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (values(k) < -tol.check) {
      throw ValidationError("state '" + label + "' has negative eigenvalue " +
                            std::to_string(values(k)));
    }
    if (values(k) < 0.0) clamped = true;
  }
  if (!clamped) {
    return DensityState(std::move(label), matrix);
  }
  Matrix repaired = Matrix::Zero(matrix.rows(), matrix.cols());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    const double v = std::max(values(k), 0.0);
    if (v > 0.0) {
      repaired += v * solver.eigenvectors().col(k) *
                  solver.eigenvectors().col(k).adjoint();
    }
  }
  repaired /= repaired.trace().real();
  return DensityState(std::move(label), std::move(repaired));
}

bool commute_check(const HermitianObservable& x, const HermitianObservable& y,
                   const Tolerances& tol) {
  if (x.dim() != y.dim()) {
    throw ValidationError("commute_check: dimension mismatch between '" +
                          x.label() + "' (" + std::to_string(x.dim()) + ") and '" +
                          y.label() + "' (" + std::to_string(y.dim()) + ")");
  }
  for (const auto& a : x.spectrum()) {
    for (const auto& b : y.spectrum()) {
      if ((a.projector * b.projector - b.projector * a.projector).norm() >
          tol.check) {
        return false;
      }
    }
  }
  return true;
}

HermitianObservable apply_function(const SpectrumFunction& phi,
                                   const HermitianObservable& x,
                                   const Tolerances& tol, std::string label) {
  // Group source points by exact function value; merged points keep the
  // exact projector sums so preimage identities hold at projector level.
  std::map<double, Matrix> grouped;
  for (const auto& line : x.spectrum()) {
    const double y = phi(line.value);
    auto [it, fresh] = grouped.try_emplace(y, line.projector);
    if (!fresh) it->second += line.projector;
  }
  std::vector<SpectralLine> spectrum;
  Matrix result = Matrix::Zero(x.dim(), x.dim());
  for (auto& [value, projector] : grouped) {
    result += value * projector;
    spectrum.push_back(SpectralLine{value, std::move(projector)});
  }
  if (label.empty()) label = "f(" + x.label() + ")";
  return HermitianObservable(std::move(label), std::move(result),
                             std::move(spectrum), tol);
}

HermitianObservable tensor_embed(const HermitianObservable& x, std::size_t site,
                                 std::span<const Eigen::Index> dims,
                                 const Tolerances& tol) {
  if (site >= dims.size()) {
    throw ValidationError("tensor_embed: site " + std::to_string(site) +
                          " out of range for " + std::to_string(dims.size()) +
                          " sites");
  }
  if (dims[site] != x.dim()) {
    throw ValidationError("tensor_embed: observable '" + x.label() + "' has dim " +
                          std::to_string(x.dim()) + " but site " +
                          std::to_string(site) + " has dim " +
                          std::to_string(dims[site]));
  }
  Eigen::Index left = 1, right = 1;
  for (std::size_t s = 0; s < dims.size(); ++s) {
    if (dims[s] < 1) throw ValidationError("tensor_embed: invalid local dimension");
    if (s < site) left *= dims[s];
    if (s > site) right *= dims[s];
  }
  const Matrix il = Matrix::Identity(left, left);
  const Matrix ir = Matrix::Identity(right, right);
  auto lift = [&](const Matrix& m) { return kron(kron(il, m), ir); };

  std::vector<SpectralLine> spectrum;
  spectrum.reserve(x.spectrum_size());
  for (const auto& line : x.spectrum()) {
    spectrum.push_back(SpectralLine{line.value, lift(line.projector)});
  }
  return HermitianObservable(x.label() + "@" + std::to_string(site),
                             lift(x.matrix()), std::move(spectrum), tol);
}

double expectation(const DensityState& rho, const HermitianObservable& x) {
  if (rho.dim() != x.dim()) {
    throw ValidationError("expectation: state '" + rho.label() +
                          "' and observable '" + x.label() +
                          "' have different dimensions");
  }
  return (rho.matrix() * x.matrix()).trace().real();
}

}  // namespace qhv
