#include "qhv/symmetrized.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace qhv {

namespace {

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t k = 2; k <= n; ++k) f *= static_cast<double>(k);
  return f;
}

bool lex_before_reverse(const std::vector<std::size_t>& perm) {
  // Compare perm with its own reversal; ties impossible for n >= 2.
  std::size_t i = 0, j = perm.size() - 1;
  while (i < perm.size()) {
    if (perm[i] != perm[j]) return perm[i] < perm[j];
    ++i;
    --j;
  }
  return false;
}

}  // namespace

Matrix sym_product(std::span<const Matrix> factors, const Tolerances& tol) {
  const std::size_t n = factors.size();
  if (n == 0) {
    throw ValidationError("sym_product: at least one factor required");
  }
  if (n > kMaxSymFactors) {
    throw ResourceError("sym_product: " + std::to_string(n) +
                        " factors exceed the cap of " +
                        std::to_string(kMaxSymFactors));
  }
  const Eigen::Index d = factors[0].rows();
  for (std::size_t k = 0; k < n; ++k) {
    if (factors[k].rows() != d || factors[k].cols() != d) {
      throw ValidationError("sym_product: factor " + std::to_string(k) +
                            " dimension mismatch");
    }
    if ((factors[k] - factors[k].adjoint()).norm() > tol.herm) {
      throw ValidationError("sym_product: factor " + std::to_string(k) +
                            " is not Hermitian");
    }
  }
  if (n == 1) return factors[0];

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Matrix half = Matrix::Zero(d, d);
  do {
    if (!lex_before_reverse(perm)) continue;
    Matrix prod = factors[perm[0]];
    for (std::size_t k = 1; k < n; ++k) prod *= factors[perm[k]];
    half += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));

  // Reversed orderings are the adjoints of the accumulated ones.
  return (half + half.adjoint()) / factorial(n);
}

Matrix product_measure_on_rectangle(const Catalog& catalog,
                                    const ProjectorSelection& sel) {
  validate_selection(catalog, sel);
  const Eigen::Index d = catalog.dim();
  if (sel.entries.empty()) return Matrix::Identity(d, d);
  std::vector<Matrix> factors;
  factors.reserve(sel.entries.size());
  for (const auto& entry : sel.entries) {
    factors.push_back(
        catalog.observable(entry.observable).projector_of(entry.points));
  }
  return sym_product(factors, catalog.tolerances());
}

Matrix product_measure_on_tuples(
    const Catalog& catalog, std::span<const std::size_t> observables,
    const std::vector<std::vector<std::size_t>>& tuples) {
  CylinderSet cyl{std::vector<std::size_t>(observables.begin(), observables.end()),
                  tuples};
  validate_cylinder(catalog, cyl);
  const Eigen::Index d = catalog.dim();
  if (observables.empty()) {
    if (tuples.empty()) return Matrix::Zero(d, d);
    return Matrix::Identity(d, d);
  }
  Matrix sum = Matrix::Zero(d, d);
  std::vector<Matrix> factors(observables.size());
  for (const auto& tuple : tuples) {
    for (std::size_t k = 0; k < observables.size(); ++k) {
      factors[k] = catalog.observable(observables[k]).projector(tuple[k]);
    }
    sum += sym_product(factors, catalog.tolerances());
  }
  return sum;
}

double joint_probability_commuting(
    const DensityState& rho, std::span<const HermitianObservable> observables,
    const std::vector<std::vector<std::size_t>>& outcome_sets,
    const Tolerances& tol) {
  if (observables.empty()) {
    throw ValidationError("joint_probability_commuting: empty observable list");
  }
  if (outcome_sets.size() != observables.size()) {
    throw ValidationError(
        "joint_probability_commuting: one outcome set per observable required");
  }
  for (const auto& x : observables) {
    if (x.dim() != rho.dim()) {
      throw ValidationError("joint_probability_commuting: observable '" +
                            x.label() + "' does not match the state dimension");
    }
  }
  for (std::size_t i = 0; i < observables.size(); ++i) {
    for (std::size_t j = i + 1; j < observables.size(); ++j) {
      if (!commute_check(observables[i], observables[j], tol)) {
        throw ContractViolation("joint_probability_commuting: '" +
                                observables[i].label() + "' and '" +
                                observables[j].label() + "' do not commute");
      }
    }
  }
  Matrix prod = observables[0].projector_of(outcome_sets[0]);
  for (std::size_t i = 1; i < observables.size(); ++i) {
    prod *= observables[i].projector_of(outcome_sets[i]);
  }
  return (rho.matrix() * prod).trace().real();
}

namespace {

std::vector<std::size_t> random_point_subset(Rng& rng, std::size_t size) {
  std::vector<std::size_t> points;
  for (std::size_t k = 0; k < size; ++k) {
    if (rng.coin()) points.push_back(k);
  }
  return points;
}

}  // namespace

VerificationReport verify_permutation_invariance(const Catalog& catalog,
                                                 std::size_t trials, Rng& rng) {
  if (catalog.size() < 2) {
    throw ValidationError(
        "verify_permutation_invariance: catalog must have at least 2 members");
  }
  VerificationReport report;
  report.name = "permutation-invariance";
  const double tol = catalog.tolerances().check;
  const std::size_t n = catalog.size();
  for (std::size_t t = 0; t < trials; ++t) {
    ProjectorSelection sel;
    for (std::size_t i = 0; i < n; ++i) {
      sel.entries.push_back({i, random_point_subset(rng, catalog.spectrum_size(i))});
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(order[i], order[rng.index(i + 1)]);
    }
    ProjectorSelection permuted;
    for (std::size_t i : order) permuted.entries.push_back(sel.entries[i]);

    const Matrix a = product_measure_on_rectangle(catalog, sel);
    const Matrix b = product_measure_on_rectangle(catalog, permuted);
    report.record((a - b).norm(), tol);
  }
  return report;
}

VerificationReport verify_marginal_consistency(const Catalog& catalog,
                                               std::size_t trials, Rng& rng) {
  if (catalog.size() < 2) {
    throw ValidationError(
        "verify_marginal_consistency: catalog must have at least 2 members");
  }
  VerificationReport report;
  report.name = "marginal-consistency";
  const double tol = catalog.tolerances().check;
  const std::size_t n = catalog.size();
  for (std::size_t t = 0; t < trials; ++t) {
    // Random non-empty sub-collection.
    std::vector<std::size_t> sub;
    while (sub.empty()) {
      sub = random_point_subset(rng, n);
    }
    ProjectorSelection on_sub;
    for (std::size_t i : sub) {
      on_sub.entries.push_back({i, random_point_subset(rng, catalog.spectrum_size(i))});
    }
    // Extend to the full catalog: omitted members get their full spectrum.
    ProjectorSelection extended;
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (cursor < sub.size() && sub[cursor] == i) {
        extended.entries.push_back(on_sub.entries[cursor]);
        ++cursor;
      } else {
        std::vector<std::size_t> full(catalog.spectrum_size(i));
        std::iota(full.begin(), full.end(), 0);
        extended.entries.push_back({i, std::move(full)});
      }
    }
    const Matrix a = product_measure_on_rectangle(catalog, extended);
    const Matrix b = product_measure_on_rectangle(catalog, on_sub);
    report.record((a - b).norm(), tol);
  }
  return report;
}

}  // namespace qhv
