#include "qhv/extension.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace qhv {

OperatorValuedMeasure::OperatorValuedMeasure(CatalogPtr catalog,
                                             std::vector<Matrix> atoms)
    : catalog_(std::move(catalog)), atoms_(std::move(atoms)) {
  if (!catalog_ || atoms_.size() != catalog_->atom_count()) {
    throw ValidationError("operator measure: atom table size mismatch");
  }
  const Eigen::Index d = catalog_->dim();
  const Tolerances& tol = catalog_->tolerances();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& m : atoms_) {
    if ((m - m.adjoint()).norm() > tol.check) {
      throw ValidationError("operator measure: non-Hermitian atom value");
    }
    sum += m;
  }
  if ((sum - Matrix::Identity(d, d)).norm() > tol.check) {
    throw ValidationError("operator measure: atoms do not sum to identity");
  }
}

Matrix OperatorValuedMeasure::sum_over(std::span<const AtomIndex> atoms) const {
  Matrix sum = Matrix::Zero(catalog_->dim(), catalog_->dim());
  for (AtomIndex a : atoms) sum += atoms_[a];
  return sum;
}

SignedMeasure::SignedMeasure(CatalogPtr catalog, std::string state_label,
                             std::vector<double> atoms)
    : catalog_(std::move(catalog)),
      state_label_(std::move(state_label)),
      atoms_(std::move(atoms)) {
  if (!catalog_ || atoms_.size() != catalog_->atom_count()) {
    throw ValidationError("signed measure: atom table size mismatch");
  }
  const double total = std::accumulate(atoms_.begin(), atoms_.end(), 0.0);
  if (std::abs(total - 1.0) > catalog_->tolerances().check) {
    throw ValidationError("signed measure for '" + state_label_ +
                          "': atoms sum to " + std::to_string(total) +
                          ", expected 1");
  }
}

double SignedMeasure::value_of(std::span<const AtomIndex> atoms) const {
  double sum = 0.0;
  for (AtomIndex a : atoms) sum += atoms_[a];
  return sum;
}

double SignedMeasure::cylinder_value(const CylinderSet& cyl) const {
  validate_cylinder(*catalog_, cyl);
  double sum = 0.0;
  for (AtomIndex a = 0; a < atoms_.size(); ++a) {
    if (cylinder_contains(*catalog_, cyl, a)) sum += atoms_[a];
  }
  return sum;
}

OperatorValuedMeasure build_global_measure(CatalogPtr catalog) {
  if (!catalog) throw ValidationError("build_global_measure: null catalog");
  const std::size_t n = catalog->size();
  if (n > kMaxSymFactors) {
    throw ResourceError("build_global_measure: catalog of " + std::to_string(n) +
                        " members exceeds the symmetrization cap of " +
                        std::to_string(kMaxSymFactors));
  }
  std::vector<Matrix> atoms;
  atoms.reserve(catalog->atom_count());
  std::vector<std::size_t> digits(n);
  std::vector<Matrix> factors(n);
  for (AtomIndex a = 0; a < catalog->atom_count(); ++a) {
    catalog->atom_digits(a, digits);
    for (std::size_t i = 0; i < n; ++i) {
      factors[i] = catalog->observable(i).projector(digits[i]);
    }
    atoms.push_back(sym_product(factors, catalog->tolerances()));
  }
  return OperatorValuedMeasure(std::move(catalog), std::move(atoms));
}

Matrix measure_of_cylinder(const OperatorValuedMeasure& m, const CylinderSet& a) {
  const Catalog& catalog = m.catalog();
  validate_cylinder(catalog, a);
  Matrix sum = Matrix::Zero(catalog.dim(), catalog.dim());
  for (AtomIndex atom = 0; atom < m.atom_count(); ++atom) {
    if (cylinder_contains(catalog, a, atom)) sum += m.atom(atom);
  }
  return sum;
}

namespace {

std::vector<std::size_t> random_subcollection(Rng& rng, std::size_t n) {
  std::vector<std::size_t> sub;
  while (sub.empty()) {
    sub.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.coin()) sub.push_back(i);
    }
  }
  return sub;
}

std::vector<std::vector<std::size_t>> all_tuples(const Catalog& catalog,
                                                 std::span<const std::size_t> sub) {
  std::vector<std::vector<std::size_t>> tuples{{}};
  for (std::size_t i : sub) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& prefix : tuples) {
      for (std::size_t p = 0; p < catalog.spectrum_size(i); ++p) {
        auto t = prefix;
        t.push_back(p);
        next.push_back(std::move(t));
      }
    }
    tuples = std::move(next);
  }
  return tuples;
}

}  // namespace

VerificationReport verify_pushforward(const OperatorValuedMeasure& m,
                                      std::size_t trials, Rng& rng) {
  const Catalog& catalog = m.catalog();
  VerificationReport report;
  report.name = "pushforward";
  const double tol = catalog.tolerances().check;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto sub = random_subcollection(rng, catalog.size());
    const auto lattice = all_tuples(catalog, sub);
    std::vector<std::vector<std::size_t>> chosen;
    if (lattice.size() <= 4096) {
      for (const auto& tuple : lattice) {
        if (rng.coin()) chosen.push_back(tuple);
      }
    } else {
      std::set<std::size_t> picks;
      while (picks.size() < 64) picks.insert(rng.index(lattice.size()));
      for (std::size_t k : picks) chosen.push_back(lattice[k]);
    }
    const CylinderSet cyl{sub, chosen};
    const Matrix lhs = measure_of_cylinder(m, cyl);
    const Matrix rhs = product_measure_on_tuples(catalog, sub, chosen);
    report.record((lhs - rhs).norm(), tol);
  }
  return report;
}

VerificationReport verify_pushforward_exhaustive(const OperatorValuedMeasure& m,
                                                 std::size_t max_enumerated_atoms) {
  const Catalog& catalog = m.catalog();
  VerificationReport report;
  report.name = "pushforward-exhaustive";
  const double tol = catalog.tolerances().check;
  const std::size_t n = catalog.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> sub;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) sub.push_back(i);
    }
    // Every rectangle: one spectral subset per member, empty sides included.
    std::vector<std::size_t> side_masks(sub.size(), 0);
    bool done = false;
    while (!done) {
      std::vector<std::vector<std::size_t>> tuples{{}};
      for (std::size_t k = 0; k < sub.size(); ++k) {
        std::vector<std::vector<std::size_t>> next;
        for (const auto& prefix : tuples) {
          for (std::size_t p = 0; p < catalog.spectrum_size(sub[k]); ++p) {
            if (side_masks[k] & (std::size_t{1} << p)) {
              auto t = prefix;
              t.push_back(p);
              next.push_back(std::move(t));
            }
          }
        }
        tuples = std::move(next);
      }
      const CylinderSet cyl{sub, tuples};
      const Matrix lhs = measure_of_cylinder(m, cyl);

      ProjectorSelection sel;
      for (std::size_t k = 0; k < sub.size(); ++k) {
        std::vector<std::size_t> points;
        for (std::size_t p = 0; p < catalog.spectrum_size(sub[k]); ++p) {
          if (side_masks[k] & (std::size_t{1} << p)) points.push_back(p);
        }
        sel.entries.push_back({sub[k], std::move(points)});
      }
      const Matrix rhs = product_measure_on_rectangle(catalog, sel);
      report.record((lhs - rhs).norm(), tol);

      done = true;
      for (std::size_t k = 0; k < sub.size(); ++k) {
        const std::size_t limit = std::size_t{1} << catalog.spectrum_size(sub[k]);
        if (++side_masks[k] < limit) {
          done = false;
          break;
        }
        side_masks[k] = 0;
      }
    }
    // Every tuple subset of small sub-lattices (finite additivity on
    // non-rectangle elements).
    const auto lattice = all_tuples(catalog, sub);
    if (lattice.size() <= max_enumerated_atoms) {
      for (std::size_t fmask = 0; fmask < (std::size_t{1} << lattice.size());
           ++fmask) {
        std::vector<std::vector<std::size_t>> chosen;
        for (std::size_t k = 0; k < lattice.size(); ++k) {
          if (fmask & (std::size_t{1} << k)) chosen.push_back(lattice[k]);
        }
        const CylinderSet cyl{sub, chosen};
        const Matrix lhs = measure_of_cylinder(m, cyl);
        const Matrix rhs = product_measure_on_tuples(catalog, sub, chosen);
        report.record((lhs - rhs).norm(), tol);
      }
    }
  }
  return report;
}

SignedMeasure induce_signed_measure(const OperatorValuedMeasure& m,
                                    const DensityState& rho) {
  if (rho.dim() != m.catalog().dim()) {
    throw ValidationError("induce_signed_measure: state '" + rho.label() +
                          "' does not match the catalog dimension");
  }
  std::vector<double> atoms;
  atoms.reserve(m.atom_count());
  for (AtomIndex a = 0; a < m.atom_count(); ++a) {
    atoms.push_back((rho.matrix() * m.atom(a)).trace().real());
  }
  return SignedMeasure(m.catalog_ptr(), rho.label(), std::move(atoms));
}

SignedMeasure mixture_measure(
    const std::vector<std::pair<double, SignedMeasure>>& components) {
  if (components.empty()) {
    throw ValidationError("mixture_measure: at least one component required");
  }
  const CatalogPtr catalog = components.front().second.catalog_ptr();
  const double tol = catalog->tolerances().check;
  double weight_sum = 0.0;
  for (const auto& [weight, measure] : components) {
    if (weight <= 0.0) {
      throw ValidationError("mixture_measure: weights must be positive");
    }
    if (measure.catalog_ptr() != catalog) {
      throw ValidationError("mixture_measure: catalog mismatch between components");
    }
    weight_sum += weight;
  }
  if (std::abs(weight_sum - 1.0) > tol) {
    throw ValidationError("mixture_measure: weights sum to " +
                          std::to_string(weight_sum) + ", expected 1");
  }
  std::vector<double> atoms(catalog->atom_count(), 0.0);
  std::string label = "mix(";
  for (std::size_t c = 0; c < components.size(); ++c) {
    const auto& [weight, measure] = components[c];
    for (AtomIndex a = 0; a < atoms.size(); ++a) {
      atoms[a] += weight * measure.value(a);
    }
    if (c > 0) label += ",";
    label += measure.state_label();
  }
  label += ")";
  return SignedMeasure(catalog, std::move(label), std::move(atoms));
}

double product_expectation_via_measure(const SignedMeasure& mu,
                                       std::span<const std::size_t> subset) {
  const Catalog& catalog = mu.catalog();
  std::set<std::size_t> seen;
  for (std::size_t i : subset) {
    if (i >= catalog.size()) {
      throw ValidationError("product_expectation_via_measure: index " +
                            std::to_string(i) + " out of range");
    }
    if (!seen.insert(i).second) {
      throw ValidationError("product_expectation_via_measure: index " +
                            std::to_string(i) + " repeated");
    }
  }
  double sum = 0.0;
  for (AtomIndex a = 0; a < mu.atom_count(); ++a) {
    double prod = 1.0;
    for (std::size_t i : subset) prod *= catalog.outcome_value(a, i);
    sum += prod * mu.value(a);
  }
  return sum;
}

NegativityDiagnostics negativity_diagnostics(const SignedMeasure& mu) {
  NegativityDiagnostics out;
  out.min_atom = mu.value(0);
  const double tol = mu.catalog().tolerances().check;
  for (AtomIndex a = 0; a < mu.atom_count(); ++a) {
    const double v = mu.value(a);
    out.total_variation += std::abs(v);
    out.min_atom = std::min(out.min_atom, v);
    if (v < -tol) ++out.negative_atom_count;
  }
  return out;
}

}  // namespace qhv
