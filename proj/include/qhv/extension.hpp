#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qhv/catalog.hpp"
#include "qhv/report.hpp"
#include "qhv/rng.hpp"
#include "qhv/spectral.hpp"
#include "qhv/symmetrized.hpp"
#include "qhv/types.hpp"

namespace qhv {

// The normalized operator-valued measure on the outcome lattice: one
// Hermitian matrix per atom, summing to the identity. Atoms are evaluated
// in mixed-radix order; instances are immutable after construction.
class OperatorValuedMeasure {
 public:
  OperatorValuedMeasure(CatalogPtr catalog, std::vector<Matrix> atoms);

  const Catalog& catalog() const { return *catalog_; }
  const CatalogPtr& catalog_ptr() const { return catalog_; }
  std::uint64_t atom_count() const { return atoms_.size(); }
  const Matrix& atom(AtomIndex a) const { return atoms_[a]; }

  // Finite-additivity sum over an explicit atom set (in the given order).
  Matrix sum_over(std::span<const AtomIndex> atoms) const;

 private:
  CatalogPtr catalog_;
  std::vector<Matrix> atoms_;
};

// The atomwise real-valued measure induced by a state: atom values may be
// negative; they sum to one.
class SignedMeasure {
 public:
  SignedMeasure(CatalogPtr catalog, std::string state_label,
                std::vector<double> atoms);

  const Catalog& catalog() const { return *catalog_; }
  const CatalogPtr& catalog_ptr() const { return catalog_; }
  const std::string& state_label() const { return state_label_; }
  std::uint64_t atom_count() const { return atoms_.size(); }
  double value(AtomIndex a) const { return atoms_[a]; }
  const std::vector<double>& values() const { return atoms_; }

  double value_of(std::span<const AtomIndex> atoms) const;
  double cylinder_value(const CylinderSet& cyl) const;

 private:
  CatalogPtr catalog_;
  std::string state_label_;
  std::vector<double> atoms_;
};

struct NegativityDiagnostics {
  double total_variation = 0.0;
  double min_atom = 0.0;
  std::uint64_t negative_atom_count = 0;
};

// Atom a -> symmetrized product of the singleton spectral projectors
// selected by a's digits.
OperatorValuedMeasure build_global_measure(CatalogPtr catalog);

// Sum of atoms whose restriction to the cylinder's sub-collection lies in
// its tuple set.
Matrix measure_of_cylinder(const OperatorValuedMeasure& m, const CylinderSet& a);

// Random sub-collections and tuple sets: the cylinder value of the global
// measure must match the sub-collection product measure.
VerificationReport verify_pushforward(const OperatorValuedMeasure& m,
                                      std::size_t trials, Rng& rng);

// Every non-empty sub-collection with every rectangle, plus every tuple
// subset when the sub-lattice has at most max_enumerated_atoms points.
VerificationReport verify_pushforward_exhaustive(
    const OperatorValuedMeasure& m, std::size_t max_enumerated_atoms = 16);

// Atom a -> tr[rho M(a)], imaginary residue discarded.
SignedMeasure induce_signed_measure(const OperatorValuedMeasure& m,
                                    const DensityState& rho);

// Atomwise convex combination; weights must be positive and sum to one,
// and all components must share one catalog.
SignedMeasure mixture_measure(
    const std::vector<std::pair<double, SignedMeasure>>& components);

// sum over atoms of (product of the subset's outcome values) * measure.
double product_expectation_via_measure(const SignedMeasure& mu,
                                       std::span<const std::size_t> subset);

NegativityDiagnostics negativity_diagnostics(const SignedMeasure& mu);

}  // namespace qhv
