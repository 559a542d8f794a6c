#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "qhv/spectral.hpp"
#include "qhv/types.hpp"

namespace qhv {

inline constexpr std::uint64_t kDefaultAtomCap = 250000;
inline constexpr std::size_t kMaxSymFactors = 8;

// Flat index into the outcome lattice (mixed radix over spectra,
// observable 0 most significant, last observable fastest).
using AtomIndex = std::uint64_t;

// An ordered list of pairwise distinct Hermitian observables on one space.
// The outcome lattice is the Cartesian product of their spectra.
class Catalog {
 public:
  explicit Catalog(std::vector<HermitianObservable> observables,
                   Tolerances tol = {}, std::uint64_t atom_cap = kDefaultAtomCap);

  std::size_t size() const { return observables_.size(); }
  Eigen::Index dim() const { return observables_.front().dim(); }
  const HermitianObservable& observable(std::size_t i) const;
  const std::vector<HermitianObservable>& observables() const {
    return observables_;
  }
  const Tolerances& tolerances() const { return tol_; }
  std::uint64_t atom_cap() const { return atom_cap_; }
  std::uint64_t atom_count() const { return atom_count_; }
  std::size_t spectrum_size(std::size_t i) const;

  std::vector<std::size_t> atom_digits(AtomIndex atom) const;
  void atom_digits(AtomIndex atom, std::span<std::size_t> out) const;
  AtomIndex atom_from_digits(std::span<const std::size_t> digits) const;

  // Spectral-point index of observable `obs` at this atom.
  std::size_t digit_at(AtomIndex atom, std::size_t obs) const;
  // Eigenvalue of observable `obs` at this atom.
  double outcome_value(AtomIndex atom, std::size_t obs) const;

  // Index of the catalog member equal to m within tol.check, if any.
  std::optional<std::size_t> find(const Matrix& m) const;

 private:
  std::vector<HermitianObservable> observables_;
  Tolerances tol_;
  std::uint64_t atom_cap_;
  std::uint64_t atom_count_;
  std::vector<std::uint64_t> strides_;  // strides_[i] = prod of sizes after i
};

using CatalogPtr = std::shared_ptr<const Catalog>;

// One point of the outcome lattice as explicit spectral-point indices.
struct OutcomeAtom {
  std::vector<std::size_t> points;  // one per catalog observable
};

// A per-observable choice of spectral subsets (a rectangle side per entry).
struct ProjectorSelection {
  struct Entry {
    std::size_t observable = 0;
    std::vector<std::size_t> points;  // may be empty (measure then zero)
  };
  std::vector<Entry> entries;
};

// Constraint on a sub-collection of coordinates: the set F of admissible
// outcome tuples over `observables`, each tuple one point index per member.
struct CylinderSet {
  std::vector<std::size_t> observables;          // distinct catalog indices
  std::vector<std::vector<std::size_t>> tuples;  // distinct, each of same arity
};

// Throws ValidationError when the selection references invalid indices.
void validate_selection(const Catalog& catalog, const ProjectorSelection& sel);

// Throws ValidationError when the cylinder is malformed for this catalog.
void validate_cylinder(const Catalog& catalog, const CylinderSet& cyl);

// True iff the atom's restriction to cyl.observables is one of cyl.tuples.
bool cylinder_contains(const Catalog& catalog, const CylinderSet& cyl,
                       AtomIndex atom);

}  // namespace qhv
