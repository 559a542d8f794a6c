#include "qhv/catalog.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace qhv {

Catalog::Catalog(std::vector<HermitianObservable> observables, Tolerances tol,
                 std::uint64_t atom_cap)
    : observables_(std::move(observables)), tol_(tol), atom_cap_(atom_cap) {
  if (observables_.empty()) {
    throw ValidationError("catalog: at least one observable required");
  }
  const Eigen::Index d = observables_.front().dim();
  for (std::size_t i = 0; i < observables_.size(); ++i) {
    if (observables_[i].dim() != d) {
      throw ValidationError("catalog: observable '" + observables_[i].label() +
                            "' has dimension " +
                            std::to_string(observables_[i].dim()) +
                            ", expected " + std::to_string(d));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if ((observables_[i].matrix() - observables_[j].matrix()).norm() <=
          tol_.check) {
        throw ValidationError("catalog: observables '" + observables_[j].label() +
                              "' and '" + observables_[i].label() +
                              "' coincide; members must be pairwise distinct");
      }
    }
  }
  unsigned __int128 count = 1;
  for (const auto& x : observables_) {
    count *= x.spectrum_size();
    if (count > atom_cap_) {
      throw ResourceError(
          "catalog: outcome lattice needs " +
          (count > static_cast<unsigned __int128>(UINT64_MAX)
               ? std::string("more than 2^64")
               : std::to_string(static_cast<std::uint64_t>(count))) +
          " atoms, cap is " + std::to_string(atom_cap_));
    }
  }
  atom_count_ = static_cast<std::uint64_t>(count);
  strides_.assign(observables_.size(), 1);
  for (std::size_t i = observables_.size(); i-- > 1;) {
    strides_[i - 1] = strides_[i] * observables_[i].spectrum_size();
  }
}

const HermitianObservable& Catalog::observable(std::size_t i) const {
  if (i >= observables_.size()) {
    throw ValidationError("catalog: observable index " + std::to_string(i) +
                          " out of range");
  }
  return observables_[i];
}

std::size_t Catalog::spectrum_size(std::size_t i) const {
  return observable(i).spectrum_size();
}

std::vector<std::size_t> Catalog::atom_digits(AtomIndex atom) const {
  std::vector<std::size_t> out(observables_.size());
  atom_digits(atom, out);
  return out;
}

void Catalog::atom_digits(AtomIndex atom, std::span<std::size_t> out) const {
  for (std::size_t i = 0; i < observables_.size(); ++i) {
    out[i] = static_cast<std::size_t>(atom / strides_[i]) %
             observables_[i].spectrum_size();
  }
}

AtomIndex Catalog::atom_from_digits(std::span<const std::size_t> digits) const {
  AtomIndex atom = 0;
  for (std::size_t i = 0; i < observables_.size(); ++i) {
    atom += static_cast<AtomIndex>(digits[i]) * strides_[i];
  }
  return atom;
}

std::size_t Catalog::digit_at(AtomIndex atom, std::size_t obs) const {
  return static_cast<std::size_t>(atom / strides_[obs]) %
         observables_[obs].spectrum_size();
}

double Catalog::outcome_value(AtomIndex atom, std::size_t obs) const {
  return observables_[obs].eigenvalue(digit_at(atom, obs));
}

std::optional<std::size_t> Catalog::find(const Matrix& m) const {
  for (std::size_t i = 0; i < observables_.size(); ++i) {
    if ((observables_[i].matrix() - m).norm() <= tol_.check) return i;
  }
  return std::nullopt;
}

void validate_selection(const Catalog& catalog, const ProjectorSelection& sel) {
  std::set<std::size_t> seen;
  for (const auto& entry : sel.entries) {
    if (entry.observable >= catalog.size()) {
      throw ValidationError("selection: observable index " +
                            std::to_string(entry.observable) + " out of range");
    }
    if (!seen.insert(entry.observable).second) {
      throw ValidationError("selection: observable index " +
                            std::to_string(entry.observable) + " repeated");
    }
    for (std::size_t p : entry.points) {
      if (p >= catalog.spectrum_size(entry.observable)) {
        throw ValidationError(
            "selection: spectral point " + std::to_string(p) +
            " not in the spectrum of '" +
            catalog.observable(entry.observable).label() + "'");
      }
    }
  }
}

void validate_cylinder(const Catalog& catalog, const CylinderSet& cyl) {
  std::set<std::size_t> seen;
  for (std::size_t i : cyl.observables) {
    if (i >= catalog.size()) {
      throw ValidationError("cylinder: observable index " + std::to_string(i) +
                            " out of range");
    }
    if (!seen.insert(i).second) {
      throw ValidationError("cylinder: observable index " + std::to_string(i) +
                            " repeated");
    }
  }
  std::set<std::vector<std::size_t>> tuples;
  for (const auto& tuple : cyl.tuples) {
    if (tuple.size() != cyl.observables.size()) {
      throw ValidationError("cylinder: tuple arity mismatch");
    }
    for (std::size_t k = 0; k < tuple.size(); ++k) {
      if (tuple[k] >= catalog.spectrum_size(cyl.observables[k])) {
        throw ValidationError("cylinder: tuple point out of range for '" +
                              catalog.observable(cyl.observables[k]).label() +
                              "'");
      }
    }
    if (!tuples.insert(tuple).second) {
      throw ValidationError("cylinder: duplicate tuple");
    }
  }
}

bool cylinder_contains(const Catalog& catalog, const CylinderSet& cyl,
                       AtomIndex atom) {
  for (const auto& tuple : cyl.tuples) {
    bool match = true;
    for (std::size_t k = 0; k < cyl.observables.size(); ++k) {
      if (catalog.digit_at(atom, cyl.observables[k]) != tuple[k]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

}  // namespace qhv
