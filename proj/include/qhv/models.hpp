#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qhv/catalog.hpp"
#include "qhv/extension.hpp"
#include "qhv/report.hpp"
#include "qhv/rng.hpp"
#include "qhv/spectral.hpp"

namespace qhv {

// A total real function on the outcome lattice whose attained values equal
// its claimed range exactly (canonical eigenvalues, exact comparison).
class RandomVariable {
 public:
  RandomVariable(CatalogPtr catalog, std::string label,
                 std::vector<double> table, std::vector<double> range);

  const Catalog& catalog() const { return *catalog_; }
  const CatalogPtr& catalog_ptr() const { return catalog_; }
  const std::string& label() const { return label_; }
  double operator()(AtomIndex a) const { return table_[a]; }
  const std::vector<double>& table() const { return table_; }
  const std::vector<double>& range() const { return range_; }  // sorted

 private:
  CatalogPtr catalog_;
  std::string label_;
  std::vector<double> table_;
  std::vector<double> range_;
};

// X realized as a function of a catalog member: target = map(base).
struct FunctionalRepresentation {
  std::size_t base = 0;  // catalog index of the underlying observable
  SpectrumFunction map;
  HermitianObservable target;
};

// The coordinate projection of the lattice onto one observable's spectrum.
RandomVariable canonical_rv(CatalogPtr catalog, std::size_t index);

// Pointwise composition phi(g(.)); phi must cover g's range.
RandomVariable compose_rv(const SpectrumFunction& phi, const RandomVariable& g);

// All catalog members Y admitting a spectrum function with map(Y) = X,
// i.e. every eigenprojector of X is a sum of Y's eigenprojectors.
std::vector<FunctionalRepresentation> find_functional_representations(
    const Catalog& catalog, const HermitianObservable& x);

// {atom : g_i(atom) in value_sets[i] for all i}, ascending atom order.
std::vector<AtomIndex> rv_cylinder(std::span<const RandomVariable> gs,
                                   const std::vector<std::vector<double>>& value_sets);

// {atom : (g_1(atom),...,g_k(atom)) in tuple set}, ascending atom order.
std::vector<AtomIndex> rv_preimage(std::span<const RandomVariable> gs,
                                   const std::vector<std::vector<double>>& tuples);

// Random outcome-tuple sets over a pairwise commuting sub-collection:
// joint Born probabilities must equal the measure of the corresponding
// preimage, and that measure value must be nonnegative.
VerificationReport verify_noncontextual_joint(const OperatorValuedMeasure& m,
                                              const DensityState& rho,
                                              std::span<const std::size_t> subset,
                                              std::size_t trials, Rng& rng);

// sum over atoms of psi(g_1,...,g_n) * measure.
double qhv_average(const SignedMeasure& nu,
                   const std::function<double(std::span<const double>)>& psi,
                   std::span<const RandomVariable> gs);

// One averaged functional relation to check against the measure model.
struct KsCase {
  enum class Kind { FunctionOfObservable, SumAverage, ProductAverage };
  Kind kind = Kind::SumAverage;
  std::vector<std::size_t> observables;  // catalog indices
  SpectrumFunction function;             // FunctionOfObservable only
  std::string label;
};

// Function/sum relations hold for arbitrary members, the product relation
// only for pairwise commuting ones (enforced).
VerificationReport verify_ks_average_relations(const OperatorValuedMeasure& m,
                                               const DensityState& rho,
                                               std::span<const KsCase> cases);

// The canonical variable of rep's target (when the target is a catalog
// member) and the composed representative map(coordinate of base) must give
// equal measure values on every joint cylinder with the commuting partners.
VerificationReport verify_context_invariance(const OperatorValuedMeasure& m,
                                             const DensityState& rho,
                                             const FunctionalRepresentation& rep,
                                             std::span<const std::size_t> partners,
                                             std::size_t trials, Rng& rng);

// For every value subset B of the target's spectrum, the global measure of
// the representative's preimage must equal the target's spectral projector.
VerificationReport verify_representative_reconstruction(
    const OperatorValuedMeasure& m, const FunctionalRepresentation& rep);

}  // namespace qhv
