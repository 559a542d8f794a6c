#pragma once

#include <span>
#include <vector>

#include "qhv/catalog.hpp"
#include "qhv/report.hpp"
#include "qhv/rng.hpp"
#include "qhv/spectral.hpp"
#include "qhv/types.hpp"

namespace qhv {

// (1/n!) * sum of Z_{p(1)} ... Z_{p(n)} over all permutations p.
// Inputs must be Hermitian (within tol.herm): the sum is accumulated over
// the lexicographically first ordering of each reversed pair and completed
// by its adjoint, which fixes the floating-point reduction order.
Matrix sym_product(std::span<const Matrix> factors, const Tolerances& tol = {});

// Value of the symmetrized product measure on the rectangle described by
// `sel` (omitted observables do not constrain; an empty selection gives I).
Matrix product_measure_on_rectangle(const Catalog& catalog,
                                    const ProjectorSelection& sel);

// Value on an arbitrary subset of the sub-lattice over `observables`:
// the sum over tuples of the symmetrized singleton-projector products.
Matrix product_measure_on_tuples(
    const Catalog& catalog, std::span<const std::size_t> observables,
    const std::vector<std::vector<std::size_t>>& tuples);

// tr[rho P_1(B_1) ... P_n(B_n)] for pairwise commuting observables;
// outcome_sets[i] lists spectral-point indices of observables[i].
double joint_probability_commuting(
    const DensityState& rho, std::span<const HermitianObservable> observables,
    const std::vector<std::vector<std::size_t>>& outcome_sets,
    const Tolerances& tol = {});

// Random rectangles and permutations: measure values must not depend on
// the ordering of the observable tuple.
VerificationReport verify_permutation_invariance(const Catalog& catalog,
                                                 std::size_t trials, Rng& rng);

// Random sub-collections: summing the full-catalog measure over a cylinder
// extension must reproduce the sub-collection measure.
VerificationReport verify_marginal_consistency(const Catalog& catalog,
                                               std::size_t trials, Rng& rng);

}  // namespace qhv
