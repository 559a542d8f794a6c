#pragma once

#include <cstdint>
#include <vector>

#include "qhv/catalog.hpp"
#include "qhv/extension.hpp"
#include "qhv/report.hpp"
#include "qhv/rng.hpp"
#include "qhv/spectral.hpp"

namespace qhv {

// An N-site setup: local observables per site and one state on the
// product space.
struct PartiteScenario {
  std::vector<Eigen::Index> local_dims;
  std::vector<std::vector<HermitianObservable>> site_observables;
  DensityState state;
};

void validate_scenario(const PartiteScenario& scenario);

// All local observables lifted to the product space, site-major order.
// site_offsets[s] is the catalog index of site s's first observable.
struct ScenarioCatalog {
  CatalogPtr catalog;
  std::vector<std::size_t> site_offsets;

  std::size_t catalog_index(std::size_t site, std::size_t local) const {
    return site_offsets[site] + local;
  }
};

ScenarioCatalog build_scenario_catalog(const PartiteScenario& scenario,
                                       const Tolerances& tol = {},
                                       std::uint64_t atom_cap = kDefaultAtomCap);

// Deterministic 0/1 answer to "did this site's observable land in B",
// realized as an indicator over atoms that reads one coordinate only.
struct LocalResponse {
  std::size_t site = 0;
  std::size_t catalog_index = 0;
  std::vector<std::size_t> points;       // B as spectral-point indices
  std::vector<std::uint8_t> indicator;   // per atom
};

LocalResponse make_local_response(const ScenarioCatalog& sc, std::size_t site,
                                  std::size_t local,
                                  std::vector<std::size_t> points);

// True iff the indicator depends on no coordinate other than its own.
bool response_is_local(const Catalog& catalog, const LocalResponse& response);

// Random per-site settings and outcome sets: the product-space Born
// probability must equal the measure-weighted product of local responses.
VerificationReport verify_lqhv(const PartiteScenario& scenario,
                               std::size_t trials, Rng& rng,
                               const Tolerances& tol = {},
                               std::uint64_t atom_cap = kDefaultAtomCap);

// All setting combinations with all per-site singleton outcomes.
VerificationReport verify_lqhv_exhaustive(const PartiteScenario& scenario,
                                          const Tolerances& tol = {},
                                          std::uint64_t atom_cap = kDefaultAtomCap);

struct ChshResult {
  double quantum = 0.0;      // trace form on the product space
  double via_measure = 0.0;  // product expectations through the measure
};

// Two sites, two dichotomic (+/-1) observables each:
// E(1,1) + E(1,2) + E(2,1) - E(2,2).
ChshResult chsh_value(const PartiteScenario& scenario,
                      const Tolerances& tol = {},
                      std::uint64_t atom_cap = kDefaultAtomCap);

struct ChshSettings {
  HermitianObservable a1, a2;  // site 0
  HermitianObservable b1, b2;  // site 1
};

struct WernerRow {
  double p = 0.0;
  double chsh = 0.0;
  double total_variation = 0.0;
  double min_atom = 0.0;
};

// (|01> - |10>)/sqrt(2) mixed with white noise at weight 1-p.
DensityState werner_state(double p, const Tolerances& tol = {});

// One row per grid point, grid order preserved.
std::vector<WernerRow> werner_scan(const std::vector<double>& p_grid,
                                   const ChshSettings& settings,
                                   const Tolerances& tol = {},
                                   std::uint64_t atom_cap = kDefaultAtomCap);

}  // namespace qhv
