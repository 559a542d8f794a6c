#include "qhv/multipartite.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace qhv {

void validate_scenario(const PartiteScenario& scenario) {
  if (scenario.local_dims.empty()) {
    throw ValidationError("scenario: at least one site required");
  }
  if (scenario.site_observables.size() != scenario.local_dims.size()) {
    throw ValidationError("scenario: one observable list per site required");
  }
  Eigen::Index product = 1;
  for (std::size_t s = 0; s < scenario.local_dims.size(); ++s) {
    if (scenario.local_dims[s] < 1) {
      throw ValidationError("scenario: invalid dimension at site " +
                            std::to_string(s));
    }
    product *= scenario.local_dims[s];
    if (scenario.site_observables[s].empty()) {
      throw ValidationError("scenario: site " + std::to_string(s) +
                            " has no observables");
    }
    for (const auto& x : scenario.site_observables[s]) {
      if (x.dim() != scenario.local_dims[s]) {
        throw ValidationError("scenario: observable '" + x.label() +
                              "' does not match the dimension of site " +
                              std::to_string(s));
      }
    }
  }
  if (scenario.state.dim() != product) {
    throw ValidationError("scenario: state '" + scenario.state.label() +
                          "' does not live on the product space");
  }
}

ScenarioCatalog build_scenario_catalog(const PartiteScenario& scenario,
                                       const Tolerances& tol,
                                       std::uint64_t atom_cap) {
  validate_scenario(scenario);
  std::vector<HermitianObservable> lifted;
  std::vector<std::size_t> offsets;
  for (std::size_t s = 0; s < scenario.local_dims.size(); ++s) {
    offsets.push_back(lifted.size());
    for (const auto& x : scenario.site_observables[s]) {
      lifted.push_back(tensor_embed(x, s, scenario.local_dims, tol));
    }
  }
  auto catalog =
      std::make_shared<const Catalog>(std::move(lifted), tol, atom_cap);
  return ScenarioCatalog{std::move(catalog), std::move(offsets)};
}

LocalResponse make_local_response(const ScenarioCatalog& sc, std::size_t site,
                                  std::size_t local,
                                  std::vector<std::size_t> points) {
  const Catalog& catalog = *sc.catalog;
  LocalResponse response;
  response.site = site;
  response.catalog_index = sc.catalog_index(site, local);
  response.points = std::move(points);
  response.indicator.resize(catalog.atom_count(), 0);
  for (AtomIndex a = 0; a < catalog.atom_count(); ++a) {
    const std::size_t digit = catalog.digit_at(a, response.catalog_index);
    for (std::size_t p : response.points) {
      if (p == digit) {
        response.indicator[a] = 1;
        break;
      }
    }
  }
  return response;
}

bool response_is_local(const Catalog& catalog, const LocalResponse& response) {
  // Group atoms by the response's own coordinate: the indicator must be
  // constant on each group.
  const std::size_t own = response.catalog_index;
  std::vector<int> per_digit(catalog.spectrum_size(own), -1);
  for (AtomIndex a = 0; a < catalog.atom_count(); ++a) {
    const std::size_t digit = catalog.digit_at(a, own);
    const int value = response.indicator[a];
    if (per_digit[digit] == -1) {
      per_digit[digit] = value;
    } else if (per_digit[digit] != value) {
      return false;
    }
  }
  return true;
}

namespace {

Matrix lifted_projector(const PartiteScenario& scenario,
                        const std::vector<std::size_t>& settings,
                        const std::vector<std::vector<std::size_t>>& outcomes) {
  Matrix out(1, 1);
  out(0, 0) = 1.0;
  for (std::size_t s = 0; s < scenario.local_dims.size(); ++s) {
    const auto& x = scenario.site_observables[s][settings[s]];
    out = kron(out, x.projector_of(outcomes[s]));
  }
  return out;
}

}  // namespace

VerificationReport verify_lqhv(const PartiteScenario& scenario,
                               std::size_t trials, Rng& rng,
                               const Tolerances& tol, std::uint64_t atom_cap) {
  const ScenarioCatalog sc = build_scenario_catalog(scenario, tol, atom_cap);
  const OperatorValuedMeasure m = build_global_measure(sc.catalog);
  const SignedMeasure nu = induce_signed_measure(m, scenario.state);
  const std::size_t sites = scenario.local_dims.size();

  VerificationReport report;
  report.name = "lqhv";
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<std::size_t> settings(sites);
    std::vector<std::vector<std::size_t>> outcomes(sites);
    std::vector<LocalResponse> responses;
    for (std::size_t s = 0; s < sites; ++s) {
      settings[s] = rng.index(scenario.site_observables[s].size());
      const std::size_t spectrum =
          scenario.site_observables[s][settings[s]].spectrum_size();
      for (std::size_t p = 0; p < spectrum; ++p) {
        if (rng.coin()) outcomes[s].push_back(p);
      }
      responses.push_back(
          make_local_response(sc, s, settings[s], outcomes[s]));
      if (!response_is_local(*sc.catalog, responses.back())) {
        ++report.failures;
        report.notes.push_back("response at site " + std::to_string(s) +
                               " reads a foreign coordinate");
      }
    }
    const Matrix projector = lifted_projector(scenario, settings, outcomes);
    const double born =
        (scenario.state.matrix() * projector).trace().real();
    double model = 0.0;
    for (AtomIndex a = 0; a < nu.atom_count(); ++a) {
      double prod = 1.0;
      for (const auto& response : responses) {
        prod *= static_cast<double>(response.indicator[a]);
      }
      model += prod * nu.value(a);
    }
    report.record(std::abs(born - model), tol.check);
  }
  return report;
}

VerificationReport verify_lqhv_exhaustive(const PartiteScenario& scenario,
                                          const Tolerances& tol,
                                          std::uint64_t atom_cap) {
  const ScenarioCatalog sc = build_scenario_catalog(scenario, tol, atom_cap);
  const OperatorValuedMeasure m = build_global_measure(sc.catalog);
  const SignedMeasure nu = induce_signed_measure(m, scenario.state);
  const std::size_t sites = scenario.local_dims.size();

  VerificationReport report;
  report.name = "lqhv-exhaustive";

  std::vector<std::size_t> settings(sites, 0);
  bool settings_done = false;
  while (!settings_done) {
    std::vector<std::size_t> picks(sites, 0);
    bool picks_done = false;
    while (!picks_done) {
      std::vector<std::vector<std::size_t>> outcomes(sites);
      std::vector<LocalResponse> responses;
      for (std::size_t s = 0; s < sites; ++s) {
        outcomes[s] = {picks[s]};
        responses.push_back(make_local_response(sc, s, settings[s], outcomes[s]));
        if (!response_is_local(*sc.catalog, responses.back())) {
          ++report.failures;
        }
      }
      const Matrix projector = lifted_projector(scenario, settings, outcomes);
      const double born =
          (scenario.state.matrix() * projector).trace().real();
      double model = 0.0;
      for (AtomIndex a = 0; a < nu.atom_count(); ++a) {
        double prod = 1.0;
        for (const auto& response : responses) {
          prod *= static_cast<double>(response.indicator[a]);
        }
        model += prod * nu.value(a);
      }
      report.record(std::abs(born - model), tol.check);

      picks_done = true;
      for (std::size_t s = 0; s < sites; ++s) {
        const std::size_t limit =
            scenario.site_observables[s][settings[s]].spectrum_size();
        if (++picks[s] < limit) {
          picks_done = false;
          break;
        }
        picks[s] = 0;
      }
    }
    settings_done = true;
    for (std::size_t s = 0; s < sites; ++s) {
      if (++settings[s] < scenario.site_observables[s].size()) {
        settings_done = false;
        break;
      }
      settings[s] = 0;
    }
  }
  return report;
}

namespace {

void require_dichotomic(const HermitianObservable& x) {
  constexpr double kValueTol = 1e-8;
  if (x.spectrum_size() != 2 || std::abs(x.eigenvalue(0) + 1.0) > kValueTol ||
      std::abs(x.eigenvalue(1) - 1.0) > kValueTol) {
    throw ValidationError("chsh: observable '" + x.label() +
                          "' is not dichotomic with outcomes -1, +1");
  }
}

}  // namespace

ChshResult chsh_value(const PartiteScenario& scenario, const Tolerances& tol,
                      std::uint64_t atom_cap) {
  validate_scenario(scenario);
  if (scenario.local_dims.size() != 2 ||
      scenario.site_observables[0].size() != 2 ||
      scenario.site_observables[1].size() != 2) {
    throw ValidationError("chsh: two sites with two observables each required");
  }
  for (const auto& site : scenario.site_observables) {
    for (const auto& x : site) require_dichotomic(x);
  }

  const auto& a = scenario.site_observables[0];
  const auto& b = scenario.site_observables[1];
  const Matrix bell = kron(a[0].matrix(), b[0].matrix()) +
                      kron(a[0].matrix(), b[1].matrix()) +
                      kron(a[1].matrix(), b[0].matrix()) -
                      kron(a[1].matrix(), b[1].matrix());

  ChshResult result;
  result.quantum = (scenario.state.matrix() * bell).trace().real();

  const ScenarioCatalog sc = build_scenario_catalog(scenario, tol, atom_cap);
  const OperatorValuedMeasure m = build_global_measure(sc.catalog);
  const SignedMeasure nu = induce_signed_measure(m, scenario.state);
  auto correlator = [&](std::size_t i, std::size_t j) {
    const std::vector<std::size_t> pair{sc.catalog_index(0, i),
                                        sc.catalog_index(1, j)};
    return product_expectation_via_measure(nu, pair);
  };
  result.via_measure = correlator(0, 0) + correlator(0, 1) + correlator(1, 0) -
                       correlator(1, 1);
  return result;
}

DensityState werner_state(double p, const Tolerances& tol) {
  if (p < 0.0 || p > 1.0) {
    throw ValidationError("werner_state: p = " + std::to_string(p) +
                          " outside [0, 1]");
  }
  Eigen::VectorXcd singlet(4);
  singlet << 0.0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0;
  const Matrix pure = singlet * singlet.adjoint();
  const Matrix mixed =
      p * pure + (1.0 - p) * Matrix::Identity(4, 4) / 4.0;
  return validate_state(mixed, tol, "werner(" + std::to_string(p) + ")");
}

std::vector<WernerRow> werner_scan(const std::vector<double>& p_grid,
                                   const ChshSettings& settings,
                                   const Tolerances& tol,
                                   std::uint64_t atom_cap) {
  std::vector<WernerRow> rows;
  rows.reserve(p_grid.size());
  for (double p : p_grid) {
    PartiteScenario scenario{{2, 2},
                             {{settings.a1, settings.a2},
                              {settings.b1, settings.b2}},
                             werner_state(p, tol)};
    const ChshResult chsh = chsh_value(scenario, tol, atom_cap);

    const ScenarioCatalog sc = build_scenario_catalog(scenario, tol, atom_cap);
    const OperatorValuedMeasure m = build_global_measure(sc.catalog);
    const SignedMeasure nu = induce_signed_measure(m, scenario.state);
    const NegativityDiagnostics diag = negativity_diagnostics(nu);

    rows.push_back(WernerRow{p, chsh.via_measure, diag.total_variation,
                             diag.min_atom});
  }
  return rows;
}

}  // namespace qhv
