#include <doctest.h>

#include <cmath>

#include "qhv/multipartite.hpp"
#include "test_support.hpp"

using namespace qhv;
using namespace qhv::test;

namespace {

HermitianObservable obs(const Matrix& m, const std::string& label) {
  return eigendecompose(m, {}, label);
}

DensityState singlet_state() {
  Eigen::VectorXcd psi(4);
  psi << 0.0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0;
  return validate_state(psi * psi.adjoint(), {}, "singlet");
}

ChshSettings standard_settings() {
  const double inv = 1.0 / std::sqrt(2.0);
  return ChshSettings{obs(sigma_z(), "a1"), obs(sigma_x(), "a2"),
                      obs(inv * (sigma_z() + sigma_x()), "b1"),
                      obs(inv * (sigma_z() - sigma_x()), "b2")};
}

PartiteScenario chsh_scenario(DensityState state) {
  auto s = standard_settings();
  return PartiteScenario{
      {2, 2}, {{s.a1, s.a2}, {s.b1, s.b2}}, std::move(state)};
}

}  // namespace

TEST_CASE("scenario catalogs lift local observables site-major") {
  SUBCASE("one site, one observable") {
    const PartiteScenario scenario{
        {2}, {{obs(sigma_z(), "z")}}, validate_state(diagonal({1, 0}))};
    const auto sc = build_scenario_catalog(scenario);
    CHECK(sc.catalog->size() == 1);
    CHECK(sc.catalog->atom_count() == 2);
  }
  SUBCASE("two qubits with two observables per site") {
    const auto sc = build_scenario_catalog(
        chsh_scenario(validate_state(Matrix::Identity(4, 4) / 4.0)));
    CHECK(sc.catalog->size() == 4);
    CHECK(sc.catalog->atom_count() == 16);
    CHECK(sc.site_offsets == std::vector<std::size_t>{0, 2});
    // Observables at distinct sites commute after lifting.
    for (std::size_t i : {0, 1}) {
      for (std::size_t j : {2, 3}) {
        CHECK(commute_check(sc.catalog->observable(i), sc.catalog->observable(j)));
      }
    }
  }
  SUBCASE("scenario validation failures") {
    CHECK_THROWS_AS(
        validate_scenario(PartiteScenario{
            {2, 2}, {{obs(sigma_z(), "z")}}, validate_state(diagonal({1, 0}))}),
        ValidationError);
    CHECK_THROWS_AS(
        validate_scenario(PartiteScenario{{2},
                                          {{obs(diagonal({1, 2, 3}), "big")}},
                                          validate_state(diagonal({1, 0}))}),
        ValidationError);
  }
}

TEST_CASE("local responses read only their own coordinate") {
  const auto sc = build_scenario_catalog(chsh_scenario(singlet_state()));
  auto response = make_local_response(sc, 1, 0, {1});
  CHECK(response_is_local(*sc.catalog, response));
  // Doctor one atom so the table depends on a foreign coordinate.
  response.indicator[0] ^= 1;
  CHECK_FALSE(response_is_local(*sc.catalog, response));
}

TEST_CASE("lqhv sweeps") {
  SUBCASE("product states factorize") {
    Rng rng(151);
    const Matrix local_a = random_density(rng, 2);
    const Matrix local_b = random_density(rng, 2);
    const auto rho = validate_state(kron_oracle(local_a, local_b), {}, "product");
    const auto scenario = chsh_scenario(rho);
    Rng trial_rng(157);
    const auto report = verify_lqhv(scenario, 100, trial_rng);
    CHECK(report.pass());
    CHECK(report.max_deviation <= 1e-10);
  }
  SUBCASE("singlet same-axis anticorrelation") {
    const PartiteScenario scenario{
        {2, 2},
        {{obs(sigma_z(), "za"), obs(sigma_x(), "xa")},
         {obs(sigma_z(), "zb"), obs(sigma_x(), "xb")}},
        singlet_state()};
    const auto sc = build_scenario_catalog(scenario);
    const auto m = build_global_measure(sc.catalog);
    const auto nu = induce_signed_measure(m, scenario.state);
    // Both sites measure along z; outcome index 1 is +1.
    auto joint = [&](std::size_t pa, std::size_t pb) {
      const auto ra = make_local_response(sc, 0, 0, {pa});
      const auto rb = make_local_response(sc, 1, 0, {pb});
      double sum = 0.0;
      for (AtomIndex atom = 0; atom < nu.atom_count(); ++atom) {
        sum += ra.indicator[atom] * rb.indicator[atom] * nu.value(atom);
      }
      return sum;
    };
    CHECK(joint(1, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(joint(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(joint(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(joint(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("full spectra give probability one") {
    const auto scenario = chsh_scenario(singlet_state());
    const auto sc = build_scenario_catalog(scenario);
    const auto m = build_global_measure(sc.catalog);
    const auto nu = induce_signed_measure(m, scenario.state);
    const auto ra = make_local_response(sc, 0, 1, {0, 1});
    const auto rb = make_local_response(sc, 1, 1, {0, 1});
    double sum = 0.0;
    for (AtomIndex atom = 0; atom < nu.atom_count(); ++atom) {
      sum += ra.indicator[atom] * rb.indicator[atom] * nu.value(atom);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("exhaustive settings and outcomes on random two-qubit states") {
    Rng rng(163);
    for (int trial = 0; trial < 5; ++trial) {
      const auto rho = validate_state(random_density(rng, 4));
      const auto report = verify_lqhv_exhaustive(chsh_scenario(rho));
      CHECK(report.pass());
      CHECK(report.checks == 16);
      CHECK(report.max_deviation <= 1e-10);
    }
  }
}

TEST_CASE("chsh values") {
  SUBCASE("maximally mixed state has no correlations") {
    const auto result =
        chsh_value(chsh_scenario(validate_state(Matrix::Identity(4, 4) / 4.0)));
    CHECK(result.quantum == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(result.via_measure == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("the |00> product state reaches sqrt(2)") {
    const auto rho = validate_state(kron_oracle(diagonal({1, 0}), diagonal({1, 0})));
    const auto result = chsh_value(chsh_scenario(rho));
    CHECK(result.quantum == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(result.via_measure == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("the singlet reaches magnitude 2 sqrt(2)") {
    const auto result = chsh_value(chsh_scenario(singlet_state()));
    CHECK(std::abs(result.via_measure) ==
          doctest::Approx(2.8284271247461903).epsilon(1e-12));
    CHECK(result.quantum == doctest::Approx(result.via_measure).epsilon(1e-12));
  }
  SUBCASE("the measure route equals the trace route on random states") {
    Rng rng(167);
    for (int trial = 0; trial < 10; ++trial) {
      const auto rho = validate_state(random_density(rng, 4));
      const auto result = chsh_value(chsh_scenario(rho));
      CHECK(std::abs(result.quantum - result.via_measure) <= 1e-10);
    }
  }
  SUBCASE("non-dichotomic observables are rejected") {
    auto s = standard_settings();
    const PartiteScenario bad{
        {2, 2},
        {{obs(diagonal({2, -1}), "bad"), s.a2}, {s.b1, s.b2}},
        validate_state(Matrix::Identity(4, 4) / 4.0)};
    CHECK_THROWS_AS(chsh_value(bad), ValidationError);
  }
}

TEST_CASE("werner scans") {
  const auto settings = standard_settings();

  SUBCASE("endpoint rows match the fixed oracle values") {
    const auto rows = werner_scan({0.0, 1.0}, settings);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].chsh == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rows[0].total_variation == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(rows[1].chsh) ==
          doctest::Approx(2.8284271247461903).epsilon(1e-12));
    // Dense-matrix oracle values for the pure singlet.
    CHECK(rows[1].total_variation ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(rows[1].min_atom ==
          doctest::Approx((1.0 - std::sqrt(2.0)) / 16.0).epsilon(1e-12));
    CHECK(rows[1].total_variation > 1.0 + 1e-10);
  }
  SUBCASE("the classical bound is crossed at 1/sqrt(2)") {
    const double star = 1.0 / std::sqrt(2.0);
    const auto rows = werner_scan({star}, settings);
    CHECK(std::abs(rows[0].chsh) == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("violation forces total variation above one") {
    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k) grid.push_back(k / 10.0);
    for (const auto& row : werner_scan(grid, settings)) {
      if (std::abs(row.chsh) > 2.0 + 1e-10) {
        CHECK(row.total_variation > 1.0 + 1e-10);
      }
    }
  }
  SUBCASE("grid values outside [0,1] are rejected") {
    CHECK_THROWS_AS(werner_scan({-0.1}, settings), ValidationError);
    CHECK_THROWS_AS(werner_scan({1.1}, settings), ValidationError);
  }
}
