#include <doctest.h>

#include <cmath>
#include <memory>

#include "qhv/models.hpp"
#include "test_support.hpp"

using namespace qhv;
using namespace qhv::test;

namespace {

CatalogPtr make_catalog(const std::vector<Matrix>& matrices, Tolerances tol = {}) {
  std::vector<HermitianObservable> observables;
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    observables.push_back(
        eigendecompose(matrices[i], tol, "obs" + std::to_string(i)));
  }
  return std::make_shared<const Catalog>(std::move(observables), tol);
}

CatalogPtr two_qubit_catalog() {
  const std::vector<Eigen::Index> dims{2, 2};
  const auto sz = eigendecompose(sigma_z(), {}, "sz");
  const auto sx = eigendecompose(sigma_x(), {}, "sx");
  std::vector<HermitianObservable> lifted{
      tensor_embed(sz, 0, dims), tensor_embed(sz, 1, dims),
      tensor_embed(sx, 0, dims), tensor_embed(sx, 1, dims)};
  return std::make_shared<const Catalog>(std::move(lifted));
}

DensityState singlet_state() {
  Eigen::VectorXcd psi(4);
  psi << 0.0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0;
  return validate_state(psi * psi.adjoint(), {}, "singlet");
}

}  // namespace

TEST_CASE("canonical variables project onto their own coordinate") {
  SUBCASE("single observable") {
    const auto catalog = make_catalog({diagonal({1, -1})});
    const auto pi = canonical_rv(catalog, 0);
    CHECK(pi(0) == -1.0);
    CHECK(pi(1) == 1.0);
    CHECK(pi.range() == std::vector<double>{-1.0, 1.0});
  }
  SUBCASE("the identity observable is the constant one") {
    const auto catalog = make_catalog({Matrix::Identity(2, 2)});
    const auto pi = canonical_rv(catalog, 0);
    CHECK(pi.range() == std::vector<double>{1.0});
  }
  SUBCASE("other coordinates are ignored") {
    const auto catalog = make_catalog({sigma_x(), sigma_z()});
    const auto pi = canonical_rv(catalog, 1);
    REQUIRE(catalog->atom_count() == 4);
    for (AtomIndex a = 0; a < 4; ++a) {
      CHECK(pi(a) == catalog->observable(1).eigenvalue(catalog->digit_at(a, 1)));
    }
  }
  SUBCASE("an invalid index is rejected") {
    const auto catalog = make_catalog({sigma_z()});
    CHECK_THROWS_AS(canonical_rv(catalog, 3), ValidationError);
  }
}

TEST_CASE("composed variables") {
  const auto catalog = make_catalog({diagonal({1, 0, -1})});
  const auto pi = canonical_rv(catalog, 0);

  SUBCASE("identity map returns an identical table") {
    const auto same = compose_rv(SpectrumFunction{{{-1, -1}, {0, 0}, {1, 1}}}, pi);
    CHECK(same.table() == pi.table());
  }
  SUBCASE("squaring shrinks the range") {
    const auto squared = compose_rv(SpectrumFunction{{{-1, 1}, {0, 0}, {1, 1}}}, pi);
    CHECK(squared.range() == std::vector<double>{0.0, 1.0});
  }
  SUBCASE("a variable collapsing to a constant represents the identity") {
    const auto two = make_catalog({diagonal({1, -1})});
    const auto constant =
        compose_rv(SpectrumFunction{{{-1, 1}, {1, 1}}}, canonical_rv(two, 0));
    CHECK(constant.range() == std::vector<double>{1.0});
  }
  SUBCASE("undefined values are rejected") {
    CHECK_THROWS_AS(compose_rv(SpectrumFunction{{{1, 1}}}, pi), ValidationError);
  }
  SUBCASE("composition associates tablewise") {
    const SpectrumFunction phi{{{-1, 1}, {0, 0}, {1, 1}}};
    const SpectrumFunction psi{{{0, 7}, {1, 9}}};
    const auto two_step = compose_rv(psi, compose_rv(phi, pi));
    const auto one_step = compose_rv(SpectrumFunction::compose(psi, phi), pi);
    CHECK(two_step.table() == one_step.table());
  }
}

TEST_CASE("functional representation discovery") {
  const auto catalog =
      make_catalog({diagonal({1, 0, -1}), diagonal({2, 3, 5})});

  SUBCASE("the identity observable is a constant function of every member") {
    const auto reps = find_functional_representations(
        *catalog, eigendecompose(Matrix::Identity(3, 3), {}, "id"));
    REQUIRE(reps.size() == 2);
    for (const auto& rep : reps) {
      for (const auto& [x, y] : rep.map.table()) CHECK(y == 1.0);
    }
  }
  SUBCASE("the square is found with the right table") {
    const auto reps = find_functional_representations(
        *catalog, eigendecompose(diagonal({1, 0, 1}), {}, "ysq"));
    REQUIRE(reps.size() == 2);  // from diag(1,0,-1) and from diag(2,3,5)
    const auto& from_y = reps[0];
    CHECK(from_y.base == 0);
    CHECK(from_y.map(-1.0) == 1.0);
    CHECK(from_y.map(0.0) == 0.0);
    CHECK(from_y.map(1.0) == 1.0);
  }
  SUBCASE("sigma_x is not a function of sigma_z") {
    const auto qubit = make_catalog({sigma_z()});
    const auto x = eigendecompose(sigma_x(), {}, "sx");
    CHECK(find_functional_representations(*qubit, x).empty());
    // Oracle: none of the four maps from sp(sz) to sp(sx) rebuilds P_x.
    const auto z = eigendecompose(sigma_z());
    for (double image0 : {-1.0, 1.0}) {
      for (double image1 : {-1.0, 1.0}) {
        for (const auto& line : x.spectrum()) {
          Matrix sum = Matrix::Zero(2, 2);
          if (image0 == line.value) sum += z.projector(0);
          if (image1 == line.value) sum += z.projector(1);
          CHECK((sum - line.projector).norm() > 1e-3);
        }
      }
    }
  }
  SUBCASE("a catalog member has its trivial representation") {
    const auto reps = find_functional_representations(
        *catalog, eigendecompose(diagonal({1, 0, -1}), {}, "y"));
    REQUIRE(!reps.empty());
    CHECK(reps[0].base == 0);
    for (const auto& [x, y] : reps[0].map.table()) CHECK(x == y);
  }
}

TEST_CASE("cylinders of random variables") {
  const auto catalog = make_catalog({sigma_x(), sigma_z()});
  const auto pix = canonical_rv(catalog, 0);
  const auto piz = canonical_rv(catalog, 1);

  SUBCASE("full range selects every atom") {
    const std::vector<RandomVariable> gs{pix};
    CHECK(rv_cylinder(gs, {pix.range()}).size() == 4);
  }
  SUBCASE("empty set selects nothing") {
    const std::vector<RandomVariable> gs{pix};
    CHECK(rv_cylinder(gs, {{}}).empty());
  }
  SUBCASE("two coordinate constraints pin one atom") {
    // Canonical values, not nominal ones: sigma_x eigenvalues carry
    // floating-point residue and membership is exact comparison.
    const std::vector<RandomVariable> gs{piz, pix};
    const auto atoms = rv_cylinder(gs, {{piz.range()[1]}, {pix.range()[0]}});
    REQUIRE(atoms.size() == 1);
    CHECK(catalog->outcome_value(atoms[0], 1) == piz.range()[1]);
    CHECK(catalog->outcome_value(atoms[0], 0) == pix.range()[0]);
  }
  SUBCASE("catalog mismatch is rejected") {
    const auto other = make_catalog({sigma_x(), sigma_z()});
    const std::vector<RandomVariable> gs{pix, canonical_rv(other, 0)};
    CHECK_THROWS_AS(rv_cylinder(gs, {{1.0}, {1.0}}), ValidationError);
  }
}

TEST_CASE("noncontextual joint verification") {
  SUBCASE("single observables reproduce Born probabilities") {
    Rng rng(89);
    for (int trial = 0; trial < 5; ++trial) {
      const auto catalog = make_catalog({random_hermitian(rng, 3)});
      const auto m = build_global_measure(catalog);
      const auto rho = validate_state(random_density(rng, 3));
      auto report = verify_noncontextual_joint(m, rho,
                                               std::vector<std::size_t>{0}, 40, rng);
      CHECK(report.pass());
      CHECK(report.max_deviation <= 1e-10);
    }
  }
  SUBCASE("singlet pair anticorrelation probabilities") {
    const auto catalog = two_qubit_catalog();
    const auto m = build_global_measure(catalog);
    const auto rho = singlet_state();
    Rng rng(97);
    auto report = verify_noncontextual_joint(m, rho,
                                             std::vector<std::size_t>{0, 1}, 100, rng);
    CHECK(report.pass());

    // Joint outcome table {0, 1/2, 1/2, 0} through the measure.
    const auto nu = induce_signed_measure(m, rho);
    const std::vector<RandomVariable> gs{canonical_rv(catalog, 0),
                                         canonical_rv(catalog, 1)};
    const double same_up = nu.value_of(rv_cylinder(gs, {{1.0}, {1.0}}));
    const double opposite = nu.value_of(rv_cylinder(gs, {{1.0}, {-1.0}}));
    CHECK(same_up == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(opposite == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("maximally mixed two-qubit cylinders are quarters") {
    const auto catalog = two_qubit_catalog();
    const auto m = build_global_measure(catalog);
    const auto nu = induce_signed_measure(
        m, validate_state(Matrix::Identity(4, 4) / 4.0, {}, "mixed"));
    const std::vector<RandomVariable> gs{canonical_rv(catalog, 0),
                                         canonical_rv(catalog, 3)};
    for (double za : gs[0].range()) {
      for (double xb : gs[1].range()) {
        CHECK(nu.value_of(rv_cylinder(gs, {{za}, {xb}})) ==
              doctest::Approx(0.25).epsilon(1e-12));
      }
    }
  }
  SUBCASE("non-commuting subsets violate the contract") {
    const auto catalog = make_catalog({sigma_x(), sigma_z()});
    const auto m = build_global_measure(catalog);
    const auto rho = validate_state(Matrix::Identity(2, 2) / 2.0);
    Rng rng(101);
    CHECK_THROWS_AS(verify_noncontextual_joint(m, rho,
                                               std::vector<std::size_t>{0, 1}, 1, rng),
                    ContractViolation);
  }
}

TEST_CASE("qhv averages") {
  const auto catalog = two_qubit_catalog();
  const auto m = build_global_measure(catalog);
  const auto rho = singlet_state();
  const auto nu = induce_signed_measure(m, rho);

  SUBCASE("the constant one integrates to one") {
    const std::vector<RandomVariable> gs{canonical_rv(catalog, 0)};
    CHECK(qhv_average(nu, [](std::span<const double>) { return 1.0; }, gs) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("a single product is the quantum average") {
    const std::vector<RandomVariable> gs{canonical_rv(catalog, 0)};
    const double direct = expectation(rho, catalog->observable(0));
    CHECK(qhv_average(nu, [](std::span<const double> v) { return v[0]; }, gs) ==
          doctest::Approx(direct).epsilon(1e-12));
  }
  SUBCASE("perfect anticorrelation of the singlet") {
    const std::vector<RandomVariable> gs{canonical_rv(catalog, 0),
                                         canonical_rv(catalog, 1)};
    CHECK(qhv_average(nu,
                      [](std::span<const double> v) { return v[0] * v[1]; },
                      gs) == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("averaged functional relations") {
  SUBCASE("sum of non-commuting qubit observables") {
    const auto catalog = make_catalog({sigma_x(), sigma_z()});
    const auto m = build_global_measure(catalog);
    const auto rho = validate_state(diagonal({1, 0}));
    std::vector<KsCase> cases(1);
    cases[0].kind = KsCase::Kind::SumAverage;
    cases[0].observables = {0, 1};
    cases[0].label = "sx+sz";
    const auto report = verify_ks_average_relations(m, rho, cases);
    CHECK(report.pass());
    CHECK(report.max_deviation <= 1e-12);
    // The quantum side itself is 0 + 1 = 1 even though sp(sx+sz) = {-sqrt2, +sqrt2}.
    const Matrix sum = sigma_x() + sigma_z();
    CHECK((rho.matrix() * sum).trace().real() == doctest::Approx(1.0));
    CHECK(eigendecompose(sum).eigenvalue(1) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  }
  SUBCASE("squaring a dichotomic observable averages to one") {
    const auto catalog = make_catalog({diagonal({1, -1})});
    const auto m = build_global_measure(catalog);
    Rng rng(103);
    const auto rho = validate_state(random_density(rng, 2));
    std::vector<KsCase> cases(1);
    cases[0].kind = KsCase::Kind::FunctionOfObservable;
    cases[0].observables = {0};
    cases[0].function = SpectrumFunction{{{-1, 1}, {1, 1}}};
    cases[0].label = "square";
    const auto report = verify_ks_average_relations(m, rho, cases);
    CHECK(report.pass());
  }
  SUBCASE("commuting product across the singlet") {
    const auto catalog = two_qubit_catalog();
    const auto m = build_global_measure(catalog);
    std::vector<KsCase> cases(1);
    cases[0].kind = KsCase::Kind::ProductAverage;
    cases[0].observables = {0, 1};
    cases[0].label = "zz";
    const auto report = verify_ks_average_relations(m, singlet_state(), cases);
    CHECK(report.pass());
  }
  SUBCASE("product cases demand commuting observables") {
    const auto catalog = make_catalog({sigma_x(), sigma_z()});
    const auto m = build_global_measure(catalog);
    std::vector<KsCase> cases(1);
    cases[0].kind = KsCase::Kind::ProductAverage;
    cases[0].observables = {0, 1};
    cases[0].label = "bad";
    CHECK_THROWS_AS(
        verify_ks_average_relations(m, validate_state(diagonal({1, 0})), cases),
        ContractViolation);
  }
  SUBCASE("sum linearity holds for random non-commuting pairs") {
    Rng rng(107);
    for (int trial = 0; trial < 5; ++trial) {
      const auto catalog =
          make_catalog({random_hermitian(rng, 3), random_hermitian(rng, 3)});
      const auto m = build_global_measure(catalog);
      const auto rho = validate_state(random_density(rng, 3));
      std::vector<KsCase> cases(1);
      cases[0].kind = KsCase::Kind::SumAverage;
      cases[0].observables = {0, 1};
      cases[0].label = "sum";
      CHECK(verify_ks_average_relations(m, rho, cases).pass());
    }
  }
}

TEST_CASE("context invariance of functional representatives") {
  const auto catalog = make_catalog(
      {diagonal({1, 0, -1}), diagonal({1, 0, 1}), diagonal({2, 3, 5})});
  const auto m = build_global_measure(catalog);
  Rng seed_rng(109);
  const auto rho = validate_state(random_density(seed_rng, 3));
  const SpectrumFunction square{{{-1, 1}, {0, 0}, {1, 1}}};
  const FunctionalRepresentation rep{
      0, square, apply_function(square, catalog->observable(0))};

  SUBCASE("identity representations coincide pointwise") {
    const SpectrumFunction identity{{{-1, -1}, {0, 0}, {1, 1}}};
    const FunctionalRepresentation trivial{
        0, identity, apply_function(identity, catalog->observable(0))};
    Rng rng(127);
    const auto report = verify_context_invariance(
        m, rho, trivial, std::vector<std::size_t>{2}, 50, rng);
    CHECK(report.pass());
    // The composed table literally equals the coordinate projection.
    const auto composed = compose_rv(identity, canonical_rv(catalog, 0));
    CHECK(composed.table() == canonical_rv(catalog, 0).table());
  }
  SUBCASE("the squared representative agrees inside every partner cylinder") {
    Rng rng(131);
    const auto report = verify_context_invariance(
        m, rho, rep, std::vector<std::size_t>{2}, 100, rng);
    CHECK(report.pass());
    CHECK(report.max_deviation <= 1e-12);
  }
  SUBCASE("without partners the relation is the projector preimage identity") {
    Rng rng(137);
    const auto report =
        verify_context_invariance(m, rho, rep, std::vector<std::size_t>{}, 50, rng);
    CHECK(report.pass());
  }
  SUBCASE("targets outside the catalog go through the trace form") {
    const SpectrumFunction doubled{{{-1, -2}, {0, 0}, {1, 2}}};
    const FunctionalRepresentation outside{
        0, doubled, apply_function(doubled, catalog->observable(0))};
    CHECK(!catalog->find(outside.target.matrix()).has_value());
    Rng rng(139);
    const auto report = verify_context_invariance(
        m, rho, outside, std::vector<std::size_t>{2}, 100, rng);
    CHECK(report.pass());
    CHECK(report.max_deviation <= 1e-12);
  }
  SUBCASE("a non-commuting partner violates the contract") {
    const auto qubits = make_catalog({sigma_x(), sigma_z()});
    const auto qm = build_global_measure(qubits);
    const auto identity = SpectrumFunction::tabulate(
        qubits->observable(0), [](double v) { return v; });
    const FunctionalRepresentation bad{
        0, identity, apply_function(identity, qubits->observable(0))};
    Rng rng(149);
    CHECK_THROWS_AS(
        verify_context_invariance(qm, validate_state(diagonal({1, 0})), bad,
                                  std::vector<std::size_t>{1}, 1, rng),
        ContractViolation);
  }
}

TEST_CASE("representative preimages rebuild spectral projectors") {
  const auto catalog = make_catalog({diagonal({1, 0, -1}), diagonal({2, 3, 5})});
  const auto m = build_global_measure(catalog);

  SUBCASE("the canonical representative") {
    const SpectrumFunction identity{{{-1, -1}, {0, 0}, {1, 1}}};
    const FunctionalRepresentation rep{
        0, identity, apply_function(identity, catalog->observable(0))};
    const auto report = verify_representative_reconstruction(m, rep);
    CHECK(report.pass());
    CHECK(report.max_deviation <= 1e-12);
  }
  SUBCASE("the squared representative") {
    const SpectrumFunction square{{{-1, 1}, {0, 0}, {1, 1}}};
    const FunctionalRepresentation rep{
        0, square, apply_function(square, catalog->observable(0))};
    const auto report = verify_representative_reconstruction(m, rep);
    CHECK(report.pass());
    CHECK(report.max_deviation <= 1e-12);
  }
  SUBCASE("distinct observables reconstruct distinct spectral measures") {
    const std::vector<RandomVariable> g0{canonical_rv(catalog, 0)};
    const std::vector<RandomVariable> g1{canonical_rv(catalog, 1)};
    double best = 0.0;
    for (std::size_t mask = 1; mask < 8; ++mask) {
      std::vector<double> values0, values1;
      std::vector<std::size_t> points;
      for (std::size_t k = 0; k < 3; ++k) {
        if (mask & (std::size_t{1} << k)) {
          values0.push_back(catalog->observable(0).eigenvalue(k));
          values1.push_back(catalog->observable(1).eigenvalue(k));
          points.push_back(k);
        }
      }
      const Matrix rebuilt0 = m.sum_over(rv_cylinder(g0, {values0}));
      const Matrix rebuilt1 = m.sum_over(rv_cylinder(g1, {values1}));
      best = std::max(best, (rebuilt0 - rebuilt1).norm());
    }
    CHECK(best > 1e-3);
  }
}
