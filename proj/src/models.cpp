#include "qhv/models.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qhv/symmetrized.hpp"

namespace qhv {

RandomVariable::RandomVariable(CatalogPtr catalog, std::string label,
                               std::vector<double> table,
                               std::vector<double> range)
    : catalog_(std::move(catalog)),
      label_(std::move(label)),
      table_(std::move(table)),
      range_(std::move(range)) {
  if (!catalog_ || table_.size() != catalog_->atom_count()) {
    throw ValidationError("random variable '" + label_ +
                          "': table size must equal the atom count");
  }
  std::sort(range_.begin(), range_.end());
  range_.erase(std::unique(range_.begin(), range_.end()), range_.end());
  std::set<double> attained(table_.begin(), table_.end());
  if (std::vector<double>(attained.begin(), attained.end()) != range_) {
    throw ValidationError("random variable '" + label_ +
                          "': attained values differ from the claimed range");
  }
}

RandomVariable canonical_rv(CatalogPtr catalog, std::size_t index) {
  if (!catalog) throw ValidationError("canonical_rv: null catalog");
  const HermitianObservable& x = catalog->observable(index);
  std::vector<double> table;
  table.reserve(catalog->atom_count());
  for (AtomIndex a = 0; a < catalog->atom_count(); ++a) {
    table.push_back(catalog->outcome_value(a, index));
  }
  std::vector<double> range;
  range.reserve(x.spectrum_size());
  for (const auto& line : x.spectrum()) range.push_back(line.value);
  return RandomVariable(std::move(catalog), "pi[" + x.label() + "]",
                        std::move(table), std::move(range));
}

RandomVariable compose_rv(const SpectrumFunction& phi, const RandomVariable& g) {
  for (double v : g.range()) {
    if (!phi.defined_at(v)) {
      throw ValidationError("compose_rv: function undefined at value " +
                            std::to_string(v) + " of '" + g.label() + "'");
    }
  }
  std::vector<double> table;
  table.reserve(g.table().size());
  for (double v : g.table()) table.push_back(phi(v));
  std::vector<double> range;
  range.reserve(g.range().size());
  for (double v : g.range()) range.push_back(phi(v));
  return RandomVariable(g.catalog_ptr(), "f(" + g.label() + ")",
                        std::move(table), std::move(range));
}

std::vector<FunctionalRepresentation> find_functional_representations(
    const Catalog& catalog, const HermitianObservable& x) {
  if (x.dim() != catalog.dim()) {
    throw ValidationError("find_functional_representations: observable '" +
                          x.label() + "' does not match the catalog dimension");
  }
  const double tol = catalog.tolerances().check;
  std::vector<FunctionalRepresentation> reps;
  for (std::size_t yi = 0; yi < catalog.size(); ++yi) {
    const HermitianObservable& y = catalog.observable(yi);
    std::vector<std::pair<double, double>> table;
    bool ok = true;
    for (const auto& line : y.spectrum()) {
      // The y-eigenspace must sit inside exactly one eigenspace of x.
      bool assigned = false;
      for (const auto& target_line : x.spectrum()) {
        if ((target_line.projector * line.projector - line.projector).norm() <=
            tol) {
          table.emplace_back(line.value, target_line.value);
          assigned = true;
          break;
        }
      }
      if (!assigned) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    SpectrumFunction map{table};
    // Grouped sums must reproduce every eigenprojector of x.
    for (const auto& target_line : x.spectrum()) {
      Matrix sum = Matrix::Zero(x.dim(), x.dim());
      for (const auto& line : y.spectrum()) {
        if (map(line.value) == target_line.value) sum += line.projector;
      }
      if ((sum - target_line.projector).norm() > tol) {
        ok = false;
        break;
      }
    }
    if (ok) {
      reps.push_back(FunctionalRepresentation{yi, std::move(map), x});
    }
  }
  return reps;
}

namespace {

void require_shared_catalog(std::span<const RandomVariable> gs) {
  if (gs.empty()) {
    throw ValidationError("random-variable set must be non-empty");
  }
  for (const auto& g : gs) {
    if (g.catalog_ptr() != gs.front().catalog_ptr()) {
      throw ValidationError("random variables '" + gs.front().label() +
                            "' and '" + g.label() +
                            "' live on different catalogs");
    }
  }
}

bool contains_value(const std::vector<double>& values, double v) {
  return std::find(values.begin(), values.end(), v) != values.end();
}

}  // namespace

std::vector<AtomIndex> rv_cylinder(
    std::span<const RandomVariable> gs,
    const std::vector<std::vector<double>>& value_sets) {
  require_shared_catalog(gs);
  if (value_sets.size() != gs.size()) {
    throw ValidationError("rv_cylinder: one value set per variable required");
  }
  std::vector<AtomIndex> atoms;
  const std::uint64_t count = gs.front().catalog().atom_count();
  for (AtomIndex a = 0; a < count; ++a) {
    bool inside = true;
    for (std::size_t i = 0; i < gs.size(); ++i) {
      if (!contains_value(value_sets[i], gs[i](a))) {
        inside = false;
        break;
      }
    }
    if (inside) atoms.push_back(a);
  }
  return atoms;
}

std::vector<AtomIndex> rv_preimage(std::span<const RandomVariable> gs,
                                   const std::vector<std::vector<double>>& tuples) {
  require_shared_catalog(gs);
  std::set<std::vector<double>> wanted;
  for (const auto& tuple : tuples) {
    if (tuple.size() != gs.size()) {
      throw ValidationError("rv_preimage: tuple arity mismatch");
    }
    wanted.insert(tuple);
  }
  std::vector<AtomIndex> atoms;
  const std::uint64_t count = gs.front().catalog().atom_count();
  std::vector<double> probe(gs.size());
  for (AtomIndex a = 0; a < count; ++a) {
    for (std::size_t i = 0; i < gs.size(); ++i) probe[i] = gs[i](a);
    if (wanted.count(probe) != 0) atoms.push_back(a);
  }
  return atoms;
}

namespace {

void require_commuting_subset(const Catalog& catalog,
                              std::span<const std::size_t> subset,
                              const char* who) {
  std::set<std::size_t> seen;
  for (std::size_t i : subset) {
    if (i >= catalog.size()) {
      throw ValidationError(std::string(who) + ": index " + std::to_string(i) +
                            " out of range");
    }
    if (!seen.insert(i).second) {
      throw ValidationError(std::string(who) + ": index " + std::to_string(i) +
                            " repeated");
    }
  }
  for (std::size_t i = 0; i < subset.size(); ++i) {
    for (std::size_t j = i + 1; j < subset.size(); ++j) {
      const auto& a = catalog.observable(subset[i]);
      const auto& b = catalog.observable(subset[j]);
      if (!commute_check(a, b, catalog.tolerances())) {
        throw ContractViolation(std::string(who) + ": '" + a.label() +
                                "' and '" + b.label() + "' do not commute");
      }
    }
  }
}

}  // namespace

VerificationReport verify_noncontextual_joint(const OperatorValuedMeasure& m,
                                              const DensityState& rho,
                                              std::span<const std::size_t> subset,
                                              std::size_t trials, Rng& rng) {
  const Catalog& catalog = m.catalog();
  require_commuting_subset(catalog, subset, "verify_noncontextual_joint");
  if (subset.empty()) {
    throw ValidationError("verify_noncontextual_joint: empty subset");
  }
  const double tol = catalog.tolerances().check;
  const SignedMeasure nu = induce_signed_measure(m, rho);

  std::vector<RandomVariable> gs;
  std::vector<const HermitianObservable*> obs;
  for (std::size_t i : subset) {
    gs.push_back(canonical_rv(m.catalog_ptr(), i));
    obs.push_back(&catalog.observable(i));
  }

  VerificationReport report;
  report.name = "noncontextual-joint";
  for (std::size_t t = 0; t < trials; ++t) {
    // Random set of outcome tuples over the sub-collection.
    std::vector<std::vector<std::size_t>> digit_tuples{{}};
    for (std::size_t i : subset) {
      std::vector<std::vector<std::size_t>> next;
      for (const auto& prefix : digit_tuples) {
        for (std::size_t p = 0; p < catalog.spectrum_size(i); ++p) {
          auto tup = prefix;
          tup.push_back(p);
          next.push_back(std::move(tup));
        }
      }
      digit_tuples = std::move(next);
    }
    std::vector<std::vector<std::size_t>> chosen;
    for (const auto& tuple : digit_tuples) {
      if (rng.coin()) chosen.push_back(tuple);
    }

    Matrix joint = Matrix::Zero(catalog.dim(), catalog.dim());
    std::vector<std::vector<double>> value_tuples;
    for (const auto& tuple : chosen) {
      Matrix prod = obs[0]->projector(tuple[0]);
      std::vector<double> values{obs[0]->eigenvalue(tuple[0])};
      for (std::size_t k = 1; k < tuple.size(); ++k) {
        prod *= obs[k]->projector(tuple[k]);
        values.push_back(obs[k]->eigenvalue(tuple[k]));
      }
      joint += prod;
      value_tuples.push_back(std::move(values));
    }

    const double born = (rho.matrix() * joint).trace().real();
    const double model = nu.value_of(rv_preimage(gs, value_tuples));
    report.record(std::abs(born - model), tol);
    report.record(std::max(0.0, -model), tol);  // nonnegativity on commuting cylinders
  }
  return report;
}

double qhv_average(const SignedMeasure& nu,
                   const std::function<double(std::span<const double>)>& psi,
                   std::span<const RandomVariable> gs) {
  require_shared_catalog(gs);
  if (gs.front().catalog_ptr() != nu.catalog_ptr()) {
    throw ValidationError("qhv_average: variables and measure on different catalogs");
  }
  double sum = 0.0;
  std::vector<double> args(gs.size());
  for (AtomIndex a = 0; a < nu.atom_count(); ++a) {
    for (std::size_t i = 0; i < gs.size(); ++i) args[i] = gs[i](a);
    sum += psi(args) * nu.value(a);
  }
  return sum;
}

VerificationReport verify_ks_average_relations(const OperatorValuedMeasure& m,
                                               const DensityState& rho,
                                               std::span<const KsCase> cases) {
  const Catalog& catalog = m.catalog();
  const double tol = catalog.tolerances().check;
  const CatalogPtr catalog_ptr = m.catalog_ptr();
  const SignedMeasure nu = induce_signed_measure(m, rho);

  VerificationReport report;
  report.name = "ks-averages";
  for (const KsCase& c : cases) {
    std::vector<RandomVariable> gs;
    for (std::size_t i : c.observables) {
      gs.push_back(canonical_rv(catalog_ptr, i));
    }
    double quantum = 0.0;
    double model = 0.0;
    switch (c.kind) {
      case KsCase::Kind::FunctionOfObservable: {
        if (c.observables.size() != 1) {
          throw ValidationError("ks case '" + c.label +
                                "': function cases take exactly one observable");
        }
        const auto& x = catalog.observable(c.observables[0]);
        quantum = expectation(rho, apply_function(c.function, x,
                                                  catalog.tolerances()));
        const SpectrumFunction& fn = c.function;
        model = qhv_average(
            nu, [&fn](std::span<const double> v) { return fn(v[0]); }, gs);
        break;
      }
      case KsCase::Kind::SumAverage: {
        if (c.observables.empty()) {
          throw ValidationError("ks case '" + c.label + "': empty observable list");
        }
        Matrix sum = Matrix::Zero(catalog.dim(), catalog.dim());
        for (std::size_t i : c.observables) sum += catalog.observable(i).matrix();
        quantum = (rho.matrix() * sum).trace().real();
        model = qhv_average(
            nu,
            [](std::span<const double> v) {
              double s = 0.0;
              for (double x : v) s += x;
              return s;
            },
            gs);
        break;
      }
      case KsCase::Kind::ProductAverage: {
        require_commuting_subset(catalog, c.observables,
                                 ("ks case '" + c.label + "'").c_str());
        if (c.observables.empty()) {
          throw ValidationError("ks case '" + c.label + "': empty observable list");
        }
        Matrix prod = catalog.observable(c.observables[0]).matrix();
        for (std::size_t k = 1; k < c.observables.size(); ++k) {
          prod *= catalog.observable(c.observables[k]).matrix();
        }
        quantum = (rho.matrix() * prod).trace().real();
        model = qhv_average(
            nu,
            [](std::span<const double> v) {
              double p = 1.0;
              for (double x : v) p *= x;
              return p;
            },
            gs);
        break;
      }
    }
    const double deviation = std::abs(quantum - model);
    report.record(deviation, tol);
    report.notes.push_back(c.label + ": quantum=" + std::to_string(quantum) +
                           " model=" + std::to_string(model));
  }
  return report;
}

namespace {

std::vector<double> random_value_subset(Rng& rng,
                                        const std::vector<double>& range) {
  std::vector<double> out;
  for (double v : range) {
    if (rng.coin()) out.push_back(v);
  }
  return out;
}

}  // namespace

VerificationReport verify_context_invariance(const OperatorValuedMeasure& m,
                                             const DensityState& rho,
                                             const FunctionalRepresentation& rep,
                                             std::span<const std::size_t> partners,
                                             std::size_t trials, Rng& rng) {
  const Catalog& catalog = m.catalog();
  const Tolerances& tol = catalog.tolerances();
  const HermitianObservable& base = catalog.observable(rep.base);
  const HermitianObservable rebuilt = apply_function(rep.map, base, tol);
  if ((rebuilt.matrix() - rep.target.matrix()).norm() > tol.check) {
    throw ValidationError("verify_context_invariance: representation of '" +
                          rep.target.label() + "' does not rebuild the target");
  }
  for (std::size_t p : partners) {
    const auto& partner = catalog.observable(p);
    if (!commute_check(rep.target, partner, tol)) {
      throw ContractViolation("verify_context_invariance: target '" +
                              rep.target.label() + "' does not commute with '" +
                              partner.label() + "'");
    }
  }

  const SignedMeasure nu = induce_signed_measure(m, rho);
  const auto target_index = catalog.find(rep.target.matrix());
  const RandomVariable composed =
      compose_rv(rep.map, canonical_rv(m.catalog_ptr(), rep.base));

  std::vector<RandomVariable> partner_vars;
  for (std::size_t p : partners) {
    partner_vars.push_back(canonical_rv(m.catalog_ptr(), p));
  }

  VerificationReport report;
  report.name = "context-invariance";
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<double> target_set;
    for (const auto& line : rep.target.spectrum()) {
      if (rng.coin()) target_set.push_back(line.value);
    }
    std::vector<std::vector<double>> partner_sets;
    for (std::size_t k = 0; k < partners.size(); ++k) {
      partner_sets.push_back(random_value_subset(rng, partner_vars[k].range()));
    }

    std::vector<RandomVariable> composed_side{composed};
    composed_side.insert(composed_side.end(), partner_vars.begin(),
                         partner_vars.end());
    std::vector<std::vector<double>> sets{target_set};
    sets.insert(sets.end(), partner_sets.begin(), partner_sets.end());
    const double via_composed = nu.value_of(rv_cylinder(composed_side, sets));

    double via_target = 0.0;
    if (target_index.has_value()) {
      std::vector<RandomVariable> canonical_side{
          canonical_rv(m.catalog_ptr(), *target_index)};
      canonical_side.insert(canonical_side.end(), partner_vars.begin(),
                            partner_vars.end());
      via_target = nu.value_of(rv_cylinder(canonical_side, sets));
    } else {
      // Trace form against the spectral projectors directly.
      std::vector<Matrix> factors;
      std::vector<std::size_t> points;
      for (std::size_t k = 0; k < rep.target.spectrum_size(); ++k) {
        if (contains_value(target_set, rep.target.eigenvalue(k))) {
          points.push_back(k);
        }
      }
      factors.push_back(rep.target.projector_of(points));
      for (std::size_t k = 0; k < partners.size(); ++k) {
        const auto& partner = catalog.observable(partners[k]);
        std::vector<std::size_t> ppoints;
        for (std::size_t q = 0; q < partner.spectrum_size(); ++q) {
          if (contains_value(partner_sets[k], partner.eigenvalue(q))) {
            ppoints.push_back(q);
          }
        }
        factors.push_back(partner.projector_of(ppoints));
      }
      via_target =
          (rho.matrix() * sym_product(factors, tol)).trace().real();
    }
    report.record(std::abs(via_target - via_composed), tol.check);
  }

  // Product averages with the representative substituted for the target.
  {
    Matrix prod = rep.target.matrix();
    for (std::size_t p : partners) prod *= catalog.observable(p).matrix();
    const double quantum = (rho.matrix() * prod).trace().real();
    double model = 0.0;
    for (AtomIndex a = 0; a < nu.atom_count(); ++a) {
      double term = composed(a);
      for (const auto& g : partner_vars) term *= g(a);
      model += term * nu.value(a);
    }
    report.record(std::abs(quantum - model), tol.check);
    report.notes.push_back("product-average: quantum=" + std::to_string(quantum) +
                           " model=" + std::to_string(model));
  }
  return report;
}

VerificationReport verify_representative_reconstruction(
    const OperatorValuedMeasure& m, const FunctionalRepresentation& rep) {
  const Catalog& catalog = m.catalog();
  const Tolerances& tol = catalog.tolerances();
  const RandomVariable g =
      compose_rv(rep.map, canonical_rv(m.catalog_ptr(), rep.base));

  VerificationReport report;
  report.name = "representative-reconstruction";
  const std::size_t s = rep.target.spectrum_size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << s); ++mask) {
    std::vector<double> values;
    std::vector<std::size_t> points;
    for (std::size_t k = 0; k < s; ++k) {
      if (mask & (std::size_t{1} << k)) {
        values.push_back(rep.target.eigenvalue(k));
        points.push_back(k);
      }
    }
    const std::vector<RandomVariable> gs{g};
    const Matrix lhs = m.sum_over(rv_cylinder(gs, {values}));
    const Matrix rhs = rep.target.projector_of(points);
    report.record((lhs - rhs).norm(), tol.check);
  }
  return report;
}

}  // namespace qhv
