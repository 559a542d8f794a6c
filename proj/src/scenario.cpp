#include "qhv/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qhv/extension.hpp"
#include "qhv/models.hpp"
#include "qhv/multipartite.hpp"
#include "qhv/rng.hpp"
#include "qhv/spectral.hpp"
#include "qhv/symmetrized.hpp"

namespace qhv {

namespace {

using nlohmann::json;

const std::set<std::string>& known_query_types() {
  static const std::set<std::string> types{
      "verify-lemma1",  "verify-pushforward",       "verify-theorem2",
      "verify-context-invariance", "ks-averages",   "lqhv",
      "chsh",           "werner-scan",              "expect"};
  return types;
}

[[noreturn]] void fail(const std::string& message) {
  throw ScenarioError(message);
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  for (const auto& item : obj.items()) {
    if (allowed.count(item.key()) == 0) {
      fail(where + ": unknown field '" + item.key() + "'");
    }
  }
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where + ": expected a number");
  return j.get<double>();
}

std::size_t as_count(const json& j, const std::string& where) {
  if (!j.is_number_unsigned()) fail(where + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where + ": expected a string");
  return j.get<std::string>();
}

Complex as_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail(where + ": complex entries must be [re, im] pairs");
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

Matrix as_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where + ": expected a matrix (array of rows)");
  const std::size_t d = j.size();
  Matrix m(d, d);
  for (std::size_t r = 0; r < d; ++r) {
    if (!j[r].is_array() || j[r].size() != d) {
      fail(where + ": matrix must be square, row " + std::to_string(r) +
           " has wrong length");
    }
    for (std::size_t c = 0; c < d; ++c) {
      m(r, c) = as_complex(j[r][c], where + "[" + std::to_string(r) + "][" +
                                        std::to_string(c) + "]");
    }
  }
  return m;
}

std::vector<std::string> as_name_list(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where + ": expected an array of names");
  std::vector<std::string> names;
  for (const auto& item : j) names.push_back(as_string(item, where));
  return names;
}

std::vector<std::pair<double, double>> as_value_table(const json& j,
                                                      const std::string& where) {
  if (!j.is_array()) fail(where + ": expected an array of [x, y] pairs");
  std::vector<std::pair<double, double>> table;
  for (const auto& item : j) {
    if (!item.is_array() || item.size() != 2) {
      fail(where + ": entries must be [x, y] pairs");
    }
    table.emplace_back(as_number(item[0], where), as_number(item[1], where));
  }
  std::sort(table.begin(), table.end());
  return table;
}

struct LineCol {
  std::size_t line = 1;
  std::size_t column = 1;
};

LineCol locate(const std::string& text, std::size_t byte) {
  LineCol lc;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++lc.line;
      lc.column = 1;
    } else {
      ++lc.column;
    }
  }
  return lc;
}

void require_fields(const json& q, std::initializer_list<const char*> fields,
                    const std::string& where) {
  for (const char* f : fields) {
    if (!q.contains(f)) fail(where + ": missing required field '" + f + "'");
  }
}

ScenarioQuery parse_query(const json& q, std::size_t index) {
  const std::string where = "query " + std::to_string(index);
  if (!q.is_object()) fail(where + ": expected an object");
  require_fields(q, {"type"}, where);
  ScenarioQuery query;
  query.type = as_string(q.at("type"), where + ".type");
  if (known_query_types().count(query.type) == 0) {
    fail(where + ": unknown query type '" + query.type + "'");
  }
  const std::string ctx = where + " (" + query.type + ")";

  if (q.contains("trials")) query.trials = as_count(q.at("trials"), ctx + ".trials");

  if (query.type == "expect") {
    check_keys(q, {"type", "state", "observable"}, ctx);
    require_fields(q, {"state", "observable"}, ctx);
    query.state = as_string(q.at("state"), ctx + ".state");
    query.observable = as_string(q.at("observable"), ctx + ".observable");
  } else if (query.type == "verify-lemma1" || query.type == "verify-pushforward") {
    check_keys(q, {"type", "catalog", "trials"}, ctx);
    require_fields(q, {"catalog"}, ctx);
    query.catalog = as_string(q.at("catalog"), ctx + ".catalog");
  } else if (query.type == "verify-theorem2") {
    check_keys(q, {"type", "catalog", "state", "subset", "trials"}, ctx);
    require_fields(q, {"catalog", "state", "subset"}, ctx);
    query.catalog = as_string(q.at("catalog"), ctx + ".catalog");
    query.state = as_string(q.at("state"), ctx + ".state");
    query.subset = as_name_list(q.at("subset"), ctx + ".subset");
  } else if (query.type == "verify-context-invariance") {
    check_keys(q, {"type", "catalog", "state", "base", "function", "partners",
                   "trials"},
               ctx);
    require_fields(q, {"catalog", "state", "base", "function"}, ctx);
    query.catalog = as_string(q.at("catalog"), ctx + ".catalog");
    query.state = as_string(q.at("state"), ctx + ".state");
    query.base = as_string(q.at("base"), ctx + ".base");
    query.function = as_value_table(q.at("function"), ctx + ".function");
    if (q.contains("partners")) {
      query.partners = as_name_list(q.at("partners"), ctx + ".partners");
    }
  } else if (query.type == "ks-averages") {
    check_keys(q, {"type", "catalog", "state", "cases"}, ctx);
    require_fields(q, {"catalog", "state", "cases"}, ctx);
    query.catalog = as_string(q.at("catalog"), ctx + ".catalog");
    query.state = as_string(q.at("state"), ctx + ".state");
    if (!q.at("cases").is_array()) fail(ctx + ".cases: expected an array");
    for (std::size_t k = 0; k < q.at("cases").size(); ++k) {
      const json& c = q.at("cases")[k];
      const std::string cwhere = ctx + ".cases[" + std::to_string(k) + "]";
      if (!c.is_object()) fail(cwhere + ": expected an object");
      check_keys(c, {"kind", "observables", "function"}, cwhere);
      require_fields(c, {"kind", "observables"}, cwhere);
      KsCaseSpec spec;
      spec.kind = as_string(c.at("kind"), cwhere + ".kind");
      if (spec.kind != "function" && spec.kind != "sum" && spec.kind != "product") {
        fail(cwhere + ".kind: expected 'function', 'sum' or 'product'");
      }
      spec.observables = as_name_list(c.at("observables"), cwhere + ".observables");
      if (spec.kind == "function") {
        require_fields(c, {"function"}, cwhere);
        spec.function = as_value_table(c.at("function"), cwhere + ".function");
      } else if (c.contains("function")) {
        fail(cwhere + ": 'function' only applies to kind 'function'");
      }
      query.cases.push_back(std::move(spec));
    }
  } else if (query.type == "lqhv") {
    check_keys(q, {"type", "state", "sites", "trials"}, ctx);
    require_fields(q, {"state", "sites"}, ctx);
    query.state = as_string(q.at("state"), ctx + ".state");
    if (!q.at("sites").is_array()) fail(ctx + ".sites: expected an array");
    for (const auto& site : q.at("sites")) {
      query.sites.push_back(as_name_list(site, ctx + ".sites"));
    }
  } else if (query.type == "chsh") {
    check_keys(q, {"type", "state", "a", "b"}, ctx);
    require_fields(q, {"state", "a", "b"}, ctx);
    query.state = as_string(q.at("state"), ctx + ".state");
    query.alice = as_name_list(q.at("a"), ctx + ".a");
    query.bob = as_name_list(q.at("b"), ctx + ".b");
  } else if (query.type == "werner-scan") {
    check_keys(q, {"type", "a", "b", "grid"}, ctx);
    require_fields(q, {"a", "b", "grid"}, ctx);
    query.alice = as_name_list(q.at("a"), ctx + ".a");
    query.bob = as_name_list(q.at("b"), ctx + ".b");
    if (!q.at("grid").is_array()) fail(ctx + ".grid: expected an array of numbers");
    for (const auto& v : q.at("grid")) {
      query.grid.push_back(as_number(v, ctx + ".grid"));
    }
  }
  return query;
}

Eigen::Index global_dimension(const ScenarioDocument& doc) {
  Eigen::Index d = 1;
  for (Eigen::Index local : doc.dimensions) d *= local;
  return d;
}

bool dimension_allowed(const ScenarioDocument& doc, Eigen::Index d) {
  if (d == global_dimension(doc)) return true;
  return std::find(doc.dimensions.begin(), doc.dimensions.end(), d) !=
         doc.dimensions.end();
}

const Matrix& named_observable(const ScenarioDocument& doc,
                               const std::string& name,
                               const std::string& where) {
  auto it = doc.observables.find(name);
  if (it == doc.observables.end()) {
    fail(where + ": undeclared observable '" + name + "'");
  }
  return it->second;
}

void validate_semantics(const ScenarioDocument& doc) {
  for (const auto& [name, matrix] : doc.observables) {
    if (!dimension_allowed(doc, matrix.rows())) {
      fail("observable '" + name + "': dimension " +
           std::to_string(matrix.rows()) + " does not match the document");
    }
    try {
      eigendecompose(matrix, doc.tolerances, name);
    } catch (const std::exception& e) {
      fail(std::string("observable '") + name + "': " + e.what());
    }
  }
  for (const auto& [name, matrix] : doc.states) {
    if (!dimension_allowed(doc, matrix.rows())) {
      fail("state '" + name + "': dimension " + std::to_string(matrix.rows()) +
           " does not match the document");
    }
    try {
      validate_state(matrix, doc.tolerances, name);
    } catch (const std::exception& e) {
      fail(std::string("state '") + name + "': " + e.what());
    }
  }
  for (const auto& [name, members] : doc.catalogs) {
    if (members.empty()) fail("catalog '" + name + "' is empty");
    Eigen::Index d = -1;
    for (std::size_t i = 0; i < members.size(); ++i) {
      const Matrix& m =
          named_observable(doc, members[i], "catalog '" + name + "'");
      if (d < 0) d = m.rows();
      if (m.rows() != d) {
        fail("catalog '" + name + "': member dimensions differ");
      }
      for (std::size_t j = 0; j < i; ++j) {
        const Matrix& other = doc.observables.at(members[j]);
        if ((m - other).norm() <= doc.tolerances.check) {
          fail("catalog '" + name + "': members '" + members[j] + "' and '" +
               members[i] + "' coincide");
        }
      }
    }
  }

  auto check_state = [&](const ScenarioQuery& q, const std::string& where) {
    if (doc.states.find(q.state) == doc.states.end()) {
      fail(where + ": undeclared state '" + q.state + "'");
    }
  };
  auto check_catalog = [&](const ScenarioQuery& q,
                           const std::string& where) -> const std::vector<std::string>& {
    auto it = doc.catalogs.find(q.catalog);
    if (it == doc.catalogs.end()) {
      fail(where + ": undeclared catalog '" + q.catalog + "'");
    }
    return it->second;
  };
  auto check_member = [&](const std::vector<std::string>& members,
                          const std::string& name, const std::string& where) {
    if (std::find(members.begin(), members.end(), name) == members.end()) {
      fail(where + ": '" + name + "' is not a member of the query's catalog");
    }
  };

  for (std::size_t i = 0; i < doc.queries.size(); ++i) {
    const ScenarioQuery& q = doc.queries[i];
    const std::string where = "query " + std::to_string(i) + " (" + q.type + ")";
    if (q.type == "expect") {
      check_state(q, where);
      const Matrix& x = named_observable(doc, q.observable, where);
      if (x.rows() != doc.states.at(q.state).rows()) {
        fail(where + ": observable and state dimensions differ");
      }
    } else if (q.type == "verify-lemma1" || q.type == "verify-pushforward") {
      check_catalog(q, where);
    } else if (q.type == "verify-theorem2") {
      const auto& members = check_catalog(q, where);
      check_state(q, where);
      for (const auto& name : q.subset) check_member(members, name, where);
    } else if (q.type == "verify-context-invariance") {
      const auto& members = check_catalog(q, where);
      check_state(q, where);
      check_member(members, q.base, where);
      for (const auto& name : q.partners) check_member(members, name, where);
      if (q.function.empty()) fail(where + ": empty function table");
    } else if (q.type == "ks-averages") {
      const auto& members = check_catalog(q, where);
      check_state(q, where);
      for (const auto& c : q.cases) {
        for (const auto& name : c.observables) check_member(members, name, where);
      }
    } else if (q.type == "lqhv") {
      check_state(q, where);
      if (q.sites.size() != doc.dimensions.size()) {
        fail(where + ": expected one site list per declared dimension");
      }
      for (std::size_t s = 0; s < q.sites.size(); ++s) {
        if (q.sites[s].empty()) fail(where + ": site " + std::to_string(s) + " empty");
        for (const auto& name : q.sites[s]) {
          const Matrix& x = named_observable(doc, name, where);
          if (x.rows() != doc.dimensions[s]) {
            fail(where + ": observable '" + name + "' does not match site " +
                 std::to_string(s));
          }
        }
      }
      if (doc.states.at(q.state).rows() != global_dimension(doc)) {
        fail(where + ": state must live on the product space");
      }
    } else if (q.type == "chsh" || q.type == "werner-scan") {
      if (doc.dimensions.size() != 2) {
        fail(where + ": requires a two-site document dimension");
      }
      if (q.alice.size() != 2 || q.bob.size() != 2) {
        fail(where + ": exactly two settings per side required");
      }
      for (std::size_t s = 0; s < 2; ++s) {
        for (const auto& name : (s == 0 ? q.alice : q.bob)) {
          const Matrix& x = named_observable(doc, name, where);
          if (x.rows() != doc.dimensions[s]) {
            fail(where + ": observable '" + name + "' does not match site " +
                 std::to_string(s));
          }
        }
      }
      if (q.type == "chsh") {
        check_state(q, where);
        if (doc.states.at(q.state).rows() != global_dimension(doc)) {
          fail(where + ": state must live on the product space");
        }
      } else if (doc.dimensions != std::vector<Eigen::Index>{2, 2}) {
        fail(where + ": requires document dimension [2, 2]");
      }
    }
  }
}

std::string g12(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return buffer;
}

}  // namespace

ScenarioDocument parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const LineCol lc = locate(text, e.byte > 0 ? e.byte - 1 : 0);
    fail("syntax error at line " + std::to_string(lc.line) + ", column " +
         std::to_string(lc.column) + ": " + e.what());
  }
  if (!j.is_object()) fail("document: expected a JSON object");
  check_keys(j, {"dimension", "observables", "states", "catalogs", "queries",
                 "tolerances"},
             "document");
  if (!j.contains("dimension")) fail("document: missing required field 'dimension'");

  ScenarioDocument doc;
  const json& dim = j.at("dimension");
  auto read_dim = [](const json& v) -> Eigen::Index {
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() < 1) {
      fail("dimension: expected a positive integer");
    }
    return static_cast<Eigen::Index>(v.get<std::uint64_t>());
  };
  if (dim.is_array()) {
    if (dim.empty()) fail("dimension: empty site list");
    for (const auto& v : dim) doc.dimensions.push_back(read_dim(v));
  } else {
    doc.dimensions.push_back(read_dim(dim));
  }

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) fail("tolerances: expected an object");
    check_keys(t, {"check", "herm", "eig"}, "tolerances");
    if (t.contains("check")) doc.tolerances.check = as_number(t.at("check"), "tolerances.check");
    if (t.contains("herm")) doc.tolerances.herm = as_number(t.at("herm"), "tolerances.herm");
    if (t.contains("eig")) doc.tolerances.eig = as_number(t.at("eig"), "tolerances.eig");
    for (double v : {doc.tolerances.check, doc.tolerances.herm, doc.tolerances.eig}) {
      if (!(v > 0.0) || !std::isfinite(v)) fail("tolerances: values must be positive");
    }
  }

  if (j.contains("observables")) {
    if (!j.at("observables").is_object()) fail("observables: expected an object");
    for (const auto& item : j.at("observables").items()) {
      doc.observables.emplace(item.key(),
                              as_matrix(item.value(), "observable '" + item.key() + "'"));
    }
  }
  if (j.contains("states")) {
    if (!j.at("states").is_object()) fail("states: expected an object");
    for (const auto& item : j.at("states").items()) {
      doc.states.emplace(item.key(),
                         as_matrix(item.value(), "state '" + item.key() + "'"));
    }
  }
  if (j.contains("catalogs")) {
    if (!j.at("catalogs").is_object()) fail("catalogs: expected an object");
    for (const auto& item : j.at("catalogs").items()) {
      doc.catalogs.emplace(item.key(),
                           as_name_list(item.value(), "catalog '" + item.key() + "'"));
    }
  }
  if (j.contains("queries")) {
    if (!j.at("queries").is_array()) fail("queries: expected an array");
    for (std::size_t i = 0; i < j.at("queries").size(); ++i) {
      doc.queries.push_back(parse_query(j.at("queries")[i], i));
    }
  }

  validate_semantics(doc);
  return doc;
}

std::string canonical_scenario_json(const ScenarioDocument& doc) {
  json j;
  if (doc.dimensions.size() == 1) {
    j["dimension"] = static_cast<std::uint64_t>(doc.dimensions[0]);
  } else {
    json dims = json::array();
    for (Eigen::Index d : doc.dimensions) dims.push_back(static_cast<std::uint64_t>(d));
    j["dimension"] = dims;
  }
  auto matrix_to_json = [](const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
      }
      rows.push_back(row);
    }
    return rows;
  };
  if (!doc.observables.empty()) {
    json obs = json::object();
    for (const auto& [name, m] : doc.observables) obs[name] = matrix_to_json(m);
    j["observables"] = obs;
  }
  if (!doc.states.empty()) {
    json states = json::object();
    for (const auto& [name, m] : doc.states) states[name] = matrix_to_json(m);
    j["states"] = states;
  }
  if (!doc.catalogs.empty()) {
    json catalogs = json::object();
    for (const auto& [name, members] : doc.catalogs) catalogs[name] = members;
    j["catalogs"] = catalogs;
  }
  auto table_to_json = [](const std::vector<std::pair<double, double>>& table) {
    json out = json::array();
    for (const auto& [x, y] : table) out.push_back(json::array({x, y}));
    return out;
  };
  json queries = json::array();
  for (const auto& q : doc.queries) {
    json entry;
    entry["type"] = q.type;
    if (q.type == "expect") {
      entry["state"] = q.state;
      entry["observable"] = q.observable;
    } else if (q.type == "verify-lemma1" || q.type == "verify-pushforward") {
      entry["catalog"] = q.catalog;
      entry["trials"] = q.trials;
    } else if (q.type == "verify-theorem2") {
      entry["catalog"] = q.catalog;
      entry["state"] = q.state;
      entry["subset"] = q.subset;
      entry["trials"] = q.trials;
    } else if (q.type == "verify-context-invariance") {
      entry["catalog"] = q.catalog;
      entry["state"] = q.state;
      entry["base"] = q.base;
      entry["function"] = table_to_json(q.function);
      if (!q.partners.empty()) entry["partners"] = q.partners;
      entry["trials"] = q.trials;
    } else if (q.type == "ks-averages") {
      entry["catalog"] = q.catalog;
      entry["state"] = q.state;
      json cases = json::array();
      for (const auto& c : q.cases) {
        json cj;
        cj["kind"] = c.kind;
        cj["observables"] = c.observables;
        if (c.kind == "function") cj["function"] = table_to_json(c.function);
        cases.push_back(cj);
      }
      entry["cases"] = cases;
    } else if (q.type == "lqhv") {
      entry["state"] = q.state;
      entry["sites"] = q.sites;
      entry["trials"] = q.trials;
    } else if (q.type == "chsh") {
      entry["state"] = q.state;
      entry["a"] = q.alice;
      entry["b"] = q.bob;
    } else if (q.type == "werner-scan") {
      entry["a"] = q.alice;
      entry["b"] = q.bob;
      entry["grid"] = q.grid;
    }
    queries.push_back(entry);
  }
  j["queries"] = queries;
  j["tolerances"] = {{"check", doc.tolerances.check},
                     {"herm", doc.tolerances.herm},
                     {"eig", doc.tolerances.eig}};
  return j.dump(2) + "\n";
}

bool operator==(const ScenarioDocument& a, const ScenarioDocument& b) {
  return canonical_scenario_json(a) == canonical_scenario_json(b);
}

namespace {

// Lazily built named entities shared across the queries of one run.
struct RunContext {
  const ScenarioDocument& doc;
  std::uint64_t atom_cap;
  std::map<std::string, HermitianObservable> observables;
  std::map<std::string, DensityState> states;
  std::map<std::string, CatalogPtr> catalogs;
  std::map<std::string, OperatorValuedMeasure> measures;

  const HermitianObservable& observable(const std::string& name) {
    auto it = observables.find(name);
    if (it == observables.end()) {
      it = observables
               .emplace(name, eigendecompose(doc.observables.at(name),
                                             doc.tolerances, name))
               .first;
    }
    return it->second;
  }

  const DensityState& state(const std::string& name) {
    auto it = states.find(name);
    if (it == states.end()) {
      it = states.emplace(name, validate_state(doc.states.at(name),
                                               doc.tolerances, name))
               .first;
    }
    return it->second;
  }

  const CatalogPtr& catalog(const std::string& name) {
    auto it = catalogs.find(name);
    if (it == catalogs.end()) {
      std::vector<HermitianObservable> members;
      for (const auto& member : doc.catalogs.at(name)) {
        members.push_back(observable(member));
      }
      it = catalogs
               .emplace(name, std::make_shared<const Catalog>(
                                  std::move(members), doc.tolerances, atom_cap))
               .first;
    }
    return it->second;
  }

  const OperatorValuedMeasure& measure(const std::string& name) {
    auto it = measures.find(name);
    if (it == measures.end()) {
      it = measures.emplace(name, build_global_measure(catalog(name))).first;
    }
    return it->second;
  }

  std::size_t member_index(const std::string& catalog_name,
                           const std::string& member) const {
    const auto& members = doc.catalogs.at(catalog_name);
    const auto it = std::find(members.begin(), members.end(), member);
    return static_cast<std::size_t>(it - members.begin());
  }
};

CheckRow to_check_row(const VerificationReport& report) {
  CheckRow row;
  row.check = report.name;
  row.checks = report.checks;
  row.failures = report.failures;
  row.max_deviation = report.max_deviation;
  row.status = report.pass() ? "pass" : "fail";
  return row;
}

void append_negativity_notes(QueryResult& result, const SignedMeasure& nu) {
  const NegativityDiagnostics diag = negativity_diagnostics(nu);
  result.notes.push_back("total_variation=" + g12(diag.total_variation) +
                         " min_atom=" + g12(diag.min_atom) + " negative_atoms=" +
                         std::to_string(diag.negative_atom_count));
  if (nu.atom_count() <= 32) {
    std::string atoms = "atoms:";
    for (AtomIndex a = 0; a < nu.atom_count(); ++a) {
      atoms += " " + g12(nu.value(a));
    }
    result.notes.push_back(atoms);
  }
}

QueryResult run_query(RunContext& ctx, const ScenarioQuery& q, std::size_t index,
                      std::uint64_t seed) {
  QueryResult result;
  result.index = index;
  result.type = q.type;
  Rng rng(derive_seed(seed, index));
  const Tolerances& tol = ctx.doc.tolerances;

  if (q.type == "expect") {
    result.value_header = {"value"};
    result.value_rows = {{expectation(ctx.state(q.state), ctx.observable(q.observable))}};
  } else if (q.type == "verify-lemma1") {
    const CatalogPtr& catalog = ctx.catalog(q.catalog);
    result.checks.push_back(
        to_check_row(verify_permutation_invariance(*catalog, q.trials, rng)));
    result.checks.push_back(
        to_check_row(verify_marginal_consistency(*catalog, q.trials, rng)));
  } else if (q.type == "verify-pushforward") {
    result.checks.push_back(
        to_check_row(verify_pushforward(ctx.measure(q.catalog), q.trials, rng)));
  } else if (q.type == "verify-theorem2") {
    const OperatorValuedMeasure& m = ctx.measure(q.catalog);
    std::vector<std::size_t> subset;
    for (const auto& name : q.subset) {
      subset.push_back(ctx.member_index(q.catalog, name));
    }
    result.checks.push_back(to_check_row(
        verify_noncontextual_joint(m, ctx.state(q.state), subset, q.trials, rng)));
    append_negativity_notes(result, induce_signed_measure(m, ctx.state(q.state)));
  } else if (q.type == "verify-context-invariance") {
    const OperatorValuedMeasure& m = ctx.measure(q.catalog);
    const std::size_t base = ctx.member_index(q.catalog, q.base);
    const SpectrumFunction map{q.function};
    FunctionalRepresentation rep{
        base, map, apply_function(map, m.catalog().observable(base), tol)};
    std::vector<std::size_t> partners;
    for (const auto& name : q.partners) {
      partners.push_back(ctx.member_index(q.catalog, name));
    }
    result.checks.push_back(to_check_row(verify_context_invariance(
        m, ctx.state(q.state), rep, partners, q.trials, rng)));
    result.checks.push_back(
        to_check_row(verify_representative_reconstruction(m, rep)));
  } else if (q.type == "ks-averages") {
    const OperatorValuedMeasure& m = ctx.measure(q.catalog);
    std::vector<KsCase> cases;
    for (std::size_t k = 0; k < q.cases.size(); ++k) {
      const KsCaseSpec& spec = q.cases[k];
      KsCase c;
      c.label = spec.kind + "#" + std::to_string(k);
      if (spec.kind == "function") {
        c.kind = KsCase::Kind::FunctionOfObservable;
        c.function = SpectrumFunction{spec.function};
      } else if (spec.kind == "sum") {
        c.kind = KsCase::Kind::SumAverage;
      } else {
        c.kind = KsCase::Kind::ProductAverage;
      }
      for (const auto& name : spec.observables) {
        c.observables.push_back(ctx.member_index(q.catalog, name));
      }
      cases.push_back(std::move(c));
    }
    const VerificationReport report =
        verify_ks_average_relations(m, ctx.state(q.state), cases);
    result.checks.push_back(to_check_row(report));
    result.notes = report.notes;
  } else if (q.type == "lqhv") {
    PartiteScenario scenario{ctx.doc.dimensions, {}, ctx.state(q.state)};
    for (const auto& site : q.sites) {
      std::vector<HermitianObservable> locals;
      for (const auto& name : site) locals.push_back(ctx.observable(name));
      scenario.site_observables.push_back(std::move(locals));
    }
    result.checks.push_back(
        to_check_row(verify_lqhv(scenario, q.trials, rng, tol, ctx.atom_cap)));
  } else if (q.type == "chsh") {
    PartiteScenario scenario{
        ctx.doc.dimensions,
        {{ctx.observable(q.alice[0]), ctx.observable(q.alice[1])},
         {ctx.observable(q.bob[0]), ctx.observable(q.bob[1])}},
        ctx.state(q.state)};
    const ChshResult chsh = chsh_value(scenario, tol, ctx.atom_cap);
    const double deviation = std::abs(chsh.quantum - chsh.via_measure);
    result.value_header = {"quantum", "via_measure", "deviation"};
    result.value_rows = {{chsh.quantum, chsh.via_measure, deviation}};
    if (deviation > tol.check) result.status = "fail";
  } else if (q.type == "werner-scan") {
    const ChshSettings settings{
        ctx.observable(q.alice[0]), ctx.observable(q.alice[1]),
        ctx.observable(q.bob[0]), ctx.observable(q.bob[1])};
    result.value_header = {"p", "chsh", "total_variation", "min_atom"};
    for (const WernerRow& row : werner_scan(q.grid, settings, tol, ctx.atom_cap)) {
      result.value_rows.push_back(
          {row.p, row.chsh, row.total_variation, row.min_atom});
    }
  }

  for (const auto& row : result.checks) {
    if (row.status != "pass") result.status = "fail";
  }
  return result;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

ScenarioReport run_scenario(const ScenarioDocument& doc, const RunOptions& opts) {
  RunContext ctx{doc, opts.atom_cap, {}, {}, {}, {}};
  ScenarioReport report;
  for (std::size_t i = 0; i < doc.queries.size(); ++i) {
    try {
      report.results.push_back(run_query(ctx, doc.queries[i], i, opts.seed));
    } catch (const std::exception& e) {
      QueryResult result;
      result.index = i;
      result.type = doc.queries[i].type;
      result.status = "error";
      result.error_message = e.what();
      report.results.push_back(std::move(result));
    }
  }
  return report;
}

std::string emit_report(const ScenarioReport& report, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::kCsv) {
    for (std::size_t i = 0; i < report.results.size(); ++i) {
      const QueryResult& r = report.results[i];
      if (i > 0) out << "\n";
      out << "# query " << r.index << ": " << r.type << "\n";
      if (r.status == "error") {
        out << "query,type,status,message\n";
        out << r.index << "," << r.type << ",error," << csv_quote(r.error_message)
            << "\n";
        continue;
      }
      if (!r.checks.empty()) {
        out << "query,type,check,status,checks,failures,max_deviation\n";
        for (const auto& row : r.checks) {
          out << r.index << "," << r.type << "," << row.check << "," << row.status
              << "," << row.checks << "," << row.failures << ","
              << g12(row.max_deviation) << "\n";
        }
      }
      if (!r.value_rows.empty()) {
        out << "query,type";
        for (const auto& h : r.value_header) out << "," << h;
        out << "\n";
        for (const auto& row : r.value_rows) {
          out << r.index << "," << r.type;
          for (double v : row) out << "," << g12(v);
          out << "\n";
        }
      }
    }
    return out.str();
  }

  std::size_t pass = 0, failed = 0, errors = 0;
  for (const QueryResult& r : report.results) {
    out << "[" << r.index << "] " << r.type << "  " << r.status << "\n";
    if (r.status == "error") {
      ++errors;
      out << "    error: " << r.error_message << "\n";
      continue;
    }
    r.status == "pass" ? ++pass : ++failed;
    for (const auto& row : r.checks) {
      out << "    " << row.check << "  " << row.status << "  checks=" << row.checks
          << "  failures=" << row.failures
          << "  max_deviation=" << g12(row.max_deviation) << "\n";
    }
    for (const auto& row : r.value_rows) {
      out << "   ";
      for (std::size_t c = 0; c < row.size(); ++c) {
        out << " " << r.value_header[c] << "=" << g12(row[c]);
      }
      out << "\n";
    }
    for (const auto& note : r.notes) {
      out << "    note: " << note << "\n";
    }
  }
  out << "summary: " << report.results.size() << " queries, " << pass
      << " pass, " << failed << " fail, " << errors << " error\n";
  return out.str();
}

}  // namespace qhv
