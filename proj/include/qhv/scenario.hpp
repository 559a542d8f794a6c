#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qhv/catalog.hpp"
#include "qhv/types.hpp"

namespace qhv {

// Syntax or semantic problem in a scenario file (maps to exit code 2).
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultTrials = 200;

struct KsCaseSpec {
  std::string kind;  // "function" | "sum" | "product"
  std::vector<std::string> observables;
  std::vector<std::pair<double, double>> function;
};

struct ScenarioQuery {
  std::string type;
  std::string catalog;
  std::string state;
  std::string observable;                           // expect
  std::vector<std::string> subset;                  // verify-theorem2
  std::string base;                                 // verify-context-invariance
  std::vector<std::pair<double, double>> function;  // verify-context-invariance
  std::vector<std::string> partners;                // verify-context-invariance
  std::vector<std::vector<std::string>> sites;      // lqhv
  std::vector<std::string> alice;                   // chsh / werner-scan
  std::vector<std::string> bob;                     // chsh / werner-scan
  std::vector<double> grid;                         // werner-scan
  std::vector<KsCaseSpec> cases;                    // ks-averages
  std::size_t trials = kDefaultTrials;
};

// Parsed scenario file: named matrices, named catalogs, a query list, and
// a tolerance override block. `dimensions` has one entry per site; the
// global dimension is their product.
struct ScenarioDocument {
  std::vector<Eigen::Index> dimensions;
  std::map<std::string, Matrix> observables;
  std::map<std::string, Matrix> states;
  std::map<std::string, std::vector<std::string>> catalogs;
  std::vector<ScenarioQuery> queries;
  Tolerances tolerances;
};

struct CheckRow {
  std::string check;
  std::string status;  // pass | fail
  std::size_t checks = 0;
  std::size_t failures = 0;
  double max_deviation = 0.0;
};

struct QueryResult {
  std::size_t index = 0;
  std::string type;
  std::string status = "pass";  // pass | fail | error
  std::vector<CheckRow> checks;
  std::vector<std::string> value_header;   // chsh / werner-scan / expect
  std::vector<std::vector<double>> value_rows;
  std::vector<std::string> notes;
  std::string error_message;
};

struct ScenarioReport {
  std::vector<QueryResult> results;
  bool all_pass() const {
    for (const auto& r : results) {
      if (r.status != "pass") return false;
    }
    return true;
  }
};

struct RunOptions {
  std::uint64_t seed = 0;
  std::uint64_t atom_cap = kDefaultAtomCap;
};

enum class ReportFormat { kHuman, kCsv };

// Strict parse: unknown fields, unresolved names, and dimension mismatches
// are rejected with a ScenarioError.
ScenarioDocument parse_scenario(const std::string& text);

// Deterministic canonical serialization; parse(canonical(doc)) == doc.
std::string canonical_scenario_json(const ScenarioDocument& doc);

bool operator==(const ScenarioDocument& a, const ScenarioDocument& b);

// Executes queries in order; all randomness derives from opts.seed.
// Per-query resource or contract errors become "error" results.
ScenarioReport run_scenario(const ScenarioDocument& doc,
                            const RunOptions& opts = {});

std::string emit_report(const ScenarioReport& report, ReportFormat format);

}  // namespace qhv
