#include "qhv/demos.hpp"

namespace qhv {

namespace {

// Qubit +/-1 observables along x-z plane Bloch axes at 120 and 240 degrees,
// probed on the +z pole: the two-observable measure carries one negative atom.
const char* kTrineNegativity = R"JSON({
  "dimension": 2,
  "observables": {
    "trine120": [[[-0.5, 0], [0.8660254037844386, 0]],
                 [[0.8660254037844386, 0], [0.5, 0]]],
    "trine240": [[[-0.5, 0], [-0.8660254037844386, 0]],
                 [[-0.8660254037844386, 0], [0.5, 0]]]
  },
  "states": {
    "pole": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]
  },
  "catalogs": {
    "trine": ["trine120", "trine240"]
  },
  "queries": [
    {"type": "verify-lemma1", "catalog": "trine", "trials": 200},
    {"type": "verify-pushforward", "catalog": "trine", "trials": 200},
    {"type": "verify-theorem2", "catalog": "trine", "state": "pole",
     "subset": ["trine120"], "trials": 200}
  ]
})JSON";

const char* kChshSinglet = R"JSON({
  "dimension": [2, 2],
  "observables": {
    "a1": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]],
    "a2": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]],
    "b1": [[[0.7071067811865476, 0], [0.7071067811865476, 0]],
           [[0.7071067811865476, 0], [-0.7071067811865476, 0]]],
    "b2": [[[0.7071067811865476, 0], [-0.7071067811865476, 0]],
           [[-0.7071067811865476, 0], [-0.7071067811865476, 0]]]
  },
  "states": {
    "singlet": [[[0, 0], [0, 0], [0, 0], [0, 0]],
                [[0, 0], [0.5, 0], [-0.5, 0], [0, 0]],
                [[0, 0], [-0.5, 0], [0.5, 0], [0, 0]],
                [[0, 0], [0, 0], [0, 0], [0, 0]]]
  },
  "queries": [
    {"type": "chsh", "state": "singlet", "a": ["a1", "a2"], "b": ["b1", "b2"]},
    {"type": "lqhv", "state": "singlet",
     "sites": [["a1", "a2"], ["b1", "b2"]], "trials": 200}
  ]
})JSON";

const char* kWernerScan = R"JSON({
  "dimension": [2, 2],
  "observables": {
    "a1": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]],
    "a2": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]],
    "b1": [[[0.7071067811865476, 0], [0.7071067811865476, 0]],
           [[0.7071067811865476, 0], [-0.7071067811865476, 0]]],
    "b2": [[[0.7071067811865476, 0], [-0.7071067811865476, 0]],
           [[-0.7071067811865476, 0], [-0.7071067811865476, 0]]]
  },
  "queries": [
    {"type": "werner-scan", "a": ["a1", "a2"], "b": ["b1", "b2"],
     "grid": [0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.7071067811865476,
              0.8, 0.9, 1]}
  ]
})JSON";

// Diagonal qutrit catalog where one member is a function of another;
// the composed and canonical representatives must agree inside every
// joint cylinder with the diagonal partner.
const char* kQutritContextInvariance = R"JSON({
  "dimension": 3,
  "observables": {
    "y": [[[1, 0], [0, 0], [0, 0]],
          [[0, 0], [0, 0], [0, 0]],
          [[0, 0], [0, 0], [-1, 0]]],
    "ysq": [[[1, 0], [0, 0], [0, 0]],
            [[0, 0], [0, 0], [0, 0]],
            [[0, 0], [0, 0], [1, 0]]],
    "partner": [[[2, 0], [0, 0], [0, 0]],
                [[0, 0], [3, 0], [0, 0]],
                [[0, 0], [0, 0], [5, 0]]]
  },
  "states": {
    "mixed": [[[0.5, 0], [0.2, 0], [0.1, 0]],
              [[0.2, 0], [0.3, 0], [0.05, 0]],
              [[0.1, 0], [0.05, 0], [0.2, 0]]]
  },
  "catalogs": {
    "qutrit": ["y", "ysq", "partner"]
  },
  "queries": [
    {"type": "verify-context-invariance", "catalog": "qutrit", "state": "mixed",
     "base": "y", "function": [[-1, 1], [0, 0], [1, 1]],
     "partners": ["partner"], "trials": 200},
    {"type": "ks-averages", "catalog": "qutrit", "state": "mixed", "cases": [
      {"kind": "function", "observables": ["y"],
       "function": [[-1, 1], [0, 0], [1, 1]]},
      {"kind": "sum", "observables": ["y", "ysq", "partner"]},
      {"kind": "product", "observables": ["y", "partner"]}
    ]},
    {"type": "verify-theorem2", "catalog": "qutrit", "state": "mixed",
     "subset": ["y", "ysq", "partner"], "trials": 200}
  ]
})JSON";

}  // namespace

const std::map<std::string, std::string>& bundled_scenarios() {
  static const std::map<std::string, std::string> scenarios{
      {"trine-negativity", kTrineNegativity},
      {"chsh-singlet", kChshSinglet},
      {"werner-scan", kWernerScan},
      {"qutrit-context-invariance", kQutritContextInvariance},
  };
  return scenarios;
}

}  // namespace qhv
