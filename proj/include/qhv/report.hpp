#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qhv {

// Outcome of one numeric verification sweep. A sweep fails when any
// single check exceeds its tolerance; deviations are Frobenius norms or
// absolute scalar differences depending on the check.
struct VerificationReport {
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  double max_deviation = 0.0;
  std::vector<std::string> notes;

  bool pass() const { return failures == 0; }

  void record(double deviation, double tolerance) {
    ++checks;
    if (deviation > max_deviation) max_deviation = deviation;
    if (deviation > tolerance) ++failures;
  }
};

}  // namespace qhv
