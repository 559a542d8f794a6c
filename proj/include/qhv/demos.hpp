#pragma once

#include <map>
#include <string>

namespace qhv {

// Bundled scenario files, keyed by demo name.
const std::map<std::string, std::string>& bundled_scenarios();

}  // namespace qhv
