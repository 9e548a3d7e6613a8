#pragma once

#include <string>
#include <utility>
#include <vector>

namespace phasetrack {

/// Library version, e.g. "0.1.0".
const char* version();

/// (component, version) pairs: phasetrack, compiler, eigen, boost.
std::vector<std::pair<std::string, std::string>> build_versions();

}  // namespace phasetrack
