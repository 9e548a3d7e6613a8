#include "phasetrack/version.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <string>

#ifndef PHASETRACK_VERSION
#define PHASETRACK_VERSION "0.0.0"
#endif

namespace phasetrack {

const char* version() { return PHASETRACK_VERSION; }

std::vector<std::pair<std::string, std::string>> build_versions() {
    std::string compiler;
#if defined(__clang__)
    compiler = "clang " __clang_version__;
#elif defined(__GNUC__)
    compiler = "gcc " + std::to_string(__GNUC__) + "." + std::to_string(__GNUC_MINOR__) + "." +
               std::to_string(__GNUC_PATCHLEVEL__);
#else
    compiler = "unknown";
#endif
    const std::string eigen = std::to_string(EIGEN_WORLD_VERSION) + "." +
                              std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION);
    const std::string boost = std::to_string(BOOST_VERSION / 100000) + "." +
                              std::to_string(BOOST_VERSION / 100 % 1000) + "." +
                              std::to_string(BOOST_VERSION % 100);
    return {{"phasetrack", PHASETRACK_VERSION}, {"compiler", compiler}, {"eigen", eigen},
            {"boost", boost}};
}

}  // namespace phasetrack
