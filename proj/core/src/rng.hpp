// Seeded normal streams shared by the path generator and the simulator.
#pragma once

#include <boost/random/normal_distribution.hpp>

#include <cstdint>
#include <random>

namespace phasetrack::detail {

/// Engine for (seed, stream); distinct streams are statistically independent.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9u};
    return std::mt19937_64(seq);
}

class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream) : engine_(make_engine(seed, stream)) {}

    double operator()() { return dist_(engine_); }

private:
    std::mt19937_64 engine_;
    boost::random::normal_distribution<double> dist_;
};

}  // namespace phasetrack::detail
