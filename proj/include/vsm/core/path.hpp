#pragma once

#include <cstdint>
#include <vector>

#include "vsm/errors.hpp"

namespace vsm {

struct SeedRecord {
    std::uint64_t seed = 0;
    std::uint64_t stream_index = 0;
};

/// Time grid plus one state vector per grid time.
struct Path {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    SeedRecord seed_record;

    std::size_t size() const { return times.size(); }
    std::size_t dim() const { return states.empty() ? 0 : states.front().size(); }
};

namespace detail {
inline void require_grid(const std::vector<double>& times, bool from_zero) {
    require(!times.empty(), "time grid is empty");
    if (from_zero) require(times.front() == 0.0, "time grid must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        require(times[i] > times[i - 1], "time grid must be strictly increasing");
}
}  // namespace detail

}  // namespace vsm
