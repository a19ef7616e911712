#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "vsm/core/geometry.hpp"
#include "vsm/core/special.hpp"
#include "vsm/rng.hpp"

namespace vsm {

/// ln of the Dirichlet(gamma) density at y, w.r.t. Lebesgue measure on the
/// first n-1 coordinates. Standard constant Gamma(sum)/prod Gamma.
/// Returns +inf at a zero coordinate with gamma_i < 1, -inf when gamma_i > 1.
inline double dirichlet_log_density(const SimplexPoint& y, const std::vector<double>& gamma) {
    detail::require(y.n() == gamma.size(), "dirichlet_log_density: dimension mismatch");
    double total = 0.0, r = 0.0;
    bool pole = false, zero = false;
    for (std::size_t i = 0; i < gamma.size(); ++i) {
        const double g = gamma[i];
        detail::require(g > 0.0, "dirichlet_log_density: gamma must be positive");
        total += g;
        r -= log_gamma(g);
        if (y[i] == 0.0) {
            if (g < 1.0) pole = true;
            else if (g > 1.0) zero = true;
        } else {
            r += (g - 1.0) * std::log(y[i]);
        }
    }
    if (pole) return std::numeric_limits<double>::infinity();
    if (zero) return -std::numeric_limits<double>::infinity();
    return r + log_gamma(total);
}

inline SimplexPoint dirichlet_sample(const std::vector<double>& gamma, RngStream& rng) {
    detail::require(!gamma.empty(), "dirichlet_sample: empty parameter");
    std::vector<double> g(gamma.size());
    for (std::size_t i = 0; i < gamma.size(); ++i) {
        detail::require(gamma[i] > 0.0, "dirichlet_sample: gamma must be positive");
        g[i] = rng.gamma(gamma[i]);
    }
    return SimplexPoint::project(g);
}

}  // namespace vsm
