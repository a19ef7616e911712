#pragma once

#include <cmath>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "vsm/errors.hpp"

namespace vsm {

/// ln Gamma(x) for x > 0. Boost's lgamma is reentrant, unlike ::lgamma.
inline double log_gamma(double x) {
    if (!(x > 0.0)) throw domain_error("log_gamma: x must be positive");
    return boost::math::lgamma(x);
}

inline long double log_gamma_l(long double x) {
    if (!(x > 0.0L)) throw domain_error("log_gamma: x must be positive");
    return boost::math::lgamma(x);
}

struct MultiIndex {
    std::vector<int> k;
    int m = 0;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> kk) : k(std::move(kk)) {
        for (int v : k) {
            detail::require(v >= 0, "MultiIndex: negative entry");
            m += v;
        }
    }
    std::size_t n() const { return k.size(); }
    bool operator==(const MultiIndex&) const = default;
};

/// ln(m! / prod k_i!).
inline double log_multinomial(int m, const MultiIndex& k) {
    if (k.m != m) throw domain_error("log_multinomial: sum of k differs from m");
    double r = log_gamma(m + 1.0);
    for (int v : k.k) r -= log_gamma(v + 1.0);
    return r;
}

inline double log_binomial(double n, double k) {
    return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

}  // namespace vsm
