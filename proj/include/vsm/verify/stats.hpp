#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "vsm/core/geometry.hpp"
#include "vsm/errors.hpp"
#include "vsm/verify/quadrature.hpp"
#include "vsm/verify/report.hpp"

namespace vsm {

/// Default histogram resolution on the simplex: 10 per edge for n = 3, 6 for n = 4.
inline int default_bin_resolution(int n) {
    if (n <= 2) return 20;
    if (n == 3) return 10;
    if (n == 4) return 6;
    return 4;
}

/// Fewest samples accepted by the binned TV comparisons.
inline constexpr std::size_t min_tv_samples = 1000;

/// Empirical cell frequencies of simplex samples.
inline std::vector<double> cell_frequencies(const std::vector<std::vector<double>>& samples, const SimplexGrid& grid) {
    if (samples.size() < min_tv_samples) throw domain_error("binned_tv_distance: fewer than 1000 samples");
    std::vector<double> freq(grid.cell_count(), 0.0);
    for (const auto& y : samples) freq[grid.locate(y)] += 1.0;
    for (double& v : freq) v /= static_cast<double>(samples.size());
    return freq;
}

/// Half the L1 distance between empirical cell frequencies and the given
/// cell masses. Fewer than min_tv_samples samples (in particular none) is an error.
inline double binned_tv_from_masses(const std::vector<std::vector<double>>& samples,
                                    const std::vector<double>& masses, const SimplexGrid& grid) {
    detail::require(masses.size() == grid.cell_count(), "binned_tv_distance: mass vector size mismatch");
    const auto freq = cell_frequencies(samples, grid);
    double tv = 0.0;
    for (std::size_t c = 0; c < freq.size(); ++c) tv += std::abs(freq[c] - masses[c]);
    return 0.5 * tv;
}

/// Same with cell masses integrated from a density.
template <class F>
double binned_tv_distance(const std::vector<std::vector<double>>& samples, F&& density, const SimplexGrid& grid,
                          const std::vector<double>& exponents = {}, int order = 8) {
    return binned_tv_from_masses(samples, cell_masses(density, grid, exponents, order), grid);
}

inline double binned_tv_two_sample(const std::vector<std::vector<double>>& a,
                                   const std::vector<std::vector<double>>& b, const SimplexGrid& grid) {
    const auto fa = cell_frequencies(a, grid), fb = cell_frequencies(b, grid);
    double tv = 0.0;
    for (std::size_t c = 0; c < fa.size(); ++c) tv += std::abs(fa[c] - fb[c]);
    return 0.5 * tv;
}

/// sup_x |F_n(x) - F(x)|.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw domain_error("ks_statistic: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    return d;
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
inline double ks_critical_value_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

/// sup_x |F_a(x) - F_b(x)| between two empirical distributions.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw domain_error("ks_two_sample: no samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

inline double ks_two_sample_critical_1pct(std::size_t n, std::size_t m) {
    const double a = static_cast<double>(n), b = static_cast<double>(m);
    return 1.628 * std::sqrt((a + b) / (a * b));
}

/// Sample moments E[x^k] against analytic values; statistic is the largest
/// |z| over orders, threshold 3 standard errors.
inline VerificationReport moment_test(const std::vector<double>& samples, const std::map<int, double>& analytic,
                                      const std::vector<int>& orders, std::uint64_t seed = 0,
                                      const std::string& name = "moments") {
    if (samples.size() < 2) throw domain_error("moment_test: need at least 2 samples");
    const double n = static_cast<double>(samples.size());
    double worst = 0.0;
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (int k : orders) {
        auto it = analytic.find(k);
        detail::require(it != analytic.end(), "moment_test: missing analytic moment");
        double s = 0.0, s2 = 0.0;
        for (double x : samples) {
            const double p = std::pow(x, k);
            s += p;
            s2 += p * p;
        }
        const double mean = s / n, var = std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
        const double se = std::sqrt(var / n);
        const double z = se > 0.0 ? std::abs(mean - it->second) / se : (mean == it->second ? 0.0 : INFINITY);
        worst = std::max(worst, z);
        per[std::to_string(k)] = {{"sample", mean}, {"analytic", it->second}, {"z", z}};
    }
    auto r = VerificationReport::make(name, worst, 3.0, "le", samples.size(), seed);
    r.metadata["orders"] = per;
    return r;
}

/// Pearson chi-square of 1-d samples against a density on bins given by
/// increasing edges; samples outside [edges.front(), edges.back()] form one
/// extra cell whose expected mass is the complement. Threshold is the 99%
/// chi-square quantile.
template <class F>
VerificationReport chi_square_gof(const std::vector<double>& samples, F&& density, const std::vector<double>& edges,
                                  std::uint64_t seed = 0, int order = 16) {
    detail::require(edges.size() >= 3, "chi_square_gof: need at least two bins");
    for (std::size_t i = 1; i < edges.size(); ++i) detail::require(edges[i] > edges[i - 1], "chi_square_gof: edges must increase");
    if (samples.size() < 100) throw domain_error("chi_square_gof: need at least 100 samples");
    const std::size_t B = edges.size() - 1;
    const auto& rule = cached_gauss_jacobi01(order, 0.0, 0.0);
    std::vector<double> expect(B + 1, 0.0), count(B + 1, 0.0);
    double inside = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
        const double lo = edges[b], w = edges[b + 1] - edges[b];
        double m = 0.0;
        for (int k = 0; k < order; ++k) m += rule.weights[k] * density(lo + w * rule.nodes[k]);
        expect[b] = m * w;
        inside += expect[b];
    }
    expect[B] = std::max(0.0, 1.0 - inside);
    for (double x : samples) {
        if (x < edges.front() || x >= edges.back()) {
            count[B] += 1.0;
            continue;
        }
        const auto it = std::upper_bound(edges.begin(), edges.end(), x);
        count[static_cast<std::size_t>(it - edges.begin()) - 1] += 1.0;
    }
    const double n = static_cast<double>(samples.size());
    double chi = 0.0;
    int cells = 0;
    // pool cells with expected count below 5 into their right neighbour
    double pe = 0.0, pc = 0.0;
    for (std::size_t b = 0; b <= B; ++b) {
        pe += expect[b] * n;
        pc += count[b];
        if (pe >= 5.0 || b == B) {
            if (pe > 0.0) {
                chi += (pc - pe) * (pc - pe) / pe;
                ++cells;
            }
            pe = pc = 0.0;
        }
    }
    const int df = std::max(1, cells - 1);
    const double crit = boost::math::quantile(boost::math::chi_squared(df), 0.99);
    auto r = VerificationReport::make("chi_square", chi, crit, "le", samples.size(), seed);
    r.metadata["df"] = df;
    return r;
}

}  // namespace vsm
