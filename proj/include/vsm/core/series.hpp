#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "vsm/core/special.hpp"
#include "vsm/errors.hpp"

namespace vsm {

struct SeriesControl {
    int max_terms = 500;
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;

    void validate() const {
        detail::require(max_terms >= 1, "SeriesControl: max_terms must be >= 1");
        detail::require(abs_tol > 0.0 && rel_tol > 0.0, "SeriesControl: tolerances must be positive");
    }
};

/// Orders up to this use a direct long double convolution; past it
/// (m!)^-2 leaves the extended exponent range and a windowed log-space
/// convolution takes over.
inline constexpr int direct_inner_order = 950;
/// Largest supported outer index.
inline constexpr int max_inner_order = 1 << 16;

namespace detail {

/// Log-space convolution of two log-concave sequences (entries -inf past a
/// finite support). For each m only terms within 60 nats of the largest are
/// summed; the largest is tracked by hill climbing, which is exact for
/// log-concave terms. Terms are generated from the peak by multiplying
/// precomputed neighbour ratios, so each costs two multiplications.
inline std::vector<long double> log_convolve(const std::vector<long double>& a, const std::vector<long double>& b) {
    constexpr long double ninf = -std::numeric_limits<long double>::infinity();
    const long double cut = std::exp(-60.0L);
    const std::ptrdiff_t L = static_cast<std::ptrdiff_t>(a.size());
    auto top = [](const std::vector<long double>& v) {
        std::ptrdiff_t t = -1;
        while (t + 1 < static_cast<std::ptrdiff_t>(v.size()) && v[t + 1] != ninf) ++t;
        return t;
    };
    const std::ptrdiff_t ta = top(a), tb = top(b);
    // up[k] = exp(v[k+1] - v[k]), down[k] = 1 / up[k], inside the support
    auto ratios = [](const std::vector<long double>& v, std::ptrdiff_t t, std::vector<long double>& up,
                     std::vector<long double>& down) {
        up.assign(v.size(), 0.0L);
        down.assign(v.size(), 0.0L);
        for (std::ptrdiff_t k = 0; k < t; ++k) {
            up[k] = std::exp(v[k + 1] - v[k]);
            down[k] = std::exp(v[k] - v[k + 1]);
        }
    };
    std::vector<long double> ua, da, ub, db;
    ratios(a, ta, ua, da);
    ratios(b, tb, ub, db);
    std::vector<long double> out(a.size(), ninf);
    std::ptrdiff_t j = 0;
    for (std::ptrdiff_t m = 0; m < L; ++m) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, m - tb), hi = std::min(m, ta);
        if (lo > hi) continue;
        auto f = [&](std::ptrdiff_t k) { return a[k] + b[m - k]; };
        j = std::clamp(j, lo, hi);
        while (j < hi && f(j + 1) >= f(j)) ++j;
        while (j > lo && f(j - 1) > f(j)) --j;
        long double sum = 1.0L, t = 1.0L;
        // f(k+1) - f(k) = (a[k+1] - a[k]) - (b[m-k] - b[m-k-1])
        for (std::ptrdiff_t k = j; k < hi; ++k) {
            t *= ua[k] * db[m - k - 1];
            if (t < cut) break;
            sum += t;
        }
        t = 1.0L;
        for (std::ptrdiff_t k = j; k > lo; --k) {
            t *= da[k - 1] * ub[m - k];
            if (t < cut) break;
            sum += t;
        }
        out[m] = f(j) + std::log(sum);
    }
    return out;
}

}  // namespace detail

namespace detail {

/// log D_m by log-space convolution; any order.
template <class T>
std::vector<long double> log_inner_sums_windowed(const std::vector<T>& w, const std::vector<double>& a, int M) {
    const std::size_t n = w.size(), L = static_cast<std::size_t>(M) + 1;
    constexpr long double ninf = -std::numeric_limits<long double>::infinity();
    auto log_sequence = [&](std::size_t i) {
        std::vector<long double> s(L, ninf);
        s[0] = -log_gamma_l(a[i]);
        if (w[i] == 0) return s;
        // k log w - log(k! Gamma(k + a)); the w-free part accumulates separately
        const long double lw = std::log(static_cast<long double>(w[i]));
        long double g = s[0];
        for (std::size_t k = 1; k < L; ++k) {
            g -= std::log(static_cast<long double>(k) * (k - 1 + a[i]));
            s[k] = g + k * lw;
        }
        return s;
    };
    std::vector<long double> acc = log_sequence(0);
    for (std::size_t i = 1; i < n; ++i) acc = detail::log_convolve(acc, log_sequence(i));
    return acc;
}

}  // namespace detail

/// log D_m for m = 0..M where
///   D_m = sum_{|k|=m} prod_i w_i^{k_i} / (k_i! Gamma(k_i + a_i)).
/// Multinomial sums of Dirichlet densities reduce to this:
///   sum_{|k|=m} multinom(m;k) z^k Dir(y; k+a) = m! Gamma(m+A) prod y_i^{a_i-1} D_m(z*y),
/// with A = sum a. Up to direct_inner_order this is n-1 successive
/// convolutions in long double, after rescaling w by (sum sqrt w)^2 so the
/// sequences stay near unit size; higher orders convolve in log space.
/// Entries equal to -inf mean D_m = 0. T is double or long double.
template <class T>
std::vector<long double> log_inner_sums(const std::vector<T>& w, const std::vector<double>& a, int M) {
    const std::size_t n = w.size();
    detail::require(n == a.size() && n >= 1, "log_inner_sums: size mismatch");
    detail::require(M >= 0, "log_inner_sums: negative order");
    if (M > max_inner_order) throw truncation_error("log_inner_sums: order beyond supported range");
    long double root = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        detail::require(w[i] >= 0 && a[i] > 0.0, "log_inner_sums: bad argument");
        root += std::sqrt(static_cast<long double>(w[i]));
    }
    const std::size_t L = static_cast<std::size_t>(M) + 1;
    constexpr long double ninf = -std::numeric_limits<long double>::infinity();

    if (M > direct_inner_order) return detail::log_inner_sums_windowed(w, a, M);

    const long double lam = root > 0.0L ? root * root : 1.0L;
    auto sequence = [&](std::size_t i, std::vector<long double>& s) {
        s.assign(L, 0.0L);
        s[0] = std::exp(-log_gamma_l(a[i]));
        if (w[i] == 0) return;
        const long double r = static_cast<long double>(w[i]) / lam;
        for (std::size_t k = 1; k < L; ++k) s[k] = s[k - 1] * r / (static_cast<long double>(k) * (k - 1 + a[i]));
    };

    std::vector<long double> acc, cur, out(L);
    sequence(0, acc);
    for (std::size_t i = 1; i < n; ++i) {
        sequence(i, cur);
        // acc * cur truncated at M; cur[k] is 0 past the first zero when w_i == 0
        std::size_t top = w[i] == 0 ? 1 : L;
        for (std::size_t m = 0; m < L; ++m) {
            const std::size_t jmax = std::min(m + 1, top);
            long double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
            std::size_t j = 0;
            for (; j + 4 <= jmax; j += 4) {
                s0 += cur[j] * acc[m - j];
                s1 += cur[j + 1] * acc[m - j - 1];
                s2 += cur[j + 2] * acc[m - j - 2];
                s3 += cur[j + 3] * acc[m - j - 3];
            }
            for (; j < jmax; ++j) s0 += cur[j] * acc[m - j];
            out[m] = (s0 + s1) + (s2 + s3);
        }
        acc.swap(out);
    }
    std::vector<long double> res(L);
    const long double loglam = std::log(lam);
    for (std::size_t m = 0; m < L; ++m) res[m] = acc[m] > 0.0L ? std::log(acc[m]) + m * loglam : ninf;
    return res;
}

struct SeriesSum {
    long double log_value = 0;  // -inf when every term vanishes
    int terms = 0;
    double value() const { return static_cast<double>(std::exp(log_value)); }
};

/// Sums exp(prefactor + L_m) for m = 0, 1, ... where make(M) returns L_0..L_M.
/// Stops at the first m past the peak where the geometric tail bound
/// term * r / (1 - r), with r = max(ratio_bound, L_m/L_{m-1} ratio), is below
/// both abs_tol and rel_tol * sum. Retries with a doubled order until
/// ctrl.max_terms, then throws truncation_error.
template <class Make>
SeriesSum sum_log_series(Make&& make, long double prefactor, double ratio_bound, const SeriesControl& ctrl) {
    ctrl.validate();
    constexpr long double ninf = -std::numeric_limits<long double>::infinity();
    int M = std::min(ctrl.max_terms, 32);
    for (;;) {
        const std::vector<long double> L = make(M);
        long double lmax = ninf, acc = 0;
        for (int m = 0; m <= M; ++m) {
            const long double lm = L[m];
            if (lm > lmax) {
                acc = (lmax == ninf ? 0.0L : acc * std::exp(lmax - lm)) + 1.0L;
                lmax = lm;
            } else if (lm != ninf) {
                acc += std::exp(lm - lmax);
            }
            if (m == 0) continue;
            if (lmax == ninf) return {ninf, m + 1};  // leading terms all vanish and so do later ones
            if (lm == ninf) {
                if (L[m - 1] == ninf) return {prefactor + lmax + std::log(acc), m + 1};
                continue;
            }
            if (lm > L[m - 1]) continue;
            const long double r = std::max<long double>(ratio_bound, std::exp(lm - L[m - 1]));
            if (r >= 1.0L) continue;
            const long double log_tail = prefactor + lm + std::log(r / (1.0L - r));
            const long double log_sum = prefactor + lmax + std::log(acc);
            if (log_tail <= std::log(static_cast<long double>(ctrl.abs_tol)) &&
                log_tail <= log_sum + std::log(static_cast<long double>(ctrl.rel_tol)))
                return {log_sum, m + 1};
        }
        if (M >= ctrl.max_terms) throw truncation_error("series: max_terms reached without certified tail");
        M = std::min(ctrl.max_terms, 2 * M);
    }
}

}  // namespace vsm
