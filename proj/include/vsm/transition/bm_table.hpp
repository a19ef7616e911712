#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "vsm/core/special.hpp"
#include "vsm/errors.hpp"
#include "vsm/transition/talbot.hpp"

namespace vsm {

struct InversionMeta {
    int node_count = 0;      // nodes of the accepted result
    int digits = 0;          // working precision, decimal digits
    double contour_r = 0.0;  // Talbot parameter r = 2N/(5u), u = 1/t
    double doubling_change = 0.0;  // max_m c_m |b_m(N/2) - b_m(N)|
};

/// b_0(t), ..., b_M(t) for the series of the Wright-Fisher transition density.
struct BmTable {
    double d = 0.0;
    double gamma = 0.0;
    double t = 0.0;
    std::vector<double> values;
    InversionMeta inversion_meta;

    /// c_m = Gamma(2m+d) / (m! Gamma(m+d)), the mass carried by b_m.
    static double mass_coefficient(int m, double d) {
        return std::exp(log_gamma(2.0 * m + d) - log_gamma(m + 1.0) - log_gamma(m + d));
    }

    /// sum_{m <= M} c_m b_m, which equals 1 up to truncation.
    double total_mass() const {
        double s = 0.0;
        for (std::size_t m = 0; m < values.size(); ++m) s += mass_coefficient(static_cast<int>(m), d) * values[m];
        return s;
    }
};

/// The transform in s = rho^2/2 of g_m(u) = b_m(1/u) u^{-1/2} e^{-gamma^2/(2u)}:
///   sqrt(2 pi)/rho e^{-(m+gamma) rho} (1 - e^{-rho}) (1 + e^{-rho})^{-2m-d},
/// written as F_0 q^m with q = e^{-rho} / (1 + e^{-rho})^2.
template <class R>
std::vector<mp::cx<R>> bm_transform_batch(const mp::cx<R>& s, const R& d, const R& gamma, int M) {
    using std::sqrt;
    const auto rho = mp::sqrt(s * R(2));
    const auto E = mp::exp(-rho);
    const auto onep = E + R(1);
    const R root2pi = sqrt(boost::math::constants::two_pi<R>());
    const auto F0 = root2pi / rho * mp::exp(-(rho * gamma) - mp::log(onep) * d) * (R(1) - E);
    const auto q = E / (onep * onep);
    std::vector<mp::cx<R>> F(static_cast<std::size_t>(M) + 1);
    F[0] = F0;
    for (int m = 1; m <= M; ++m) F[m] = F[m - 1] * q;
    return F;
}

namespace detail {

/// One Talbot pass with N nodes; b_m = g_m(1/t) t^{-1/2} e^{gamma^2 t/2}.
inline std::vector<double> bm_pass(double d, double t, int M, int N, int digits) {
    auto body = [&]<class R>() {
        using std::exp, std::sqrt;
        const R Rd(d), Rt(t), gam = (Rd - 1) / 2;
        const R u = R(1) / Rt;
        auto ev = [&](const mp::cx<R>& s) { return bm_transform_batch<R>(s, Rd, gam, M); };
        const auto g = mp::talbot_batch<R>(u, N, static_cast<std::size_t>(M) + 1, ev);
        const R scale = exp(gam * gam * Rt / 2) / sqrt(Rt);
        std::vector<double> b(g.size());
        for (std::size_t m = 0; m < g.size(); ++m) b[m] = static_cast<double>(g[m] * scale);
        return b;
    };
    return mp::with_precision(digits, body);
}

/// Digits: the node count, plus what the factor e^{gamma^2 t/2} and the
/// mass weights c_m ~ 4^m cost in cancellation.
inline int bm_digits(double d, double t, int M, int N) {
    const double gam = 0.5 * (d - 1.0);
    return talbot_digits(N) + static_cast<int>(std::ceil((gam * gam * t / 2.0) / std::log(10.0) + M * std::log10(4.0)));
}

}  // namespace detail

/// Inverts the transform for every m <= M at once, doubling the node count
/// from ctrl.node_count until the mass-weighted change max_m c_m |db_m|
/// falls below ctrl.rel_tol.
inline BmTable bm_coefficients(double d, double t, int M, const InversionControl& ctrl = {}) {
    ctrl.validate();
    detail::require(d > 1.0, "bm_coefficients: need d > 1");
    detail::require(t > 0.0 && std::isfinite(t), "bm_coefficients: need t > 0");
    detail::require(M >= 0, "bm_coefficients: need M >= 0");
    BmTable tab;
    tab.d = d;
    tab.gamma = 0.5 * (d - 1.0);
    tab.t = t;
    int N = ctrl.node_count;
    auto prev = detail::bm_pass(d, t, M, N, detail::bm_digits(d, t, M, N));
    while (2 * N <= ctrl.max_node_count) {
        N *= 2;
        const int digits = detail::bm_digits(d, t, M, N);
        auto cur = detail::bm_pass(d, t, M, N, digits);
        double change = 0.0;
        for (int m = 0; m <= M; ++m)
            change = std::max(change, BmTable::mass_coefficient(m, d) * std::abs(cur[m] - prev[m]));
        if (change <= ctrl.rel_tol) {
            tab.values = std::move(cur);
            tab.inversion_meta = {N, digits, 2.0 * N * t / 5.0, change};
            return tab;
        }
        prev = std::move(cur);
    }
    throw inversion_error("bm_coefficients: node doubling did not stabilize within max_node_count");
}

/// Process-wide write-once cache keyed on (d, t, node_count, rel_tol).
/// A request for more coefficients than cached rebuilds the table; two
/// threads racing on the same key compute identical tables.
inline std::shared_ptr<const BmTable> bm_coefficients_cached(double d, double t, int M,
                                                             const InversionControl& ctrl = {}) {
    using Key = std::tuple<double, double, int, double, int>;
    static std::mutex mu;
    static std::map<Key, std::shared_ptr<const BmTable>> cache;
    const Key key{d, t, ctrl.node_count, ctrl.rel_tol, ctrl.max_node_count};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end() && static_cast<int>(it->second->values.size()) > M) return it->second;
    }
    auto tab = std::make_shared<const BmTable>(bm_coefficients(d, t, M, ctrl));
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[key];
    if (!slot || slot->values.size() < tab->values.size()) slot = tab;
    return slot->values.size() > static_cast<std::size_t>(M) ? slot : tab;
}

}  // namespace vsm
