#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "vsm/core/dirichlet.hpp"
#include "vsm/core/geometry.hpp"
#include "vsm/core/params.hpp"
#include "vsm/core/series.hpp"
#include "vsm/core/special.hpp"

namespace vsm {

struct ExitDensityQuery {
    QuadrantPoint z;
    SimplexPoint y;
    ModelParams params;
    SeriesControl ctrl;
};

/// Exit density of the BESQ vector from the unit simplex, started at z.
/// Per-m coefficients are built once; evaluation at many y reuses them.
/// Values are w.r.t. Lebesgue measure on the first n-1 coordinates.
class ExitDensity {
public:
    ExitDensity(const QuadrantPoint& z, const ModelParams& params, const SeriesControl& ctrl = {})
        : z_(z), params_(params), ctrl_(ctrl) {
        detail::require(z.n() == params.n(), "exit_density: dimension mismatch");
        params.require_transient("exit_density");
        ctrl.validate();
        s_ = z.sum();
        detail::require(s_ < 1.0, "exit_density: start must satisfy sum z < 1");
        const long double r = 0.5L * params.theta0();
        const long double l1s = std::log1p(static_cast<long double>(s_));
        coef_.resize(static_cast<std::size_t>(std::min(ctrl.max_terms, max_inner_order)) + 1);
        for (std::size_t m = 0; m < coef_.size(); ++m) coef_[m] = log_gamma_l(2 * m + r) - (2 * m + r) * l1s;
        const double p = s_ / (1.0 + s_);
        ratio_ = 4.0 * p * (1.0 - p);
        log1ms_ = std::log1p(-static_cast<long double>(s_));
    }

    double start_sum() const { return s_; }
    /// Ratio 4pq of the geometric tail certificate.
    double tail_ratio() const { return ratio_; }
    const ModelParams& params() const { return params_; }

    double operator()(const SimplexPoint& y) const { return evaluate(y).value(); }

    /// Log value and number of terms used.
    SeriesSum evaluate(const SimplexPoint& y) const {
        detail::require(y.n() == params_.n(), "exit_density: dimension mismatch");
        const auto& a = params_.delta();
        long double pre = log1ms_;
        std::vector<double> w(y.n());
        for (std::size_t i = 0; i < y.n(); ++i) {
            w[i] = z_[i] * y[i];
            if (y[i] == 0.0) {
                if (a[i] < 1.0) return {std::numeric_limits<long double>::infinity(), 0};
                if (a[i] > 1.0) return {-std::numeric_limits<long double>::infinity(), 0};
            } else {
                pre += (a[i] - 1.0L) * std::log(static_cast<long double>(y[i]));
            }
        }
        auto make = [&](int M) {
            auto L = log_inner_sums(w, a, M);
            for (int m = 0; m <= M; ++m) L[m] += coef_[m];
            return L;
        };
        SeriesControl c = ctrl_;
        c.max_terms = static_cast<int>(coef_.size()) - 1;
        return sum_log_series(make, pre, ratio_, c);
    }

private:
    QuadrantPoint z_;
    ModelParams params_;
    SeriesControl ctrl_;
    double s_ = 0.0, ratio_ = 0.0;
    long double log1ms_ = 0;
    std::vector<long double> coef_;
};

inline double exit_density(const ExitDensityQuery& q) { return ExitDensity(q.z, q.params, q.ctrl)(q.y); }

/// Joint density of the market weights when the total capitalization first
/// reaches a, started from capitalizations x. Reduces to the exit density
/// with theta = 2 delta and start x/a.
inline ExitDensity market_weight_exit_law(const QuadrantPoint& x, double a, const std::vector<double>& delta,
                                          const SeriesControl& ctrl = {}) {
    detail::require(a > 0.0, "market_weight_exit_density: a must be positive");
    detail::require(x.n() == delta.size(), "market_weight_exit_density: dimension mismatch");
    detail::require(x.sum() < a, "market_weight_exit_density: need sum x < a");
    std::vector<double> z(x.coords());
    for (double& v : z) v /= a;
    return ExitDensity(QuadrantPoint(std::move(z)), ModelParams::from_delta(delta), ctrl);
}

inline double market_weight_exit_density(const QuadrantPoint& x, double a, const std::vector<double>& delta,
                                         const SimplexPoint& y, const SeriesControl& ctrl = {}) {
    return market_weight_exit_law(x, a, delta, ctrl)(y);
}

/// (1-s) q / (1-2p) with p = s/(1+s): the closed form of the total mass.
inline double exit_mass_closed_form(double s, int r) {
    detail::require(0.0 < s && s < 1.0, "exit_mass_closed_form: need 0 < s < 1");
    detail::require(r >= 1, "exit_mass_closed_form: r must be a positive integer");
    const double p = s / (1.0 + s), q = 1.0 / (1.0 + s);
    return (1.0 - s) * q / (1.0 - 2.0 * p);
}

/// The same mass before resummation: (1-s) sum_m C(2m+r-1, m) p^m q^{m+r}.
inline double exit_mass_series(double s, double r, const SeriesControl& ctrl = {}) {
    detail::require(0.0 < s && s < 1.0 && r > 0.0, "exit_mass_series: need 0 < s < 1, r > 0");
    const long double lp = std::log(static_cast<long double>(s) / (1 + s)), lq = -std::log1p(static_cast<long double>(s));
    auto make = [&](int M) {
        std::vector<long double> L(M + 1);
        for (int m = 0; m <= M; ++m)
            L[m] = log_gamma_l(2 * m + r) - log_gamma_l(m + 1.0L) - log_gamma_l(m + r) + m * lp + (m + r) * lq;
        return L;
    };
    const double p = s / (1.0 + s);
    return std::exp(static_cast<double>(sum_log_series(make, std::log1p(-static_cast<long double>(s)),
                                                       4.0 * p * (1.0 - p), ctrl)
                                            .log_value));
}

/// Density of the first time the total capitalization, started at s,
/// reaches a >= s: an inverse-Gaussian law in rho = log(a/s) with drift
/// gamma = (d-1)/2. For a == s all mass sits at t = 0, so the density of
/// every t > 0 is 0 and hitting_time_cdf is identically 1.
inline double hitting_time_density(double s, double a, double d, double t) {
    detail::require(s > 0.0 && a >= s, "hitting_time_density: need 0 < s <= a");
    detail::require(d > 1.0, "hitting_time_density: need d > 1");
    detail::require(t > 0.0, "hitting_time_density: need t > 0");
    const double rho = std::log(a / s), gam = 0.5 * (d - 1.0);
    if (rho == 0.0) return 0.0;
    const double e = rho - gam * t;
    return std::exp(std::log(rho) - 0.5 * std::log(2.0 * std::numbers::pi) - 1.5 * std::log(t) - e * e / (2.0 * t));
}

inline bool hitting_time_degenerate(double s, double a) { return a == s; }

inline double hitting_time_cdf(double s, double a, double d, double t) {
    detail::require(s > 0.0 && a >= s, "hitting_time_cdf: need 0 < s <= a");
    detail::require(d > 1.0, "hitting_time_cdf: need d > 1");
    if (t <= 0.0) return a == s ? 1.0 : 0.0;
    const double rho = std::log(a / s), gam = 0.5 * (d - 1.0);
    if (rho == 0.0) return 1.0;
    const double rt = std::sqrt(t);
    auto Phi = [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); };
    return Phi((gam * t - rho) / rt) + std::exp(2.0 * gam * rho) * Phi(-(gam * t + rho) / rt);
}

}  // namespace vsm
