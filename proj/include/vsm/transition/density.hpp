#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "vsm/core/geometry.hpp"
#include "vsm/core/params.hpp"
#include "vsm/core/series.hpp"
#include "vsm/core/special.hpp"
#include "vsm/green.hpp"
#include "vsm/transition/bm_table.hpp"

namespace vsm {

/// Below this time the series needs very many terms; results carry the
/// achieved mass defect instead of failing.
inline constexpr double transition_small_t = 0.05;

/// p(t, xi, .) for the Wright-Fisher diffusion with parameters delta:
///   sum_m Gamma(2m+d) b_m(t) omega(y) D_m(xi * y, delta),
/// the Dirichlet mixture sum_m c_m b_m sum_{|k|=m} mult(k) xi^k Dir(y; k+delta)
/// with the inner sum folded. The b_m table is shared across y.
class TransitionDensity {
public:
    TransitionDensity(double t, const SimplexPoint& xi, const std::vector<double>& delta,
                      const SeriesControl& ctrl = {}, const InversionControl& inv = {})
        : t_(t), xi_(xi), params_(ModelParams::from_delta(delta)) {
        detail::require(xi.n() == delta.size(), "transition_density: dimension mismatch");
        detail::require(t > 0.0 && std::isfinite(t), "transition_density: need t > 0");
        params_.require_transient("transition_density");
        ctrl.validate();
        InversionControl ic = inv;
        // the mass test below needs b_m to well inside abs_tol
        ic.rel_tol = std::min(inv.rel_tol, 0.1 * ctrl.abs_tol);
        const double d = params_.d();
        int M = std::min(16, ctrl.max_terms);
        for (;;) {
            table_ = bm_coefficients_cached(d, t, M, ic);
            double S = 0.0;
            for (int m = 0; m <= M; ++m) {
                const double term = BmTable::mass_coefficient(m, d) * table_->values[m];
                S += term;
                if (std::abs(1.0 - S) <= ctrl.abs_tol && std::abs(term) <= ctrl.abs_tol) {
                    terms_ = m + 1;
                    mass_defect_ = 1.0 - S;
                    return;
                }
            }
            if (M >= ctrl.max_terms) {
                mass_defect_ = 1.0 - S;
                terms_ = M + 1;
                if (t < transition_small_t) {
                    unreliable_ = true;
                    return;
                }
                throw truncation_error("transition_density: mass sum did not reach 1 within max_terms");
            }
            M = std::min(2 * M, ctrl.max_terms);
        }
    }

    double operator()(const SimplexPoint& y) const {
        detail::require(y.n() == xi_.n(), "transition_density: dimension mismatch");
        const long double lw = WeightFn{params_}.log(y.coords());
        if (lw == -std::numeric_limits<long double>::infinity()) return 0.0;
        std::vector<long double> w(y.n());
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = static_cast<long double>(xi_[i]) * static_cast<long double>(y[i]);
        const int M = terms_ - 1;
        const auto L = log_inner_sums(w, params_.delta(), M);
        long double s = 0;
        for (int m = 0; m <= M; ++m) {
            const double b = table_->values[m];
            if (b == 0.0 || L[m] == -std::numeric_limits<long double>::infinity()) continue;
            s += b * std::exp(log_gamma_l(2.0L * m + params_.d()) + L[m] + lw);
        }
        // rounding in b_m can leave a tiny negative value where p vanishes
        return std::max(0.0, static_cast<double>(s));
    }

    double t() const { return t_; }
    int terms() const { return terms_; }
    /// 1 - sum_{m < terms} c_m b_m.
    double mass_defect() const { return mass_defect_; }
    bool unreliable() const { return unreliable_; }
    const BmTable& table() const { return *table_; }

private:
    double t_;
    SimplexPoint xi_;
    ModelParams params_;
    std::shared_ptr<const BmTable> table_;
    int terms_ = 0;
    double mass_defect_ = 0.0;
    bool unreliable_ = false;
};

inline double transition_density(double t, const SimplexPoint& xi, const SimplexPoint& y,
                                 const std::vector<double>& delta, const SeriesControl& ctrl = {},
                                 const InversionControl& inv = {}) {
    return TransitionDensity(t, xi, delta, ctrl, inv)(y);
}

/// sqrt(2 pi)/rho e^{-(m+gamma) rho} (1 - e^{-rho}) (1 + e^{-rho})^{-2m-d}.
inline double bm_transform_value(int m, double d, double rho) {
    detail::require(rho > 0.0 && d > 1.0 && m >= 0, "bm_transform_value: need rho > 0, d > 1, m >= 0");
    const double g = 0.5 * (d - 1.0);
    return std::exp(0.5 * std::log(2.0 * std::numbers::pi) - std::log(rho) - (m + g) * rho +
                    std::log(-std::expm1(-rho)) - (2.0 * m + d) * std::log1p(std::exp(-rho)));
}

struct RoundTrip {
    std::vector<double> rho;
    /// forward[m][j]: int_0^inf b_m(t) t^{-3/2} e^{-gamma^2 t/2} e^{-rho_j^2/2t} dt
    std::vector<std::vector<double>> forward;
    /// largest relative change between step h and 2h (every other node)
    double step_change = 0.0;
};

/// Forward quadrature of inverted b_m tables against the transform kernel,
/// trapezoid in x = log t with step h over t in [1e-3, 80/gamma^2 + 10]:
/// below, b_m(t) is under e^{-4000}; above, the kernel is under e^{-40}.
inline RoundTrip bm_forward_transform(double d, int M, const std::vector<double>& rho, const InversionControl& inv = {},
                                      double h = 0.05) {
    detail::require(!rho.empty(), "bm_forward_transform: empty rho grid");
    for (double r : rho) detail::require(r > 0.0, "bm_forward_transform: rho must be positive");
    detail::require(d > 1.0 && h > 0.0, "bm_forward_transform: need d > 1, h > 0");
    const double g = 0.5 * (d - 1.0);
    const double x_lo = std::log(1e-3), x_hi = std::log(80.0 / (g * g) + 10.0);
    const int K = 2 * static_cast<int>(std::ceil((x_hi - x_lo) / (2 * h)));  // even, for the 2h check
    std::vector<std::vector<double>> fine(M + 1, std::vector<double>(rho.size(), 0.0)), coarse = fine;
    for (int k = 0; k <= K; ++k) {
        const double x = x_lo + k * h, t = std::exp(x);
        // t * t^{-3/2} from dt = t dx; skip nodes where the kernel underflows
        const double lk = -0.5 * x - 0.5 * g * g * t;
        double lmax = -1e300;
        for (double r : rho) lmax = std::max(lmax, lk - r * r / (2 * t));
        if (lmax < -745.0) continue;
        const auto tab = bm_coefficients(d, t, M, inv);
        const double wt = (k == 0 || k == K) ? 0.5 : 1.0;
        const double wc = (k % 2 == 0) ? ((k == 0 || k == K) ? 0.5 : 1.0) : 0.0;
        for (int m = 0; m <= M; ++m)
            for (std::size_t j = 0; j < rho.size(); ++j) {
                const double v = tab.values[m] * std::exp(lk - rho[j] * rho[j] / (2 * t));
                fine[m][j] += wt * v;
                coarse[m][j] += wc * v;
            }
    }
    RoundTrip rt;
    rt.rho = rho;
    rt.forward = fine;
    for (int m = 0; m <= M; ++m)
        for (std::size_t j = 0; j < rho.size(); ++j) {
            rt.forward[m][j] *= h;
            const double c = coarse[m][j] * 2 * h;
            rt.step_change = std::max(rt.step_change, std::abs(c - rt.forward[m][j]) / std::abs(rt.forward[m][j]));
        }
    return rt;
}

}  // namespace vsm
