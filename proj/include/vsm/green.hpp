#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "vsm/core/geometry.hpp"
#include "vsm/core/params.hpp"
#include "vsm/core/series.hpp"
#include "vsm/core/special.hpp"

namespace vsm {

/// omega(x) = prod x_i^{theta_i/2 - 1}.
struct WeightFn {
    ModelParams params;

    template <class T>
    long double log(const std::vector<T>& x) const {
        long double r = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double nu = params.nu()[i];
            if (nu == 0.0) continue;
            if (x[i] == 0) {
                if (nu < 0.0) throw domain_error("WeightFn: zero coordinate with theta_i < 2");
                return -std::numeric_limits<long double>::infinity();
            }
            r += nu * std::log(static_cast<long double>(x[i]));
        }
        return r;
    }
    double operator()(const QuadrantPoint& x) const { return static_cast<double>(std::exp(log(x.coords()))); }
};

inline QuadrantPoint inversion_map(const QuadrantPoint& z) {
    const double s = z.sum();
    if (!(s > 0.0)) throw domain_error("inversion_map: undefined at the origin");
    std::vector<double> c(z.coords());
    for (double& v : c) v /= s * s;
    return QuadrantPoint(std::move(c));
}

/// K[f](z) = (sum z)^{1 - theta0/2} f(I(z)).
template <class F>
double kelvin_transform(F&& f, const QuadrantPoint& z, const ModelParams& params) {
    detail::require(z.n() == params.n(), "kelvin_transform: dimension mismatch");
    params.require_transient("kelvin_transform");
    const double s = z.sum();
    if (!(s > 0.0)) throw domain_error("kelvin_transform: undefined at the origin");
    return std::pow(s, 1.0 - 0.5 * params.theta0()) * f(inversion_map(z));
}

/// Extended-precision variant; f takes and returns long double.
template <class F>
long double kelvin_transform(F&& f, const std::vector<long double>& z, const ModelParams& params) {
    detail::require(z.size() == params.n(), "kelvin_transform: dimension mismatch");
    params.require_transient("kelvin_transform");
    long double s = 0;
    for (long double v : z) {
        detail::require(v >= 0 && std::isfinite(v), "kelvin_transform: coordinates must be finite and >= 0");
        s += v;
    }
    if (!(s > 0)) throw domain_error("kelvin_transform: undefined at the origin");
    std::vector<long double> x(z);
    for (long double& v : x) v /= s * s;
    return std::pow(s, 1.0L - 0.5L * params.theta0()) * f(x);
}

namespace detail {

struct KernelPieces {
    std::vector<long double> w;  // x_i y_i
    std::vector<double> a;       // theta_i / 2
    long double log_weight_y = 0;
    long double sx = 0, sy = 0;
    double ratio = 0;  // asymptotic term ratio 4 (sum sqrt(x_i y_i))^2 / (Sx+Sy)^2
};

inline KernelPieces kernel_pieces(const std::vector<long double>& x, const std::vector<long double>& y,
                                  const ModelParams& params, const char* who) {
    require(x.size() == params.n() && y.size() == params.n(), std::string(who) + ": dimension mismatch");
    params.require_transient(who);
    KernelPieces k;
    k.a = params.delta();
    k.w.resize(x.size());
    long double root = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(x[i] >= 0 && y[i] >= 0 && std::isfinite(x[i]) && std::isfinite(y[i]),
                std::string(who) + ": coordinates must be finite and >= 0");
        k.w[i] = x[i] * y[i];
        root += std::sqrt(k.w[i]);
        k.sx += x[i];
        k.sy += y[i];
    }
    const long double s = k.sx + k.sy;
    require(s > 0, std::string(who) + ": both points at the origin");
    k.ratio = static_cast<double>(4 * root * root / (s * s));
    k.log_weight_y = WeightFn{params}.log(y);
    return k;
}

inline std::vector<long double> widen(const QuadrantPoint& x) { return {x.coords().begin(), x.coords().end()}; }

}  // namespace detail

/// Potential kernel u(x,y) of the BESQ vector: the series in m with inner
/// composition sums folded into D_m(x*y). Extended-precision arguments.
inline long double potential_kernel_u(const std::vector<long double>& x, const std::vector<long double>& y,
                                      const ModelParams& params, const SeriesControl& ctrl = {}) {
    const auto k = detail::kernel_pieces(x, y, params, "potential_kernel_u");
    if (k.log_weight_y == -std::numeric_limits<long double>::infinity()) return 0;
    const long double r = 0.5L * params.theta0();
    const long double logS = std::log(k.sx + k.sy);
    auto make = [&](int M) {
        auto L = log_inner_sums(k.w, k.a, M);
        for (int m = 0; m <= M; ++m) L[m] += log_gamma_l(r - 1 + 2 * m) + (1 - r - 2 * m) * logS;
        return L;
    };
    return std::exp(sum_log_series(make, std::log(0.5L) + k.log_weight_y, k.ratio, ctrl).log_value);
}

inline double potential_kernel_u(const QuadrantPoint& x, const QuadrantPoint& y, const ModelParams& params,
                                 const SeriesControl& ctrl = {}) {
    return static_cast<double>(potential_kernel_u(detail::widen(x), detail::widen(y), params, ctrl));
}

/// Green kernel of the unit simplex (killed at the oblique face).
inline long double green_kernel_v(const std::vector<long double>& x, const std::vector<long double>& y,
                                  const ModelParams& params, const SeriesControl& ctrl = {}) {
    const auto k = detail::kernel_pieces(x, y, params, "green_kernel_v");
    detail::require(k.sx <= 1 && k.sy <= 1, "green_kernel_v: points must lie in the unit simplex");
    if (k.log_weight_y == -std::numeric_limits<long double>::infinity()) return 0;
    const long double r = 0.5L * params.theta0();
    const long double A = k.sx + k.sy;
    // SxSy + 1 - (Sx + Sy), exact in this form
    const long double gap = (1 - k.sx) * (1 - k.sy);
    if (gap == 0) return 0;
    const long double logA = std::log(A), logratio = std::log1p(gap / A);
    auto make = [&](int M) {
        auto L = log_inner_sums(k.w, k.a, M);
        for (int m = 0; m <= M; ++m) {
            const long double p = 2 * m - 1 + r;
            // A^{-p} - (A + gap)^{-p} = A^{-p} (1 - exp(-p log(1 + gap/A)))
            L[m] += log_gamma_l(r - 1 + 2 * m) - p * logA + std::log(-std::expm1(-p * logratio));
        }
        return L;
    };
    return std::exp(sum_log_series(make, std::log(0.5L) + k.log_weight_y, k.ratio, ctrl).log_value);
}

inline double green_kernel_v(const QuadrantPoint& x, const QuadrantPoint& y, const ModelParams& params,
                             const SeriesControl& ctrl = {}) {
    return static_cast<double>(green_kernel_v(detail::widen(x), detail::widen(y), params, ctrl));
}

struct GeneratorFd {
    double value = 0.0;
    /// sum of |theta_i D_i f| + |2 z_i D_ii f|: the size of the terms that
    /// cancel when f is harmonic
    double scale = 0.0;
};

/// Central-difference generator with its term scale, in the precision of
/// the coordinate type (double or long double); f takes std::vector<Real>.
template <class Real, class F>
GeneratorFd generator_fd(F&& f, const std::vector<Real>& z, const ModelParams& params, Real h) {
    detail::require(z.size() == params.n(), "apply_generator_fd: dimension mismatch");
    detail::require(h > 0, "apply_generator_fd: step must be positive");
    for (Real v : z) detail::require(v >= h, "apply_generator_fd: point closer than h to a face");
    const Real f0 = f(z);
    Real value = 0, scale = 0;
    std::vector<Real> c(z);
    for (std::size_t i = 0; i < z.size(); ++i) {
        c[i] = z[i] + h;
        const Real fp = f(c);
        c[i] = z[i] - h;
        const Real fm = f(c);
        c[i] = z[i];
        const Real first = params.theta()[i] * (fp - fm) / (2 * h);
        const Real second = 2 * z[i] * (fp - 2 * f0 + fm) / (h * h);
        value += first + second;
        scale += std::abs(first) + std::abs(second);
    }
    return {static_cast<double>(value), static_cast<double>(scale)};
}

template <class F>
GeneratorFd generator_fd(F&& f, const QuadrantPoint& z, const ModelParams& params, double h = 1e-4) {
    auto g = [&](const std::vector<double>& c) { return f(QuadrantPoint(c)); };
    return generator_fd(g, z.coords(), params, h);
}

/// sum theta_i D_i f + 2 sum z_i D_ii f by central differences of step h.
template <class F>
double apply_generator_fd(F&& f, const QuadrantPoint& z, const ModelParams& params, double h = 1e-4) {
    return generator_fd(f, z, params, h).value;
}

}  // namespace vsm
