#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/multiprecision/mpfr.hpp>

#include "vsm/errors.hpp"

namespace vsm {

struct InversionControl {
    int node_count = 32;
    /// Evaluate in MPFR with precision sized to the node count and to the
    /// cancellation the target needs. Off: plain double arithmetic.
    bool working_precision_hint = true;
    std::vector<double> validation_rho_grid{0.1, 0.5, 1.0, 2.0, 3.0};
    double rel_tol = 1e-8;
    int max_node_count = 4096;

    void validate() const {
        detail::require(node_count >= 16, "InversionControl: node_count must be >= 16");
        detail::require(max_node_count >= node_count, "InversionControl: max_node_count below node_count");
        detail::require(rel_tol > 0.0, "InversionControl: rel_tol must be positive");
    }
};

namespace mp {

template <unsigned Digits>
using real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<Digits>,
                                           boost::multiprecision::et_off>;

/// Minimal complex arithmetic over a real type without a complex backend.
template <class R>
struct cx {
    R re, im;

    cx() : re(0), im(0) {}
    cx(R a, R b = R(0)) : re(std::move(a)), im(std::move(b)) {}

    friend cx operator+(const cx& a, const cx& b) { return {a.re + b.re, a.im + b.im}; }
    friend cx operator-(const cx& a, const cx& b) { return {a.re - b.re, a.im - b.im}; }
    friend cx operator*(const cx& a, const cx& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
    friend cx operator*(const cx& a, const R& b) { return {a.re * b, a.im * b}; }
    friend cx operator/(const cx& a, const cx& b) {
        const R den = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
    }
    friend cx operator/(const R& a, const cx& b) { return cx(a) / b; }
    friend cx operator/(const cx& a, const R& b) { return {a.re / b, a.im / b}; }
    friend cx operator*(const R& a, const cx& b) { return b * a; }
    friend cx operator+(const cx& a, const R& b) { return {a.re + b, a.im}; }
    friend cx operator+(const R& a, const cx& b) { return {a + b.re, b.im}; }
    friend cx operator-(const cx& a, const R& b) { return {a.re - b, a.im}; }
    friend cx operator-(const R& a, const cx& b) { return {a - b.re, -b.im}; }
    friend cx operator-(const cx& a) { return {-a.re, -a.im}; }
};

template <class R>
R abs2(const cx<R>& z) {
    return z.re * z.re + z.im * z.im;
}

template <class R>
cx<R> exp(const cx<R>& z) {
    using std::cos, std::exp, std::sin;
    const R m = exp(z.re);
    return {m * cos(z.im), m * sin(z.im)};
}

/// Principal branch.
template <class R>
cx<R> log(const cx<R>& z) {
    using std::atan2, std::log;
    return {log(abs2(z)) / 2, atan2(z.im, z.re)};
}

/// Principal branch.
template <class R>
cx<R> sqrt(const cx<R>& z) {
    using std::atan2, std::cos, std::sin, std::sqrt;
    const R m = sqrt(sqrt(abs2(z)));
    if (m == 0) return {R(0), R(0)};
    const R h = atan2(z.im, z.re) / 2;
    return {m * cos(h), m * sin(h)};
}

template <class R>
cx<R> pow(const cx<R>& z, const R& a) {
    return exp(log(z) * a);
}

/// Fixed-Talbot nodes for target time u and N nodes:
/// s_k = r theta (cot theta + i), weight (1 + i sigma) e^{u s_k}, r = 2N/(5u).
/// Returns f(u) ~ (r/N) [ F(r) e^{ru} / 2 + sum_k Re(e^{u s_k} F(s_k)(1 + i sigma_k)) ].
/// Transform values come in through `eval`, which receives the node and must
/// return one transform value per requested output (a batch).
template <class R, class Eval>
std::vector<R> talbot_batch(const R& u, int N, std::size_t width, Eval&& eval) {
    using std::cos, std::exp, std::sin;
    const R pi = boost::math::constants::pi<R>();
    const R r = R(2 * N) / (R(5) * u);
    std::vector<R> acc(width, R(0));
    {
        const auto F = eval(cx<R>(r));
        const R e = exp(r * u) / 2;
        for (std::size_t m = 0; m < width; ++m) acc[m] += F[m].re * e;
    }
    for (int k = 1; k < N; ++k) {
        const R th = pi * k / N;
        const R c = cos(th) / sin(th);
        const cx<R> s(r * th * c, r * th);
        const R sigma = th + (th * c - 1) * c;
        const cx<R> w = exp(s * u) * cx<R>(R(1), sigma);
        const auto F = eval(s);
        for (std::size_t m = 0; m < width; ++m) acc[m] += (w * F[m]).re;
    }
    for (auto& a : acc) a *= r / N;
    return acc;
}

/// Calls body.template operator()<R>() with the smallest MPFR type of at
/// least `digits` decimal digits.
template <class Body>
decltype(auto) with_precision(int digits, Body&& body) {
    if (digits <= 40) return body.template operator()<real<40>>();
    if (digits <= 80) return body.template operator()<real<80>>();
    if (digits <= 160) return body.template operator()<real<160>>();
    if (digits <= 320) return body.template operator()<real<320>>();
    if (digits <= 640) return body.template operator()<real<640>>();
    if (digits <= 1280) return body.template operator()<real<1280>>();
    if (digits <= 2560) return body.template operator()<real<2560>>();
    throw inversion_error("talbot: required working precision exceeds 2560 digits");
}

}  // namespace mp

/// Working precision for N Talbot nodes: the weights reach e^{2N/5}, so
/// about N digits keep the rounding below the quadrature error.
inline int talbot_digits(int N) { return N + 20; }

/// Fixed-Talbot inversion g(u) of the transform F. F is called with
/// mp::cx<R> nodes (R double or an MPFR type) and returns mp::cx<R>, so a
/// generic lambda works: [](const auto& s) { return 1 / (s + 1); }.
/// The node_count result is compared with 2 x node_count; a move beyond
/// rel_tol (relative, floored at 1e-300) throws inversion_error.
template <class F>
double laplace_invert(F&& Ftr, double u, const InversionControl& ctrl = {}) {
    ctrl.validate();
    detail::require(u > 0.0, "laplace_invert: u must be positive");
    auto run = [&](int N) {
        auto body = [&]<class R>() {
            auto ev = [&](const mp::cx<R>& s) { return std::vector<mp::cx<R>>{Ftr(s)}; };
            return static_cast<double>(mp::talbot_batch<R>(R(u), N, 1, ev)[0]);
        };
        if (!ctrl.working_precision_hint) return body.template operator()<double>();
        return mp::with_precision(talbot_digits(N), body);
    };
    const double a = run(ctrl.node_count), b = run(2 * ctrl.node_count);
    if (!(std::abs(a - b) <= ctrl.rel_tol * std::max(std::abs(b), 1e-300)))
        throw inversion_error("laplace_invert: node doubling moved the result beyond rel_tol");
    return b;
}

}  // namespace vsm
