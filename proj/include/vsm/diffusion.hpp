#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vsm/besq.hpp"
#include "vsm/core/geometry.hpp"
#include "vsm/core/params.hpp"
#include "vsm/core/path.hpp"
#include "vsm/parallel.hpp"
#include "vsm/rng.hpp"

namespace vsm {

/// A nondecreasing clock sampled on a grid: integrated[k] is the clock at
/// source_times[k]. Between knots it is linear.
struct TimeChange {
    std::vector<double> source_times;
    std::vector<double> integrated;

    double operator()(double t) const {
        detail::require(!source_times.empty(), "TimeChange: empty");
        if (t <= source_times.front()) return integrated.front();
        if (t >= source_times.back()) return integrated.back();
        const auto k = static_cast<std::size_t>(
            std::upper_bound(source_times.begin(), source_times.end(), t) - source_times.begin());
        const double f = (t - source_times[k - 1]) / (source_times[k] - source_times[k - 1]);
        return integrated[k - 1] + f * (integrated[k] - integrated[k - 1]);
    }

    /// Smallest source time at which the clock reaches v, by bisection on
    /// the knots. Exact at knots.
    double invert(double v) const {
        detail::require(!integrated.empty(), "TimeChange: empty");
        if (v > integrated.back()) throw horizon_error("TimeChange: clock never reaches the requested value");
        if (v <= integrated.front()) return source_times.front();
        const auto k = static_cast<std::size_t>(
            std::lower_bound(integrated.begin(), integrated.end(), v) - integrated.begin());
        const double span = integrated[k] - integrated[k - 1];
        const double f = span > 0.0 ? (v - integrated[k - 1]) / span : 1.0;
        return source_times[k - 1] + f * (source_times[k] - source_times[k - 1]);
    }

    bool valid() const {
        if (integrated.empty() || integrated.front() != 0.0 || integrated.size() != source_times.size())
            return false;
        for (std::size_t k = 1; k < integrated.size(); ++k)
            if (integrated[k] < integrated[k - 1]) return false;
        return true;
    }
};

struct WfControl {
    double dt = 1e-3;
};

/// Euler-Maruyama for the Wright-Fisher diffusion with drift (delta_i - d x_i)/2
/// and covariance x_i(1{i=j} - x_j). Negative coordinates are clamped to 0
/// and the state renormalized after every step.
inline Path wf_path(const SimplexPoint& xi0, const std::vector<double>& delta, const std::vector<double>& times,
                    RngStream& rng, const WfControl& ctrl = {}) {
    const std::size_t n = xi0.n();
    detail::require(delta.size() == n, "wf_path: dimension mismatch");
    for (double v : delta) detail::require(v > 0.0, "wf_path: delta must be positive");
    detail::require(ctrl.dt > 0.0, "wf_path: dt must be positive");
    detail::require_grid(times, false);
    double d = 0.0;
    for (double v : delta) d += v;

    Path p;
    p.times = times;
    p.seed_record = {rng.seed(), rng.stream_index()};
    p.states.reserve(times.size());
    std::vector<double> x = xi0.coords(), root(n), g(n);
    p.states.push_back(x);
    for (std::size_t j = 1; j < times.size(); ++j) {
        const double span = times[j] - times[j - 1];
        const auto steps = static_cast<std::size_t>(std::ceil(span / ctrl.dt - 1e-9));
        const double h = span / static_cast<double>(steps), sh = std::sqrt(h);
        for (std::size_t s = 0; s < steps; ++s) {
            // sigma dB = sqrt(x_i) g_i - x_i sum_j sqrt(x_j) g_j
            double c = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                root[i] = std::sqrt(x[i]);
                g[i] = rng.normal();
                c += root[i] * g[i];
            }
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double nx = x[i] + 0.5 * (delta[i] - d * x[i]) * h + sh * (root[i] * g[i] - x[i] * c);
                g[i] = std::max(nx, 0.0);
                sum += g[i];
            }
            if (!(sum > 0.0)) continue;  // every coordinate clamped: keep the previous state
            for (std::size_t i = 0; i < n; ++i) x[i] = g[i] / sum;
        }
        p.states.push_back(x);
    }
    return p;
}

struct WfMoments {
    std::vector<double> mean;                 // E x_i(t)
    std::vector<std::vector<double>> second;  // E x_i(t) x_j(t)
};

/// First and second moments of the Wright-Fisher diffusion at time t from xi0.
/// They close: m' = (delta - d m)/2 and
/// M_ij' = (delta_i m_j + delta_j m_i)/2 + 1{i=j} m_i - (d+1) M_ij,
/// solved exactly. t = infinity gives the Dirichlet(delta) moments.
inline WfMoments wf_exact_moments(const std::vector<double>& delta, const std::vector<double>& xi0, double t) {
    const std::size_t n = delta.size();
    detail::require(xi0.size() == n && n >= 1, "wf_exact_moments: dimension mismatch");
    detail::require(t >= 0.0, "wf_exact_moments: t must be nonnegative");
    double d = 0.0;
    for (double v : delta) {
        detail::require(v > 0.0, "wf_exact_moments: delta must be positive");
        d += v;
    }
    const double e1 = std::exp(-0.5 * d * t), e2 = std::exp(-(d + 1.0) * t);
    std::vector<double> c(n), e(n);
    WfMoments r{std::vector<double>(n), std::vector<std::vector<double>>(n, std::vector<double>(n))};
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = delta[i] / d;
        e[i] = xi0[i] - c[i];
        r.mean[i] = c[i] + e[i] * e1;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            // forcing A + B e^{-dt/2}
            const double A = 0.5 * (delta[i] * c[j] + delta[j] * c[i]) + (i == j ? c[i] : 0.0);
            const double B = 0.5 * (delta[i] * e[j] + delta[j] * e[i]) + (i == j ? e[i] : 0.0);
            const double k = d + 1.0;
            r.second[i][j] = xi0[i] * xi0[j] * e2 + A * (1.0 - e2) / k + B * (e1 - e2) / (k - 0.5 * d);
        }
    return r;
}

/// Step sizes for the skew-product engine, in units relative to the current
/// sum: a step of relative size h is an exact BESQ transition over time
/// h * zeta. Each step advances the 4C clock by about 4h.
struct SkewControl {
    double rel_step = 1e-3;
    double min_rel_step = 1e-7;   // hitting runs only
    double refine_factor = 0.01;  // hitting runs: h = refine_factor * (log gap)^2
    std::size_t grid_intervals = 100;
    std::uint64_t max_steps = 50'000'000;
};

namespace detail {

/// Z = zeta * R with R on the simplex. A step rescales to zeta = 1, draws
/// the exact transition over time h, and folds the new sum back in.
struct SkewEngine {
    const ModelParams& params;
    std::vector<double> R;
    double log_zeta = 0.0;
    double clock = 0.0;  // 4 int dt / zeta
    double besq_time = 0.0;
    std::uint64_t steps = 0;

    SkewEngine(const ModelParams& p, const std::vector<double>& z0) : params(p), R(z0.size()) {
        double s = 0.0;
        for (double v : z0) s += v;
        require(s > 0.0, "skew product: start must have positive sum");
        for (std::size_t i = 0; i < R.size(); ++i) R[i] = z0[i] / s;
        log_zeta = std::log(s);
    }

    void step(double h, RngStream& rng, std::uint64_t max_steps) {
        if (++steps > max_steps) throw step_budget_error("skew product: step budget exceeded");
        double s = 0.0;
        for (std::size_t i = 0; i < R.size(); ++i) {
            R[i] = besq_transition_sample(R[i], params.theta()[i], h, rng);
            s += R[i];
        }
        for (double& v : R) v /= s;
        besq_time += std::exp(log_zeta) * h;
        clock += 2.0 * h * (1.0 + 1.0 / s);  // trapezoid on 1/zeta
        log_zeta += std::log(s);
    }
};

struct ClockSample {
    std::vector<double> R;
    double log_zeta;
    double besq_time;
};

/// Runs the engine past every clock value in `grid` (increasing, first
/// entry 0) and interpolates linearly between the bracketing steps.
template <class Visit>
void run_on_clock(SkewEngine& e, const std::vector<double>& grid, const SkewControl& ctrl, RngStream& rng,
                  Visit&& visit) {
    ClockSample prev{e.R, e.log_zeta, e.besq_time};
    double prev_clock = e.clock;
    for (double u : grid) {
        while (e.clock < u) {
            prev = {e.R, e.log_zeta, e.besq_time};
            prev_clock = e.clock;
            e.step(ctrl.rel_step, rng, ctrl.max_steps);
        }
        if (e.clock == prev_clock) {
            visit(ClockSample{e.R, e.log_zeta, e.besq_time});
            continue;
        }
        const double f = (u - prev_clock) / (e.clock - prev_clock);
        ClockSample s{std::vector<double>(e.R.size()), 0.0, 0.0};
        double sum = 0.0;
        for (std::size_t i = 0; i < e.R.size(); ++i) {
            s.R[i] = (1.0 - f) * prev.R[i] + f * e.R[i];
            sum += s.R[i];
        }
        for (double& v : s.R) v /= sum;
        s.log_zeta = (1.0 - f) * prev.log_zeta + f * e.log_zeta;
        s.besq_time = (1.0 - f) * prev.besq_time + f * e.besq_time;
        visit(s);
    }
}

}  // namespace detail

struct SkewProductPath {
    Path weights;       // R on an even grid of the WF clock u = 4C
    TimeChange clock;   // BESQ time -> 4C, one knot per engine step
    Path zeta;          // the sum on the same BESQ-time knots
};

/// Z = zeta(t) nu(4C_t): the angular part reindexed by its clock is a
/// Wright-Fisher diffusion with delta = theta/2, independent of zeta.
inline SkewProductPath skew_product_wf(const QuadrantPoint& z0, const ModelParams& params, double horizon,
                                       RngStream& rng, const SkewControl& ctrl = {}) {
    detail::require(z0.n() == params.n(), "skew_product_wf: dimension mismatch");
    params.require_transient("skew_product_wf");
    detail::require(horizon > 0.0, "skew_product_wf: horizon must be positive");
    detail::require(ctrl.rel_step > 0.0 && ctrl.grid_intervals > 0, "skew_product_wf: bad control");
    SkewProductPath out;
    out.weights.seed_record = out.zeta.seed_record = {rng.seed(), rng.stream_index()};
    std::vector<double> grid(ctrl.grid_intervals + 1);
    for (std::size_t k = 0; k < grid.size(); ++k)
        grid[k] = horizon * static_cast<double>(k) / static_cast<double>(ctrl.grid_intervals);
    grid.back() = horizon;

    detail::SkewEngine e(params, z0.coords());
    auto knot = [&] {
        out.clock.source_times.push_back(e.besq_time);
        out.clock.integrated.push_back(e.clock);
        out.zeta.times.push_back(e.besq_time);
        out.zeta.states.push_back({std::exp(e.log_zeta)});
    };
    knot();
    // step manually so every knot is recorded
    std::size_t k = 0;
    std::vector<double> prevR = e.R;
    double prev_clock = 0.0;
    while (k < grid.size()) {
        if (e.clock >= grid[k]) {
            const double span = e.clock - prev_clock;
            const double f = span > 0.0 ? (grid[k] - prev_clock) / span : 1.0;
            std::vector<double> r(e.R.size());
            double sum = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) {
                r[i] = (1.0 - f) * prevR[i] + f * e.R[i];
                sum += r[i];
            }
            for (double& v : r) v /= sum;
            out.weights.times.push_back(grid[k]);
            out.weights.states.push_back(std::move(r));
            ++k;
            continue;
        }
        prevR = e.R;
        prev_clock = e.clock;
        try {
            e.step(ctrl.rel_step, rng, ctrl.max_steps);
        } catch (const step_budget_error&) {
            throw horizon_error("skew_product_wf: WF horizon not reached within the step budget");
        }
        knot();
    }
    return out;
}

/// VSM capitalizations X(u) = Z(tau_u) with 4 tau_u = int_0^u S. The VSM
/// clock coincides with the 4C clock of Z, so X(u) = zeta nu at clock u.
inline Path vsm_path(const QuadrantPoint& x0, const std::vector<double>& delta, const std::vector<double>& times,
                     RngStream& rng, const SkewControl& ctrl = {}) {
    detail::require(x0.n() == delta.size(), "vsm_path: dimension mismatch");
    const ModelParams params = ModelParams::from_delta(delta);
    params.require_transient("vsm_path");
    detail::require_grid(times, true);
    Path p;
    p.times = times;
    p.seed_record = {rng.seed(), rng.stream_index()};
    p.states.reserve(times.size());
    detail::SkewEngine e(params, x0.coords());
    try {
        detail::run_on_clock(e, times, ctrl, rng, [&](const detail::ClockSample& s) {
            std::vector<double> x(s.R);
            const double S = std::exp(s.log_zeta);
            for (double& v : x) v *= S;
            p.states.push_back(std::move(x));
        });
    } catch (const step_budget_error&) {
        throw horizon_error("vsm_path: time grid not reached within the step budget");
    }
    p.states.front() = x0.coords();
    return p;
}

/// Total capitalization S = sum X along a path.
inline std::vector<double> capitalization(const Path& p) {
    std::vector<double> S;
    S.reserve(p.size());
    for (const auto& x : p.states) {
        double s = 0.0;
        for (double v : x) s += v;
        S.push_back(s);
    }
    return S;
}

struct VsmHit {
    double time = 0.0;          // hitting time of level a by S
    SimplexPoint weights;       // market weights at that time
    double besq_time = 0.0;     // the same instant on the BESQ clock
    std::uint64_t steps_used = 0;
};

/// First time S reaches a, with the market weights there. Steps shrink
/// with the log-distance to the level; the time is interpolated in log S
/// across the crossing step.
inline VsmHit sample_vsm_hitting(const QuadrantPoint& x0, const std::vector<double>& delta, double a,
                                 RngStream& rng, const SkewControl& ctrl = {}) {
    detail::require(x0.n() == delta.size(), "sample_vsm_hitting: dimension mismatch");
    const ModelParams params = ModelParams::from_delta(delta);
    params.require_transient("sample_vsm_hitting");
    detail::require(x0.sum() > 0.0 && a >= x0.sum(), "sample_vsm_hitting: need 0 < S(0) <= a");
    detail::SkewEngine e(params, x0.coords());
    const double la = std::log(a);
    double prev_lz = e.log_zeta, prev_clock = 0.0, prev_bt = 0.0;
    while (e.log_zeta < la) {
        prev_lz = e.log_zeta;
        prev_clock = e.clock;
        prev_bt = e.besq_time;
        const double gap = la - e.log_zeta;
        e.step(std::clamp(ctrl.refine_factor * gap * gap, ctrl.min_rel_step, ctrl.rel_step), rng, ctrl.max_steps);
    }
    VsmHit h;
    h.weights = SimplexPoint::project(e.R);
    h.steps_used = e.steps;
    if (e.steps == 0) return h;
    const double f = (la - prev_lz) / (e.log_zeta - prev_lz);
    h.time = prev_clock + f * (e.clock - prev_clock);
    h.besq_time = prev_bt + f * (e.besq_time - prev_bt);
    return h;
}

/// mu~_i = X_i / sum_{j in subset} X_j for i in subset (0-based indices).
inline Path submarket_weights(const Path& path, const std::vector<std::size_t>& subset) {
    detail::require(!subset.empty(), "submarket_weights: empty subset");
    for (std::size_t i : subset) detail::require(i < path.dim(), "submarket_weights: index out of range");
    Path out;
    out.times = path.times;
    out.seed_record = path.seed_record;
    out.states.reserve(path.size());
    for (const auto& x : path.states) {
        double s = 0.0, total = 0.0;
        for (std::size_t i : subset) s += x[i];
        for (double v : x) total += v;
        if (!(s > 1e-300) || !(s > 1e-14 * total))
            throw degenerate_subsum_error("submarket_weights: subset sum vanishes");
        std::vector<double> w;
        w.reserve(subset.size());
        for (std::size_t i : subset) w.push_back(x[i] / s);
        out.states.push_back(std::move(w));
    }
    return out;
}

/// int ds / sum_{i in subset} mu_i(s) by trapezoid on the path grid; the
/// path holds market weights (or capitalizations, which are normalized).
inline TimeChange submarket_clock(const Path& path, const std::vector<std::size_t>& subset) {
    detail::require(path.size() > 0, "submarket_clock: empty path");
    auto share = [&](const std::vector<double>& x) {
        double s = 0.0, total = 0.0;
        for (std::size_t i : subset) {
            detail::require(i < x.size(), "submarket_clock: index out of range");
            s += x[i];
        }
        for (double v : x) total += v;
        if (!(s > 1e-14 * total)) throw degenerate_subsum_error("submarket_clock: subset sum vanishes");
        return s / total;
    };
    TimeChange tc;
    tc.source_times = path.times;
    tc.integrated.assign(path.size(), 0.0);
    double prev = 1.0 / share(path.states.front());
    for (std::size_t k = 1; k < path.size(); ++k) {
        const double cur = 1.0 / share(path.states[k]);
        tc.integrated[k] = tc.integrated[k - 1] + 0.5 * (path.times[k] - path.times[k - 1]) * (prev + cur);
        prev = cur;
    }
    return tc;
}

/// States of `path` at the source times where the clock reads each of
/// `clock_values`, by linear interpolation.
inline Path reclock(const Path& path, const TimeChange& tc, const std::vector<double>& clock_values) {
    detail::require(tc.source_times == path.times, "reclock: clock and path grids differ");
    Path out;
    out.times = clock_values;
    out.seed_record = path.seed_record;
    for (double v : clock_values) {
        const double s = tc.invert(v);
        auto k = static_cast<std::size_t>(std::upper_bound(path.times.begin(), path.times.end(), s) -
                                          path.times.begin());
        if (k >= path.size()) {
            out.states.push_back(path.states.back());
            continue;
        }
        if (k == 0) k = 1;
        const double f = (s - path.times[k - 1]) / (path.times[k] - path.times[k - 1]);
        std::vector<double> x(path.dim());
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = (1.0 - f) * path.states[k - 1][i] + f * path.states[k][i];
        out.states.push_back(std::move(x));
    }
    return out;
}

/// int_0^u ds / zeta(s) for the sum zeta ~ BESQ^theta0 started at z0, by
/// trapezoid over exact relative steps; the last step lands on u.
inline double timechange_integral(double z0, double theta0, double u, RngStream& rng, const SkewControl& ctrl = {}) {
    detail::require(z0 > 0.0 && theta0 > 0.0 && u > 0.0, "timechange_integral: need z0, theta0, u > 0");
    double zeta = z0, t = 0.0, integral = 0.0;
    std::uint64_t steps = 0;
    while (t < u) {
        if (++steps > ctrl.max_steps) throw step_budget_error("timechange_integral: step budget exceeded");
        double h = ctrl.rel_step;
        bool last = false;
        if (t + zeta * h >= u) {
            h = (u - t) / zeta;
            last = true;
        }
        const double r = besq_transition_sample(1.0, theta0, h, rng);
        integral += 0.5 * h * (1.0 + 1.0 / r);
        t = last ? u : t + zeta * h;
        zeta *= r;
    }
    return integral;
}

/// Monte Carlo mean of (1/log u) int_0^u ds/zeta(s), zeta the BESQ^theta0
/// sum started at z0.
inline double timechange_growth_statistic(const ModelParams& params, double u, RngStream& rng, std::size_t n_paths,
                                          double z0 = 1.0, const SkewControl& ctrl = {}) {
    detail::require(params.d() > 2.0, "timechange_growth_statistic: requires d > 2");
    detail::require(u > 1.0 && n_paths > 0, "timechange_growth_statistic: need u > 1 and n_paths > 0");
    double s = 0.0;
    for (std::size_t k = 0; k < n_paths; ++k) s += timechange_integral(z0, params.theta0(), u, rng, ctrl);
    return s / static_cast<double>(n_paths) / std::log(u);
}

/// Runs f(rng, i) for i in [0, count) on `workers` threads. Worker w owns
/// RngStream(seed, w) and takes i = w, w + W, ... in order, so the result
/// depends only on (seed, workers).
template <class R, class F>
std::vector<R> monte_carlo(std::size_t count, std::uint64_t seed, unsigned workers, F&& f) {
    workers = std::max(1u, workers);
    std::vector<R> out(count);
    parallel_for(workers, workers, [&](std::size_t w) {
        RngStream rng(seed, w);
        for (std::size_t i = w; i < count; i += workers) out[i] = f(rng, i);
    });
    return out;
}

}  // namespace vsm
