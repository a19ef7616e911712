#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "vsm/core/geometry.hpp"
#include "vsm/core/params.hpp"
#include "vsm/core/path.hpp"
#include "vsm/rng.hpp"

namespace vsm {

/// Exact draw of BESQ^theta at time t from x: K ~ Poisson(x/2t), then
/// Gamma(theta/2 + K) with scale 2t.
inline double besq_transition_sample(double x, double theta, double t, RngStream& rng) {
    detail::require(x >= 0.0 && theta > 0.0 && t > 0.0, "besq_transition_sample: need x >= 0, theta > 0, t > 0");
    const double k = static_cast<double>(rng.poisson(x / (2.0 * t)));
    return 2.0 * t * rng.gamma(0.5 * theta + k);
}

inline Path besq_path(const QuadrantPoint& x0, const ModelParams& params, const std::vector<double>& times,
                      RngStream& rng) {
    detail::require(x0.n() == params.n(), "besq_path: dimension mismatch");
    detail::require_grid(times, true);
    Path p;
    p.times = times;
    p.seed_record = {rng.seed(), rng.stream_index()};
    p.states.reserve(times.size());
    p.states.push_back(x0.coords());
    for (std::size_t j = 1; j < times.size(); ++j) {
        const double dt = times[j] - times[j - 1];
        std::vector<double> s(params.n());
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = besq_transition_sample(p.states.back()[i], params.theta()[i], dt, rng);
        p.states.push_back(std::move(s));
    }
    return p;
}

/// Adaptive step for boundary detection: dt = refine_factor * gap^2, clamped
/// to [dt_min, dt_max], where gap is the distance of the sum to the barrier.
struct StepControl {
    double dt_max = 0.05;
    double dt_min = 1e-6;
    double refine_factor = 0.01;
    std::uint64_t max_steps = 50'000'000;

    double step(double gap) const { return std::clamp(refine_factor * gap * gap, dt_min, dt_max); }
};

struct ExitSample {
    SimplexPoint exit_point;
    double exit_time = 0.0;
    std::uint64_t steps_used = 0;
    double overshoot = 0.0;  // zeta - 1 at the detected crossing
};

/// First state of the exact-transition chain with sum >= 1, projected
/// radially onto the oblique face.
inline ExitSample sample_exit_state(const QuadrantPoint& z0, const ModelParams& params, const StepControl& ctrl,
                                    RngStream& rng) {
    detail::require(z0.n() == params.n(), "sample_exit_state: dimension mismatch");
    params.require_transient("sample_exit_state");
    detail::require(z0.sum() < 1.0, "sample_exit_state: start must satisfy sum < 1");
    std::vector<double> z = z0.coords();
    double t = 0.0, zeta = z0.sum();
    std::uint64_t steps = 0;
    while (zeta < 1.0) {
        if (++steps > ctrl.max_steps) throw step_budget_error("sample_exit_state: step budget exceeded");
        const double dt = ctrl.step(1.0 - zeta);
        zeta = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            z[i] = besq_transition_sample(z[i], params.theta()[i], dt, rng);
            zeta += z[i];
        }
        t += dt;
    }
    return {SimplexPoint::project(z), t, steps, zeta - 1.0};
}

struct TwoSidedExit {
    bool hit_lower = false;
    double time = 0.0;
    std::uint64_t steps_used = 0;
};

/// One-dimensional BESQ^theta0 (the law of the sum) started at x inside
/// (lower, upper), run until it leaves.
inline TwoSidedExit sample_sum_two_sided_exit(double x, double theta0, double lower, double upper,
                                              const StepControl& ctrl, RngStream& rng) {
    detail::require(0.0 <= lower && lower < x && x < upper, "sample_sum_two_sided_exit: need lower < x < upper");
    TwoSidedExit r;
    while (x > lower && x < upper) {
        if (++r.steps_used > ctrl.max_steps) throw step_budget_error("sample_sum_two_sided_exit: step budget exceeded");
        const double dt = ctrl.step(std::min(x - lower, upper - x));
        x = besq_transition_sample(x, theta0, dt, rng);
        r.time += dt;
    }
    r.hit_lower = x <= lower;
    return r;
}

/// Probability that the sum, started at Sx, reaches eps before 1.
inline double hitting_prob_between(double Sx, double eps, double theta0) {
    detail::require(theta0 > 2.0, "hitting_prob_between: theta0 must exceed 2");
    detail::require(0.0 < eps && eps < Sx && Sx < 1.0, "hitting_prob_between: need 0 < eps < Sx < 1");
    const double e = 1.0 - 0.5 * theta0;
    return std::expm1(e * std::log(Sx)) / std::expm1(e * std::log(eps));
}

}  // namespace vsm
