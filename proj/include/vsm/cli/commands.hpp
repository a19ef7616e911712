#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vsm/besq.hpp"
#include "vsm/cli/config.hpp"
#include "vsm/core/compositions.hpp"
#include "vsm/core/dirichlet.hpp"
#include "vsm/density.hpp"
#include "vsm/diffusion.hpp"
#include "vsm/green.hpp"
#include "vsm/parallel.hpp"
#include "vsm/transition.hpp"
#include "vsm/verify/quadrature.hpp"
#include "vsm/verify/report.hpp"
#include "vsm/verify/stats.hpp"

namespace vsm::cli {

namespace detail {

/// Writes to --out when given, else to the supplied stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw usage_error("cannot open --out file " + path);
            os_ = &file_;
        }
        *os_ << std::setprecision(17);
    }
    std::ostream& operator*() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

inline nlohmann::ordered_json header(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["command"] = c.command + " " + c.target;
    j["flags"] = c.flags;
    return j;
}

/// CSV carries no metadata; with --out it goes to <out>.meta.json.
inline void write_sidecar(const RunConfig& c, nlohmann::ordered_json extra = {}) {
    if (c.out.empty()) return;
    auto j = header(c);
    if (!extra.is_null()) j["result"] = std::move(extra);
    std::ofstream f(c.out + ".meta.json", std::ios::binary);
    f << j.dump(2) << '\n';
}

inline int emit_report(const RunConfig& c, VerificationReport r, std::ostream& out) {
    r.metadata["command"] = c.command + " " + c.target;
    r.metadata["flags"] = c.flags;
    Sink sink(c.out, out);
    *sink << r.to_json().dump(2) << '\n';
    return r.pass ? ok : failed_verification;
}

inline std::vector<double> time_grid(double t_max, double dt) {
    if (!(t_max > 0.0) || !(dt > 0.0)) throw usage_error("--t-max and --dt must be positive");
    const auto k = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
    std::vector<double> g(k + 1);
    for (std::size_t i = 0; i <= k; ++i) g[i] = std::min(t_max, dt * static_cast<double>(i));
    g.back() = t_max;
    return g;
}

/// One RNG stream per index, so results do not depend on --workers.
template <class R, class F>
std::vector<R> per_path(const RunConfig& c, std::size_t count, F&& f) {
    std::vector<R> out(count);
    parallel_for(count, c.workers, [&](std::size_t i) {
        RngStream rng(c.seed, i);
        out[i] = f(rng, i);
    });
    return out;
}

inline void write_path_rows(std::ostream& os, std::size_t id, const Path& p) {
    for (std::size_t k = 0; k < p.size(); ++k)
        for (std::size_t i = 0; i < p.states[k].size(); ++i)
            os << id << ',' << p.times[k] << ',' << i << ',' << p.states[k][i] << '\n';
}

inline std::vector<double> column(const std::vector<std::vector<double>>& s, std::size_t i) {
    std::vector<double> c(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) c[k] = s[k][i];
    return c;
}

/// Largest z over first and second moments of the samples against m.
inline VerificationReport moments_report(const std::string& name, const std::vector<std::vector<double>>& s,
                                         const WfMoments& m, std::uint64_t seed) {
    const std::size_t n = m.mean.size();
    double worst = 0.0;
    nlohmann::ordered_json per = nlohmann::ordered_json::array();
    auto add = [&](const std::string& label, const std::vector<double>& v, double target) {
        const auto r = moment_test(v, {{1, target}}, {1}, seed, label);
        worst = std::max(worst, r.statistic);
        per.push_back({{"moment", label}, {"sample", r.metadata["orders"]["1"]["sample"]}, {"exact", target},
                       {"z", r.statistic}});
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto ci = column(s, i);
        add("x" + std::to_string(i), ci, m.mean[i]);
        for (std::size_t j = i; j < n; ++j) {
            auto p = column(s, j);
            for (std::size_t k = 0; k < p.size(); ++k) p[k] *= ci[k];
            add("x" + std::to_string(i) + "x" + std::to_string(j), p, m.second[i][j]);
        }
    }
    auto r = VerificationReport::make(name, worst, 3.0, "le", s.size(), seed);
    r.metadata["moments"] = per;
    return r;
}

inline double threshold_or(const RunConfig& c, double fallback) { return or_default(c.threshold, fallback); }

inline VerificationReport with_threshold(VerificationReport r, double threshold) {
    r.threshold = threshold;
    r.pass = r.direction == "ge" ? r.statistic >= threshold : r.statistic <= threshold;
    return r;
}

/// Uniform point of the open unit simplex in R^n, margin away from every face.
inline std::vector<double> interior_point(std::size_t n, double margin, RngStream& rng) {
    for (;;) {
        auto v = dirichlet_sample(std::vector<double>(n + 1, 1.0), rng).coords();
        const double rest = v.back();
        v.pop_back();
        bool good = rest > margin;
        for (double x : v) good = good && x > margin;
        if (good) return v;
    }
}

inline SeriesControl wide_series(const RunConfig& c, int max_terms, double abs_tol, double rel_tol) {
    if (c.series_set) return c.series;
    SeriesControl s;
    s.max_terms = max_terms;
    s.abs_tol = abs_tol;
    s.rel_tol = rel_tol;
    return s;
}

inline std::vector<double> exponents_of(const std::vector<double>& delta) {
    std::vector<double> e(delta);
    for (double& v : e) v -= 1.0;
    return e;
}

}  // namespace detail

// ---------------------------------------------------------------- density

inline int run_density(const RunConfig& c, std::ostream& out) {
    using namespace detail;
    nlohmann::ordered_json res;
    double value = 0.0;
    if (c.target == "exit") {
        const ModelParams p(theta_of(c));
        same_length(need(c.z, "--z"), p.n(), "--z");
        same_length(need(c.y, "--y"), p.n(), "--y");
        const auto s = ExitDensity(QuadrantPoint(c.z), p, c.series).evaluate(SimplexPoint(c.y));
        value = s.value();
        res["terms"] = s.terms;
    } else if (c.target == "weights") {
        const auto delta = delta_of(c);
        same_length(need(c.x, "--x"), delta.size(), "--x");
        same_length(need(c.y, "--y"), delta.size(), "--y");
        const auto s = market_weight_exit_law(QuadrantPoint(c.x), need(c.a, "--a"), delta, c.series)
                           .evaluate(SimplexPoint(c.y));
        value = s.value();
        res["terms"] = s.terms;
    } else if (c.target == "hitting") {
        double d = c.d;
        if (std::isnan(d)) {
            d = 0.0;
            for (double v : delta_of(c)) d += v;
        }
        value = hitting_time_density(need(c.s, "--s"), need(c.a, "--a"), d, need_one(need(c.t, "--t"), "--t"));
        res["cdf"] = hitting_time_cdf(c.s, c.a, d, c.t.front());
    } else if (c.target == "transition") {
        const auto delta = delta_of(c);
        same_length(need(c.xi, "--xi"), delta.size(), "--xi");
        same_length(need(c.y, "--y"), delta.size(), "--y");
        const TransitionDensity p(need_one(need(c.t, "--t"), "--t"), SimplexPoint(c.xi), delta, c.series,
                                  c.inversion);
        value = p(SimplexPoint(c.y));
        res["terms"] = p.terms();
        res["mass_defect"] = p.mass_defect();
        res["unreliable"] = p.unreliable();
    } else {
        throw usage_error("unknown density target " + c.target);
    }
    Sink sink(c.out, out);
    if (c.format == "json") {
        auto j = header(c);
        j["value"] = value;
        for (auto& [k, v] : res.items()) j[k] = v;
        *sink << j.dump(2) << '\n';
    } else {
        *sink << value << '\n';
        write_sidecar(c, res);
    }
    return ok;
}

// --------------------------------------------------------------- simulate

inline int run_simulate(const RunConfig& c, std::ostream& out) {
    using namespace detail;
    const std::size_t paths = c.paths ? c.paths : 1;
    const double t_max = need(c.t_max, "--t-max");
    SkewControl sc;
    sc.rel_step = or_default(c.rel_step, sc.rel_step);
    std::vector<Path> result;
    std::vector<SkewProductPath> skew;
    if (c.target == "besq") {
        const ModelParams p(theta_of(c));
        same_length(need(c.z, "--z"), p.n(), "--z");
        const auto g = time_grid(t_max, need(c.dt, "--dt"));
        result = per_path<Path>(c, paths, [&](RngStream& r, std::size_t) { return besq_path(QuadrantPoint(c.z), p, g, r); });
    } else if (c.target == "vsm") {
        const auto delta = delta_of(c);
        same_length(need(c.x0, "--x0"), delta.size(), "--x0");
        const auto g = time_grid(t_max, need(c.dt, "--dt"));
        result = per_path<Path>(c, paths, [&](RngStream& r, std::size_t) {
            return vsm_path(QuadrantPoint(c.x0), delta, g, r, sc);
        });
    } else if (c.target == "wf") {
        const auto delta = delta_of(c);
        same_length(need(c.xi, "--xi"), delta.size(), "--xi");
        const auto g = time_grid(t_max, need(c.dt, "--dt"));
        const WfControl wc{or_default(c.euler_dt, WfControl{}.dt)};
        result = per_path<Path>(c, paths, [&](RngStream& r, std::size_t) {
            return wf_path(SimplexPoint(c.xi), delta, g, r, wc);
        });
    } else if (c.target == "skew") {
        const ModelParams p(theta_of(c));
        same_length(need(c.z, "--z"), p.n(), "--z");
        sc.grid_intervals = static_cast<std::size_t>(std::ceil(t_max / need(c.dt, "--dt") - 1e-9));
        if (sc.grid_intervals == 0) throw usage_error("--dt must not exceed --t-max");
        skew = per_path<SkewProductPath>(c, paths, [&](RngStream& r, std::size_t) {
            return skew_product_wf(QuadrantPoint(c.z), p, t_max, r, sc);
        });
    } else {
        throw usage_error("unknown simulate target " + c.target);
    }
    Sink sink(c.out, out);
    *sink << "path_id,time,component,value\n";
    for (std::size_t k = 0; k < result.size(); ++k) write_path_rows(*sink, k, result[k]);
    // skew: weights on the Wright-Fisher clock, then zeta and the clock on BESQ time
    for (std::size_t k = 0; k < skew.size(); ++k) {
        write_path_rows(*sink, k, skew[k].weights);
        const auto& z = skew[k].zeta;
        for (std::size_t j = 0; j < z.size(); ++j) *sink << k << ',' << z.times[j] << ",zeta," << z.states[j][0] << '\n';
        const auto& tc = skew[k].clock;
        for (std::size_t j = 0; j < tc.source_times.size(); ++j)
            *sink << k << ',' << tc.source_times[j] << ",clock," << tc.integrated[j] << '\n';
    }
    write_sidecar(c, {{"paths", paths}});
    return ok;
}

// ------------------------------------------------------------------ table

inline int run_table(const RunConfig& c, std::ostream& out) {
    using namespace detail;
    Sink sink(c.out, out);
    if (c.target == "bm") {
        double d = c.d;
        if (std::isnan(d)) {
            d = 0.0;
            for (double v : delta_of(c)) d += v;
        }
        const int M = c.m_max >= 0 ? c.m_max : 20;
        nlohmann::ordered_json meta = nlohmann::ordered_json::array();
        *sink << "m,t,b_m\n";
        for (double t : need(c.t, "--t")) {
            const auto tab = bm_coefficients(d, t, M, c.inversion);
            for (int m = 0; m <= M; ++m) *sink << m << ',' << t << ',' << tab.values[m] << '\n';
            meta.push_back({{"t", t},
                            {"node_count", tab.inversion_meta.node_count},
                            {"digits", tab.inversion_meta.digits},
                            {"contour_r", tab.inversion_meta.contour_r},
                            {"doubling_change", tab.inversion_meta.doubling_change}});
        }
        write_sidecar(c, {{"inversion", meta}});
    } else if (c.target == "exit-grid") {
        const ModelParams p(theta_of(c));
        same_length(need(c.z, "--z"), p.n(), "--z");
        const int r = c.resolution ? c.resolution : 10;
        const int n = static_cast<int>(p.n());
        if (r < n) throw usage_error("--resolution must be at least the dimension");
        const ExitDensity phi(QuadrantPoint(c.z), p, c.series);
        for (int i = 0; i < n; ++i) *sink << 'y' << i << ',';
        *sink << "phi\n";
        // interior lattice points k/r with every k_i >= 1
        for (const auto& k : enumerate_compositions(r - n, n)) {
            std::vector<double> y(n);
            for (int i = 0; i < n; ++i) y[i] = (k.k[i] + 1.0) / r;
            const SimplexPoint Y = SimplexPoint::project(y);
            for (int i = 0; i < n; ++i) *sink << Y[i] << ',';
            *sink << phi(Y) << '\n';
        }
        write_sidecar(c);
    } else {
        throw usage_error("unknown table target " + c.target);
    }
    return ok;
}

// ----------------------------------------------------------------- verify

inline int run_verify(const RunConfig& c, std::ostream& out) {
    using namespace detail;
    const std::string& v = c.target;
    VerificationReport r;

    if (v == "normalization") {
        const ModelParams p(theta_of(c));
        same_length(need(c.z, "--z"), p.n(), "--z");
        const ExitDensity phi(QuadrantPoint(c.z), p, wide_series(c, 4000, 1e-16, 1e-13));
        const int res = c.resolution ? c.resolution : 8;
        const int order = c.order ? c.order : std::clamp(128 / res, 4, 16);
        auto f = [&](const std::vector<double>& y) { return phi(SimplexPoint(y)); };
        const auto q = simplex_quadrature(f, SimplexGrid(static_cast<int>(p.n()), res), exponents_of(p.delta()), order);
        r = VerificationReport::make("normalization", std::abs(q.value - 1.0), threshold_or(c, 1e-6));
        r.metadata["mass"] = q.value;
        r.metadata["error_estimate"] = q.error_estimate;
        r.metadata["evaluations"] = q.evaluations;
    } else if (v == "symmetry") {
        const ModelParams p(theta_of(c));
        const WeightFn w{p};
        const auto ctrl = wide_series(c, max_inner_order, 1e-30, 1e-10);
        const std::size_t pairs = c.points ? c.points : 1000;
        const auto rel = per_path<double>(c, pairs, [&](RngStream& rng, std::size_t) {
            const QuadrantPoint x(interior_point(p.n(), 1e-3, rng)), y(interior_point(p.n(), 1e-3, rng));
            const double a = green_kernel_v(x, y, p, ctrl) * w(x), b = green_kernel_v(y, x, p, ctrl) * w(y);
            return std::abs(a - b) / std::abs(a);
        });
        double worst = 0.0;
        for (double e : rel) worst = std::max(worst, e);
        r = VerificationReport::make("symmetry", worst, threshold_or(c, 1e-10), "le", pairs, c.seed);
    } else if (v == "harmonicity") {
        using LV = std::vector<long double>;
        const ModelParams p(theta_of(c));
        const LV y = c.y.empty() ? LV(p.n(), 0.5L / static_cast<long double>(p.n())) : LV(c.y.begin(), c.y.end());
        if (y.size() != p.n()) throw usage_error("--y has the wrong number of components");
        const auto ctrl = wide_series(c, max_inner_order, 1e-22, 1e-17);
        const long double h = or_default(c.h, 1e-4);
        const std::size_t count = c.points ? c.points : 200;
        auto uy = [&](const LV& x) { return potential_kernel_u(x, y, p, ctrl); };
        auto K = [&](const LV& x) { return kelvin_transform(uy, x, p); };
        const auto ratio = per_path<double>(c, count, [&](RngStream& rng, std::size_t) {
            for (;;) {
                const auto zv = interior_point(p.n(), 1e-2, rng);
                double dist2 = 0.0;
                for (std::size_t i = 0; i < p.n(); ++i) dist2 += std::pow(zv[i] - static_cast<double>(y[i]), 2);
                if (dist2 <= 1e-4) continue;
                const LV z(zv.begin(), zv.end());
                const auto g = generator_fd(K, z, p, h), g2 = generator_fd(K, z, p, h / 2);
                // bound 10 h^2 x scale at both steps
                const double hh = static_cast<double>(h * h);
                return std::max(std::abs(g.value) / (hh * g.scale), std::abs(g2.value) / (hh / 4 * g2.scale));
            }
        });
        double worst = 0.0;
        for (double e : ratio) worst = std::max(worst, e);
        r = VerificationReport::make("harmonicity", worst, threshold_or(c, 10.0), "le", count, c.seed);
        r.metadata["h"] = static_cast<double>(h);
    } else if (v == "mc-exit") {
        const ModelParams p(theta_of(c));
        same_length(need(c.z, "--z"), p.n(), "--z");
        const std::size_t paths = c.paths ? c.paths : 200000;
        StepControl st;
        const auto s = per_path<std::vector<double>>(c, paths, [&](RngStream& rng, std::size_t) {
            return sample_exit_state(QuadrantPoint(c.z), p, st, rng).exit_point.coords();
        });
        const ExitDensity phi(QuadrantPoint(c.z), p, wide_series(c, 4000, 1e-16, 1e-13));
        const int res = c.resolution ? c.resolution : default_bin_resolution(static_cast<int>(p.n()));
        const double tv = binned_tv_distance(s, [&](const std::vector<double>& y) { return phi(SimplexPoint(y)); },
                                             SimplexGrid(static_cast<int>(p.n()), res), exponents_of(p.delta()));
        r = VerificationReport::make("mc-exit", tv, threshold_or(c, 0.02), "le", paths, c.seed);
        r.metadata["bins_per_edge"] = res;
    } else if (v == "stationarity") {
        const auto delta = delta_of(c);
        const std::size_t n = delta.size(), paths = c.paths ? c.paths : 10000;
        const std::vector<double> xi = c.xi.empty() ? std::vector<double>(n, 1.0 / n) : c.xi;
        same_length(xi, n, "--xi");
        const double t0 = or_default(c.t_burn, 25.0), t1 = or_default(c.t_max, 50.0), dt = or_default(c.dt, 0.05);
        if (!(0.0 < t0 && t0 < t1)) throw usage_error("need 0 < --t-burn < --t-max");
        auto g = time_grid(t1 - t0, dt);
        for (double& t : g) t += t0;
        g.insert(g.begin(), 0.0);
        const WfControl wc{or_default(c.euler_dt, 2e-3)};
        // per path: time averages of x_i and x_i x_j over [t0, t1], packed
        const auto occ = per_path<std::vector<double>>(c, paths, [&](RngStream& rng, std::size_t) {
            const auto path = wf_path(SimplexPoint(xi), delta, g, rng, wc);
            std::vector<double> acc(n + n * n, 0.0);
            for (std::size_t k = 2; k < path.size(); ++k) {
                const double w = 0.5 * (path.times[k] - path.times[k - 1]) / (t1 - t0);
                for (const auto* x : {&path.states[k - 1], &path.states[k]})
                    for (std::size_t i = 0; i < n; ++i) {
                        acc[i] += w * (*x)[i];
                        for (std::size_t j = 0; j < n; ++j) acc[n + i * n + j] += w * (*x)[i] * (*x)[j];
                    }
            }
            return acc;
        });
        const auto dir = wf_exact_moments(delta, xi, std::numeric_limits<double>::infinity());
        double worst = 0.0;
        nlohmann::ordered_json per = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j <= n; ++j) {
                // j == n: first moment of coordinate i
                std::vector<double> col(paths);
                for (std::size_t k = 0; k < paths; ++k) col[k] = j == n ? occ[k][i] : occ[k][n + i * n + j];
                const double target = j == n ? dir.mean[i] : dir.second[i][j];
                const auto m = moment_test(col, {{1, target}}, {1}, c.seed);
                worst = std::max(worst, m.statistic);
                per.push_back({{"moment", j == n ? "x" + std::to_string(i) : "x" + std::to_string(i) + "x" + std::to_string(j)},
                               {"sample", m.metadata["orders"]["1"]["sample"]},
                               {"exact", target},
                               {"z", m.statistic}});
            }
        r = VerificationReport::make("stationarity", worst, threshold_or(c, 3.0), "le", paths, c.seed);
        r.metadata["moments"] = per;
    } else if (v == "moments") {
        const auto delta = delta_of(c);
        same_length(need(c.xi, "--xi"), delta.size(), "--xi");
        const double t = need_one(need(c.t, "--t"), "--t");
        const std::size_t paths = c.paths ? c.paths : 10000;
        const std::string engine = c.engine.empty() ? "sde" : c.engine;
        std::vector<std::vector<double>> s;
        if (engine == "sde") {
            const WfControl wc{or_default(c.euler_dt, 2e-3)};
            s = per_path<std::vector<double>>(c, paths, [&](RngStream& rng, std::size_t) {
                return wf_path(SimplexPoint(c.xi), delta, {0.0, t}, rng, wc).states.back();
            });
        } else if (engine == "skew") {
            const auto p = ModelParams::from_delta(delta);
            SkewControl sc;
            sc.rel_step = or_default(c.rel_step, sc.rel_step);
            sc.grid_intervals = 1;
            s = per_path<std::vector<double>>(c, paths, [&](RngStream& rng, std::size_t) {
                return skew_product_wf(QuadrantPoint(c.xi), p, t, rng, sc).weights.states.back();
            });
        } else {
            throw usage_error("--engine must be sde or skew");
        }
        r = with_threshold(moments_report("moments", s, wf_exact_moments(delta, c.xi, t), c.seed), threshold_or(c, 3.0));
        r.metadata["engine"] = engine;
    } else if (v == "timechange") {
        const ModelParams p(theta_of(c));
        const double u = or_default(c.u, 1e4);
        const std::size_t paths = c.paths ? c.paths : 200;
        RngStream rng(c.seed);
        const double stat = timechange_growth_statistic(p, u, rng, paths);
        const double limit = 1.0 / (p.theta0() - 2.0);
        const double target = or_default(c.target_value, limit);
        r = VerificationReport::make("timechange", std::abs(stat / target - 1.0), threshold_or(c, 0.05), "le", paths,
                                     c.seed);
        r.metadata["mean_statistic"] = stat;
        r.metadata["target"] = target;
        r.metadata["limit"] = limit;
        r.metadata["u"] = u;
    } else if (v == "transition-mc") {
        const auto delta = delta_of(c);
        same_length(need(c.xi, "--xi"), delta.size(), "--xi");
        const double t = need_one(need(c.t, "--t"), "--t");
        const std::size_t paths = c.paths ? c.paths : 100000;
        const WfControl wc{or_default(c.euler_dt, 1e-3)};
        const auto s = per_path<std::vector<double>>(c, paths, [&](RngStream& rng, std::size_t) {
            return wf_path(SimplexPoint(c.xi), delta, {0.0, t}, rng, wc).states.back();
        });
        const TransitionDensity pd(t, SimplexPoint(c.xi), delta, c.series, c.inversion);
        const int n = static_cast<int>(delta.size());
        const int res = c.resolution ? c.resolution : default_bin_resolution(n);
        const double tv = binned_tv_distance(s, [&](const std::vector<double>& y) { return pd(SimplexPoint(y)); },
                                             SimplexGrid(n, res), exponents_of(delta));
        r = VerificationReport::make("transition-mc", tv, threshold_or(c, 0.03), "le", paths, c.seed);
        r.metadata["series_terms"] = pd.terms();
        r.metadata["mass_defect"] = pd.mass_defect();
    } else if (v == "laplace-roundtrip") {
        double d = c.d;
        if (std::isnan(d)) {
            d = 0.0;
            for (double x : delta_of(c)) d += x;
        }
        const int M = c.m_max >= 0 ? c.m_max : 5;
        const auto rho = c.rho.empty() ? c.inversion.validation_rho_grid : c.rho;
        const auto rt = bm_forward_transform(d, M, rho, c.inversion, or_default(c.h, 0.05));
        double worst = 0.0;
        for (int m = 0; m <= M; ++m)
            for (std::size_t j = 0; j < rho.size(); ++j)
                worst = std::max(worst, std::abs(rt.forward[m][j] / bm_transform_value(m, d, rho[j]) - 1.0));
        r = VerificationReport::make("laplace-roundtrip", worst, threshold_or(c, 1e-6));
        r.metadata["d"] = d;
        r.metadata["step_change"] = rt.step_change;
        r.metadata["forward_m0"] = rt.forward[0];
    } else if (v == "submarket") {
        const auto delta = delta_of(c);
        const std::size_t n = delta.size();
        const std::vector<std::size_t> sub = c.subset.empty() ? std::vector<std::size_t>{1, 2} : c.subset;
        for (auto i : sub)
            if (i >= n) throw usage_error("--subset index out of range (indices are 0-based)");
        const std::vector<double> x0 = c.x0.empty() ? std::vector<double>(n, 1.0) : c.x0;
        same_length(x0, n, "--x0");
        const double u = or_default(c.u, 0.6);
        const auto g = time_grid(or_default(c.t_max, 2.0), or_default(c.dt, 1e-3));
        const std::size_t paths = c.paths ? c.paths : 10000;
        SkewControl sc;
        sc.rel_step = or_default(c.rel_step, sc.rel_step);
        const auto s = per_path<std::vector<double>>(c, paths, [&](RngStream& rng, std::size_t) {
            const auto p = vsm_path(QuadrantPoint(x0), delta, g, rng, sc);
            return reclock(submarket_weights(p, sub), submarket_clock(p, sub), {u}).states[0];
        });
        std::vector<double> dsub, w0;
        double tot = 0.0;
        for (auto i : sub) tot += x0[i];
        for (auto i : sub) {
            dsub.push_back(delta[i]);
            w0.push_back(x0[i] / tot);
        }
        r = with_threshold(moments_report("submarket", s, wf_exact_moments(dsub, w0, u), c.seed), threshold_or(c, 3.0));
        r.metadata["clock"] = u;
    } else {
        throw usage_error("unknown verify target " + v);
    }
    return emit_report(c, std::move(r), out);
}

}  // namespace vsm::cli
