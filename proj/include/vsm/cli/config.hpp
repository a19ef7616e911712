#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "vsm/core/series.hpp"
#include "vsm/transition/talbot.hpp"

namespace vsm::cli {

/// Documented default seed; there is no environment override.
inline constexpr std::uint64_t default_seed = 20240611;

enum ExitCode : int { ok = 0, usage = 1, numerical = 2, failed_verification = 3 };

/// Missing or inconsistent flags.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double unset = std::numeric_limits<double>::quiet_NaN();

struct RunConfig {
    std::string command;  // density | simulate | verify | table
    std::string target;   // the second word, e.g. exit, vsm, normalization, bm

    std::vector<double> theta, delta;
    std::vector<double> z, x, x0, xi, y;
    std::vector<double> t;  // one value for most commands, a list for `table bm`
    std::vector<double> rho;
    std::vector<std::size_t> subset;

    double a = unset, s = unset, d = unset, u = unset;
    double t_max = unset, t_burn = unset, dt = unset, euler_dt = unset;
    double eps = unset, h = unset, threshold = unset, target_value = unset;
    double rel_step = unset;

    std::size_t paths = 0;  // 0: command default
    std::size_t points = 0;
    int resolution = 0;
    int order = 0;
    int m_max = -1;

    SeriesControl series;
    bool series_set = false;  // any series flag given
    InversionControl inversion;

    std::uint64_t seed = default_seed;
    unsigned workers = 1;
    std::string out;
    std::string format;  // csv | json; empty: command default
    std::string engine;  // verify moments: sde | skew

    /// Every flag that was given (command line or config file) plus seed and
    /// workers, echoed into output metadata.
    nlohmann::ordered_json flags = nlohmann::ordered_json::object();
};

namespace detail {

inline double need(double v, const char* flag) {
    if (std::isnan(v)) throw usage_error(std::string("missing required flag ") + flag);
    return v;
}

inline const std::vector<double>& need(const std::vector<double>& v, const char* flag) {
    if (v.empty()) throw usage_error(std::string("missing required flag ") + flag);
    return v;
}

inline double need_one(const std::vector<double>& v, const char* flag) {
    if (v.size() != 1) throw usage_error(std::string(flag) + " takes exactly one value here");
    return v.front();
}

inline double or_default(double v, double fallback) { return std::isnan(v) ? fallback : v; }

/// delta from --delta, or theta/2 from --theta; exactly one of them.
inline std::vector<double> delta_of(const RunConfig& c) {
    if (!c.delta.empty() && !c.theta.empty()) throw usage_error("give --delta or --theta, not both");
    if (!c.delta.empty()) return c.delta;
    if (c.theta.empty()) throw usage_error("missing required flag --delta (or --theta)");
    std::vector<double> d(c.theta);
    for (double& v : d) v *= 0.5;
    return d;
}

inline std::vector<double> theta_of(const RunConfig& c) {
    auto t = delta_of(c);
    for (double& v : t) v *= 2.0;
    return t;
}

inline void same_length(const std::vector<double>& a, std::size_t n, const char* flag) {
    if (a.size() != n) throw usage_error(std::string(flag) + " has the wrong number of components");
}

}  // namespace detail

}  // namespace vsm::cli
