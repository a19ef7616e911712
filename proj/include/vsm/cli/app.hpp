#pragma once

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vsm/cli/commands.hpp"
#include "vsm/cli/config.hpp"

namespace vsm::cli {

namespace detail {

inline nlohmann::ordered_json flag_value(const std::vector<std::string>& raw) {
    auto one = [](const std::string& s) -> nlohmann::ordered_json {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos == s.size()) {
                if (v == std::floor(v) && std::abs(v) < 9e15) return static_cast<std::int64_t>(v);
                return v;
            }
        } catch (const std::exception&) {
        }
        return s;
    };
    if (raw.size() == 1) return one(raw.front());
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& s : raw) a.push_back(one(s));
    return a;
}

inline void add_targets(CLI::App& parent, const std::vector<std::string>& targets, std::string& chosen) {
    parent.require_subcommand(1);
    parent.fallthrough();
    for (const auto& t : targets) {
        auto* sub = parent.add_subcommand(t);
        sub->fallthrough();
        sub->callback([&chosen, t] { chosen = t; });
    }
}

}  // namespace detail

/// Parses argv into cfg. Returns -1 when parsing succeeded and the command
/// should run, otherwise the exit code (help is 0, errors are 1).
inline int parse(RunConfig& cfg, int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Volatility-stabilized market, BESQ and Wright-Fisher densities, simulation and checks", "vsmctl"};
    app.set_config("--config", "", "key=value file; flags on the command line win");
    app.require_subcommand(1);

    auto list = [&](const char* name, auto& target, const char* help) {
        return app.add_option(name, target, help)->delimiter(',')->expected(1, 1 << 20);
    };
    list("--theta", cfg.theta, "BESQ dimensions theta_i");
    list("--delta", cfg.delta, "VSM / Wright-Fisher parameters delta_i = theta_i/2");
    list("--z", cfg.z, "BESQ start point");
    list("--x", cfg.x, "capitalizations");
    list("--x0", cfg.x0, "initial capitalizations");
    list("--xi", cfg.xi, "Wright-Fisher start point on the simplex");
    list("--y", cfg.y, "evaluation point on the simplex (pole for harmonicity)");
    list("--t", cfg.t, "time; a list for table bm");
    list("--rho", cfg.rho, "transform arguments for laplace-roundtrip");
    list("--subset", cfg.subset, "0-based asset indices of the sub-market");
    app.add_option("--a", cfg.a, "level of the total capitalization");
    app.add_option("--s", cfg.s, "initial total capitalization");
    app.add_option("--d", cfg.d, "d = sum delta");
    app.add_option("--u", cfg.u, "clock value");
    app.add_option("--t-max", cfg.t_max, "horizon");
    app.add_option("--t-burn", cfg.t_burn, "start of the occupation window");
    app.add_option("--dt", cfg.dt, "output grid spacing");
    app.add_option("--euler-dt", cfg.euler_dt, "Euler step of the Wright-Fisher SDE");
    app.add_option("--rel-step", cfg.rel_step, "relative step of the skew-product engine");
    app.add_option("--eps", cfg.eps, "lower level");
    app.add_option("--step", cfg.h, "finite-difference or quadrature step");
    app.add_option("--threshold", cfg.threshold, "override the pass threshold");
    app.add_option("--target", cfg.target_value, "target value for timechange (default 1/(theta0-2))");
    app.add_option("--paths", cfg.paths, "number of Monte Carlo paths");
    app.add_option("--points", cfg.points, "number of test points or pairs");
    app.add_option("--resolution", cfg.resolution, "subdivisions per simplex edge")->check(CLI::PositiveNumber);
    app.add_option("--order", cfg.order, "Gauss points per cell direction")->check(CLI::Range(2, 256));
    app.add_option("--m-max", cfg.m_max, "largest series index")->check(CLI::NonNegativeNumber);
    auto* mt = app.add_option("--max-terms", cfg.series.max_terms, "series term limit")->check(CLI::PositiveNumber);
    auto* at = app.add_option("--abs-tol", cfg.series.abs_tol, "series absolute tolerance")->check(CLI::PositiveNumber);
    auto* rt = app.add_option("--rel-tol", cfg.series.rel_tol, "series relative tolerance")->check(CLI::PositiveNumber);
    app.add_option("--node-count", cfg.inversion.node_count, "initial Talbot nodes")->check(CLI::Range(16, 1 << 16));
    app.add_option("--max-node-count", cfg.inversion.max_node_count, "Talbot node limit");
    app.add_option("--inv-rel-tol", cfg.inversion.rel_tol, "Talbot doubling tolerance")->check(CLI::PositiveNumber);
    app.add_option("--engine", cfg.engine, "moments engine")->check(CLI::IsMember({"sde", "skew"}));
    app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    app.add_option("--workers", cfg.workers, "Monte Carlo threads")->capture_default_str()->check(CLI::Range(1u, 1024u));
    app.add_option("--out", cfg.out, "output file (default stdout)");
    app.add_option("--format", cfg.format, "csv or json (density only)")->check(CLI::IsMember({"csv", "json"}));

    auto group = [&](const char* name, const std::vector<std::string>& targets) {
        auto* g = app.add_subcommand(name);
        g->callback([&cfg, name] { cfg.command = name; });
        detail::add_targets(*g, targets, cfg.target);
    };
    group("density", {"exit", "weights", "hitting", "transition"});
    group("simulate", {"besq", "vsm", "wf", "skew"});
    group("verify", {"normalization", "symmetry", "harmonicity", "mc-exit", "stationarity", "moments", "timechange",
                     "transition-mc", "laplace-roundtrip", "submarket"});
    group("table", {"bm", "exit-grid"});

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage;
    }
    cfg.series_set = mt->count() + at->count() + rt->count() > 0;
    for (const auto* o : app.get_options()) {
        const std::string name = o->get_name(false, true);
        if (name.empty() || name == "--help" || name == "--config") continue;
        const std::string key = o->get_lnames().empty() ? name : o->get_lnames().front();
        if (o->count() > 0)
            cfg.flags[key] = detail::flag_value(o->results());
        else if (key == "seed" || key == "workers")
            cfg.flags[key] = key == "seed" ? cfg.seed : static_cast<std::uint64_t>(cfg.workers);
    }
    return -1;
}

inline int dispatch(const RunConfig& cfg, std::ostream& out) {
    if (cfg.command == "density") return run_density(cfg, out);
    if (cfg.command == "simulate") return run_simulate(cfg, out);
    if (cfg.command == "verify") return run_verify(cfg, out);
    if (cfg.command == "table") return run_table(cfg, out);
    throw usage_error("unknown command " + cfg.command);
}

/// Full command: parse, run, map failures to exit codes. Results go to out
/// (or --out), diagnostics to err.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    RunConfig cfg;
    if (const int code = parse(cfg, argc, argv, out, err); code >= 0) return code;
    try {
        return dispatch(cfg, out);
    } catch (const usage_error& e) {
        err << "usage error: " << e.what() << '\n';
        return usage;
    } catch (const domain_error& e) {
        err << "invalid input: " << e.what() << '\n';
        return usage;
    } catch (const numerical_error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return numerical;
    }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"vsmctl"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace vsm::cli
