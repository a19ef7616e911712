#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace vsm {

/// Outcome of one statistical or numerical check.
/// pass is statistic <= threshold for direction "le", >= for "ge".
struct VerificationReport {
    std::string test_name;
    double statistic = 0.0;
    double threshold = 0.0;
    std::string direction = "le";
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    bool pass = false;
    nlohmann::ordered_json metadata = nlohmann::ordered_json::object();

    static VerificationReport make(std::string name, double statistic, double threshold, std::string direction = "le",
                                   std::uint64_t n_samples = 0, std::uint64_t seed = 0) {
        VerificationReport r;
        r.test_name = std::move(name);
        r.statistic = statistic;
        r.threshold = threshold;
        r.direction = std::move(direction);
        r.n_samples = n_samples;
        r.seed = seed;
        r.pass = r.direction == "ge" ? statistic >= threshold : statistic <= threshold;
        return r;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["test"] = test_name;
        j["statistic"] = statistic;
        j["threshold"] = threshold;
        j["direction"] = direction;
        j["n_samples"] = n_samples;
        j["seed"] = seed;
        j["pass"] = pass;
        j["metadata"] = metadata;
        return j;
    }
};

}  // namespace vsm
