#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "vsm/errors.hpp"

namespace vsm {

/// BESQ dimensions theta and everything derived from them.
/// delta = theta/2 are the VSM / Wright-Fisher parameters.
class ModelParams {
public:
    ModelParams() = default;

    explicit ModelParams(std::vector<double> theta) : theta_(std::move(theta)) {
        detail::require(!theta_.empty(), "ModelParams: empty theta");
        for (double t : theta_)
            detail::require(t > 0.0, "ModelParams: theta must be positive");
        theta0_ = std::accumulate(theta_.begin(), theta_.end(), 0.0);
        delta_.reserve(theta_.size());
        nu_.reserve(theta_.size());
        for (double t : theta_) {
            delta_.push_back(0.5 * t);
            nu_.push_back(0.5 * t - 1.0);
        }
        d_ = 0.5 * theta0_;
        gamma_ = 0.5 * (d_ - 1.0);
    }

    static ModelParams from_delta(const std::vector<double>& delta) {
        std::vector<double> th(delta.size());
        for (std::size_t i = 0; i < delta.size(); ++i) th[i] = 2.0 * delta[i];
        return ModelParams(std::move(th));
    }

    std::size_t n() const { return theta_.size(); }
    const std::vector<double>& theta() const { return theta_; }
    const std::vector<double>& delta() const { return delta_; }
    const std::vector<double>& nu() const { return nu_; }
    double theta0() const { return theta0_; }
    double d() const { return d_; }
    double gamma() const { return gamma_; }
    /// Sum of the nu exponents. Kept for completeness; nothing downstream uses it.
    double nu0() const { return theta0_ / 2.0 - static_cast<double>(theta_.size()); }

    bool transient() const { return theta0_ > 2.0; }

    void require_transient(const char* who) const {
        if (!transient())
            throw domain_error(std::string(who) + ": requires theta0 > 2 (d > 1)");
    }

private:
    std::vector<double> theta_, delta_, nu_;
    double theta0_ = 0.0, d_ = 0.0, gamma_ = 0.0;
};

}  // namespace vsm
