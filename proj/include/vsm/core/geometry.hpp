#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "vsm/errors.hpp"

namespace vsm {

/// Point of the closed nonnegative quadrant.
class QuadrantPoint {
public:
    QuadrantPoint() = default;
    explicit QuadrantPoint(std::vector<double> c) : c_(std::move(c)) {
        for (double v : c_) {
            detail::require(std::isfinite(v), "QuadrantPoint: non-finite coordinate");
            detail::require(v >= 0.0, "QuadrantPoint: negative coordinate");
        }
    }
    QuadrantPoint(std::initializer_list<double> c) : QuadrantPoint(std::vector<double>(c)) {}

    std::size_t n() const { return c_.size(); }
    const std::vector<double>& coords() const { return c_; }
    double operator[](std::size_t i) const { return c_[i]; }
    double sum() const { return std::accumulate(c_.begin(), c_.end(), 0.0); }

private:
    std::vector<double> c_;
};

/// Point of the oblique face {sum = 1}. Sums within 1e-12 of one are
/// renormalized, anything further off is rejected.
class SimplexPoint {
public:
    static constexpr double sum_tolerance = 1e-12;

    SimplexPoint() = default;
    explicit SimplexPoint(std::vector<double> c) : c_(std::move(c)) {
        detail::require(!c_.empty(), "SimplexPoint: empty");
        double s = 0.0;
        for (double v : c_) {
            detail::require(std::isfinite(v) && v >= 0.0, "SimplexPoint: coordinates must be >= 0");
            s += v;
        }
        detail::require(std::abs(s - 1.0) <= sum_tolerance, "SimplexPoint: coordinates do not sum to 1");
        if (s != 1.0)
            for (double& v : c_) v /= s;
    }
    SimplexPoint(std::initializer_list<double> c) : SimplexPoint(std::vector<double>(c)) {}

    /// Radial projection v/sum(v) of a nonzero quadrant vector.
    static SimplexPoint project(const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) {
            detail::require(std::isfinite(x) && x >= 0.0, "SimplexPoint::project: bad coordinate");
            s += x;
        }
        detail::require(s > 0.0, "SimplexPoint::project: zero vector");
        std::vector<double> c(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) c[i] = v[i] / s;
        SimplexPoint p;
        p.c_ = std::move(c);
        return p;
    }

    std::size_t n() const { return c_.size(); }
    const std::vector<double>& coords() const { return c_; }
    double operator[](std::size_t i) const { return c_[i]; }

private:
    std::vector<double> c_;
};

}  // namespace vsm
