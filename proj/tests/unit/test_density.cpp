#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "besq_oracles.hpp"
#include "vsm/core/dirichlet.hpp"
#include "vsm/density.hpp"
#include "vsm/green.hpp"
#include "vsm/rng.hpp"
#include "vsm/verify/quadrature.hpp"

using namespace vsm;

namespace {

SeriesControl fine() {
    SeriesControl c;
    c.max_terms = 4000;
    c.abs_tol = 1e-16;
    c.rel_tol = 1e-13;
    return c;
}

std::vector<double> exponents_of(const ModelParams& p) {
    std::vector<double> e;
    for (double a : p.delta()) e.push_back(a - 1.0);
    return e;
}

SimplexPoint interior_simplex(int n, double margin, RngStream& rng) {
    for (;;) {
        auto y = dirichlet_sample(std::vector<double>(n, 1.0), rng);
        bool ok = true;
        for (double v : y.coords()) ok = ok && v > margin;
        if (ok) return y;
    }
}

}  // namespace

TEST(ExitDensity, OriginStartIsDirichlet) {
    RngStream rng(21);
    for (const auto& th : std::vector<std::vector<double>>{{1, 2, 3}, {0.5, 3.5}, {2, 2, 2, 2}}) {
        const ModelParams p(th);
        const ExitDensity phi(QuadrantPoint(std::vector<double>(th.size(), 0.0)), p);
        for (int k = 0; k < 100; ++k) {
            const auto y = interior_simplex(static_cast<int>(th.size()), 1e-3, rng);
            const double ref = std::exp(dirichlet_log_density(y, p.delta()));
            EXPECT_NEAR(phi(y), ref, 1e-12 * ref);
        }
    }
}

TEST(ExitDensity, MatchesBesselIntegralForm) {
    RngStream rng(22);
    const std::vector<std::pair<std::vector<double>, std::vector<double>>> cases = {
        {{1, 2, 3}, {0.1, 0.2, 0.3}}, {{1.5, 2.5}, {0.3, 0.4}}, {{2, 2, 2, 2}, {0.1, 0.1, 0.1, 0.1}},
        {{0.7, 1.9, 2.2}, {0.05, 0.02, 0.5}}};
    for (const auto& [th, z] : cases) {
        const ModelParams p(th);
        const ExitDensity phi(QuadrantPoint(z), p, fine());
        for (int k = 0; k < 10; ++k) {
            const auto y = interior_simplex(static_cast<int>(th.size()), 1e-3, rng);
            const double ref = oracle::exit_density_bessel_integral(z, y.coords(), th);
            EXPECT_NEAR(phi(y), ref, 1e-9 * ref);
        }
    }
}

TEST(ExitDensity, Normalizes) {
    {
        const ModelParams p({1, 2, 3});
        const ExitDensity phi(QuadrantPoint({0.1, 0.2, 0.3}), p, fine());
        auto f = [&](const std::vector<double>& y) { return phi(SimplexPoint(y)); };
        const auto r = simplex_quadrature(f, SimplexGrid(3, 1), exponents_of(p), 32);
        EXPECT_NEAR(r.value, 1.0, 1e-6);
        EXPECT_LT(r.error_estimate, 1e-6);
    }
    {
        const ModelParams p({2, 2, 2, 2});
        const ExitDensity phi(QuadrantPoint({0.1, 0.1, 0.1, 0.1}), p, fine());
        auto f = [&](const std::vector<double>& y) { return phi(SimplexPoint(y)); };
        EXPECT_NEAR(simplex_quadrature(f, SimplexGrid(4, 1), {}, 16).value, 1.0, 1e-6);
    }
    {
        // theta_i < 1: singular faces carried by the Jacobi weights
        const ModelParams p({0.5, 0.8, 3});
        const ExitDensity phi(QuadrantPoint({0.2, 0.1, 0.2}), p, fine());
        auto f = [&](const std::vector<double>& y) { return phi(SimplexPoint(y)); };
        EXPECT_NEAR(simplex_quadrature(f, SimplexGrid(3, 1), exponents_of(p), 24).value, 1.0, 1e-6);
    }
}

TEST(ExitDensity, AggregatesMergedCoordinates) {
    // merging coordinates 1 and 2 of a (2,2,2,2) start gives a (4,2,2) start
    const ModelParams p({2, 2, 2, 2}), merged({4, 2, 2});
    const std::vector<double> z{0.1, 0.05, 0.2, 0.15};
    const ExitDensity phi(QuadrantPoint(z), p, fine());
    const ExitDensity phim(QuadrantPoint({z[0] + z[1], z[2], z[3]}), merged, fine());
    RngStream rng(23);
    for (int k = 0; k < 10; ++k) {
        const auto y = interior_simplex(3, 1e-2, rng);
        const double t = y[0];
        auto slice = [&](double u) { return phi(SimplexPoint({u * t, (1 - u) * t, y[1], y[2]})); };
        const double marg = t * boost::math::quadrature::gauss<double, 30>::integrate(slice, 0.0, 1.0);
        const double ref = phim(y);
        EXPECT_NEAR(marg, ref, 1e-10 * ref);
    }
}

TEST(ExitDensity, EqualsNormalDerivativeOfGreenKernel) {
    const ModelParams p({1.5, 2.5, 3});
    const WeightFn w{p};
    const QuadrantPoint z({0.1, 0.2, 0.15});
    const ExitDensity phi(z, p, fine());
    SeriesControl c = fine();
    RngStream rng(24);
    for (int k = 0; k < 10; ++k) {
        const auto y = interior_simplex(3, 0.05, rng);
        // d/dl v(l y, z) at l = 1 from inside, second order one-sided; v(y, z) = 0 on the face
        auto v = [&](double l) {
            std::vector<long double> x(3);
            for (int i = 0; i < 3; ++i) x[i] = l * y[i];
            return green_kernel_v(x, detail::widen(z), p, c);
        };
        const long double h = 1e-4L;
        const long double d = (-4 * v(1 - h) + v(1 - 2 * h)) / (2 * h);
        const double rhs = static_cast<double>(-2 * d) * w(QuadrantPoint(y.coords())) / w(z);
        const double ref = phi(y);
        EXPECT_NEAR(rhs, ref, 1e-6 * ref);
    }
}

TEST(ExitDensity, HarmonicInStartPoint) {
    const ModelParams p({1, 2, 3});
    const SimplexPoint y({0.3, 0.3, 0.4});
    RngStream rng(25);
    auto f = [&](const std::vector<long double>& z) {
        return static_cast<long double>(
            ExitDensity(QuadrantPoint({double(z[0]), double(z[1]), double(z[2])}), p, fine())(y));
    };
    for (int k = 0; k < 10; ++k) {
        const auto s = dirichlet_sample({2, 2, 2, 3}, rng).coords();
        const std::vector<long double> z{s[0], s[1], s[2]};
        const auto g = generator_fd(f, z, p, 1e-3L), g2 = generator_fd(f, z, p, 5e-4L);
        EXPECT_LE(std::abs(4 * g2.value - g.value) / 3, 1e-7 * g.scale);
    }
}

TEST(ExitDensity, BoundaryValuesAndErrors) {
    const ModelParams p({1, 2, 3});
    const ExitDensity phi(QuadrantPoint({0.1, 0.2, 0.3}), p);
    EXPECT_TRUE(std::isinf(phi(SimplexPoint({0.0, 0.5, 0.5}))));
    EXPECT_EQ(phi(SimplexPoint({0.5, 0.5, 0.0})), 0.0);
    EXPECT_GT(phi(SimplexPoint({0.5, 0.0, 0.5})), 0.0);  // theta_2 = 2: y^0
    EXPECT_THROW(ExitDensity(QuadrantPoint({0.5, 0.3, 0.3}), p), domain_error);
    EXPECT_THROW(ExitDensity(QuadrantPoint({0.1, 0.1}), p), domain_error);
    EXPECT_THROW(ExitDensity(QuadrantPoint({0.1, 0.1}), ModelParams({1, 1})), domain_error);
    SeriesControl c;
    c.max_terms = 3;
    EXPECT_THROW(ExitDensity(QuadrantPoint({0.3, 0.3, 0.3}), p, c)(SimplexPoint({0.3, 0.3, 0.4})), truncation_error);
}

TEST(ExitDensity, QueryAndTermCount) {
    const ExitDensityQuery q{QuadrantPoint({0.1, 0.2, 0.3}), SimplexPoint({0.2, 0.3, 0.5}), ModelParams({1, 2, 3}), {}};
    const ExitDensity phi(q.z, q.params);
    EXPECT_EQ(exit_density(q), phi(q.y));
    EXPECT_GT(phi.evaluate(q.y).terms, 10);
    EXPECT_NEAR(phi.tail_ratio(), 4 * (0.6 / 1.6) * (1 / 1.6), 1e-15);
}

TEST(MarketWeight, Reductions) {
    const std::vector<double> delta{0.5, 1, 1.5};
    const SimplexPoint y({0.2, 0.3, 0.5});
    EXPECT_NEAR(market_weight_exit_density(QuadrantPoint({0, 0, 0}), 1.0, delta, y),
                std::exp(dirichlet_log_density(y, delta)), 1e-13);
    const double direct = ExitDensity(QuadrantPoint({0.1, 0.2, 0.3}), ModelParams({1, 2, 3}))(y);
    EXPECT_EQ(market_weight_exit_density(QuadrantPoint({0.1, 0.2, 0.3}), 1.0, delta, y), direct);
    EXPECT_NEAR(market_weight_exit_density(QuadrantPoint({0.2, 0.4, 0.6}), 2.0, delta, y), direct, 1e-14 * direct);
    EXPECT_THROW(market_weight_exit_density(QuadrantPoint({0.5, 0.4, 0.6}), 1.0, delta, y), domain_error);
}

TEST(ExitMass, ClosedFormAndSeries) {
    EXPECT_NEAR(exit_mass_closed_form(0.5, 2), 1.0, 1e-15);
    EXPECT_NEAR(exit_mass_closed_form(1e-9, 1), 1.0, 1e-14);
    EXPECT_NEAR(exit_mass_closed_form(0.9, 3), 1.0, 1e-14);
    EXPECT_THROW(exit_mass_closed_form(1.0, 1), domain_error);
    EXPECT_THROW(exit_mass_closed_form(0.5, 0), domain_error);
    SeriesControl c;
    c.max_terms = 20000;
    for (int r : {1, 2, 3, 5})
        for (double s : {0.05, 0.3, 0.5, 0.8, 0.9})
            EXPECT_NEAR(exit_mass_series(s, r, c), exit_mass_closed_form(s, r), 1e-9) << s << " " << r;
}

TEST(HittingTime, DensityExamples) {
    // rho = 1, gamma = 0.5 (d = 2)
    const double s = 1.0, a = std::exp(1.0);
    EXPECT_NEAR(hitting_time_density(s, a, 2.0, 1.0), std::exp(-0.125) / std::sqrt(2 * M_PI), 1e-15);
    EXPECT_NEAR(hitting_time_density(s, a, 2.0, 1.0), 0.352066, 1e-6);
    EXPECT_LT(hitting_time_density(s, a, 2.0, 1e-4), 1e-300);
    boost::math::quadrature::exp_sinh<double> es;
    const double mass = es.integrate([&](double t) { return hitting_time_density(s, a, 2.0, t); }, 1e-14);
    EXPECT_NEAR(mass, 1.0, 1e-8);
    EXPECT_THROW(hitting_time_density(2.0, 1.0, 2.0, 1.0), domain_error);
    EXPECT_THROW(hitting_time_density(1.0, 2.0, 1.0, 1.0), domain_error);
}

TEST(HittingTime, CdfIntegratesDensity) {
    boost::math::quadrature::tanh_sinh<double> ts;
    for (double t : {0.1, 0.5, 1.0, 3.0, 10.0}) {
        const double I = ts.integrate([](double u) { return hitting_time_density(0.5, 1.0, 3.0, u); }, 0.0, t);
        EXPECT_NEAR(hitting_time_cdf(0.5, 1.0, 3.0, t), I, 1e-10);
    }
    EXPECT_NEAR(hitting_time_cdf(0.5, 1.0, 3.0, 1e6), 1.0, 1e-15);
}

TEST(HittingTime, DegenerateAtZeroDistance) {
    EXPECT_TRUE(hitting_time_degenerate(1.0, 1.0));
    EXPECT_FALSE(hitting_time_degenerate(1.0, 1.1));
    EXPECT_EQ(hitting_time_density(1.0, 1.0, 3.0, 0.5), 0.0);
    EXPECT_EQ(hitting_time_cdf(1.0, 1.0, 3.0, 0.0), 1.0);
    EXPECT_EQ(hitting_time_cdf(1.0, 1.0, 3.0, 0.5), 1.0);
}
