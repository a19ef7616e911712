#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "transition_oracles.hpp"
#include "vsm/core/dirichlet.hpp"
#include "vsm/diffusion.hpp"
#include "vsm/transition.hpp"
#include "vsm/verify/quadrature.hpp"
#include "vsm/verify/stats.hpp"

using namespace vsm;

TEST(Talbot, ElementaryTransforms) {
    EXPECT_NEAR(laplace_invert([](const auto& s) { return 1 / s; }, 1.0), 1.0, 1e-12);
    EXPECT_NEAR(laplace_invert([](const auto& s) { return 1 / (s + 1); }, 1.0), std::exp(-1.0), 1e-12);
    EXPECT_NEAR(laplace_invert([](const auto& s) { return 1 / (s * s); }, 2.5), 2.5, 1e-11);
}

TEST(Talbot, BranchPointTransform) {
    // e^{-a sqrt s} inverts to a/(2 sqrt pi) u^{-3/2} e^{-a^2/4u}
    const double a = 1.3;
    for (double u : {0.05, 0.4, 3.0}) {
        const double g = laplace_invert([&](const auto& s) { return mp::exp(-(mp::sqrt(s) * decltype(s.re)(a))); }, u);
        const double exact = a / (2 * std::sqrt(M_PI)) * std::pow(u, -1.5) * std::exp(-a * a / (4 * u));
        EXPECT_NEAR(g, exact, 1e-10 * exact) << u;
    }
}

TEST(Talbot, DoublePrecisionNodeDoublingIsFlagged) {
    // in double arithmetic the e^{2N/5} weights swamp a 1e-12 target at 64 nodes
    InversionControl c;
    c.working_precision_hint = false;
    c.rel_tol = 1e-12;
    EXPECT_THROW(laplace_invert([](const auto& s) { return 1 / (s + 1); }, 1.0, c), inversion_error);
    c.node_count = 8;
    EXPECT_THROW(laplace_invert([](const auto& s) { return 1 / s; }, 1.0, c), domain_error);
}

TEST(BmTable, MatchesExponentialSeries) {
    for (double d : {2.0, 3.0, 4.5})
        for (double t : {0.1, 0.5, 1.0, 5.0}) {
            const auto tab = bm_coefficients(d, t, 12);
            for (int m = 0; m <= 12; ++m) {
                const double o = oracle::bm_exponential_series(m, d, t);
                EXPECT_LE(BmTable::mass_coefficient(m, d) * std::abs(tab.values[m] - o), 1e-10)
                    << "d=" << d << " t=" << t << " m=" << m;
            }
        }
}

TEST(BmTable, StationaryLimit) {
    const auto tab = bm_coefficients(3, 100, 2);
    EXPECT_NEAR(tab.values[0], 1.0, 1e-3);
    EXPECT_NEAR(tab.values[1], 0.0, 1e-3);
    EXPECT_NEAR(tab.values[2], 0.0, 1e-3);
    EXPECT_GE(tab.inversion_meta.node_count, 32);
    EXPECT_GT(tab.inversion_meta.digits, tab.inversion_meta.node_count);
}

TEST(BmTable, TotalMassIdentity) {
    for (double t : {0.2, 1.0, 5.0}) EXPECT_NEAR(bm_coefficients(6, t, 60).total_mass(), 1.0, 1e-4) << t;
}

TEST(BmTable, ForwardTransformReproducesRhs) {
    const auto rt = bm_forward_transform(2.0, 2, {0.5, 1.0});
    for (int m = 0; m <= 2; ++m)
        for (std::size_t j = 0; j < rt.rho.size(); ++j) {
            const double rhs = oracle::bm_transform_rhs(m, 2.0, rt.rho[j]);
            EXPECT_NEAR(rt.forward[m][j] / rhs, 1.0, 1e-6);
            EXPECT_NEAR(bm_transform_value(m, 2.0, rt.rho[j]) / rhs, 1.0, 1e-14);
        }
    EXPECT_NEAR(rt.forward[0][1], 0.513627, 1e-5);
    EXPECT_LT(rt.step_change, 1e-8);
}

TEST(BmTable, CacheReusesTables) {
    const auto a = bm_coefficients_cached(2.5, 0.7, 10);
    const auto b = bm_coefficients_cached(2.5, 0.7, 5);
    EXPECT_EQ(a.get(), b.get());
    const auto c = bm_coefficients_cached(2.5, 0.7, 20);
    EXPECT_GE(c->values.size(), 21u);
}

TEST(BmTable, RejectsBadInput) {
    EXPECT_THROW(bm_coefficients(1.0, 1.0, 3), domain_error);
    EXPECT_THROW(bm_coefficients(2.0, 0.0, 3), domain_error);
    EXPECT_THROW(bm_coefficients(2.0, 1.0, -1), domain_error);
    InversionControl c;
    c.max_node_count = 32;  // no room to double
    EXPECT_THROW(bm_coefficients(2.0, 1.0, 3, c), inversion_error);
}

TEST(TransitionDensity, StationaryLimitIsDirichlet) {
    const std::vector<double> delta{1, 2, 3};
    const TransitionDensity p(50, SimplexPoint{0.7, 0.2, 0.1}, delta);
    for (int i = 1; i < 10; ++i)
        for (int j = 1; i + j < 10; ++j) {
            const SimplexPoint y{i / 10.0, j / 10.0, 1 - (i + j) / 10.0};
            const double dir = std::exp(dirichlet_log_density(y, delta));
            EXPECT_NEAR(p(y) / dir, 1.0, 1e-3);
        }
}

TEST(TransitionDensity, IntegratesToOne) {
    const std::vector<double> delta{1, 2, 3};
    for (double t : {0.2, 1.0}) {
        const TransitionDensity p(t, SimplexPoint{0.2, 0.3, 0.5}, delta);
        const auto q = simplex_quadrature([&](const std::vector<double>& y) { return p(SimplexPoint(y)); },
                                          SimplexGrid(3, 8), {}, 16);
        EXPECT_NEAR(q.value, 1.0, 1e-4) << t;
        EXPECT_LT(std::abs(p.mass_defect()), 1e-10);
        EXPECT_FALSE(p.unreliable());
    }
}

TEST(TransitionDensity, ChapmanKolmogorov) {
    const std::vector<double> delta{1, 1.5};
    const SimplexPoint xi{0.3, 0.7}, y{0.6, 0.4};
    const TransitionDensity first(0.5, xi, delta);
    const double direct = TransitionDensity(1.0, xi, delta)(y);
    auto f = [&](double w) {
        const SimplexPoint mid{w, 1 - w};
        return first(mid) * TransitionDensity(0.5, mid, delta)(y);
    };
    const double composed = boost::math::quadrature::gauss<double, 60>::integrate(f, 0.0, 1.0);
    EXPECT_NEAR(composed / direct, 1.0, 1e-3);
}

TEST(TransitionDensity, AgreesWithWrightFisherSimulation) {
    const std::vector<double> delta{1, 1};
    RngStream rng(21);
    std::vector<std::vector<double>> s;
    for (int k = 0; k < 20000; ++k) s.push_back(wf_path(SimplexPoint{0.5, 0.5}, delta, {0, 0.5}, rng).states[1]);
    const TransitionDensity p(0.5, SimplexPoint{0.5, 0.5}, delta);
    EXPECT_LT(binned_tv_distance(s, [&](const std::vector<double>& y) { return p(SimplexPoint(y)); }, SimplexGrid(2, 10)),
              0.03);
}

TEST(TransitionDensity, TruncationAndSmallTime) {
    SeriesControl c;
    c.max_terms = 2;
    EXPECT_THROW(TransitionDensity(1.0, SimplexPoint{0.5, 0.5}, {1, 1}, c), truncation_error);
    c.max_terms = 16;
    const TransitionDensity p(0.02, SimplexPoint{0.5, 0.5}, {1, 1}, c);
    EXPECT_TRUE(p.unreliable());
    EXPECT_GT(p.mass_defect(), 0.5);
    EXPECT_THROW(TransitionDensity(1.0, SimplexPoint{0.5, 0.5}, {0.2, 0.3}), domain_error);
    EXPECT_THROW(TransitionDensity(0.0, SimplexPoint{0.5, 0.5}, {1, 1}), domain_error);
}
