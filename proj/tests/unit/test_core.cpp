#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "vsm/core/compositions.hpp"
#include "vsm/core/dirichlet.hpp"
#include "vsm/core/params.hpp"
#include "vsm/core/series.hpp"
#include "stats_util.hpp"

using namespace vsm;

TEST(LogGamma, Examples) {
    EXPECT_EQ(log_gamma(1.0), 0.0);
    EXPECT_NEAR(log_gamma(5.0), std::log(24.0), 1e-14);
    EXPECT_NEAR(log_gamma(0.5), 0.5 * std::log(std::numbers::pi), 1e-15);
}

TEST(LogGamma, MatchesHighPrecisionReference) {
    // 40-digit reference values
    const std::pair<double, double> ref[] = {
        {0.001, 6.907178885383853682512345},   {0.5, 0.5723649429247000870717137},
        {1.5, -0.1207822376352452223455184},   {2.5, 0.2846828704729191596324947},
        {7.25, 7.052185450738539444925749},    {33.3, 82.60372358165495292832303},
        {150.75, 603.7668223739874758780708},  {999.5, 5901.76692069473703392974},
    };
    for (auto [x, v] : ref) EXPECT_NEAR(log_gamma(x), v, 1e-13 * std::abs(v)) << x;
}

TEST(LogGamma, RejectsNonPositive) {
    EXPECT_THROW(log_gamma(0.0), domain_error);
    EXPECT_THROW(log_gamma(-1.5), domain_error);
}

TEST(LogMultinomial, Examples) {
    EXPECT_NEAR(log_multinomial(3, MultiIndex({1, 1, 1})), std::log(6.0), 1e-14);
    EXPECT_NEAR(log_multinomial(4, MultiIndex({4, 0})), 0.0, 1e-14);
    EXPECT_NEAR(log_multinomial(4, MultiIndex({2, 2})), std::log(6.0), 1e-14);
    EXPECT_THROW(log_multinomial(5, MultiIndex({2, 2})), domain_error);
}

TEST(LogMultinomial, EqualsGammaDifference) {
    MultiIndex k({3, 0, 7, 2});
    double expect = log_gamma(13.0) - log_gamma(4.0) - log_gamma(1.0) - log_gamma(8.0) - log_gamma(3.0);
    EXPECT_EQ(log_multinomial(12, k), expect);
}

TEST(Compositions, Examples) {
    std::vector<std::vector<int>> got;
    for (const auto& k : enumerate_compositions(2, 2)) got.push_back(k.k);
    EXPECT_EQ(got, (std::vector<std::vector<int>>{{2, 0}, {1, 1}, {0, 2}}));

    got.clear();
    for (const auto& k : enumerate_compositions(0, 5)) got.push_back(k.k);
    EXPECT_EQ(got, (std::vector<std::vector<int>>{{0, 0, 0, 0, 0}}));

    int c = 0;
    for (const auto& k : enumerate_compositions(3, 3)) c += k.m == 3;
    EXPECT_EQ(c, 10);
}

TEST(Compositions, CountOrderAndUniqueness) {
    for (int n = 1; n <= 5; ++n) {
        for (int m = 0; m <= 8; ++m) {
            std::set<std::vector<int>> seen;
            std::vector<int> prev;
            for (const auto& k : enumerate_compositions(m, n)) {
                int s = 0;
                for (int v : k.k) s += v;
                ASSERT_EQ(s, m);
                ASSERT_EQ(k.m, m);
                if (!prev.empty()) {
                    ASSERT_TRUE(k.k < prev);  // strictly descending lexicographic
                }
                prev = k.k;
                ASSERT_TRUE(seen.insert(k.k).second);
            }
            const double expect = std::round(std::exp(log_binomial(m + n - 1, n - 1)));
            EXPECT_EQ(static_cast<double>(seen.size()), expect) << m << "," << n;
        }
    }
}

TEST(Geometry, SimplexPointRenormalizesOrRejects) {
    SimplexPoint p({0.25, 0.25, 0.5 + 5e-13});
    EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-15);
    EXPECT_THROW(SimplexPoint({0.25, 0.25, 0.5 + 1e-9}), domain_error);
    EXPECT_THROW(SimplexPoint({-0.1, 1.1}), domain_error);
    EXPECT_THROW(QuadrantPoint({0.1, -1e-300}), domain_error);
}

TEST(Params, DerivedQuantities) {
    ModelParams p({1.0, 2.0, 3.0});
    EXPECT_EQ(p.theta0(), 6.0);
    EXPECT_EQ(p.d(), 3.0);
    EXPECT_EQ(p.gamma(), 1.0);
    EXPECT_EQ(p.delta(), (std::vector<double>{0.5, 1.0, 1.5}));
    EXPECT_EQ(p.nu(), (std::vector<double>{-0.5, 0.0, 0.5}));
    EXPECT_TRUE(p.transient());
    EXPECT_THROW(ModelParams({1.0, 0.0}), domain_error);
    EXPECT_THROW(ModelParams({1.0, 0.5}).require_transient("x"), domain_error);
    EXPECT_EQ(ModelParams::from_delta({1, 2}).theta(), (std::vector<double>{2, 4}));
}

TEST(Dirichlet, LogDensityExamples) {
    EXPECT_NEAR(dirichlet_log_density(SimplexPoint({0.3, 0.7}), {1, 1}), 0.0, 1e-15);
    EXPECT_NEAR(dirichlet_log_density(SimplexPoint({0.5, 0.5}), {2, 2}), std::log(1.5), 1e-15);
    EXPECT_EQ(dirichlet_log_density(SimplexPoint({0.0, 1.0}), {0.5, 2}), std::numeric_limits<double>::infinity());
    EXPECT_EQ(dirichlet_log_density(SimplexPoint({0.0, 1.0}), {2, 2}), -std::numeric_limits<double>::infinity());
    EXPECT_THROW(dirichlet_log_density(SimplexPoint({0.5, 0.5}), {0, 2}), domain_error);
}

TEST(Dirichlet, SampleSingleton) {
    RngStream rng(3);
    EXPECT_EQ(dirichlet_sample({0.7}, rng)[0], 1.0);
}

TEST(Dirichlet, SampleMomentsMatch) {
    RngStream rng(11);
    const std::vector<double> g{1, 2, 3};
    const int N = 100000;
    std::vector<std::vector<double>> comp(3, std::vector<double>(N));
    for (int s = 0; s < N; ++s) {
        auto y = dirichlet_sample(g, rng);
        for (int i = 0; i < 3; ++i) comp[i][s] = y[i];
    }
    for (int i = 0; i < 3; ++i) {
        const double mean = g[i] / 6.0;
        const double var = g[i] * (6.0 - g[i]) / (36.0 * 7.0);
        EXPECT_LT(testutil::zscore_mean(comp[i], mean), 3.0);
        std::vector<double> dev(N);
        for (int s = 0; s < N; ++s) dev[s] = (comp[i][s] - mean) * (comp[i][s] - mean);
        EXPECT_LT(testutil::zscore_mean(dev, var), 3.0);
    }
}

TEST(Dirichlet, SymmetricMeansEqual) {
    RngStream rng(5);
    const int N = 50000;
    std::vector<std::vector<double>> comp(4, std::vector<double>(N));
    for (int s = 0; s < N; ++s) {
        auto y = dirichlet_sample({0.8, 0.8, 0.8, 0.8}, rng);
        for (int i = 0; i < 4; ++i) comp[i][s] = y[i];
    }
    for (int i = 0; i < 4; ++i) EXPECT_LT(testutil::zscore_mean(comp[i], 0.25), 3.0);
}

// Inner composition sums against explicit enumeration of
// sum_k multinom(m;k) z^k Dir(y; k+a).
TEST(InnerSums, MatchEnumeration) {
    const std::vector<double> z{0.1, 0.2, 0.3}, a{0.5, 1.0, 1.5};
    const SimplexPoint y({0.2, 0.3, 0.5});
    std::vector<double> w(3);
    double A = 0, logya = 0;
    for (int i = 0; i < 3; ++i) {
        w[i] = z[i] * y[i];
        A += a[i];
        logya += (a[i] - 1) * std::log(y[i]);
    }
    const auto logD = log_inner_sums(w, a, 25);
    for (int m = 0; m <= 25; ++m) {
        double direct = 0;
        for (const auto& k : enumerate_compositions(m, 3)) {
            std::vector<double> ka(3);
            double lz = log_multinomial(m, k);
            for (int i = 0; i < 3; ++i) {
                ka[i] = k.k[i] + a[i];
                lz += k.k[i] * std::log(z[i]);
            }
            direct += std::exp(lz + dirichlet_log_density(y, ka));
        }
        const double viaD = std::exp(static_cast<double>(logD[m]) + log_gamma(m + 1.0) + log_gamma(m + A) + logya);
        EXPECT_NEAR(viaD, direct, 1e-12 * direct) << m;
    }
}

TEST(InnerSums, ZeroWeightsLeaveOnlyLeadingTerm) {
    const auto L = log_inner_sums(std::vector<double>{0.0, 0.0}, {1.0, 2.0}, 4);
    EXPECT_NEAR(static_cast<double>(L[0]), -log_gamma(1.0) - log_gamma(2.0), 1e-15);
    for (int m = 1; m <= 4; ++m) EXPECT_TRUE(std::isinf(static_cast<double>(L[m])));
}

TEST(Series, GeometricSumCertified) {
    // sum_m 0.5^m = 2
    auto make = [](int M) {
        std::vector<long double> L(M + 1);
        for (int m = 0; m <= M; ++m) L[m] = m * std::log(0.5L);
        return L;
    };
    SeriesControl c;
    c.abs_tol = 1e-15;
    c.rel_tol = 1e-15;
    const auto s = sum_log_series(make, 0.0L, 0.5, c);
    EXPECT_NEAR(s.value(), 2.0, 1e-14);
    c.max_terms = 10;
    EXPECT_THROW(sum_log_series(make, 0.0L, 0.5, c), truncation_error);
}

TEST(InnerSums, WindowedLogPathMatchesDirect) {
    const std::vector<std::vector<double>> ws = {{0.3, 0.01, 0.2}, {1e-4, 0.5}, {0.0, 0.2, 0.3, 0.1}, {2.0}};
    const std::vector<std::vector<double>> as = {{0.5, 1.0, 1.5}, {0.75, 1.25}, {1, 1, 1, 1}, {0.5}};
    for (std::size_t c = 0; c < ws.size(); ++c) {
        const auto d = log_inner_sums(ws[c], as[c], 900);
        const auto l = detail::log_inner_sums_windowed(ws[c], as[c], 900);
        for (int m = 0; m <= 900; ++m) EXPECT_NEAR(static_cast<double>(l[m] - d[m]), 0.0, 1e-13 * (1 + std::abs(static_cast<double>(d[m])))) << c << " " << m;
    }
    // high orders stay finite and log-concave in m
    const auto hi = log_inner_sums(std::vector<double>{0.3, 0.2, 0.25}, {0.75, 1.25, 1.5}, 5000);
    for (int m = 2; m <= 5000; ++m) {
        ASSERT_TRUE(std::isfinite(static_cast<double>(hi[m])));
        EXPECT_LE(static_cast<double>(hi[m] - hi[m - 1]), static_cast<double>(hi[m - 1] - hi[m - 2]) + 1e-9);
    }
}
