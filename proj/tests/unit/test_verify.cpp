#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/distributions/non_central_chi_squared.hpp>

#include "vsm/besq.hpp"
#include "vsm/core/dirichlet.hpp"
#include "vsm/verify/quadrature.hpp"
#include "vsm/verify/stats.hpp"

using namespace vsm;

TEST(GaussJacobi, IntegratesJacobiMomentsExactly) {
    for (auto [al, be] : {std::pair{0.0, 0.0}, {-0.5, 0.0}, {0.3, -0.7}, {2.0, 1.5}}) {
        const auto r = gauss_jacobi01(12, al, be);
        for (int k = 0; k <= 20; ++k) {
            double q = 0.0;
            for (int i = 0; i < 12; ++i) q += r.weights[i] * std::pow(r.nodes[i], k);
            const double exact = std::exp(log_gamma(al + k + 1) + log_gamma(be + 1) - log_gamma(al + be + k + 2));
            EXPECT_NEAR(q, exact, 1e-13 * exact) << al << " " << be << " " << k;
        }
    }
}

TEST(SimplexGrid, CellCountAndVolume) {
    for (int n = 2; n <= 4; ++n) {
        for (int r : {1, 3, 6, 10}) {
            SimplexGrid g(n, r);
            EXPECT_EQ(g.cell_count(), static_cast<std::size_t>(std::lround(std::pow(r, n - 1))));
            double w = 0.0;
            for (const auto& [y, wt] : g.nodes()) w += wt;
            EXPECT_NEAR(w, 1.0 / std::tgamma(n), 1e-14);
        }
    }
}

TEST(SimplexGrid, LocateFindsContainingCell) {
    RngStream rng(2);
    for (int n : {2, 3, 4}) {
        SimplexGrid g(n, 7);
        for (int s = 0; s < 2000; ++s) {
            auto y = dirichlet_sample(std::vector<double>(n, 1.0), rng);
            const auto& cell = g.cell(g.locate(y.coords()));
            // solve y = sum lambda_j V_j; inside iff all lambda >= 0
            Eigen::MatrixXd A(n, n);
            Eigen::VectorXd b(n);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) A(i, j) = cell.vertices[j][i];
                b(i) = y[i];
            }
            Eigen::VectorXd lam = A.colPivHouseholderQr().solve(b);
            for (int j = 0; j < n; ++j) EXPECT_GE(lam(j), -1e-9);
        }
    }
}

TEST(SimplexQuadrature, Examples) {
    SimplexGrid one(3, 1);
    auto r = simplex_quadrature([](const std::vector<double>&) { return 1.0; }, one);
    EXPECT_NEAR(r.value, 0.5, 1e-14);

    auto dir123 = [](const std::vector<double>& y) { return std::exp(dirichlet_log_density(SimplexPoint(y), {1, 2, 3})); };
    EXPECT_NEAR(simplex_quadrature(dir123, SimplexGrid(3, 8)).value, 1.0, 1e-8);

    auto dirhalf = [](const std::vector<double>& y) { return std::exp(dirichlet_log_density(SimplexPoint(y), {0.5, 0.5})); };
    EXPECT_NEAR(simplex_quadrature(dirhalf, SimplexGrid(2, 8), {-0.5, -0.5}).value, 1.0, 1e-4);
}

TEST(SimplexQuadrature, DirichletNormalizesAcrossParameters) {
    const std::vector<std::vector<double>> params = {{0.5, 1, 1.5}, {0.5, 0.5, 0.5}, {2, 2, 2, 2}, {0.7, 3.2, 1.1, 0.5}};
    for (const auto& g : params) {
        std::vector<double> e;
        for (double v : g) e.push_back(v - 1.0);
        auto f = [&](const std::vector<double>& y) { return std::exp(dirichlet_log_density(SimplexPoint(y), g)); };
        EXPECT_NEAR(simplex_quadrature(f, SimplexGrid(static_cast<int>(g.size()), 1), e, 12).value, 1.0, 1e-10);
        // composite on a grid with boundary cells
        EXPECT_NEAR(simplex_quadrature(f, SimplexGrid(static_cast<int>(g.size()), 4), e, 8).value, 1.0, 1e-8);
    }
}

TEST(SimplexQuadrature, RaisesWhenRefinementsDisagree) {
    // a narrow bump the low-order rules cannot resolve
    auto spike = [](const std::vector<double>& y) { return std::exp(-1e4 * (y[0] - 0.3) * (y[0] - 0.3)); };
    EXPECT_THROW(simplex_quadrature(spike, SimplexGrid(3, 1), {}, 4, 1e-8), quadrature_error);
}

TEST(BinnedTv, SelfConsistentDirichletSamples) {
    RngStream rng(123);
    const std::vector<double> g{1, 2, 3};
    std::vector<std::vector<double>> s;
    for (int i = 0; i < 200000; ++i) s.push_back(dirichlet_sample(g, rng).coords());
    SimplexGrid grid(3, default_bin_resolution(3));
    auto f = [&](const std::vector<double>& y) { return std::exp(dirichlet_log_density(SimplexPoint(y), g)); };
    EXPECT_LE(binned_tv_distance(s, f, grid), 0.02);
}

TEST(BinnedTv, PointMassAgainstUniform) {
    SimplexGrid grid(3, 10);
    std::vector<std::vector<double>> s(1000, {0.05, 0.05, 0.9});
    auto uniform = [](const std::vector<double>&) { return 2.0; };
    EXPECT_NEAR(binned_tv_distance(s, uniform, grid), 1.0 - 0.01, 1e-12);
    EXPECT_THROW(binned_tv_distance({}, uniform, grid), domain_error);
    EXPECT_THROW(binned_tv_distance(std::vector<std::vector<double>>(999, {0.2, 0.3, 0.5}), uniform, grid), domain_error);
}

TEST(Ks, CalibratedOnUniforms) {
    int pass = 0;
    for (int seed = 0; seed < 100; ++seed) {
        RngStream rng(seed, 7);
        std::vector<double> u(2000);
        for (double& x : u) x = rng.uniform();
        pass += ks_statistic(u, [](double x) { return x; }) < ks_critical_value_1pct(u.size());
    }
    EXPECT_GE(pass, 95);
}

TEST(Ks, TwoSampleCalibrated) {
    int pass = 0;
    for (int seed = 0; seed < 100; ++seed) {
        RngStream rng(seed, 8);
        std::vector<double> a(1500), b(2500);
        for (double& x : a) x = rng.normal();
        for (double& x : b) x = rng.normal();
        pass += ks_two_sample(a, b) < ks_two_sample_critical_1pct(a.size(), b.size());
    }
    EXPECT_GE(pass, 95);
    EXPECT_DOUBLE_EQ(ks_two_sample({1, 2, 3}, {4, 5}), 1.0);
    EXPECT_DOUBLE_EQ(ks_two_sample({1, 2}, {1, 2}), 0.0);
}

TEST(MomentTest, CalibratedOnDirichlet) {
    int pass = 0;
    for (int seed = 0; seed < 100; ++seed) {
        RngStream rng(seed, 9);
        std::vector<double> x(2000);
        for (double& v : x) v = dirichlet_sample({1, 2, 3}, rng)[1];
        // Beta(2, 4): E x = 1/3, E x^2 = 2*3/(6*7) = 1/7
        pass += moment_test(x, {{1, 1.0 / 3.0}, {2, 1.0 / 7.0}}, {1, 2}).pass;
    }
    EXPECT_GE(pass, 95);
}

TEST(ChiSquare, BesqTransitionAgainstNoncentralChiSquare) {
    // BESQ^theta_x(t) / t is noncentral chi-square with theta degrees and noncentrality x/t
    const double x = 1.0, theta = 3.0, t = 0.5;
    RngStream rng(77);
    std::vector<double> s(100000);
    for (double& v : s) v = besq_transition_sample(x, theta, t, rng);
    boost::math::non_central_chi_squared ncx(theta, x / t);
    auto dens = [&](double y) { return boost::math::pdf(ncx, y / t) / t; };
    std::vector<double> edges;
    for (int i = 0; i <= 40; ++i) edges.push_back(0.15 * i);
    const auto r = chi_square_gof(s, dens, edges, 77);
    EXPECT_TRUE(r.pass) << r.statistic << " vs " << r.threshold;
}

TEST(Report, JsonSchema) {
    auto r = VerificationReport::make("x", 0.1, 0.2, "le", 10, 3);
    r.metadata["k"] = 1.5;
    const auto j = r.to_json();
    EXPECT_EQ(j.dump(), R"({"test":"x","statistic":0.1,"threshold":0.2,"direction":"le","n_samples":10,"seed":3,"pass":true,"metadata":{"k":1.5}})");
    EXPECT_FALSE(VerificationReport::make("y", 0.1, 0.2, "ge").pass);
}
