#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "gradcp/gpsim.hpp"
#include "gradcp/log.hpp"
#include "test_util.hpp"

using namespace gradcp;

namespace {

// Brute-force Hmax over all 0 <= w <= v <= u on the grid.
std::vector<double> hmax_oracle(const Eigen::MatrixXd& path) {
    const auto m = path.rows();
    std::vector<double> out(static_cast<std::size_t>(m));
    double running = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
        double sup = 0;
        for (Eigen::Index f = 0; f < path.cols(); ++f)
            for (Eigen::Index i = -1; i <= j; ++i) {
                const double gi = i < 0 ? 0.0 : path(i, f);
                sup = std::max(sup, std::abs(gi - double(i + 1) / double(j + 1) * path(j, f)));
            }
        running = std::max(running, sup);
        out[static_cast<std::size_t>(j)] = running;
    }
    return out;
}

LongRunCovariance homogeneous(std::size_t m, const Eigen::MatrixXd& base) {
    LongRunCovariance cov{RescaledGrid::natural(m), {}, "test", m};
    for (std::size_t k = 0; k < m; ++k) cov.sigma.push_back(base * (double(k + 1) / double(m)));
    return cov;
}

double pivotal_kernel(double u, double v, double u2, double v2) {
    return v * v2 / (u * u2) * std::min(u, u2) - v2 / u2 * std::min(v, u2) - v / u * std::min(u, v2) + std::min(v, v2);
}

} // namespace

TEST(PivotalDriver, BrownianMotionUnitVariance) {
    auto d = GaussianDriver::pivotal(50, 4000, 9);
    double s2 = 0, half = 0;
    for (std::size_t i = 0; i < d.n_draws(); ++i) {
        auto path = simulate_driver_path(d, d.draw_seed(i));
        s2 += path(49, 0) * path(49, 0);
        half += path(24, 0) * path(24, 0);
    }
    const double n = double(d.n_draws());
    EXPECT_NEAR(s2 / n, 1.0, 4 * std::sqrt(2.0 / n));
    EXPECT_NEAR(half / n, 0.5, 4 * 0.5 * std::sqrt(2.0 / n));
}

TEST(PivotalDriver, BridgeAndKernelCovariance) {
    const std::size_t m = 40, n = 5000;
    auto d = GaussianDriver::pivotal(m, n, 10);
    struct Probe {
        std::size_t j, i, j2, i2;
    };
    const Probe probes[] = {{40, 10, 40, 10}, {40, 20, 40, 20}, {40, 10, 40, 30}, {20, 5, 40, 30}, {30, 15, 10, 5},
                            {25, 25, 40, 12}};
    std::vector<std::vector<double>> a(std::size(probes)), b(std::size(probes));
    for (std::size_t r = 0; r < n; ++r) {
        auto g = simulate_driver_path(d, d.draw_seed(r));
        auto H = [&](std::size_t j, std::size_t i) { return g(i - 1, 0) - double(i) / double(j) * g(j - 1, 0); };
        for (std::size_t p = 0; p < std::size(probes); ++p) {
            a[p].push_back(H(probes[p].j, probes[p].i));
            b[p].push_back(H(probes[p].j2, probes[p].i2));
        }
    }
    for (std::size_t p = 0; p < std::size(probes); ++p) {
        const double u = probes[p].j / double(m), v = probes[p].i / double(m);
        const double u2 = probes[p].j2 / double(m), v2 = probes[p].i2 / double(m);
        std::vector<double> prod(n);
        double mean = 0;
        for (std::size_t r = 0; r < n; ++r) mean += (prod[r] = a[p][r] * b[p][r]) / n;
        double var = 0;
        for (double x : prod) var += (x - mean) * (x - mean) / (n - 1);
        const double se = std::sqrt(var / n);
        EXPECT_NEAR(mean, pivotal_kernel(u, v, u2, v2), 3 * se + 1e-12) << "probe " << p;
        if (probes[p].j == m && probes[p].j2 == m && probes[p].i == probes[p].i2)
            EXPECT_NEAR(pivotal_kernel(u, v, u2, v2), v * (1 - v), 1e-15);
    }
}

TEST(HmaxDraw, MatchesBruteForce) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Eigen::Index m = 1 + Eigen::Index(seed * 3), F = 1 + Eigen::Index(seed % 3);
        auto v = test::normals(std::size_t(m * F), seed);
        Eigen::MatrixXd path = Eigen::Map<Eigen::MatrixXd>(v.data(), m, F);
        auto fast = hmax_draw(path);
        auto slow = hmax_oracle(path);
        for (std::size_t k = 0; k < fast.size(); ++k) ASSERT_NEAR(fast[k], slow[k], 1e-12);
    }
}

TEST(HmaxDraw, DegenerateCases) {
    for (double v : hmax_draw(Eigen::MatrixXd::Zero(20, 2))) EXPECT_EQ(v, 0.0);
    Eigen::MatrixXd single(1, 1);
    single << 3.0;
    EXPECT_EQ(hmax_draw(single)[0], 0.0);
}

TEST(GpSimProperty, DrawsAreDeterministicAndThreadIndependent) {
    auto d = GaussianDriver::pivotal(64, 300, 77);
    auto a = simulate_hmax(d, 1);
    auto b = simulate_hmax(d, 1);
    auto c = simulate_hmax(d, 3);
    EXPECT_TRUE(a == b);
    EXPECT_TRUE(a == c);
    auto other = simulate_hmax(GaussianDriver::pivotal(64, 300, 78), 1);
    EXPECT_FALSE(a == other);
}

TEST(GpSimProperty, QuantilesMonotoneInUAndAlpha) {
    auto d = GaussianDriver::pivotal(100, 1000, 5);
    auto draws = simulate_hmax(d);
    std::vector<QuantileCurve> curves;
    for (double alpha : {0.2, 0.1, 0.05, 0.01}) curves.push_back(quantile_curve_from_draws(draws, d, alpha));
    for (const auto& c : curves) {
        for (std::size_t k = 1; k < c.q.size(); ++k) ASSERT_GE(c.q[k], c.q[k - 1]);
        for (std::size_t k = 1; k < c.q.size(); ++k) ASSERT_GT(c.q[k], 0.0);
    }
    for (std::size_t a = 1; a < curves.size(); ++a)
        for (std::size_t k = 0; k < 100; ++k) ASSERT_LE(curves[a - 1].q[k], curves[a].q[k]);
}

TEST(QuantileCurve, OrderStatisticRule) {
    auto d = GaussianDriver::pivotal(30, 250, 6);
    auto draws = simulate_hmax(d);
    auto curve = quantile_curve_from_draws(draws, d, 0.1);
    // ceil(0.9 * 250) = 225th smallest at the last grid point.
    std::vector<double> last;
    for (Eigen::Index i = 0; i < draws.cols(); ++i) last.push_back(draws(29, i));
    std::sort(last.begin(), last.end());
    EXPECT_EQ(curve.q.back(), std::max(last[224], curve.q[28]));
}

TEST(QuantileCurve, LevelNearOneTakesTheMinimum) {
    auto d = GaussianDriver::pivotal(30, 1000, 7);
    auto draws = simulate_hmax(d);
    auto curve = quantile_curve_from_draws(draws, d, 0.999);
    EXPECT_EQ(curve.q.back(), draws.row(29).minCoeff());
    EXPECT_LT(curve.q.back(), quantile_curve_from_draws(draws, d, 0.5).q.back());
}

TEST(QuantileCurve, IndependentSeedsAgree) {
    auto a = quantile_curve(GaussianDriver::pivotal(200, 5000, 101), 0.1);
    auto b = quantile_curve(GaussianDriver::pivotal(200, 5000, 202), 0.1);
    for (double u : {0.25, 0.5, 1.0}) EXPECT_NEAR(a.at(u), b.at(u), 0.05 * b.at(u)) << "u=" << u;
}

TEST(QuantileCurve, Interpolation) {
    QuantileCurve c{RescaledGrid::natural(4), 0.1, {1, 2, 3, 5}, 100, 1, DriverKind::Pivotal};
    EXPECT_EQ(c.at(0.0), 0.0);
    EXPECT_EQ(c.at(1.0), 5.0);
    EXPECT_EQ(c.at(2.0), 5.0);
    EXPECT_DOUBLE_EQ(c.at(0.125), 0.5);
    EXPECT_DOUBLE_EQ(c.at(0.5), 2.0);
    EXPECT_DOUBLE_EQ(c.at(0.875), 4.0);
}

TEST(QuantileCurve, Errors) {
    auto d = GaussianDriver::pivotal(10, 99, 1);
    EXPECT_THROW(quantile_curve(d, 0.1), std::invalid_argument);
    auto ok = GaussianDriver::pivotal(10, 100, 1);
    EXPECT_THROW(quantile_curve(ok, 0.0), std::invalid_argument);
    EXPECT_THROW(quantile_curve(ok, 1.0), std::invalid_argument);
}

TEST(EstimatedDriver, HomogeneousIncrements) {
    Eigen::MatrixXd base(2, 2);
    base << 2.0, 0.6, 0.6, 1.0;
    auto d = GaussianDriver::estimated(homogeneous(8, base), 100, 3);
    EXPECT_EQ(d.repaired_steps(), 0u);
    for (std::size_t k = 0; k < 8; ++k) {
        const auto& L = d.increment_factor(k);
        EXPECT_TRUE((L * L.transpose()).isApprox(base / 8.0, 1e-12));
    }
}

TEST(EstimatedDriver, RequiresFullGrid) {
    LongRunCovariance cov{RescaledGrid({1, 3}, 3), {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)},
                          "test", 3};
    EXPECT_THROW(GaussianDriver::estimated(cov, 100, 1), std::invalid_argument);
}

TEST(EstimatedDriver, NegativeIncrementIsRepaired) {
    Eigen::MatrixXd s1(2, 2), s2(2, 2);
    s1 << 1.0, 0.5, 0.5, 1.0;
    s2 << 2.0, 1.6, 1.6, 2.0;
    // s2 - s1 = [[1, 1.1], [1.1, 1]] has eigenvalues 2.1 and -0.1.
    Eigen::MatrixXd diff = s2 - s1;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(diff);
    Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd oracle = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();

    std::vector<std::string> messages;
    auto previous = log::set_sink([&](log::Level, const std::string& m) { messages.push_back(m); });
    auto f = factor_increment(diff);
    LongRunCovariance cov{RescaledGrid::natural(2), {s1, s2}, "test", 2};
    auto d = GaussianDriver::estimated(cov, 100, 1);
    log::set_sink(previous);

    EXPECT_TRUE(f.repaired);
    EXPECT_NEAR(f.min_eigenvalue, -0.1, 1e-12);
    EXPECT_TRUE((f.factor * f.factor.transpose()).isApprox(oracle, 1e-12));
    EXPECT_EQ(d.repaired_steps(), 1u);
    EXPECT_EQ(messages.size(), 2u);
}

TEST(EstimatedDriver, TinyNegativeEigenvalueIsSilent) {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 1.0, 1.0, 1.0 - 1e-12;
    std::size_t warnings = 0;
    auto previous = log::set_sink([&](log::Level, const std::string&) { ++warnings; });
    auto f = factor_increment(m);
    log::set_sink(previous);
    EXPECT_EQ(warnings, 0u);
    EXPECT_TRUE((f.factor * f.factor.transpose()).isApprox(m, 1e-9));
}

TEST(GpSimProperty, ScaleEquivariance) {
    Eigen::MatrixXd base(3, 3);
    base << 1.0, 0.2, -0.1, 0.2, 0.5, 0.05, -0.1, 0.05, 0.8;
    auto d1 = GaussianDriver::estimated(homogeneous(40, base), 200, 8);
    auto d2 = GaussianDriver::estimated(homogeneous(40, 4.0 * base), 200, 8);
    auto h1 = simulate_hmax(d1), h2 = simulate_hmax(d2);
    EXPECT_TRUE((h2).isApprox(2.0 * h1, 1e-12));
    auto q1 = quantile_curve_from_draws(h1, d1, 0.1), q2 = quantile_curve_from_draws(h2, d2, 0.1);
    for (std::size_t k = 0; k < q1.q.size(); ++k) EXPECT_NEAR(q2.q[k], 2.0 * q1.q[k], 1e-12 * (1 + q1.q[k]));
}
