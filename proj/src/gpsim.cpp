#include "gradcp/gpsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gradcp/cusum_hull.hpp"
#include "gradcp/errors.hpp"
#include "gradcp/log.hpp"
#include "gradcp/parallel.hpp"
#include "gradcp/random.hpp"

namespace gradcp {

namespace {

constexpr std::uint64_t draw_stream = 0x6770'6472'6177ULL;
constexpr std::size_t min_draws = 100;

RescaledGrid equispaced(std::size_t m) {
    if (m == 0) throw std::invalid_argument("simulation grid must have at least one point");
    return RescaledGrid::natural(m);
}

} // namespace

GaussianDriver::GaussianDriver(DriverKind kind, RescaledGrid grid, std::size_t features, std::size_t n_draws,
                               std::uint64_t seed)
    : kind_(kind), grid_(std::move(grid)), features_(features), n_draws_(n_draws), seed_(seed) {
    if (n_draws_ == 0) throw std::invalid_argument("n_draws must be positive");
}

GaussianDriver GaussianDriver::pivotal(std::size_t grid_size, std::size_t n_draws, std::uint64_t seed) {
    GaussianDriver d(DriverKind::Pivotal, equispaced(grid_size), 1, n_draws, seed);
    const double step = std::sqrt(1.0 / static_cast<double>(grid_size));
    d.factors_.assign(grid_size, Eigen::MatrixXd::Constant(1, 1, step));
    return d;
}

GaussianDriver GaussianDriver::estimated(const LongRunCovariance& cov, std::size_t n_draws, std::uint64_t seed) {
    if (!cov.grid.is_full())
        throw std::invalid_argument("estimated driver needs the covariance on the full grid {1/m, ..., 1}");
    if (cov.sigma.size() != cov.grid.size()) throw std::invalid_argument("covariance does not match its grid");
    GaussianDriver d(DriverKind::Estimated, cov.grid, cov.features(), n_draws, seed);
    d.factors_.reserve(cov.sigma.size());
    Eigen::MatrixXd previous = Eigen::MatrixXd::Zero(cov.sigma.front().rows(), cov.sigma.front().cols());
    for (const auto& current : cov.sigma) {
        auto f = factor_increment(current - previous);
        if (f.repaired) ++d.repaired_steps_;
        d.factors_.push_back(std::move(f.factor));
        previous = current;
    }
    return d;
}

std::uint64_t GaussianDriver::draw_seed(std::size_t index) const noexcept {
    return derive_seed(seed_, draw_stream, index);
}

FactorResult factor_increment(const Eigen::MatrixXd& cov) {
    if (!cov.allFinite()) throw DataError("increment covariance is not finite and cannot be factorised");
    Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
    FactorResult out;
    Eigen::LLT<Eigen::MatrixXd> llt(sym);
    if (llt.info() == Eigen::Success) {
        out.factor = llt.matrixL();
        out.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success) throw DataError("increment covariance eigendecomposition failed");
    Eigen::VectorXd lambda = eig.eigenvalues();
    out.min_eigenvalue = lambda.minCoeff();
    const double trace = std::abs(sym.trace());
    if (out.min_eigenvalue < 0.0) {
        out.repaired = true;
        if (out.min_eigenvalue < -1e-8 * trace) {
            std::ostringstream msg;
            msg << "increment covariance not positive semidefinite (min eigenvalue " << out.min_eigenvalue
                << ", trace " << sym.trace() << "); clipping negative eigenvalues";
            log::warn(msg.str());
        }
    }
    lambda = lambda.cwiseMax(0.0).cwiseSqrt();
    out.factor = eig.eigenvectors() * lambda.asDiagonal();
    if (!out.factor.allFinite()) throw DataError("increment covariance could not be factorised");
    return out;
}

Eigen::MatrixXd simulate_driver_path(const GaussianDriver& driver, std::uint64_t draw_seed) {
    const auto m = static_cast<Eigen::Index>(driver.grid_size());
    const auto F = static_cast<Eigen::Index>(driver.features());
    std::mt19937_64 rng(draw_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd path(m, F);
    Eigen::VectorXd level = Eigen::VectorXd::Zero(F);
    Eigen::VectorXd z(F);
    for (Eigen::Index k = 0; k < m; ++k) {
        for (Eigen::Index f = 0; f < F; ++f) z(f) = normal(rng);
        level.noalias() += driver.increment_factor(static_cast<std::size_t>(k)) * z;
        path.row(k) = level.transpose();
    }
    return path;
}

namespace {

void hmax_into(const Eigen::MatrixXd& path, CusumHull& hull, std::vector<double>& hsup, double* out) {
    const auto m = static_cast<std::size_t>(path.rows());
    std::fill(hsup.begin(), hsup.end(), 0.0);
    for (Eigen::Index f = 0; f < path.cols(); ++f) {
        hull.clear();
        hull.push(0.0);
        for (std::size_t j = 1; j <= m; ++j) {
            const double gj = path(static_cast<Eigen::Index>(j - 1), f);
            hull.push(gj);
            const double slope = gj / static_cast<double>(j);
            auto contrast = [&](std::size_t i) {
                const double gi = i == 0 ? 0.0 : path(static_cast<Eigen::Index>(i - 1), f);
                return std::abs(gi - (static_cast<double>(i) / static_cast<double>(j)) * gj);
            };
            const double v = std::max(contrast(hull.argmax(slope)), contrast(hull.argmin(slope)));
            hsup[j - 1] = std::max(hsup[j - 1], v);
        }
    }
    double running = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        running = std::max(running, hsup[j]);
        out[j] = running;
    }
}

} // namespace

std::vector<double> hmax_draw(const Eigen::MatrixXd& path) {
    CusumHull hull;
    hull.reserve(static_cast<std::size_t>(path.rows()) + 1);
    std::vector<double> hsup(static_cast<std::size_t>(path.rows()));
    std::vector<double> out(hsup.size());
    hmax_into(path, hull, hsup, out.data());
    return out;
}

Eigen::MatrixXd simulate_hmax(const GaussianDriver& driver, unsigned threads) {
    const std::size_t m = driver.grid_size();
    Eigen::MatrixXd draws(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(driver.n_draws()));
    parallel_for(driver.n_draws(), threads, [&](std::size_t d) {
        thread_local CusumHull hull;
        thread_local std::vector<double> hsup;
        hsup.resize(m);
        auto path = simulate_driver_path(driver, driver.draw_seed(d));
        hmax_into(path, hull, hsup, draws.col(static_cast<Eigen::Index>(d)).data());
    });
    return draws;
}

double QuantileCurve::at(double u) const {
    if (q.empty()) throw std::logic_error("empty quantile curve");
    if (u >= 1.0) return q.back();
    if (!(u > 0.0)) return 0.0;
    const double m = static_cast<double>(q.size());
    const double x = u * m;
    const auto k = static_cast<std::size_t>(std::floor(x));
    if (k >= q.size()) return q.back();
    const double left = k == 0 ? 0.0 : q[k - 1];
    const double frac = x - static_cast<double>(k);
    if (frac == 0.0) return left;
    return left + frac * (q[k] - left);
}

QuantileCurve quantile_curve_from_draws(const Eigen::MatrixXd& draws, const GaussianDriver& driver, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    const auto n = static_cast<std::size_t>(draws.cols());
    if (n < min_draws)
        throw std::invalid_argument("insufficient draws for quantile estimation: " + std::to_string(n) + " < " +
                                    std::to_string(min_draws));
    const double level = (1.0 - alpha) * static_cast<double>(n);
    std::size_t rank = static_cast<std::size_t>(std::ceil(level - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, n);

    QuantileCurve curve{driver.grid(), alpha, std::vector<double>(static_cast<std::size_t>(draws.rows())), n,
                        driver.seed(), driver.kind()};
    std::vector<double> row(n);
    double running = 0.0;
    for (Eigen::Index k = 0; k < draws.rows(); ++k) {
        for (std::size_t d = 0; d < n; ++d) row[d] = draws(k, static_cast<Eigen::Index>(d));
        std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(rank - 1), row.end());
        running = std::max(running, row[rank - 1]);
        curve.q[static_cast<std::size_t>(k)] = running;
    }
    return curve;
}

QuantileCurve quantile_curve(const GaussianDriver& driver, double alpha, unsigned threads) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (driver.n_draws() < min_draws)
        throw std::invalid_argument("insufficient draws for quantile estimation: " + std::to_string(driver.n_draws()) +
                                    " < " + std::to_string(min_draws));
    return quantile_curve_from_draws(simulate_hmax(driver, threads), driver, alpha);
}

void write_quantile_csv(std::ostream& out, const QuantileCurve& curve, const std::string& preamble) {
    if (!preamble.empty()) out << preamble;
    out << "u,q\n";
    char buf[128];
    for (std::size_t k = 0; k < curve.q.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", curve.grid.point(k), curve.q[k]);
        out << buf;
    }
}

} // namespace gradcp
