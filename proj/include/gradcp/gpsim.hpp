#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gradcp/lrv.hpp"
#include "gradcp/series.hpp"

namespace gradcp {

enum class DriverKind { Pivotal, Estimated };

/// Gaussian process G on an equispaced grid {1/m, ..., 1} with independent
/// increments, from which the limit process
///   H(u, v, f) = G(v, f) - (v/u) G(u, f)
/// is formed.
///
/// Pivotal: one pseudo-feature, G is standard Brownian motion; this is the
/// known limit of the sigma-scaled mean statistic. Estimated: Cov G(u) is
/// the estimated long-run covariance Sigma(u), so the increment at step k
/// has covariance Sigma(u_k) - Sigma(u_{k-1}). Increments that are not
/// positive semidefinite are repaired by clipping negative eigenvalues.
class GaussianDriver {
public:
    static GaussianDriver pivotal(std::size_t grid_size, std::size_t n_draws, std::uint64_t seed);

    /// The covariance grid must be the full grid {1/m, ..., 1}; it becomes
    /// the simulation grid.
    static GaussianDriver estimated(const LongRunCovariance& covariance, std::size_t n_draws, std::uint64_t seed);

    DriverKind kind() const noexcept { return kind_; }
    const RescaledGrid& grid() const noexcept { return grid_; }
    std::size_t grid_size() const noexcept { return grid_.size(); }
    std::size_t features() const noexcept { return features_; }
    std::size_t n_draws() const noexcept { return n_draws_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// Number of increment covariances that needed eigenvalue clipping.
    std::size_t repaired_steps() const noexcept { return repaired_steps_; }

    /// Symmetric square-root factor of the increment covariance at step k.
    const Eigen::MatrixXd& increment_factor(std::size_t k) const { return factors_.at(k); }

    /// Deterministic seed of draw `index`, derived from the master seed.
    std::uint64_t draw_seed(std::size_t index) const noexcept;

private:
    GaussianDriver(DriverKind kind, RescaledGrid grid, std::size_t features, std::size_t n_draws, std::uint64_t seed);

    DriverKind kind_;
    RescaledGrid grid_;
    std::size_t features_;
    std::size_t n_draws_;
    std::uint64_t seed_;
    std::vector<Eigen::MatrixXd> factors_;
    std::size_t repaired_steps_ = 0;
};

struct FactorResult {
    Eigen::MatrixXd factor;
    bool repaired = false;
    double min_eigenvalue = 0.0;
};

/// A with A A^T = cov. Uses Cholesky when cov is positive definite,
/// otherwise an eigendecomposition with negative eigenvalues clipped at 0
/// (logged when below -1e-8 * trace). Throws DataError for non-finite input.
FactorResult factor_increment(const Eigen::MatrixXd& cov);

/// One path of G: row k holds G(u_{k+1}, f) for every feature f.
Eigen::MatrixXd simulate_driver_path(const GaussianDriver& driver, std::uint64_t draw_seed);

/// Hmax(u_j) = max over f and 0 <= w <= v <= u_j of |G(w, f) - (w/v) G(v, f)|
/// for a path on an equispaced grid (G(0) = 0).
std::vector<double> hmax_draw(const Eigen::MatrixXd& path);

/// Hmax draws, one column per draw (grid_size x n_draws).
Eigen::MatrixXd simulate_hmax(const GaussianDriver& driver, unsigned threads = 1);

/// Estimated (1 - alpha)-quantiles of Hmax(u) on the simulation grid.
struct QuantileCurve {
    RescaledGrid grid;
    double alpha = 0.1;
    std::vector<double> q;
    std::size_t n_draws = 0;
    std::uint64_t seed = 0;
    DriverKind driver = DriverKind::Pivotal;

    /// Linear interpolation on {0, 1/m, ..., 1} with q(0) = 0; q(1) is returned exactly at u >= 1.
    double at(double u) const;
};

/// Empirical (1 - alpha)-quantile per grid point: the ceil((1 - alpha) n)-th
/// order statistic. The curve is made non-decreasing by a running maximum.
QuantileCurve quantile_curve_from_draws(const Eigen::MatrixXd& hmax_draws, const GaussianDriver& driver,
                                        double alpha);

/// Throws std::invalid_argument for alpha outside (0, 1) or fewer than 100 draws.
QuantileCurve quantile_curve(const GaussianDriver& driver, double alpha, unsigned threads = 1);

/// CSV with columns u, q.
void write_quantile_csv(std::ostream& out, const QuantileCurve& curve, const std::string& preamble = {});

} // namespace gradcp
