#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gradcp/gpsim.hpp"
#include "gradcp/lrv.hpp"
#include "gradcp/series.hpp"
#include "gradcp/tvmeasure.hpp"

namespace gradcp {

enum class Direction { Forward, Reverse };

/// Estimator of sigma for the scaled mean statistic.
enum class SigmaEstimator {
    Residual,   ///< HAC long-run variance of Nadaraya-Watson residuals.
    Difference, ///< first-difference variance, for i.i.d. errors.
};

/// Optional centring of the data before the detection statistic is formed.
enum class PreCentering { None, GlobalMean, NadarayaWatson };

struct LrvSettings {
    double h = 0.2;
    KernelSpec hac{HacKernel::Bartlett, 10.0};
    CenteringKind centering = CenteringKind::NadarayaWatson;
    SmoothingKernel smoother = SmoothingKernel::Epanechnikov;
    SigmaEstimator sigma = SigmaEstimator::Residual;
};

struct GpSettings {
    std::size_t max_grid = 512;
    std::size_t n_draws = 2000;
    std::uint64_t seed = 1;
    /// Use the known Brownian kernel for the scaled mean statistic.
    bool pivotal = true;
};

struct DetectionConfig {
    double alpha = 0.1;
    std::string feature = "mean";
    LrvSettings lrv;
    GpSettings gp;
    Direction direction = Direction::Forward;
    /// Divide the mean statistic by an estimate of the long-run error sd.
    bool scaled = false;
    PreCentering precenter = PreCentering::None;
    SupMethod method = SupMethod::Auto;
    unsigned threads = 1;

    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;
};

struct DetectionResult {
    /// Final estimate; for Direction::Reverse the start of the stable span [u_hat, 1].
    double u_hat = 0.0;
    double u_hat_prelim = 0.0;
    double tau_prelim = 0.0;
    double tau_refined = 0.0;
    /// Indicator 1(sqrt(T) dsup(u_j) <= tau_refined) on the working grid.
    std::vector<unsigned char> r_profile;
    std::vector<unsigned char> r_profile_prelim;
    std::shared_ptr<const TimeVariationSurface> surface;
    std::shared_ptr<const QuantileCurve> quantiles;
    Direction direction = Direction::Forward;
    std::optional<double> sigma_hat;
    std::string feature;
    double alpha = 0.1;
    std::size_t length = 0;
    /// Points of the detection grid (the working sample length).
    std::size_t grid_size = 0;
    std::size_t sim_grid_size = 0;
    std::uint64_t seed = 0;
    std::size_t repaired_steps = 0;
};

/// r[j] = 1 iff sqrt(T) * dsup[j] <= tau. Throws for tau <= 0.
std::vector<unsigned char> indicator_profile(const TimeVariationSurface& surface, double tau, std::size_t T);

/// Mean of an indicator profile: the Riemann sum of r over the grid.
double profile_mean(const std::vector<unsigned char>& profile);

/// Smallest rescaled time at which the refined threshold is read off.
/// The curve vanishes at its first point, so the floor is the second one.
double refine_floor(const QuantileCurve& curve);

/// q(max(u_prelim, refine_floor(curve))) by linear interpolation.
double refine_threshold(const QuantileCurve& curve, double u_prelim);

/// Pivotal quantile curve for a sample of length T under `config`; depends
/// only on the grid size, draw count, seed and alpha, so it can be shared
/// between detections.
QuantileCurve pivotal_curve(std::size_t T, const DetectionConfig& config);

/// The detection statistic alone: orientation, feature preparation,
/// optional pre-centring and sigma scaling, without any thresholds.
struct PreparedSurface {
    TimeVariationSurface surface;
    std::optional<double> sigma_hat;
    /// Working sample after orientation, lag embedding and pre-centring.
    SeriesSample working;
    std::size_t embedding_lag = 0;
};
PreparedSurface prepare_surface(const SeriesSample& sample, const DetectionConfig& config);

/// Two-step estimator: preliminary threshold q(1), preliminary estimate,
/// refined threshold q(u_prelim), final estimate. `shared_pivotal` may carry
/// a curve from pivotal_curve() to skip the simulation.
DetectionResult detect(const SeriesSample& sample, const DetectionConfig& config,
                       std::shared_ptr<const QuantileCurve> shared_pivotal = nullptr);

std::string to_string(Direction d);

} // namespace gradcp
