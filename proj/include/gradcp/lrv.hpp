#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gradcp/features.hpp"
#include "gradcp/series.hpp"

namespace gradcp {

enum class HacKernel { Bartlett, FlatTop };

/// Lag window K with bandwidth b for the HAC estimator.
struct KernelSpec {
    HacKernel kind = HacKernel::Bartlett;
    double bandwidth = 10.0;

    /// Bartlett: (1 - |x|)_+. Flat-top: 1 on |x| <= 1/2, 2(1 - |x|) on 1/2 < |x| < 1, 0 beyond.
    static double weight(HacKernel kind, double x) noexcept;

    /// K(l / b); b = 0 keeps lag 0 only.
    double lag_weight(long lag) const noexcept;

    /// Largest |l| with a possibly non-zero weight: ceil(b) - 1, or 0 when b = 0.
    std::size_t max_lag() const;
};

/// Symmetric smoothing kernel for the Nadaraya-Watson mean, supported on [-1, 1].
enum class SmoothingKernel { Epanechnikov, Uniform };

double smoothing_weight(SmoothingKernel kind, double x) noexcept;

/// Self-normalised Nadaraya-Watson fit m(t/T) of the values y_1..y_T with
/// bandwidth h in rescaled time. Constant input is reproduced exactly.
/// Throws DataError when some point has no neighbour inside the window.
std::vector<double> nw_mean(std::span<const double> values, double h,
                            SmoothingKernel kernel = SmoothingKernel::Epanechnikov);

std::vector<double> nw_mean(const SeriesSample& sample, const MomentFunction& f, double h,
                            SmoothingKernel kernel = SmoothingKernel::Epanechnikov);

enum class CenteringKind { NadarayaWatson, GlobalMean, None };

struct Centering {
    CenteringKind kind = CenteringKind::NadarayaWatson;
    double h = 0.2;
    SmoothingKernel kernel = SmoothingKernel::Epanechnikov;

    std::string describe() const;
};

/// Estimated long-run covariance matrices of the feature processes,
/// accumulated up to each grid point u (sums over t <= floor(uT)).
struct LongRunCovariance {
    RescaledGrid grid;
    std::vector<Eigen::MatrixXd> sigma;
    std::string centering;
    std::size_t length = 0;

    std::size_t features() const { return sigma.empty() ? 0 : static_cast<std::size_t>(sigma.front().rows()); }
};

/// HAC estimate sigma^2(u, f, f') = sum_l K(l/b) Gamma_l(u, f, f') with
///   Gamma_l(u, f, f') = (1/T) sum Z_t(f) Z_{t-l}(f'),
/// summed over pairs with both time indices in [1, floor(uT)]. With a
/// Bartlett window every sigma(u) is positive semidefinite. `sample` must
/// already be in the family's dimension (see prepare_for_family).
LongRunCovariance hac_sigma(const SeriesSample& sample, const FeatureFamily& family, const KernelSpec& kernel,
                            const Centering& centering, const RescaledGrid& grid);

/// Same estimator on precomputed centred feature values Z[f][t].
LongRunCovariance hac_sigma_centered(const std::vector<std::vector<double>>& centered, const KernelSpec& kernel,
                                     const RescaledGrid& grid, std::string centering_label = "none");

/// Long-run variance of the location-model errors: HAC at u = 1 of the
/// residuals X_t - m_h(t/T). Throws DataError when the estimate is not
/// positive.
double residual_lrv(const SeriesSample& sample, double h, const KernelSpec& kernel,
                    SmoothingKernel smoother = SmoothingKernel::Epanechnikov);

/// First-difference variance estimate T^{-1} sum_{t=2}^T (X_t - X_{t-1})^2 / 2.
double diff_variance(const SeriesSample& sample);

} // namespace gradcp
