#include "gradcp/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gradcp/errors.hpp"
#include "gradcp/features.hpp"

namespace gradcp {

std::string to_string(Direction d) { return d == Direction::Forward ? "forward" : "reverse"; }

void DetectionConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (scaled && feature != "mean")
        throw std::invalid_argument("the scaled statistic is defined for the univariate mean feature only");
    if (gp.n_draws < 100) throw std::invalid_argument("at least 100 Gaussian draws are required");
    if (gp.max_grid < 2) throw std::invalid_argument("simulation grid needs at least two points");
    if (!(lrv.h > 0.0) || !std::isfinite(lrv.h)) throw std::invalid_argument("smoothing bandwidth h must be positive");
    lrv.hac.max_lag();
}

std::vector<unsigned char> indicator_profile(const TimeVariationSurface& surface, double tau, std::size_t T) {
    if (!(tau > 0.0)) throw std::invalid_argument("threshold tau must be positive");
    const double root_T = std::sqrt(static_cast<double>(T));
    std::vector<unsigned char> r(surface.dsup.size());
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = root_T * surface.dsup[j] <= tau ? 1 : 0;
    return r;
}

double profile_mean(const std::vector<unsigned char>& profile) {
    if (profile.empty()) throw std::invalid_argument("empty indicator profile");
    std::size_t ones = 0;
    for (auto v : profile) ones += v;
    return static_cast<double>(ones) / static_cast<double>(profile.size());
}

double refine_floor(const QuantileCurve& curve) {
    return curve.grid.point(curve.grid.size() >= 2 ? 1 : 0);
}

double refine_threshold(const QuantileCurve& curve, double u_prelim) {
    if (!(u_prelim >= 0.0 && u_prelim <= 1.0)) throw std::invalid_argument("preliminary estimate must lie in [0, 1]");
    return curve.at(std::max(u_prelim, refine_floor(curve)));
}

QuantileCurve pivotal_curve(std::size_t T, const DetectionConfig& config) {
    config.validate();
    const std::size_t m = std::min(T, config.gp.max_grid);
    auto driver = GaussianDriver::pivotal(m, config.gp.n_draws, config.gp.seed);
    return quantile_curve(driver, config.alpha, config.threads);
}

namespace {

SeriesSample precentered(const SeriesSample& sample, const DetectionConfig& config) {
    if (config.precenter == PreCentering::None) return sample;
    const std::size_t T = sample.length(), d = sample.dim();
    std::vector<double> values = sample.data();
    for (std::size_t c = 0; c < d; ++c) {
        auto col = sample.column(c);
        std::vector<double> centre;
        if (config.precenter == PreCentering::GlobalMean) {
            CompensatedSum s;
            for (double v : col) s.add(v);
            centre.assign(T, s.value() / static_cast<double>(T));
        } else {
            centre = nw_mean(col, config.lrv.h, config.lrv.smoother);
        }
        for (std::size_t t = 0; t < T; ++t) values[t * d + c] -= centre[t];
    }
    return SeriesSample(std::move(values), T, d, sample.origin());
}

} // namespace

PreparedSurface prepare_surface(const SeriesSample& sample, const DetectionConfig& config) {
    config.validate();
    const SeriesSample oriented = config.direction == Direction::Reverse ? sample.reversed() : sample;
    const FeatureFamily family = parse_family(config.feature, oriented.dim());
    SeriesSample working = precentered(prepare_for_family(oriented, family), config);
    const std::size_t T = working.length();

    auto surface = dsup_profile(build_prefix_sums(working, family), family, RescaledGrid::natural(T), config.method);
    std::optional<double> sigma_hat;
    if (config.scaled) {
        const double sigma2 = config.lrv.sigma == SigmaEstimator::Residual
                                  ? residual_lrv(working, config.lrv.h, config.lrv.hac, config.lrv.smoother)
                                  : diff_variance(working);
        if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
            throw DataError("degenerate error variance estimate (" + std::to_string(sigma2) + ")");
        sigma_hat = std::sqrt(sigma2);
        surface = scale_surface(surface, *sigma_hat);
    }
    return {std::move(surface), sigma_hat, std::move(working), family.embedding_lag()};
}

DetectionResult detect(const SeriesSample& sample, const DetectionConfig& config,
                       std::shared_ptr<const QuantileCurve> shared_pivotal) {
    auto prepared = prepare_surface(sample, config);
    const SeriesSample& working = prepared.working;
    const FeatureFamily family = parse_family(config.feature, sample.dim());
    const std::size_t T = working.length();

    DetectionResult result;
    result.direction = config.direction;
    result.feature = family.token();
    result.alpha = config.alpha;
    result.length = sample.length();
    result.seed = config.gp.seed;
    result.sigma_hat = prepared.sigma_hat;

    const std::size_t m = std::min(T, config.gp.max_grid);
    std::shared_ptr<const QuantileCurve> curve;
    if (config.scaled && config.gp.pivotal) {
        if (shared_pivotal) {
            if (shared_pivotal->q.size() != m || shared_pivotal->alpha != config.alpha ||
                shared_pivotal->driver != DriverKind::Pivotal)
                throw std::invalid_argument("shared pivotal curve does not match the detection settings");
            curve = std::move(shared_pivotal);
        } else {
            curve = std::make_shared<QuantileCurve>(pivotal_curve(T, config));
        }
    } else {
        auto cov = hac_sigma(working, family, config.lrv.hac,
                             Centering{config.lrv.centering, config.lrv.h, config.lrv.smoother},
                             RescaledGrid::natural(m));
        if (prepared.sigma_hat)
            for (auto& s : cov.sigma) s /= *prepared.sigma_hat * *prepared.sigma_hat;
        auto driver = GaussianDriver::estimated(cov, config.gp.n_draws, config.gp.seed);
        result.repaired_steps = driver.repaired_steps();
        curve = std::make_shared<QuantileCurve>(quantile_curve(driver, config.alpha, config.threads));
    }

    const auto& surface = prepared.surface;
    result.tau_prelim = curve->at(1.0);
    result.r_profile_prelim = indicator_profile(surface, result.tau_prelim, T);
    double u_prelim = profile_mean(result.r_profile_prelim);
    result.tau_refined = refine_threshold(*curve, u_prelim);
    result.r_profile = indicator_profile(surface, result.tau_refined, T);
    double u_final = profile_mean(result.r_profile);

    // Row t of the lag embedding is observation t + p of the original series.
    if (const std::size_t p = prepared.embedding_lag; p > 0) {
        const double n = static_cast<double>(sample.length());
        u_prelim = (u_prelim * static_cast<double>(T) + static_cast<double>(p)) / n;
        u_final = (u_final * static_cast<double>(T) + static_cast<double>(p)) / n;
    }
    if (config.direction == Direction::Reverse) {
        u_prelim = 1.0 - u_prelim;
        u_final = 1.0 - u_final;
    }
    result.u_hat_prelim = u_prelim;
    result.u_hat = u_final;
    result.grid_size = T;
    result.sim_grid_size = m;
    result.surface = std::make_shared<TimeVariationSurface>(std::move(prepared.surface));
    result.quantiles = std::move(curve);
    return result;
}

} // namespace gradcp
