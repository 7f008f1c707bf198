#include "gradcp/lrv.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gradcp/errors.hpp"

namespace gradcp {

double KernelSpec::weight(HacKernel kind, double x) noexcept {
    const double a = std::abs(x);
    switch (kind) {
        case HacKernel::Bartlett: return a < 1.0 ? 1.0 - a : 0.0;
        case HacKernel::FlatTop:
            if (a <= 0.5) return 1.0;
            return a < 1.0 ? 2.0 * (1.0 - a) : 0.0;
    }
    return 0.0;
}

double KernelSpec::lag_weight(long lag) const noexcept {
    if (bandwidth == 0.0) return lag == 0 ? 1.0 : 0.0;
    return weight(kind, static_cast<double>(lag) / bandwidth);
}

std::size_t KernelSpec::max_lag() const {
    if (!(bandwidth >= 0.0) || !std::isfinite(bandwidth))
        throw std::invalid_argument("HAC bandwidth must be a non-negative finite number");
    if (bandwidth == 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(bandwidth)) - 1;
}

double smoothing_weight(SmoothingKernel kind, double x) noexcept {
    const double a = std::abs(x);
    switch (kind) {
        case SmoothingKernel::Epanechnikov: return a < 1.0 ? 0.75 * (1.0 - a * a) : 0.0;
        case SmoothingKernel::Uniform: return a <= 1.0 ? 0.5 : 0.0;
    }
    return 0.0;
}

std::vector<double> nw_mean(std::span<const double> y, double h, SmoothingKernel kernel) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("smoothing bandwidth h must be positive");
    const std::size_t T = y.size();
    if (T == 0) return {};
    const double scale = static_cast<double>(T) * h;
    // Kernels vanish beyond |x| = 1, i.e. |t - s| > T h.
    const std::size_t reach = static_cast<std::size_t>(std::min(std::floor(scale), static_cast<double>(T)));

    std::vector<double> fit(T);
    for (std::size_t t = 0; t < T; ++t) {
        const std::size_t lo = t >= reach ? t - reach : 0;
        const std::size_t hi = std::min(T - 1, t + reach);
        double weight_sum = 0.0;
        double deviation = 0.0;
        bool neighbour = false;
        for (std::size_t s = lo; s <= hi; ++s) {
            const double dist = (static_cast<double>(t) - static_cast<double>(s)) / scale;
            const double w = smoothing_weight(kernel, dist);
            if (w == 0.0) continue;
            if (s != t) neighbour = true;
            weight_sum += w;
            deviation += w * (y[s] - y[t]);
        }
        if (!neighbour)
            throw DataError("Nadaraya-Watson window is empty at t = " + std::to_string(t + 1) +
                            "; bandwidth h is too small relative to 1/T");
        // Ratio form written around y_t: equals sum w y / sum w, exact for constants.
        fit[t] = y[t] + deviation / weight_sum;
    }
    return fit;
}

std::vector<double> nw_mean(const SeriesSample& sample, const MomentFunction& f, double h, SmoothingKernel kernel) {
    std::vector<double> values(sample.length());
    for (std::size_t t = 0; t < sample.length(); ++t) values[t] = f(sample.row(t));
    return nw_mean(values, h, kernel);
}

std::string Centering::describe() const {
    std::ostringstream os;
    switch (kind) {
        case CenteringKind::NadarayaWatson:
            os << "nw(h=" << h << ", kernel=" << (kernel == SmoothingKernel::Epanechnikov ? "epanechnikov" : "uniform")
               << ")";
            break;
        case CenteringKind::GlobalMean: os << "global-mean"; break;
        case CenteringKind::None: os << "none"; break;
    }
    return os.str();
}

LongRunCovariance hac_sigma_centered(const std::vector<std::vector<double>>& z, const KernelSpec& kernel,
                                     const RescaledGrid& grid, std::string centering_label) {
    if (z.empty()) throw std::invalid_argument("hac_sigma: no features");
    const std::size_t F = z.size();
    const std::size_t T = z.front().size();
    for (const auto& row : z)
        if (row.size() != T) throw std::invalid_argument("hac_sigma: feature series differ in length");
    const std::size_t L = kernel.max_lag();
    if (L >= T)
        throw std::invalid_argument("HAC bandwidth " + std::to_string(kernel.bandwidth) + " exceeds the sample length " +
                                    std::to_string(T));

    std::vector<double> weights(L + 1);
    for (std::size_t l = 0; l <= L; ++l) weights[l] = kernel.lag_weight(static_cast<long>(l));

    LongRunCovariance out{grid, {}, std::move(centering_label), T};
    out.sigma.reserve(grid.size());

    const double inv_T = 1.0 / static_cast<double>(T);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(F), static_cast<Eigen::Index>(F));
    std::size_t k = 0;
    // Pairs (t, s) enter once max(t, s) = n, so acc holds the estimate at floor(uT) = n.
    for (std::size_t n = 0; n <= T && k < grid.size(); ++n) {
        if (n > 0) {
            const std::size_t t = n - 1;
            const std::size_t lags = std::min(L, t);
            for (std::size_t a = 0; a < F; ++a) {
                for (std::size_t b = a; b < F; ++b) {
                    double inc = weights[0] * z[a][t] * z[b][t];
                    for (std::size_t l = 1; l <= lags; ++l) {
                        if (weights[l] == 0.0) continue;
                        inc += weights[l] * (z[a][t] * z[b][t - l] + z[a][t - l] * z[b][t]);
                    }
                    acc(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += inc * inv_T;
                }
            }
        }
        while (k < grid.size() && grid.floor_scaled(k, T) == n) {
            Eigen::MatrixXd sym = acc.triangularView<Eigen::Upper>();
            sym.triangularView<Eigen::StrictlyLower>() = acc.transpose().triangularView<Eigen::StrictlyLower>();
            out.sigma.push_back(std::move(sym));
            ++k;
        }
    }
    return out;
}

namespace {

std::vector<double> centered_values(std::vector<double> values, const Centering& centering) {
    switch (centering.kind) {
        case CenteringKind::NadarayaWatson: {
            auto fit = nw_mean(values, centering.h, centering.kernel);
            for (std::size_t t = 0; t < values.size(); ++t) values[t] -= fit[t];
            break;
        }
        case CenteringKind::GlobalMean: {
            CompensatedSum s;
            for (double v : values) s.add(v);
            const double mean = s.value() / static_cast<double>(values.size());
            for (double& v : values) v -= mean;
            break;
        }
        case CenteringKind::None: break;
    }
    return values;
}

} // namespace

LongRunCovariance hac_sigma(const SeriesSample& sample, const FeatureFamily& family, const KernelSpec& kernel,
                            const Centering& centering, const RescaledGrid& grid) {
    auto values = evaluate_family(sample, family);
    for (auto& v : values) {
        v = centered_values(std::move(v), centering);
        for (double x : v)
            if (!std::isfinite(x)) throw DataError("degenerate centering: non-finite centred feature values");
    }
    return hac_sigma_centered(values, kernel, grid, centering.describe());
}

double residual_lrv(const SeriesSample& sample, double h, const KernelSpec& kernel, SmoothingKernel smoother) {
    if (sample.dim() != 1) throw std::invalid_argument("residual_lrv requires a univariate series");
    auto x = sample.column(0);
    auto fit = nw_mean(x, h, smoother);
    bool all_zero = true;
    for (std::size_t t = 0; t < x.size(); ++t) {
        x[t] -= fit[t];
        if (x[t] != 0.0) all_zero = false;
    }
    if (all_zero) throw DataError("residuals are identically zero; the long-run variance is degenerate");
    auto lrv = hac_sigma_centered({x}, kernel, RescaledGrid::natural(1), "residual");
    const double value = lrv.sigma.front()(0, 0);
    if (!(value > 0.0) || !std::isfinite(value))
        throw DataError("long-run variance estimate is not positive (" + std::to_string(value) +
                        "); use a larger bandwidth or the Bartlett kernel");
    return value;
}

double diff_variance(const SeriesSample& sample) {
    if (sample.dim() != 1) throw std::invalid_argument("diff_variance requires a univariate series");
    const std::size_t T = sample.length();
    CompensatedSum s;
    for (std::size_t t = 1; t < T; ++t) {
        const double d = sample.at(t, 0) - sample.at(t - 1, 0);
        s.add(d * d);
    }
    return s.value() / (2.0 * static_cast<double>(T));
}

} // namespace gradcp
