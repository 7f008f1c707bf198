#include "gradcp/tvmeasure.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "gradcp/cusum_hull.hpp"

namespace gradcp {

double dhat(const PrefixSums& prefix, std::size_t feature, std::size_t j, std::size_t i) {
    if (j == 0) throw std::invalid_argument("dhat: u must be positive (j = 0)");
    if (i > j || j > prefix.length()) throw std::invalid_argument("dhat: requires 0 <= i <= j <= T");
    const double T = static_cast<double>(prefix.length());
    const double ratio = static_cast<double>(i) / static_cast<double>(j);
    return prefix(feature, i) / T - ratio * (prefix(feature, j) / T);
}

namespace {

struct SupPoint {
    double value = 0.0;
    std::size_t index = 0;
};

// Larger |dhat| wins; equal values keep the smaller index.
void offer(SupPoint& best, double value, std::size_t index) {
    if (value > best.value || (value == best.value && index < best.index)) {
        best.value = value;
        best.index = index;
    }
}

std::vector<SupPoint> scan_brute(const PrefixSums& prefix, std::size_t f, const RescaledGrid& grid) {
    std::vector<SupPoint> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const std::size_t j = grid.index(k);
        SupPoint best;
        for (std::size_t i = 0; i <= j; ++i) {
            double v = std::abs(dhat(prefix, f, j, i));
            if (v > best.value || i == 0) {
                best.value = v;
                best.index = i;
            }
        }
        out[k] = best;
    }
    return out;
}

std::vector<SupPoint> scan_hull(const PrefixSums& prefix, std::size_t f, const RescaledGrid& grid) {
    std::vector<SupPoint> out(grid.size());
    CusumHull hull;
    hull.reserve(prefix.length() + 1);
    std::size_t next = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const std::size_t j = grid.index(k);
        while (next <= j) hull.push(prefix(f, next++));
        const double slope = prefix(f, j) / static_cast<double>(j);
        const std::size_t hi = hull.argmax(slope);
        const std::size_t lo = hull.argmin(slope);
        SupPoint best{std::abs(dhat(prefix, f, j, 0)), 0};
        offer(best, std::abs(dhat(prefix, f, j, hi)), hi);
        offer(best, std::abs(dhat(prefix, f, j, lo)), lo);
        out[k] = best;
    }
    return out;
}

} // namespace

TimeVariationSurface dsup_profile(const PrefixSums& prefix, const FeatureFamily& family, const RescaledGrid& grid,
                                  SupMethod method) {
    if (prefix.features() != family.size())
        throw std::invalid_argument("prefix sums were not built for this feature family");
    if (grid.denominator() != prefix.length())
        throw std::invalid_argument("surface grid must be a subset of {1/T, ..., 1}");
    if (method == SupMethod::Auto) method = prefix.length() <= brute_force_limit ? SupMethod::Brute : SupMethod::Hull;

    const std::size_t n = grid.size();
    TimeVariationSurface s{grid, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                           std::vector<std::size_t>(n, 0), std::vector<std::size_t>(n, 0), {}, prefix.length(), 1.0};
    for (const auto& fn : family.functions()) s.feature_labels.push_back(fn.label);

    for (std::size_t f = 0; f < family.size(); ++f) {
        auto scan = method == SupMethod::Brute ? scan_brute(prefix, f, grid) : scan_hull(prefix, f, grid);
        for (std::size_t k = 0; k < n; ++k) {
            // Strict comparison: earlier features win ties.
            if (f == 0 || scan[k].value > s.dsup[k]) {
                s.dsup[k] = scan[k].value;
                s.argmax_index[k] = scan[k].index;
                s.argmax_feature[k] = f;
            }
        }
    }
    for (std::size_t k = 0; k < n; ++k) s.dmax[k] = k == 0 ? s.dsup[0] : std::max(s.dmax[k - 1], s.dsup[k]);
    return s;
}

TimeVariationSurface scale_surface(const TimeVariationSurface& surface, double sigma_hat) {
    if (!(sigma_hat > 0.0) || !std::isfinite(sigma_hat))
        throw std::invalid_argument("scale_surface: sigma_hat must be positive and finite");
    TimeVariationSurface out = surface;
    for (auto& v : out.dsup) v /= sigma_hat;
    for (auto& v : out.dmax) v /= sigma_hat;
    out.scale = surface.scale * sigma_hat;
    return out;
}

void write_surface_csv(std::ostream& out, const TimeVariationSurface& s, const std::string& preamble) {
    if (!preamble.empty()) out << preamble;
    out << "u,dsup,dmax,argmax_v,argmax_f\n";
    char buf[256];
    for (std::size_t k = 0; k < s.grid.size(); ++k) {
        const double v = static_cast<double>(s.argmax_index[k]) / static_cast<double>(s.length);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,", s.grid.point(k), s.dsup[k], s.dmax[k], v);
        out << buf << s.feature_labels.at(s.argmax_feature[k]) << '\n';
    }
}

} // namespace gradcp
