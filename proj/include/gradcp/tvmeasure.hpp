#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gradcp/features.hpp"
#include "gradcp/series.hpp"

namespace gradcp {

/// Empirical time-variation contrast
///   D(u, v, f) = S_f(i)/T - (i/j) S_f(j)/T,  u = j/T, v = i/T, 0 <= i <= j.
/// Throws std::invalid_argument for j == 0 or i > j.
double dhat(const PrefixSums& prefix, std::size_t feature, std::size_t j, std::size_t i);

enum class SupMethod {
    Brute, ///< O(j) scan per grid point; the reference path.
    Hull,  ///< convex-hull slope queries, O(log j) per grid point.
    Auto,  ///< Brute for T <= brute_force_limit, Hull otherwise.
};

inline constexpr std::size_t brute_force_limit = 1024;

/// D^sup and its running maximum D^max on a grid of rescaled time points.
struct TimeVariationSurface {
    RescaledGrid grid;
    std::vector<double> dsup;
    std::vector<double> dmax;
    /// v* = argmax_v as the integer index i (v = i/T) and the feature index f*.
    std::vector<std::size_t> argmax_index;
    std::vector<std::size_t> argmax_feature;
    std::vector<std::string> feature_labels;
    /// Sample length T used for the 1/T normalisation.
    std::size_t length = 0;
    /// Divisor applied by scale_surface (1 when unscaled).
    double scale = 1.0;
};

/// dsup[k] = max over features f and 0 <= i <= j_k of |dhat(f, j_k, i)|.
/// The grid must be a subset of {1/T, ..., 1} with denominator T. Ties in
/// the argmax go to the smallest i, then to the earlier feature.
TimeVariationSurface dsup_profile(const PrefixSums& prefix, const FeatureFamily& family, const RescaledGrid& grid,
                                  SupMethod method = SupMethod::Auto);

/// Divides dsup and dmax by sigma_hat (> 0, finite).
TimeVariationSurface scale_surface(const TimeVariationSurface& surface, double sigma_hat);

/// CSV with columns u, dsup, dmax, argmax_v, argmax_f. Lines starting with
/// '#' in `preamble` are written first.
void write_surface_csv(std::ostream& out, const TimeVariationSurface& surface, const std::string& preamble = {});

} // namespace gradcp
