#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gradcp/series.hpp"

namespace gradcp {

enum class FeatureKind { Mean, Variance, Autocovariance, CrossCovariance };

/// One moment function f: R^d -> R with a stable label.
struct MomentFunction {
    std::string label;
    std::function<double(std::span<const double>)> eval;

    double operator()(std::span<const double> x) const { return eval(x); }
};

/// Finite family F of moment functions whose expectations determine the
/// feature under study.
///
/// Mean: {x_1}. Variance: {x_1^2}. Autocovariance(p): {x_0 x_l : l = 0..p}
/// evaluated on the lag embedding (Y_t, Y_{t-1}, ..., Y_{t-p}).
/// CrossCovariance on R^d: {x_i x_j : i <= j}.
class FeatureFamily {
public:
    FeatureFamily(FeatureKind kind, std::vector<MomentFunction> functions, std::size_t required_dim,
                  std::size_t embedding_lag = 0);

    FeatureKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return functions_.size(); }
    const MomentFunction& operator[](std::size_t k) const noexcept { return functions_[k]; }
    const std::vector<MomentFunction>& functions() const noexcept { return functions_; }

    /// Dimension of the observations the functions act on (after lag embedding).
    std::size_t required_dim() const noexcept { return required_dim_; }
    std::size_t embedding_lag() const noexcept { return embedding_lag_; }

    /// CLI token: mean | variance | acf:<p> | cov
    std::string token() const;

    bool applies_to(const SeriesSample& sample) const noexcept { return sample.dim() == required_dim_; }

private:
    FeatureKind kind_;
    std::vector<MomentFunction> functions_;
    std::size_t required_dim_;
    std::size_t embedding_lag_;
};

/// `lag` is used by Autocovariance only, `dim` by CrossCovariance only.
/// CrossCovariance with dim < 2 yields the single function f_11.
FeatureFamily make_family(FeatureKind kind, std::size_t lag = 0, std::size_t dim = 1);

/// Parses `mean | variance | acf:<p> | cov`; `dim` is the data dimension
/// (used to size the cross-covariance family).
FeatureFamily parse_family(const std::string& token, std::size_t dim);

/// Rows (Y_{t+p}, Y_{t+p-1}, ..., Y_t) for t = 1..T-p. Requires a univariate
/// sample with T > p; the result must still have at least two rows.
SeriesSample embed_lags(const SeriesSample& sample, std::size_t lag);

/// Sample the family's functions act on: the lag embedding for
/// Autocovariance, the sample itself otherwise. Checks dimensions.
SeriesSample prepare_for_family(const SeriesSample& sample, const FeatureFamily& family);

/// f_k(X_t) for every t, one vector per function.
std::vector<std::vector<double>> evaluate_family(const SeriesSample& sample, const FeatureFamily& family);

} // namespace gradcp
