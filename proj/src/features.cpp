#include "gradcp/features.hpp"

#include <charconv>
#include <stdexcept>

#include "gradcp/errors.hpp"

namespace gradcp {

FeatureFamily::FeatureFamily(FeatureKind kind, std::vector<MomentFunction> functions, std::size_t required_dim,
                             std::size_t embedding_lag)
    : kind_(kind), functions_(std::move(functions)), required_dim_(required_dim), embedding_lag_(embedding_lag) {
    if (functions_.empty()) throw std::invalid_argument("feature family must contain at least one function");
    if (required_dim_ == 0) throw std::invalid_argument("feature family dimension must be positive");
    for (std::size_t a = 0; a < functions_.size(); ++a)
        for (std::size_t b = a + 1; b < functions_.size(); ++b)
            if (functions_[a].label == functions_[b].label)
                throw std::invalid_argument("duplicate feature label '" + functions_[a].label + "'");
}

std::string FeatureFamily::token() const {
    switch (kind_) {
        case FeatureKind::Mean: return "mean";
        case FeatureKind::Variance: return "variance";
        case FeatureKind::Autocovariance: return "acf:" + std::to_string(embedding_lag_);
        case FeatureKind::CrossCovariance: return "cov";
    }
    return "unknown";
}

namespace {

MomentFunction product(std::string label, std::size_t i, std::size_t j) {
    return {std::move(label), [i, j](std::span<const double> x) { return x[i] * x[j]; }};
}

} // namespace

FeatureFamily make_family(FeatureKind kind, std::size_t lag, std::size_t dim) {
    switch (kind) {
        case FeatureKind::Mean:
            return FeatureFamily(kind, {{"id", [](std::span<const double> x) { return x[0]; }}}, 1);
        case FeatureKind::Variance:
            return FeatureFamily(kind, {product("x1^2", 0, 0)}, 1);
        case FeatureKind::Autocovariance: {
            std::vector<MomentFunction> fs;
            for (std::size_t l = 0; l <= lag; ++l) fs.push_back(product("lag" + std::to_string(l), 0, l));
            return FeatureFamily(kind, std::move(fs), lag + 1, lag);
        }
        case FeatureKind::CrossCovariance: {
            std::size_t d = std::max<std::size_t>(dim, 1);
            std::vector<MomentFunction> fs;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = i; j < d; ++j)
                    fs.push_back(product("x" + std::to_string(i + 1) + "*x" + std::to_string(j + 1), i, j));
            return FeatureFamily(kind, std::move(fs), d);
        }
    }
    throw std::invalid_argument("unknown feature kind");
}

FeatureFamily parse_family(const std::string& token, std::size_t dim) {
    if (token == "mean") return make_family(FeatureKind::Mean);
    if (token == "variance") return make_family(FeatureKind::Variance);
    if (token == "cov") return make_family(FeatureKind::CrossCovariance, 0, dim);
    if (token.rfind("acf:", 0) == 0) {
        std::size_t lag = 0;
        const char* first = token.data() + 4;
        const char* last = token.data() + token.size();
        auto [ptr, ec] = std::from_chars(first, last, lag);
        if (ec != std::errc() || ptr != last || first == last)
            throw std::invalid_argument("invalid lag in feature token '" + token + "'");
        return make_family(FeatureKind::Autocovariance, lag);
    }
    throw std::invalid_argument("unknown feature '" + token + "' (expected mean | variance | acf:<p> | cov)");
}

SeriesSample embed_lags(const SeriesSample& sample, std::size_t lag) {
    if (sample.dim() != 1) throw std::invalid_argument("lag embedding requires a univariate series");
    const std::size_t T = sample.length();
    if (T <= lag)
        throw DataError("series too short for lag " + std::to_string(lag) + " (T = " + std::to_string(T) + ")");
    const std::size_t rows = T - lag;
    const std::size_t width = lag + 1;
    std::vector<double> out(rows * width);
    for (std::size_t t = 0; t < rows; ++t)
        for (std::size_t l = 0; l <= lag; ++l) out[t * width + l] = sample.at(t + lag - l, 0);
    return SeriesSample(std::move(out), rows, width, sample.origin());
}

SeriesSample prepare_for_family(const SeriesSample& sample, const FeatureFamily& family) {
    if (family.kind() == FeatureKind::Autocovariance) {
        auto embedded = embed_lags(sample, family.embedding_lag());
        return embedded;
    }
    if (!family.applies_to(sample))
        throw std::invalid_argument("feature family '" + family.token() + "' expects dimension " +
                                    std::to_string(family.required_dim()) + ", sample has " +
                                    std::to_string(sample.dim()));
    return sample;
}

std::vector<std::vector<double>> evaluate_family(const SeriesSample& sample, const FeatureFamily& family) {
    if (!family.applies_to(sample))
        throw std::invalid_argument("feature family '" + family.token() + "' does not apply to the sample");
    std::vector<std::vector<double>> out(family.size(), std::vector<double>(sample.length()));
    for (std::size_t f = 0; f < family.size(); ++f)
        for (std::size_t t = 0; t < sample.length(); ++t) out[f][t] = family[f](sample.row(t));
    return out;
}

} // namespace gradcp
