#pragma once

#include <cmath>
#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <vector>

namespace gradcp {

struct SeriesOrigin {
    std::string source;
    std::vector<std::string> column_names;
};

/// An observed series X_{1,T}, ..., X_{T,T} of d-dimensional observations.
///
/// Rows are time points, columns are coordinates. Observation t (1-based)
/// sits at rescaled time t/T. Construction rejects T < 2, d < 1 and
/// non-finite entries; the object is immutable afterwards.
class SeriesSample {
public:
    /// `values` is row-major with rows * cols entries.
    SeriesSample(std::vector<double> values, std::size_t rows, std::size_t cols, SeriesOrigin origin = {});

    static SeriesSample univariate(std::vector<double> values, SeriesOrigin origin = {});

    std::size_t length() const noexcept { return rows_; }
    std::size_t dim() const noexcept { return cols_; }

    /// Observation at 0-based row index.
    std::span<const double> row(std::size_t index) const noexcept {
        return {values_.data() + index * cols_, cols_};
    }
    double at(std::size_t index, std::size_t column) const noexcept { return values_[index * cols_ + column]; }

    /// Values of one coordinate over time.
    std::vector<double> column(std::size_t column) const;

    const std::vector<double>& data() const noexcept { return values_; }
    const SeriesOrigin& origin() const noexcept { return origin_; }

    /// Rescaled time of the 1-based observation t.
    double rescaled_time(std::size_t t) const noexcept {
        return static_cast<double>(t) / static_cast<double>(rows_);
    }

    SeriesSample reversed() const;

private:
    std::vector<double> values_;
    std::size_t rows_;
    std::size_t cols_;
    SeriesOrigin origin_;
};

/// Strictly increasing points index/denominator in (0, 1].
///
/// Points are stored as integers so that floor(u * T) at u = j/T is j
/// without any floating rounding.
class RescaledGrid {
public:
    RescaledGrid(std::vector<std::size_t> indices, std::size_t denominator);

    /// {1/n, 2/n, ..., 1}
    static RescaledGrid natural(std::size_t n);

    std::size_t size() const noexcept { return indices_.size(); }
    std::size_t denominator() const noexcept { return denominator_; }
    std::size_t index(std::size_t k) const noexcept { return indices_[k]; }
    const std::vector<std::size_t>& indices() const noexcept { return indices_; }
    double point(std::size_t k) const noexcept {
        return static_cast<double>(indices_[k]) / static_cast<double>(denominator_);
    }

    /// True when the grid is {1/n, ..., n/n}.
    bool is_full() const noexcept;

    /// floor(u_k * T) for grid point k, in integer arithmetic.
    std::size_t floor_scaled(std::size_t k, std::size_t T) const noexcept {
        return indices_[k] * T / denominator_;
    }

private:
    std::vector<std::size_t> indices_;
    std::size_t denominator_;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            compensation_ += (sum_ - t) + x;
        else
            compensation_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

class FeatureFamily;

/// Per-feature cumulative sums S_f(t) = sum_{s <= t} f(X_s), t = 0..T.
class PrefixSums {
public:
    PrefixSums(std::vector<std::vector<double>> sums, std::size_t length);

    std::size_t length() const noexcept { return length_; }
    std::size_t features() const noexcept { return sums_.size(); }

    /// S_f(t), t in [0, T].
    double operator()(std::size_t feature, std::size_t t) const noexcept { return sums_[feature][t]; }
    std::span<const double> feature(std::size_t f) const noexcept { return sums_[f]; }

private:
    std::vector<std::vector<double>> sums_;
    std::size_t length_;
};

struct CsvFormat {
    char delimiter = ',';
    /// Auto-detected when unset: a first row with any non-numeric cell is a header.
    enum class Header { Auto, Present, Absent } header = Header::Auto;
};

SeriesSample load_series(std::istream& source, const CsvFormat& format = {}, std::string source_name = {});
SeriesSample load_series_file(const std::string& path, const CsvFormat& format = {});

/// Throws std::invalid_argument when the family does not apply to the sample's dimension.
PrefixSums build_prefix_sums(const SeriesSample& sample, const FeatureFamily& family);

} // namespace gradcp
