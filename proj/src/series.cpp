#include "gradcp/series.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>
#include <string_view>

#include "gradcp/errors.hpp"
#include "gradcp/features.hpp"

namespace gradcp {

SeriesSample::SeriesSample(std::vector<double> values, std::size_t rows, std::size_t cols, SeriesOrigin origin)
    : values_(std::move(values)), rows_(rows), cols_(cols), origin_(std::move(origin)) {
    if (cols_ < 1) throw DataError("series must have at least one column");
    if (rows_ < 2) throw DataError("series too short: T < 2 (T = " + std::to_string(rows_) + ")");
    if (values_.size() != rows_ * cols_) throw std::invalid_argument("series storage does not match rows * cols");
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k]))
            throw ParseError("non-finite value", k / cols_ + 1, k % cols_ + 1);
    }
}

SeriesSample SeriesSample::univariate(std::vector<double> values, SeriesOrigin origin) {
    std::size_t n = values.size();
    return SeriesSample(std::move(values), n, 1, std::move(origin));
}

std::vector<double> SeriesSample::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t t = 0; t < rows_; ++t) out[t] = values_[t * cols_ + c];
    return out;
}

SeriesSample SeriesSample::reversed() const {
    std::vector<double> out(values_.size());
    for (std::size_t t = 0; t < rows_; ++t)
        std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>((rows_ - 1 - t) * cols_), cols_,
                    out.begin() + static_cast<std::ptrdiff_t>(t * cols_));
    return SeriesSample(std::move(out), rows_, cols_, origin_);
}

RescaledGrid::RescaledGrid(std::vector<std::size_t> indices, std::size_t denominator)
    : indices_(std::move(indices)), denominator_(denominator) {
    if (denominator_ == 0) throw std::invalid_argument("grid denominator must be positive");
    if (indices_.empty()) throw std::invalid_argument("grid must contain at least one point");
    for (std::size_t k = 0; k < indices_.size(); ++k) {
        if (indices_[k] == 0 || indices_[k] > denominator_)
            throw std::invalid_argument("grid points must lie in (0, 1]");
        if (k > 0 && indices_[k] <= indices_[k - 1])
            throw std::invalid_argument("grid points must be strictly increasing");
    }
}

RescaledGrid RescaledGrid::natural(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t j = 0; j < n; ++j) idx[j] = j + 1;
    return RescaledGrid(std::move(idx), n);
}

bool RescaledGrid::is_full() const noexcept {
    if (indices_.size() != denominator_) return false;
    for (std::size_t k = 0; k < indices_.size(); ++k)
        if (indices_[k] != k + 1) return false;
    return true;
}

PrefixSums::PrefixSums(std::vector<std::vector<double>> sums, std::size_t length)
    : sums_(std::move(sums)), length_(length) {
    for (const auto& s : sums_)
        if (s.size() != length_ + 1) throw std::invalid_argument("prefix sums must have length T + 1");
}

PrefixSums build_prefix_sums(const SeriesSample& sample, const FeatureFamily& family) {
    if (!family.applies_to(sample))
        throw std::invalid_argument("feature family '" + family.token() + "' expects dimension " +
                                    std::to_string(family.required_dim()) + ", sample has " +
                                    std::to_string(sample.dim()));
    const std::size_t T = sample.length();
    std::vector<std::vector<double>> sums(family.size(), std::vector<double>(T + 1, 0.0));
    for (std::size_t f = 0; f < family.size(); ++f) {
        CompensatedSum acc;
        for (std::size_t t = 0; t < T; ++t) {
            acc.add(family[f](sample.row(t)));
            sums[f][t + 1] = acc.value();
        }
    }
    return PrefixSums(std::move(sums), T);
}

namespace {

std::string_view trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(delimiter, start);
        cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

bool parse_number(std::string_view cell, double& out) {
    if (cell.empty()) return false;
    if (cell.front() == '+') cell.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc() && ptr == cell.data() + cell.size();
}

} // namespace

SeriesSample load_series(std::istream& source, const CsvFormat& format, std::string source_name) {
    SeriesOrigin origin;
    origin.source = std::move(source_name);
    std::vector<double> values;
    std::size_t width = 0;
    std::size_t rows = 0;
    std::size_t line_number = 0;
    bool first_row = true;
    std::string line;

    while (std::getline(source, line)) {
        ++line_number;
        std::string_view view = trim(line);
        if (view.empty()) continue;
        if (line_number == 1 && view.size() >= 3 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
        auto cells = split(view, format.delimiter);

        if (first_row) {
            first_row = false;
            bool header = format.header == CsvFormat::Header::Present;
            if (format.header == CsvFormat::Header::Auto) {
                double scratch;
                header = std::any_of(cells.begin(), cells.end(),
                                     [&](std::string_view c) { return !parse_number(c, scratch); });
            }
            width = cells.size();
            if (header) {
                for (auto c : cells) origin.column_names.emplace_back(c);
                continue;
            }
        }

        if (cells.size() != width)
            throw ParseError("inconsistent column count: expected " + std::to_string(width) + ", found " +
                                 std::to_string(cells.size()),
                             line_number, std::min(cells.size(), width) + 1);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            double v;
            if (!parse_number(cells[c], v))
                throw ParseError("non-numeric cell '" + std::string(cells[c]) + "'", line_number, c + 1);
            if (!std::isfinite(v)) throw ParseError("non-finite value", line_number, c + 1);
            values.push_back(v);
        }
        ++rows;
    }
    if (source.bad()) throw DataError("failed reading input stream");
    if (rows < 2) throw DataError("series too short: T < 2 (T = " + std::to_string(rows) + ")");
    return SeriesSample(std::move(values), rows, width, std::move(origin));
}

SeriesSample load_series_file(const std::string& path, const CsvFormat& format) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file '" + path + "'");
    return load_series(in, format, path);
}

} // namespace gradcp
