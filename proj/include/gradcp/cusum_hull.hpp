#pragma once

#include <cstddef>
#include <vector>

namespace gradcp {

/// Incremental upper/lower convex hulls of the points (i, y_i), i = 0, 1, ...
///
/// For a slope m, max_i (y_i - m i) is attained at a vertex of the upper hull
/// and min_i (y_i - m i) at a vertex of the lower hull. Both are located by
/// binary search over the hull, so the CUSUM contrast
///   max_{0 <= i <= j} |y_i - (i/j) y_j|
/// costs O(log j) per query after amortised O(1) insertion. Collinear points
/// are kept so that the smallest index wins among exact ties.
class CusumHull {
public:
    void reserve(std::size_t n) {
        ys_.reserve(n);
        upper_.reserve(n);
        lower_.reserve(n);
    }
    void clear() {
        ys_.clear();
        upper_.clear();
        lower_.clear();
    }

    /// Appends the point (size(), y).
    void push(double y) {
        const std::size_t i = ys_.size();
        ys_.push_back(y);
        while (upper_.size() >= 2 && cross(upper_[upper_.size() - 2], upper_.back(), i) > 0.0) upper_.pop_back();
        upper_.push_back(i);
        while (lower_.size() >= 2 && cross(lower_[lower_.size() - 2], lower_.back(), i) < 0.0) lower_.pop_back();
        lower_.push_back(i);
    }

    std::size_t size() const noexcept { return ys_.size(); }

    /// Index maximising y_i - slope * i over the points pushed so far.
    std::size_t argmax(double slope) const { return search(upper_, slope, 1.0); }
    /// Index minimising y_i - slope * i over the points pushed so far.
    std::size_t argmin(double slope) const { return search(lower_, slope, -1.0); }

private:
    // > 0 when (a, b, c) turns left.
    double cross(std::size_t a, std::size_t b, std::size_t c) const {
        const double xa = static_cast<double>(a), xb = static_cast<double>(b), xc = static_cast<double>(c);
        return (xb - xa) * (ys_[c] - ys_[a]) - (ys_[b] - ys_[a]) * (xc - xa);
    }

    // First hull vertex k whose successor does not improve sign * (y - slope x);
    // the objective is unimodal along the hull.
    std::size_t search(const std::vector<std::size_t>& hull, double slope, double sign) const {
        auto value = [&](std::size_t k) {
            const std::size_t i = hull[k];
            return sign * (ys_[i] - slope * static_cast<double>(i));
        };
        std::size_t lo = 0, hi = hull.size() - 1;
        while (lo < hi) {
            std::size_t mid = lo + (hi - lo) / 2;
            if (value(mid + 1) > value(mid))
                lo = mid + 1;
            else
                hi = mid;
        }
        return hull[lo];
    }

    std::vector<double> ys_;
    std::vector<std::size_t> upper_;
    std::vector<std::size_t> lower_;
};

} // namespace gradcp
