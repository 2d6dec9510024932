#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fieldest {

using Point = std::vector<double>;

/// Ordered sensor (or source) locations sharing one dimension.
class PointSet {
public:
    PointSet() = default;
    /// Checks the common dimension; distinctness is checked separately because
    /// some callers (rank diagnostics) deliberately feed repeated points.
    PointSet(std::size_t dim, std::vector<Point> points, std::vector<std::string> labels = {});

    static PointSet from_points(std::vector<Point> points);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    const Point& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<Point>& points() const noexcept { return points_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    /// Index of the first pair of coincident points (within tolerance), if any.
    bool has_duplicates(std::size_t* first = nullptr, std::size_t* second = nullptr) const;
    /// Throws InvalidArgument naming the first coincident pair.
    void require_distinct() const;

    friend bool operator==(const PointSet&, const PointSet&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<Point> points_;
    std::vector<std::string> labels_;
};

/// Coordinate equality used for "same axis value": |a-b| <= 1e-9 * max(1, |a|, |b|).
bool same_coordinate(double a, double b);

/// Lattice of points: every combination of the per-axis values, first axis
/// varying slowest.
PointSet product_grid(const std::vector<std::vector<double>>& axes);

/// n x n (or n^m) grid with unit spacing starting at the origin.
PointSet unit_grid(std::size_t dim, std::size_t n, double spacing = 1.0);

}  // namespace fieldest
