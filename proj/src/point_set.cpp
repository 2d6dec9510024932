#include "fieldest/point_set.hpp"

#include <algorithm>
#include <cmath>

#include "fieldest/error.hpp"

namespace fieldest {

PointSet::PointSet(std::size_t dim, std::vector<Point> points, std::vector<std::string> labels)
    : dim_(dim), points_(std::move(points)), labels_(std::move(labels)) {
    if (dim_ == 0) fail(ErrorKind::InvalidArgument, "point set dimension must be at least 1");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].size() != dim_)
            fail(ErrorKind::InvalidArgument, "point " + std::to_string(i) + " has dimension " +
                                                 std::to_string(points_[i].size()) + ", expected " +
                                                 std::to_string(dim_));
        for (double c : points_[i]) {
            if (!std::isfinite(c)) fail(ErrorKind::InvalidArgument, "non-finite coordinate");
        }
    }
    if (!labels_.empty() && labels_.size() != points_.size())
        fail(ErrorKind::InvalidArgument, "label count does not match point count");
}

PointSet PointSet::from_points(std::vector<Point> points) {
    if (points.empty()) fail(ErrorKind::InvalidArgument, "point set is empty");
    const std::size_t dim = points.front().size();
    return PointSet(dim, std::move(points));
}

bool same_coordinate(double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

bool PointSet::has_duplicates(std::size_t* first, std::size_t* second) const {
    // O(p^2) is fine at sensor-network sizes
    for (std::size_t i = 0; i < points_.size(); ++i) {
        for (std::size_t j = i + 1; j < points_.size(); ++j) {
            bool same = true;
            for (std::size_t d = 0; d < dim_ && same; ++d)
                same = same_coordinate(points_[i][d], points_[j][d]);
            if (same) {
                if (first) *first = i;
                if (second) *second = j;
                return true;
            }
        }
    }
    return false;
}

void PointSet::require_distinct() const {
    std::size_t i = 0, j = 0;
    if (has_duplicates(&i, &j))
        fail(ErrorKind::InvalidArgument,
             "points " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
}

PointSet product_grid(const std::vector<std::vector<double>>& axes) {
    if (axes.empty()) fail(ErrorKind::InvalidArgument, "grid needs at least one axis");
    std::vector<Point> pts{Point{}};
    for (const auto& axis : axes) {
        std::vector<Point> next;
        next.reserve(pts.size() * axis.size());
        for (const auto& p : pts) {
            for (double v : axis) {
                Point q = p;
                q.push_back(v);
                next.push_back(std::move(q));
            }
        }
        pts = std::move(next);
    }
    return PointSet(axes.size(), std::move(pts));
}

PointSet unit_grid(std::size_t dim, std::size_t n, double spacing) {
    std::vector<double> axis(n);
    for (std::size_t i = 0; i < n; ++i) axis[i] = spacing * static_cast<double>(i);
    return product_grid(std::vector<std::vector<double>>(dim, axis));
}

}  // namespace fieldest
