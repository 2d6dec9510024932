/**
 * @file sweep.hpp
 * @brief Grid sweeps: precision-gain and interpolation-error maps.
 *
 * Grid points are enumerated with the first axis varying slowest, and map
 * output keeps that order whatever the thread count.
 */
#pragma once

#include <utility>
#include <vector>

#include "fieldest/estimators.hpp"
#include "fieldest/point_set.hpp"

namespace fieldest {

struct GridSpec {
    std::vector<std::size_t> counts;                  ///< points per axis, >= 1
    std::vector<std::pair<double, double>> bounds;    ///< [lo, hi] per axis

    std::size_t dim() const { return counts.size(); }
    std::size_t size() const;
    void validate() const;
};

/// `n` points per axis over the sensor bounding box.
GridSpec default_grid(const PointSet& sensors, std::size_t n = 101);

std::vector<Point> grid_points(const GridSpec& g);

struct GridRow {
    Point x;
    double value = 0.0;
};

struct SweepOptions {
    bool parallel = true;
};

/// precision_gain of the interpolation estimator at every grid point.
std::vector<GridRow> gain_map(const EstimationContext& ctx, const GridSpec& g, const SweepOptions& opts = {});

/// |c(x_t) . F(X) - F(x_t)| at every grid point.
std::vector<GridRow> error_map(const EstimationContext& ctx, const FieldOracle& field, const GridSpec& g,
                               const SweepOptions& opts = {});

}  // namespace fieldest
