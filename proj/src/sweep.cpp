#include "fieldest/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>

#include "fieldest/allocation.hpp"
#include "fieldest/error.hpp"

namespace fieldest {

std::size_t GridSpec::size() const {
    if (counts.empty()) return 0;
    std::size_t n = 1;
    for (std::size_t c : counts) n *= c;
    return n;
}

void GridSpec::validate() const {
    if (counts.empty()) fail(ErrorKind::InvalidArgument, "grid has no axes");
    if (counts.size() != bounds.size()) fail(ErrorKind::InvalidArgument, "grid counts and bounds differ in length");
    for (std::size_t a = 0; a < counts.size(); ++a) {
        if (counts[a] == 0) fail(ErrorKind::InvalidArgument, "grid axis " + std::to_string(a) + " has no points");
        const auto [lo, hi] = bounds[a];
        if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo)
            fail(ErrorKind::InvalidArgument, "grid axis " + std::to_string(a) + " has invalid bounds");
    }
}

GridSpec default_grid(const PointSet& sensors, std::size_t n) {
    GridSpec g;
    for (std::size_t a = 0; a < sensors.dim(); ++a) {
        double lo = sensors[0][a], hi = sensors[0][a];
        for (const auto& p : sensors.points()) {
            lo = std::min(lo, p[a]);
            hi = std::max(hi, p[a]);
        }
        g.counts.push_back(hi > lo ? n : 1);
        g.bounds.emplace_back(lo, hi);
    }
    return g;
}

std::vector<Point> grid_points(const GridSpec& g) {
    g.validate();
    const std::size_t m = g.dim();
    std::vector<Point> out;
    out.reserve(g.size());
    std::vector<std::size_t> idx(m, 0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        Point p(m);
        for (std::size_t a = 0; a < m; ++a) {
            const auto [lo, hi] = g.bounds[a];
            const std::size_t n = g.counts[a];
            // endpoints exact, interior by linear interpolation
            p[a] = n == 1 ? lo : (idx[a] + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(idx[a]) / (n - 1));
        }
        out.push_back(std::move(p));
        for (std::size_t a = m; a-- > 0;) {
            if (++idx[a] < g.counts[a]) break;
            idx[a] = 0;
        }
    }
    return out;
}

namespace {

std::vector<GridRow> sweep(const std::vector<Point>& pts, const std::function<double(const Point&)>& fn,
                           bool parallel) {
    const auto n = static_cast<std::int64_t>(pts.size());
    std::vector<GridRow> rows(pts.size());
    std::vector<std::exception_ptr> errors(pts.size());
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            rows[k] = GridRow{pts[k], fn(pts[k])};
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    // report the first failing row so diagnostics do not depend on scheduling
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

EstimationContext sweep_context(const EstimationContext& ctx) {
    EstimationContext c = ctx;
    c.expansion.compute_condition = false;
    return c;
}

}  // namespace

std::vector<GridRow> gain_map(const EstimationContext& ctx, const GridSpec& g, const SweepOptions& opts) {
    if (g.dim() != ctx.sensors.dim()) fail(ErrorKind::InvalidArgument, "grid dimension does not match the sensors");
    const EstimationContext c = sweep_context(ctx);
    return sweep(
        grid_points(g),
        [&](const Point& x) {
            const Estimator e = estimate(c, TargetSpec{target::Interpolate{x}});
            return precision_gain(e.c);
        },
        opts.parallel);
}

std::vector<GridRow> error_map(const EstimationContext& ctx, const FieldOracle& field, const GridSpec& g,
                               const SweepOptions& opts) {
    if (g.dim() != ctx.sensors.dim()) fail(ErrorKind::InvalidArgument, "grid dimension does not match the sensors");
    const EstimationContext c = sweep_context(ctx);
    const std::vector<double> readings = sample(field, ctx.sensors);
    return sweep(
        grid_points(g),
        [&](const Point& x) {
            const Estimator e = estimate(c, TargetSpec{target::Interpolate{x}});
            return std::abs(e.apply(readings) - field.value(x));
        },
        opts.parallel);
}

}  // namespace fieldest
