/**
 * @file placement.hpp
 * @brief Relabeling a sensor placement onto a lower set.
 *
 * A placement X is relabel-equivalent to a lower set L when independent
 * per-axis bijections from the occurring coordinate values onto
 * {0, ..., k_j - 1} send X exactly onto L. When that holds the Vandermonde
 * matrix V(X, L) is invertible, which is the certificate check-placement
 * reports. An axis may also be collapsed (every value labelled 0) when the
 * points stay distinct after dropping it; this covers placements such as the
 * diagonal {(j, j)} which only admit one-directional expansions.
 */
#pragma once

#include <optional>
#include <vector>

#include "fieldest/multiindex.hpp"
#include "fieldest/point_set.hpp"

namespace fieldest {

/// value -> label map for one axis.
struct AxisMap {
    std::vector<double> values;  ///< distinct coordinate values, ascending
    std::vector<int> labels;     ///< labels[i] is the label of values[i]
    bool collapsed = false;      ///< every value maps to 0

    /// Label for a coordinate, matched with same_coordinate(); nullopt if uncovered.
    std::optional<int> label_of(double v) const;

    friend bool operator==(const AxisMap&, const AxisMap&) = default;
};

struct Relabeling {
    std::vector<AxisMap> axes;

    /// Each non-collapsed axis must be a bijection onto {0..k-1}.
    void validate() const;

    friend bool operator==(const Relabeling&, const Relabeling&) = default;
};

struct PlacementCertificate {
    LowerSet lower_set;
    Relabeling relabeling;
};

/// Image of X under R. Throws on uncovered values, non-bijective maps, or if
/// two points land on the same multi-index.
std::vector<MultiIndex> relabel(const PointSet& x, const Relabeling& r);

struct RelabelSearchOptions {
    /// Exhaustive fallback runs only when prod_j k_j! is at most this.
    double exhaustive_limit = 1e5;
    bool allow_collapse = true;
    bool parallel = true;
};

/// Searches for a relabeling of X onto a lower set. Greedy multiplicity
/// ordering first; exhaustive search over per-axis orderings as fallback;
/// then the same with axes collapsed. Among several candidates found by the
/// exhaustive phases the lower set whose canonical element list is smallest
/// is returned.
std::optional<PlacementCertificate> find_lower_set_relabeling(
    const PointSet& x, const RelabelSearchOptions& opts = {});

/// True iff some relabeling (collapses allowed) maps X exactly onto L.
/// Different cardinalities give false.
bool is_equivalent(const PointSet& x, const LowerSet& l);

/// Per-axis distinct values (merged with same_coordinate) and their multiplicities.
struct AxisValues {
    std::vector<double> values;
    std::vector<int> multiplicity;
};
std::vector<AxisValues> axis_values(const PointSet& x);

}  // namespace fieldest
