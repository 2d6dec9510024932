/**
 * @file multiindex.hpp
 * @brief Multi-indices over N_0^m and downward-closed (lower) sets.
 *
 * A LowerSet indexes the monomials / Taylor coefficients of a multivariate
 * expansion. Elements are kept in canonical graded order: ascending total
 * degree, and within one degree descending lexicographic order, so that
 * (0,0) (1,0) (0,1) (2,0) (1,1) (0,2) ... is the column order of every
 * Vandermonde matrix built from the set.
 */
#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace fieldest {

class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::size_t dim) : exps_(dim, 0) {}
    explicit MultiIndex(std::vector<int> exps);
    MultiIndex(std::initializer_list<int> exps) : MultiIndex(std::vector<int>(exps)) {}

    static MultiIndex zero(std::size_t dim) { return MultiIndex(dim); }
    static MultiIndex unit(std::size_t dim, std::size_t axis);

    std::size_t dim() const noexcept { return exps_.size(); }
    int operator[](std::size_t i) const { return exps_[i]; }
    std::span<const int> exponents() const noexcept { return exps_; }

    int total_degree() const noexcept;
    int max_degree() const noexcept;

    /// alpha! = prod alpha_i!
    double factorial() const;

    /// Componentwise product order: *this <= other in every coordinate.
    bool precedes(const MultiIndex& other) const;

    /// Componentwise difference; requires other.precedes(*this).
    MultiIndex minus(const MultiIndex& other) const;
    MultiIndex plus_unit(std::size_t axis) const;

    /// x^alpha over the first dim() coordinates of x.
    double monomial(std::span<const double> x) const;

    std::string to_string() const;

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

private:
    std::vector<int> exps_;
};

/// Strict canonical order (graded, then descending lexicographic).
bool graded_less(const MultiIndex& a, const MultiIndex& b);

struct GradedLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const { return graded_less(a, b); }
};

/// Default cap on the number of elements a generator may produce.
inline constexpr std::size_t kDefaultSizeCap = 1'000'000;

class LowerSet {
public:
    /// Validates downward closure; sorts into canonical order.
    static LowerSet from_elements(std::vector<MultiIndex> elements);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return elements_.size(); }
    const std::vector<MultiIndex>& elements() const noexcept { return elements_; }
    const MultiIndex& operator[](std::size_t i) const { return elements_[i]; }

    bool contains(const MultiIndex& a) const;
    /// Position of a in canonical order, or size() if absent.
    std::size_t index_of(const MultiIndex& a) const;

    friend bool operator==(const LowerSet&, const LowerSet&) = default;

private:
    LowerSet(std::size_t dim, std::vector<MultiIndex> elements)
        : dim_(dim), elements_(std::move(elements)) {}

    std::size_t dim_ = 0;
    std::vector<MultiIndex> elements_;
};

/// Sort a collection into canonical order and remove duplicates.
std::vector<MultiIndex> canonicalize(std::vector<MultiIndex> set);

/// True iff the set is non-empty and downward closed. Throws on mixed dimensions.
bool is_lower_set(std::span<const MultiIndex> set);

/// Maximal elements (Pareto front) of the lower set.
std::vector<MultiIndex> border(const LowerSet& set);

/// Minimal elements outside the set whose addition keeps it a lower set.
std::vector<MultiIndex> cover(const LowerSet& set);

/// Every element outside the set that is an immediate successor of some
/// member. Superset of cover(); this is the highlighted set drawn in the
/// usual lower-set pictures (the box [0,k]^2 yields 2(k+1) points).
std::vector<MultiIndex> immediate_successors(const LowerSet& set);

LowerSet box_lower_set(std::size_t dim, int max_degree, std::size_t size_cap = kDefaultSizeCap);
LowerSet simplex_lower_set(std::size_t dim, int max_total_degree,
                           std::size_t size_cap = kDefaultSizeCap);

}  // namespace fieldest
