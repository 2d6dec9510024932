#include "fieldest/multiindex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fieldest/error.hpp"

namespace fieldest {

MultiIndex::MultiIndex(std::vector<int> exps) : exps_(std::move(exps)) {
    for (int e : exps_) {
        if (e < 0) fail(ErrorKind::InvalidArgument, "multi-index entries must be non-negative");
    }
}

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t axis) {
    MultiIndex a(dim);
    a.exps_.at(axis) = 1;
    return a;
}

int MultiIndex::total_degree() const noexcept {
    return std::accumulate(exps_.begin(), exps_.end(), 0);
}

int MultiIndex::max_degree() const noexcept {
    return exps_.empty() ? 0 : *std::max_element(exps_.begin(), exps_.end());
}

double MultiIndex::factorial() const {
    double f = 1.0;
    for (int e : exps_) f *= std::tgamma(e + 1.0);
    return f;
}

bool MultiIndex::precedes(const MultiIndex& other) const {
    if (dim() != other.dim()) fail(ErrorKind::InvalidArgument, "multi-index dimension mismatch");
    for (std::size_t i = 0; i < dim(); ++i) {
        if (exps_[i] > other.exps_[i]) return false;
    }
    return true;
}

MultiIndex MultiIndex::minus(const MultiIndex& other) const {
    if (!other.precedes(*this)) fail(ErrorKind::InvalidArgument, "minus: operand does not precede");
    std::vector<int> d(dim());
    for (std::size_t i = 0; i < dim(); ++i) d[i] = exps_[i] - other.exps_[i];
    return MultiIndex(std::move(d));
}

MultiIndex MultiIndex::plus_unit(std::size_t axis) const {
    MultiIndex a = *this;
    ++a.exps_.at(axis);
    return a;
}

double MultiIndex::monomial(std::span<const double> x) const {
    double v = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        for (int k = 0; k < exps_[i]; ++k) v *= x[i];
    }
    return v;
}

std::string MultiIndex::to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < dim(); ++i) {
        if (i) s += ",";
        s += std::to_string(exps_[i]);
    }
    return s + ")";
}

bool graded_less(const MultiIndex& a, const MultiIndex& b) {
    const int da = a.total_degree();
    const int db = b.total_degree();
    if (da != db) return da < db;
    // same degree: larger leading exponent first
    const auto ea = a.exponents();
    const auto eb = b.exponents();
    return std::lexicographical_compare(eb.begin(), eb.end(), ea.begin(), ea.end());
}

std::vector<MultiIndex> canonicalize(std::vector<MultiIndex> set) {
    std::sort(set.begin(), set.end(), GradedLess{});
    set.erase(std::unique(set.begin(), set.end()), set.end());
    return set;
}

namespace {

void check_common_dim(std::span<const MultiIndex> set) {
    for (const auto& a : set) {
        if (a.dim() != set.front().dim())
            fail(ErrorKind::InvalidArgument, "multi-indices of mixed dimension");
    }
}

bool sorted_contains(const std::vector<MultiIndex>& sorted, const MultiIndex& a) {
    return std::binary_search(sorted.begin(), sorted.end(), a, GradedLess{});
}

// Downward closure reduces to checking immediate predecessors.
bool closed_under_predecessors(const std::vector<MultiIndex>& sorted) {
    for (const auto& a : sorted) {
        auto e = std::vector<int>(a.exponents().begin(), a.exponents().end());
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            --e[i];
            if (!sorted_contains(sorted, MultiIndex(e))) return false;
            ++e[i];
        }
    }
    return true;
}

}  // namespace

bool is_lower_set(std::span<const MultiIndex> set) {
    if (set.empty()) return false;
    check_common_dim(set);
    auto sorted = canonicalize(std::vector<MultiIndex>(set.begin(), set.end()));
    return closed_under_predecessors(sorted);
}

LowerSet LowerSet::from_elements(std::vector<MultiIndex> elements) {
    if (elements.empty()) fail(ErrorKind::InvalidArgument, "lower set must be non-empty");
    check_common_dim(elements);
    const std::size_t dim = elements.front().dim();
    auto sorted = canonicalize(std::move(elements));
    if (!closed_under_predecessors(sorted))
        fail(ErrorKind::InvalidArgument, "set is not downward closed");
    return LowerSet(dim, std::move(sorted));
}

bool LowerSet::contains(const MultiIndex& a) const {
    return a.dim() == dim_ && sorted_contains(elements_, a);
}

std::size_t LowerSet::index_of(const MultiIndex& a) const {
    if (a.dim() != dim_) return elements_.size();
    auto it = std::lower_bound(elements_.begin(), elements_.end(), a, GradedLess{});
    if (it == elements_.end() || !(*it == a)) return elements_.size();
    return static_cast<std::size_t>(it - elements_.begin());
}

std::vector<MultiIndex> border(const LowerSet& set) {
    std::vector<MultiIndex> out;
    for (const auto& a : set.elements()) {
        bool maximal = true;
        for (std::size_t i = 0; i < set.dim() && maximal; ++i) {
            maximal = !set.contains(a.plus_unit(i));
        }
        if (maximal) out.push_back(a);
    }
    return out;
}

std::vector<MultiIndex> immediate_successors(const LowerSet& set) {
    std::vector<MultiIndex> out;
    for (const auto& a : set.elements()) {
        for (std::size_t i = 0; i < set.dim(); ++i) {
            auto c = a.plus_unit(i);
            if (!set.contains(c)) out.push_back(std::move(c));
        }
    }
    return canonicalize(std::move(out));
}

std::vector<MultiIndex> cover(const LowerSet& set) {
    const auto candidates = immediate_successors(set);
    std::vector<MultiIndex> out;
    for (const auto& c : candidates) {
        bool minimal = true;
        for (std::size_t i = 0; i < c.dim() && minimal; ++i) {
            if (c[i] == 0) continue;
            std::vector<int> e(c.exponents().begin(), c.exponents().end());
            --e[i];
            minimal = set.contains(MultiIndex(std::move(e)));
        }
        if (minimal) out.push_back(c);
    }
    return out;
}

namespace {

// Odometer over [0, max]^dim, keeping entries accepted by `keep`.
template <typename Keep>
std::vector<MultiIndex> enumerate_box(std::size_t dim, int max, Keep keep) {
    std::vector<MultiIndex> out;
    std::vector<int> e(dim, 0);
    while (true) {
        if (keep(e)) out.emplace_back(e);
        std::size_t i = 0;
        while (i < dim && e[i] == max) e[i++] = 0;
        if (i == dim) break;
        ++e[i];
    }
    return out;
}

void check_generator_args(std::size_t dim, int degree) {
    if (dim == 0) fail(ErrorKind::InvalidArgument, "dimension must be at least 1");
    if (degree < 0) fail(ErrorKind::InvalidArgument, "degree must be non-negative");
}

}  // namespace

LowerSet box_lower_set(std::size_t dim, int max_degree, std::size_t size_cap) {
    check_generator_args(dim, max_degree);
    const double size = std::pow(max_degree + 1.0, static_cast<double>(dim));
    if (size > static_cast<double>(size_cap))
        fail(ErrorKind::SizeCap, "box lower set exceeds size cap");
    return LowerSet::from_elements(enumerate_box(dim, max_degree, [](const auto&) { return true; }));
}

LowerSet simplex_lower_set(std::size_t dim, int max_total_degree, std::size_t size_cap) {
    check_generator_args(dim, max_total_degree);
    // binomial(dim + k, dim)
    double size = 1.0;
    for (std::size_t i = 1; i <= dim; ++i) size = size * (max_total_degree + static_cast<double>(i)) / i;
    if (size > static_cast<double>(size_cap))
        fail(ErrorKind::SizeCap, "simplex lower set exceeds size cap");
    return LowerSet::from_elements(enumerate_box(dim, max_total_degree, [&](const auto& e) {
        return std::accumulate(e.begin(), e.end(), 0) <= max_total_degree;
    }));
}

}  // namespace fieldest
