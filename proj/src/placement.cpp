#include "fieldest/placement.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "fieldest/error.hpp"

namespace fieldest {

std::optional<int> AxisMap::label_of(double v) const {
    auto it = std::lower_bound(values.begin(), values.end(), v);
    // neighbours on both sides may match within tolerance
    for (auto cand : {it, it == values.begin() ? it : std::prev(it)}) {
        if (cand != values.end() && same_coordinate(*cand, v))
            return labels[static_cast<std::size_t>(cand - values.begin())];
    }
    return std::nullopt;
}

void Relabeling::validate() const {
    for (std::size_t j = 0; j < axes.size(); ++j) {
        const auto& a = axes[j];
        if (a.values.size() != a.labels.size())
            fail(ErrorKind::InvalidArgument, "axis " + std::to_string(j) + ": values/labels size mismatch");
        if (a.collapsed) {
            if (std::any_of(a.labels.begin(), a.labels.end(), [](int l) { return l != 0; }))
                fail(ErrorKind::InvalidArgument, "axis " + std::to_string(j) + ": collapsed axis with nonzero label");
            continue;
        }
        std::vector<int> sorted = a.labels;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (sorted[i] != static_cast<int>(i))
                fail(ErrorKind::InvalidArgument, "axis " + std::to_string(j) + ": map is not a bijection onto {0..k-1}");
        }
    }
}

std::vector<AxisValues> axis_values(const PointSet& x) {
    std::vector<AxisValues> out(x.dim());
    for (std::size_t j = 0; j < x.dim(); ++j) {
        std::vector<double> coords;
        coords.reserve(x.size());
        for (const auto& p : x.points()) coords.push_back(p[j]);
        std::sort(coords.begin(), coords.end());
        auto& av = out[j];
        for (double c : coords) {
            if (!av.values.empty() && same_coordinate(av.values.back(), c)) {
                ++av.multiplicity.back();
            } else {
                av.values.push_back(c);
                av.multiplicity.push_back(1);
            }
        }
    }
    return out;
}

std::vector<MultiIndex> relabel(const PointSet& x, const Relabeling& r) {
    if (r.axes.size() != x.dim()) fail(ErrorKind::InvalidArgument, "relabeling dimension mismatch");
    r.validate();
    std::vector<MultiIndex> image;
    image.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::vector<int> e(x.dim());
        for (std::size_t j = 0; j < x.dim(); ++j) {
            auto l = r.axes[j].label_of(x[i][j]);
            if (!l) fail(ErrorKind::InvalidArgument, "point " + std::to_string(i) + " axis " +
                                                         std::to_string(j) + ": coordinate not covered by relabeling");
            e[j] = *l;
        }
        image.emplace_back(std::move(e));
    }
    auto sorted = canonicalize(image);
    if (sorted.size() != image.size())
        fail(ErrorKind::InvalidArgument, "relabeling maps two points to the same multi-index");
    return image;
}

namespace {

// Per-point index of each coordinate within the axis' distinct values.
struct IndexedPlacement {
    std::vector<AxisValues> axes;
    std::vector<std::vector<int>> value_index;  // [point][axis]
};

IndexedPlacement index_placement(const PointSet& x) {
    IndexedPlacement ip{axis_values(x), {}};
    ip.value_index.assign(x.size(), std::vector<int>(x.dim()));
    for (std::size_t j = 0; j < x.dim(); ++j) {
        AxisMap lookup{ip.axes[j].values, {}, false};
        lookup.labels.resize(lookup.values.size());
        std::iota(lookup.labels.begin(), lookup.labels.end(), 0);
        for (std::size_t i = 0; i < x.size(); ++i) ip.value_index[i][j] = *lookup.label_of(x[i][j]);
    }
    return ip;
}

// Candidate: label per distinct value for each axis (empty vector = collapsed).
using AxisLabels = std::vector<std::vector<int>>;

Relabeling make_relabeling(const IndexedPlacement& ip, const AxisLabels& labels) {
    Relabeling r;
    for (std::size_t j = 0; j < ip.axes.size(); ++j) {
        AxisMap a;
        a.values = ip.axes[j].values;
        if (labels[j].empty()) {
            a.collapsed = true;
            a.labels.assign(a.values.size(), 0);
        } else {
            a.labels = labels[j];
        }
        r.axes.push_back(std::move(a));
    }
    return r;
}

std::vector<MultiIndex> image_of(const IndexedPlacement& ip, const AxisLabels& labels) {
    std::vector<MultiIndex> img;
    img.reserve(ip.value_index.size());
    for (const auto& vi : ip.value_index) {
        std::vector<int> e(vi.size());
        for (std::size_t j = 0; j < vi.size(); ++j) e[j] = labels[j].empty() ? 0 : labels[j][vi[j]];
        img.emplace_back(std::move(e));
    }
    return img;
}

// Lower set check for an image; also rejects collisions.
std::optional<LowerSet> as_lower_set(std::vector<MultiIndex> img) {
    const std::size_t n = img.size();
    auto sorted = canonicalize(std::move(img));
    if (sorted.size() != n || !is_lower_set(sorted)) return std::nullopt;
    return LowerSet::from_elements(std::move(sorted));
}

bool list_less(const LowerSet& a, const LowerSet& b) {
    return std::lexicographical_compare(a.elements().begin(), a.elements().end(), b.elements().begin(),
                                        b.elements().end(), GradedLess{});
}

std::vector<int> greedy_labels(const AxisValues& av) {
    std::vector<std::size_t> order(av.values.size());
    std::iota(order.begin(), order.end(), 0);
    // values are ascending already, so a stable sort breaks ties by value
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return av.multiplicity[a] > av.multiplicity[b];
    });
    std::vector<int> labels(order.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) labels[order[rank]] = static_cast<int>(rank);
    return labels;
}

double factorial_product(const IndexedPlacement& ip, const std::vector<bool>& collapsed) {
    double prod = 1.0;
    for (std::size_t j = 0; j < ip.axes.size(); ++j) {
        if (!collapsed[j]) prod *= std::tgamma(static_cast<double>(ip.axes[j].values.size()) + 1.0);
    }
    return prod;
}

struct Candidate {
    LowerSet set;
    AxisLabels labels;
};

// Exhaustive search over per-axis orderings. Each combination index is
// evaluated independently; the reduction keeps the smallest lower set and,
// among equal sets, the smallest combination index.
std::optional<Candidate> exhaustive_search(const IndexedPlacement& ip, const std::vector<bool>& collapsed,
                                           bool parallel) {
    const std::size_t m = ip.axes.size();
    std::vector<std::vector<std::vector<int>>> perms(m);
    std::vector<long long> radix(m, 1);
    long long total = 1;
    for (std::size_t j = 0; j < m; ++j) {
        if (collapsed[j]) continue;
        std::vector<int> p(ip.axes[j].values.size());
        std::iota(p.begin(), p.end(), 0);
        do {
            perms[j].push_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
        radix[j] = static_cast<long long>(perms[j].size());
        total *= radix[j];
    }

    const int nthreads = parallel ? std::max(1, omp_get_max_threads()) : 1;
    std::vector<std::optional<std::pair<LowerSet, long long>>> best(static_cast<std::size_t>(nthreads));

    auto visit = [&](long long combo, std::optional<std::pair<LowerSet, long long>>& slot) {
        AxisLabels labels(m);
        long long rest = combo;
        for (std::size_t j = 0; j < m; ++j) {
            if (collapsed[j]) continue;
            labels[j] = perms[j][static_cast<std::size_t>(rest % radix[j])];
            rest /= radix[j];
        }
        auto ls = as_lower_set(image_of(ip, labels));
        if (!ls) return;
        if (!slot || list_less(*ls, slot->first)) slot.emplace(std::move(*ls), combo);
    };

    if (nthreads > 1) {
#pragma omp parallel for schedule(static) num_threads(nthreads)
        for (long long c = 0; c < total; ++c) visit(c, best[static_cast<std::size_t>(omp_get_thread_num())]);
    } else {
        for (long long c = 0; c < total; ++c) visit(c, best[0]);
    }

    std::optional<std::pair<LowerSet, long long>> winner;
    for (auto& b : best) {
        if (!b) continue;
        if (!winner || list_less(b->first, winner->first) ||
            (b->first == winner->first && b->second < winner->second))
            winner = std::move(b);
    }
    if (!winner) return std::nullopt;

    AxisLabels labels(m);
    long long rest = winner->second;
    for (std::size_t j = 0; j < m; ++j) {
        if (collapsed[j]) continue;
        labels[j] = perms[j][static_cast<std::size_t>(rest % radix[j])];
        rest /= radix[j];
    }
    return Candidate{std::move(winner->first), std::move(labels)};
}

bool projection_injective(const IndexedPlacement& ip, const std::vector<bool>& collapsed) {
    std::vector<std::vector<int>> keys;
    keys.reserve(ip.value_index.size());
    for (const auto& vi : ip.value_index) {
        std::vector<int> k;
        for (std::size_t j = 0; j < vi.size(); ++j) {
            if (!collapsed[j]) k.push_back(vi[j]);
        }
        keys.push_back(std::move(k));
    }
    std::sort(keys.begin(), keys.end());
    return std::adjacent_find(keys.begin(), keys.end()) == keys.end();
}

std::optional<Candidate> search_with_collapse(const IndexedPlacement& ip, const std::vector<bool>& collapsed,
                                              const RelabelSearchOptions& opts) {
    if (!projection_injective(ip, collapsed)) return std::nullopt;
    AxisLabels labels(ip.axes.size());
    for (std::size_t j = 0; j < ip.axes.size(); ++j) {
        if (!collapsed[j]) labels[j] = greedy_labels(ip.axes[j]);
    }
    if (auto ls = as_lower_set(image_of(ip, labels))) return Candidate{std::move(*ls), std::move(labels)};
    if (factorial_product(ip, collapsed) <= opts.exhaustive_limit)
        return exhaustive_search(ip, collapsed, opts.parallel);
    return std::nullopt;
}

}  // namespace

std::optional<PlacementCertificate> find_lower_set_relabeling(const PointSet& x, const RelabelSearchOptions& opts) {
    if (x.empty()) fail(ErrorKind::InvalidArgument, "placement is empty");
    x.require_distinct();
    const auto ip = index_placement(x);
    const std::size_t m = x.dim();

    const std::size_t max_collapse = opts.allow_collapse ? m - 1 : 0;
    for (std::size_t ncollapse = 0; ncollapse <= max_collapse; ++ncollapse) {
        std::optional<Candidate> best;
        for (unsigned mask = 0; mask < (1u << m); ++mask) {
            if (static_cast<std::size_t>(std::popcount(mask)) != ncollapse) continue;
            std::vector<bool> collapsed(m);
            for (std::size_t j = 0; j < m; ++j) collapsed[j] = (mask >> j) & 1u;
            auto cand = search_with_collapse(ip, collapsed, opts);
            if (cand && (!best || list_less(cand->set, best->set))) best = std::move(cand);
        }
        if (best) return PlacementCertificate{std::move(best->set), make_relabeling(ip, best->labels)};
    }
    return std::nullopt;
}

namespace {

struct MatchState {
    const IndexedPlacement* ip;
    const LowerSet* target;
    std::vector<bool> collapsed;
    std::vector<std::vector<int>> target_mult;      // [axis][label]
    std::vector<std::pair<std::size_t, int>> vars;  // (axis, value index)
    std::vector<std::vector<std::size_t>> check_at; // points completed at var position
    AxisLabels labels;
    std::vector<std::vector<bool>> label_used;
    std::vector<bool> element_used;
    long long nodes = 0;
    long long node_cap = 5'000'000;
};

bool points_consistent(MatchState& st, std::size_t pos, std::vector<std::size_t>& claimed) {
    for (std::size_t p : st.check_at[pos]) {
        const auto& vi = st.ip->value_index[p];
        std::vector<int> e(vi.size());
        for (std::size_t j = 0; j < vi.size(); ++j) e[j] = st.collapsed[j] ? 0 : st.labels[j][vi[j]];
        const std::size_t idx = st.target->index_of(MultiIndex(std::move(e)));
        if (idx == st.target->size() || st.element_used[idx]) return false;
        st.element_used[idx] = true;
        claimed.push_back(idx);
    }
    return true;
}

bool assign(MatchState& st, std::size_t pos) {
    if (pos == st.vars.size()) return true;
    if (++st.nodes > st.node_cap) fail(ErrorKind::SizeCap, "equivalence search exceeded node cap");
    const auto [axis, v] = st.vars[pos];
    const int mult = st.ip->axes[axis].multiplicity[static_cast<std::size_t>(v)];
    for (std::size_t l = 0; l < st.target_mult[axis].size(); ++l) {
        if (st.label_used[axis][l] || st.target_mult[axis][l] != mult) continue;
        st.label_used[axis][l] = true;
        st.labels[axis][static_cast<std::size_t>(v)] = static_cast<int>(l);
        std::vector<std::size_t> claimed;
        if (points_consistent(st, pos, claimed) && assign(st, pos + 1)) return true;
        for (std::size_t idx : claimed) st.element_used[idx] = false;
        st.label_used[axis][l] = false;
    }
    return false;
}

}  // namespace

bool is_equivalent(const PointSet& x, const LowerSet& l) {
    if (x.size() != l.size() || x.dim() != l.dim()) return false;
    if (x.has_duplicates()) return false;
    const auto ip = index_placement(x);
    const std::size_t m = x.dim();

    MatchState st;
    st.ip = &ip;
    st.target = &l;
    st.collapsed.assign(m, false);
    st.target_mult.resize(m);
    st.labels.resize(m);
    st.label_used.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        int max_label = 0;
        for (const auto& a : l.elements()) max_label = std::max(max_label, a[j]);
        st.target_mult[j].assign(static_cast<std::size_t>(max_label) + 1, 0);
        for (const auto& a : l.elements()) ++st.target_mult[j][static_cast<std::size_t>(a[j])];
        const std::size_t k = ip.axes[j].values.size();
        if (max_label == 0 && k > 1) {
            st.collapsed[j] = true;
        } else if (static_cast<std::size_t>(max_label) + 1 != k) {
            return false;
        }
        if (!st.collapsed[j]) {
            st.labels[j].assign(k, -1);
            st.label_used[j].assign(k, false);
        }
    }
    // multiplicity multisets must agree on bijective axes
    for (std::size_t j = 0; j < m; ++j) {
        if (st.collapsed[j]) continue;
        auto a = ip.axes[j].multiplicity;
        auto b = st.target_mult[j];
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b) return false;
    }
    if (!projection_injective(ip, st.collapsed)) return false;

    // variables ordered axis-major, high multiplicity first
    for (std::size_t j = 0; j < m; ++j) {
        if (st.collapsed[j]) continue;
        std::vector<int> order(ip.axes[j].values.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return ip.axes[j].multiplicity[static_cast<std::size_t>(a)] >
                   ip.axes[j].multiplicity[static_cast<std::size_t>(b)];
        });
        for (int v : order) st.vars.emplace_back(j, v);
    }
    std::vector<std::vector<std::size_t>> position(m);
    for (std::size_t j = 0; j < m; ++j) position[j].assign(ip.axes[j].values.size(), 0);
    for (std::size_t pos = 0; pos < st.vars.size(); ++pos)
        position[st.vars[pos].first][static_cast<std::size_t>(st.vars[pos].second)] = pos;

    st.check_at.assign(std::max<std::size_t>(st.vars.size(), 1), {});
    for (std::size_t p = 0; p < x.size(); ++p) {
        std::size_t last = 0;
        for (std::size_t j = 0; j < m; ++j) {
            if (!st.collapsed[j]) last = std::max(last, position[j][static_cast<std::size_t>(ip.value_index[p][j])]);
        }
        st.check_at[last].push_back(p);
    }
    st.element_used.assign(l.size(), false);
    if (st.vars.empty()) {
        // every axis collapsed: only the single-point set {0} qualifies
        return x.size() == 1;
    }
    return assign(st, 0);
}

}  // namespace fieldest
