// Independent reference computations for the tests. Nothing here calls into
// the library's numerics: brute-force scans, long-double Gaussian elimination
// and plain finite differences.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "fieldest/multiindex.hpp"
#include "fieldest/point_set.hpp"

namespace oracle {

using Exps = std::vector<int>;
using Mat = std::vector<std::vector<long double>>;

inline bool leq(const Exps& a, const Exps& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

inline Exps exps(const fieldest::MultiIndex& a) { return Exps(a.exponents().begin(), a.exponents().end()); }

inline std::set<Exps> as_set(const std::vector<fieldest::MultiIndex>& v) {
    std::set<Exps> s;
    for (const auto& a : v) s.insert(exps(a));
    return s;
}

// every componentwise predecessor of every element is present.
inline bool downward_closed(const std::set<Exps>& s) {
    if (s.empty()) return false;
    for (const auto& a : s) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] == 0) continue;
            Exps b = a;
            --b[i];
            if (!s.count(b)) return false;
        }
    }
    return true;
}

inline std::vector<Exps> box_points(std::size_t m, int k) {
    std::vector<Exps> out;
    Exps cur(m, 0);
    for (;;) {
        out.push_back(cur);
        std::size_t i = 0;
        while (i < m && cur[i] == k) cur[i++] = 0;
        if (i == m) break;
        ++cur[i];
    }
    return out;
}

inline int max_entry(const std::set<Exps>& s) {
    int k = 0;
    for (const auto& a : s)
        for (int v : a) k = std::max(k, v);
    return k;
}

// maximal elements by pairwise scan
inline std::set<Exps> border(const std::set<Exps>& s) {
    std::set<Exps> out;
    for (const auto& a : s) {
        bool maximal = true;
        for (const auto& b : s)
            if (a != b && leq(a, b)) maximal = false;
        if (maximal) out.insert(a);
    }
    return out;
}

// elements outside S whose immediate predecessors all lie in S; every such
// element is one unit step above some member of S
inline std::set<Exps> cover(const std::set<Exps>& s) {
    std::set<Exps> out;
    for (const auto& b : s) {
        for (std::size_t i = 0; i < b.size(); ++i) {
            Exps a = b;
            ++a[i];
            if (s.count(a)) continue;
            bool ok = true;
            for (std::size_t j = 0; j < a.size() && ok; ++j) {
                if (a[j] == 0) continue;
                Exps p = a;
                --p[j];
                ok = s.count(p) > 0;
            }
            if (ok) out.insert(a);
        }
    }
    return out;
}

// Grows {0} by random cover elements (computed by the scan above).
inline std::set<Exps> random_lower_set(std::mt19937_64& rng, std::size_t m, std::size_t size) {
    std::set<Exps> s{Exps(m, 0)};
    while (s.size() < size) {
        const auto c = cover(s);
        std::vector<Exps> v(c.begin(), c.end());
        s.insert(v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]);
    }
    return s;
}

inline std::vector<fieldest::MultiIndex> to_multi(const std::set<Exps>& s) {
    std::vector<fieldest::MultiIndex> out;
    for (const auto& a : s) out.emplace_back(a);
    return out;
}

// Gaussian elimination with partial pivoting in long double; returns false when singular.
inline bool dense_solve(Mat a, std::vector<long double> b, std::vector<long double>& x) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (std::fabs(a[piv][col]) < 1e-300L) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const long double f = a[r][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0L);
    for (std::size_t i = n; i-- > 0;) {
        long double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return true;
}

// Rank by elimination with full pivoting and a relative threshold.
inline std::size_t elimination_rank(Mat a, long double rel_tol = 1e-10L) {
    const std::size_t rows = a.size(), cols = a.empty() ? 0 : a[0].size();
    long double scale = 0;
    for (const auto& r : a)
        for (auto v : r) scale = std::max(scale, std::fabs(v));
    std::size_t rank = 0;
    std::vector<bool> used(cols, false);
    for (std::size_t step = 0; step < std::min(rows, cols); ++step) {
        std::size_t pr = 0, pc = 0;
        long double best = -1;
        for (std::size_t r = rank; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                if (!used[c] && std::fabs(a[r][c]) > best) best = std::fabs(a[r][c]), pr = r, pc = c;
        if (best <= rel_tol * scale) break;
        std::swap(a[pr], a[rank]);
        used[pc] = true;
        for (std::size_t r = rank + 1; r < rows; ++r) {
            const long double f = a[r][pc] / a[rank][pc];
            for (std::size_t c = 0; c < cols; ++c) a[r][c] -= f * a[rank][c];
        }
        ++rank;
    }
    return rank;
}

inline long double power(long double x, int k) {
    long double r = 1;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

// (x - center)^alpha evaluated directly
inline long double monomial(const std::vector<double>& x, const Exps& alpha, const std::vector<double>& center) {
    long double r = 1;
    for (std::size_t i = 0; i < x.size(); ++i) r *= power(static_cast<long double>(x[i]) - center[i], alpha[i]);
    return r;
}

inline long double factorial(const Exps& a) {
    long double r = 1;
    for (int v : a)
        for (int i = 2; i <= v; ++i) r *= i;
    return r;
}

// c solving sum_i c_i (x_i - t)^alpha = zeta! [alpha == zeta] for alpha in L
inline std::vector<double> expansion_weights(const std::vector<std::vector<double>>& pts, const std::vector<Exps>& l,
                                             const std::vector<double>& t, const Exps& zeta) {
    const std::size_t n = pts.size();
    Mat a(n, std::vector<long double>(n));
    std::vector<long double> b(n, 0.0L);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) a[k][i] = monomial(pts[i], l[k], t);
        if (l[k] == zeta) b[k] = factorial(zeta);
    }
    std::vector<long double> x;
    if (!dense_solve(a, b, x)) return {};
    return std::vector<double>(x.begin(), x.end());
}

// Central difference of order |zeta|, nested per axis, with step h per unit.
inline double finite_difference(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                                const Exps& zeta, double h) {
    for (std::size_t i = 0; i < zeta.size(); ++i) {
        if (zeta[i] == 0) continue;
        Exps rest = zeta;
        --rest[i];
        auto plus = x, minus = x;
        plus[i] += h;
        minus[i] -= h;
        return (finite_difference(f, plus, rest, h) - finite_difference(f, minus, rest, h)) / (2 * h);
    }
    return f(x);
}

inline double pnorm(const std::vector<double>& v, double p) {
    long double s = 0;
    for (double x : v) s += std::pow(static_cast<long double>(std::fabs(x)), static_cast<long double>(p));
    return static_cast<double>(std::pow(s, 1.0L / p));
}

}  // namespace oracle
