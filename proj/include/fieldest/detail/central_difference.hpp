#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace fieldest {

namespace detail {

template <typename F>
double central_difference_rec(const F& f, std::vector<int>& remaining, std::vector<double>& x, double exponent) {
    std::size_t axis = 0;
    while (axis < remaining.size() && remaining[axis] == 0) ++axis;
    if (axis == remaining.size()) return f(std::span<const double>(x));

    const double h = std::pow(std::numeric_limits<double>::epsilon(), exponent) * std::max(1.0, std::abs(x[axis]));
    --remaining[axis];
    const double x0 = x[axis];
    x[axis] = x0 + h;
    const double up = central_difference_rec(f, remaining, x, exponent);
    x[axis] = x0 - h;
    const double down = central_difference_rec(f, remaining, x, exponent);
    x[axis] = x0;
    ++remaining[axis];
    return (up - down) / (2.0 * h);
}

}  // namespace detail

template <typename F>
double central_difference(const F& f, const MultiIndex& order, std::span<const double> x) {
    std::vector<int> remaining(order.exponents().begin(), order.exponents().end());
    std::vector<double> pt(x.begin(), x.end());
    const double exponent = 1.0 / (order.total_degree() + 2.0);
    return detail::central_difference_rec(f, remaining, pt, exponent);
}

}  // namespace fieldest
