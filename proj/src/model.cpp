#include "fieldest/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fieldest/error.hpp"

namespace fieldest {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_expression(const ModelFunction& f) {
    return std::holds_alternative<std::shared_ptr<const basis::Expression>>(f.kind());
}

// Fixed-dimension operands must agree; expressions only need to fit inside.
void check_operands(const std::vector<ModelFunction>& fs) {
    std::size_t fixed = 0, lower = 0;
    for (const auto& f : fs) {
        if (is_expression(f)) {
            lower = std::max(lower, f.dim());
        } else if (f.dim() != 0) {
            if (fixed != 0 && fixed != f.dim()) fail(ErrorKind::InvalidArgument, "model terms of different dimension");
            fixed = f.dim();
        }
    }
    if (fixed != 0 && lower > fixed) fail(ErrorKind::InvalidArgument, "model terms of different dimension");
}

// Expressions only bound the dimension from below (highest coordinate used).
void check_point(std::size_t dim, bool at_least, std::span<const double> x) {
    if (dim != 0 && (at_least ? x.size() < dim : x.size() != dim))
        fail(ErrorKind::InvalidArgument, "evaluation point has dimension " + std::to_string(x.size()) +
                                             ", function expects " + std::to_string(dim));
}

double falling_factorial(int n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= n - i;
    return r;
}

double binomial(int n, int k) { return falling_factorial(n, k) / std::tgamma(k + 1.0); }

// D^order x^exponent
double monomial_derivative(const MultiIndex& exponent, const MultiIndex& order, std::span<const double> x) {
    double v = 1.0;
    for (std::size_t i = 0; i < exponent.dim(); ++i) {
        const int a = exponent[i];
        const int z = order[i];
        if (z > a) return 0.0;
        v *= falling_factorial(a, z);
        for (int k = 0; k < a - z; ++k) v *= x[i];
    }
    return v;
}

double inverse_distance_value(const basis::InverseDistance& f, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - f.source[i]) * (x[i] - f.source[i]);
    if (std::sqrt(s) <= kSingularityRadius)
        fail(ErrorKind::SingularEvaluation, "evaluation at an inverse-distance source");
    return std::pow(s, -f.power / 2.0);
}

// Closed form up to second order for s^(-q/2), s = ||x - z||^2.
double inverse_distance_low_order(const basis::InverseDistance& f, const MultiIndex& order,
                                  std::span<const double> x) {
    const double q = f.power;
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - f.source[i]) * (x[i] - f.source[i]);
    if (std::sqrt(s) <= kSingularityRadius)
        fail(ErrorKind::SingularEvaluation, "evaluation at an inverse-distance source");

    std::vector<std::size_t> axes;
    for (std::size_t i = 0; i < order.dim(); ++i) {
        for (int k = 0; k < order[i]; ++k) axes.push_back(i);
    }
    if (axes.empty()) return std::pow(s, -q / 2.0);
    if (axes.size() == 1) {
        const std::size_t i = axes[0];
        return -q * std::pow(s, -q / 2.0 - 1.0) * (x[i] - f.source[i]);
    }
    const std::size_t i = axes[0];
    const std::size_t j = axes[1];
    const double di = x[i] - f.source[i];
    const double dj = x[j] - f.source[j];
    double v = q * (q + 2.0) * std::pow(s, -q / 2.0 - 2.0) * di * dj;
    if (i == j) v -= q * std::pow(s, -q / 2.0 - 1.0);
    return v;
}

double inverse_distance_derivative(const basis::InverseDistance& f, const MultiIndex& order,
                                   std::span<const double> x) {
    if (order.total_degree() <= 2) return inverse_distance_low_order(f, order, x);
    // split off a second-order part handled in closed form
    std::vector<int> closed(order.dim(), 0);
    std::vector<int> rest(order.exponents().begin(), order.exponents().end());
    int taken = 0;
    for (std::size_t i = 0; i < order.dim() && taken < 2; ++i) {
        while (rest[i] > 0 && taken < 2) {
            --rest[i];
            ++closed[i];
            ++taken;
        }
    }
    const MultiIndex closed_order(closed);
    auto g = [&](std::span<const double> p) { return inverse_distance_low_order(f, closed_order, p); };
    return central_difference(g, MultiIndex(rest), x);
}

double sinusoid_derivative(const basis::Sinusoid& f, const MultiIndex& order, std::span<const double> x) {
    double arg = f.phase;
    double scale = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        arg += f.frequency[i] * x[i];
        for (int k = 0; k < order[i]; ++k) scale *= f.frequency[i];
    }
    // d^n/dt^n sin(t) = sin(t + n pi/2)
    const double shift = order.total_degree() * std::numbers::pi / 2.0;
    const double base = f.flavor == basis::Sinusoid::Flavor::Sin ? std::sin(arg + shift) : std::cos(arg + shift);
    return scale * base;
}

// All eta <= order, as multi-indices.
std::vector<MultiIndex> sub_orders(const MultiIndex& order) {
    std::vector<MultiIndex> out;
    std::vector<int> e(order.dim(), 0);
    while (true) {
        out.emplace_back(e);
        std::size_t i = 0;
        while (i < e.size() && e[i] == order[i]) e[i++] = 0;
        if (i == e.size()) break;
        ++e[i];
    }
    return out;
}

double expression_derivative(const basis::Expression& ex, const MultiIndex& order, std::span<const double> x) {
    using Op = basis::Expression::Op;
    switch (ex.op) {
        case Op::Scalar:
            return order.total_degree() == 0 ? ex.value : 0.0;
        case Op::Coordinate: {
            const int deg = order.total_degree();
            if (deg == 0) return x[ex.axis];
            return (deg == 1 && order[ex.axis] == 1) ? 1.0 : 0.0;
        }
        case Op::Leaf:
            return ex.children.front().eval_derivative(order, x);
        case Op::Sum: {
            double v = 0.0;
            for (const auto& c : ex.children) v += c.eval_derivative(order, x);
            return v;
        }
        case Op::Product: {
            if (ex.children.empty()) return order.total_degree() == 0 ? 1.0 : 0.0;
            // Leibniz: D^z (f g) = sum_{eta <= z} C(z, eta) D^eta f D^(z-eta) g
            const ModelFunction& head = ex.children.front();
            std::vector<ModelFunction> tail_factors(ex.children.begin() + 1, ex.children.end());
            basis::Expression tail{Op::Product, std::move(tail_factors), 0, 0.0};
            double v = 0.0;
            for (const auto& eta : sub_orders(order)) {
                double coeff = 1.0;
                for (std::size_t i = 0; i < order.dim(); ++i) coeff *= binomial(order[i], eta[i]);
                const double dh = head.eval_derivative(eta, x);
                if (dh == 0.0) continue;
                v += coeff * dh * expression_derivative(tail, order.minus(eta), x);
            }
            return v;
        }
    }
    return 0.0;
}

}  // namespace

ModelFunction::ModelFunction(Kind kind) : kind_(std::move(kind)) {
    dim_ = std::visit(overloaded{
                          [](const basis::Monomial& m) { return m.exponent.dim(); },
                          [](const basis::InverseDistance& f) {
                              if (!(f.power > 0.0)) fail(ErrorKind::InvalidArgument, "inverse_distance power must be positive");
                              if (f.source.empty()) fail(ErrorKind::InvalidArgument, "inverse_distance source is empty");
                              return f.source.size();
                          },
                          [](const basis::Constant&) { return std::size_t{0}; },
                          [](const basis::Sinusoid& f) {
                              if (f.frequency.empty()) fail(ErrorKind::InvalidArgument, "sinusoid frequency is empty");
                              return f.frequency.size();
                          },
                          [](const std::shared_ptr<const basis::Expression>& e) {
                              if (!e) fail(ErrorKind::InvalidArgument, "null expression");
                              std::size_t d = 0;
                              if (e->op == basis::Expression::Op::Coordinate) d = e->axis + 1;
                              for (const auto& c : e->children) d = std::max(d, c.dim());
                              return d;
                          },
                      },
                      kind_);
}

ModelFunction ModelFunction::inverse_distance(std::vector<double> source, double power) {
    return ModelFunction(basis::InverseDistance{std::move(source), power});
}

ModelFunction ModelFunction::sinusoid(std::vector<double> frequency, double phase, basis::Sinusoid::Flavor flavor) {
    return ModelFunction(basis::Sinusoid{std::move(frequency), phase, flavor});
}

ModelFunction ModelFunction::coordinate(std::size_t axis) {
    return ModelFunction(std::make_shared<const basis::Expression>(
        basis::Expression{basis::Expression::Op::Coordinate, {}, axis, 0.0}));
}

ModelFunction ModelFunction::scalar(double value) {
    return ModelFunction(std::make_shared<const basis::Expression>(
        basis::Expression{basis::Expression::Op::Scalar, {}, 0, value}));
}

ModelFunction ModelFunction::sum(std::vector<ModelFunction> terms) {
    check_operands(terms);
    return ModelFunction(std::make_shared<const basis::Expression>(
        basis::Expression{basis::Expression::Op::Sum, std::move(terms), 0, 0.0}));
}

ModelFunction ModelFunction::product(std::vector<ModelFunction> factors) {
    check_operands(factors);
    return ModelFunction(std::make_shared<const basis::Expression>(
        basis::Expression{basis::Expression::Op::Product, std::move(factors), 0, 0.0}));
}

double ModelFunction::eval(std::span<const double> x) const {
    check_point(dim_, std::holds_alternative<std::shared_ptr<const basis::Expression>>(kind_), x);
    return std::visit(overloaded{
                          [&](const basis::Monomial& m) { return m.exponent.monomial(x); },
                          [&](const basis::InverseDistance& f) { return inverse_distance_value(f, x); },
                          [](const basis::Constant&) { return 1.0; },
                          [&](const basis::Sinusoid& f) {
                              return sinusoid_derivative(f, MultiIndex(x.size()), x);
                          },
                          [&](const std::shared_ptr<const basis::Expression>& e) {
                              return expression_derivative(*e, MultiIndex(x.size()), x);
                          },
                      },
                      kind_);
}

double ModelFunction::eval_derivative(const MultiIndex& order, std::span<const double> x) const {
    check_point(dim_, std::holds_alternative<std::shared_ptr<const basis::Expression>>(kind_), x);
    if (order.dim() != x.size())
        fail(ErrorKind::InvalidArgument, "derivative order dimension does not match the point");
    if (order.total_degree() == 0) return eval(x);
    return std::visit(overloaded{
                          [&](const basis::Monomial& m) { return monomial_derivative(m.exponent, order, x); },
                          [&](const basis::InverseDistance& f) { return inverse_distance_derivative(f, order, x); },
                          [](const basis::Constant&) { return 0.0; },
                          [&](const basis::Sinusoid& f) { return sinusoid_derivative(f, order, x); },
                          [&](const std::shared_ptr<const basis::Expression>& e) {
                              return expression_derivative(*e, order, x);
                          },
                      },
                      kind_);
}

ModelSpec::ModelSpec(std::size_t dim, std::vector<ModelFunction> functions)
    : dim_(dim), functions_(std::move(functions)) {
    if (dim_ == 0) fail(ErrorKind::InvalidArgument, "model dimension must be at least 1");
    if (functions_.empty()) fail(ErrorKind::InvalidArgument, "model has no functions");
    for (std::size_t j = 0; j < functions_.size(); ++j) {
        if (functions_[j].dim() > dim_ ||
            (functions_[j].dim() != 0 && functions_[j].dim() != dim_ &&
             !std::holds_alternative<std::shared_ptr<const basis::Expression>>(functions_[j].kind())))
            fail(ErrorKind::InvalidArgument, "model function " + std::to_string(j) + " has dimension " +
                                                 std::to_string(functions_[j].dim()) + ", model has " +
                                                 std::to_string(dim_));
    }
}

ModelSpec ModelSpec::monomials(const LowerSet& set) {
    std::vector<ModelFunction> fs;
    fs.reserve(set.size());
    for (const auto& a : set.elements()) fs.push_back(ModelFunction::monomial(a));
    return ModelSpec(set.dim(), std::move(fs));
}

}  // namespace fieldest
