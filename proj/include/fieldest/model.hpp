/**
 * @file model.hpp
 * @brief Basis functions of a linear field model F(x) = sum_j beta_j f_j(x).
 *
 * Built-in kinds carry closed-form derivatives. Expression trees combine
 * them with sums and products; their derivatives follow from linearity and
 * the multivariate Leibniz rule, so they stay exact wherever the leaves are.
 * The only numeric fallback is inverse_distance beyond second order, where
 * the remaining orders are taken by central differences on top of the
 * closed-form Hessian.
 */
#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fieldest/multiindex.hpp"

namespace fieldest {

/// Evaluations closer than this to an inverse-distance source are rejected.
inline constexpr double kSingularityRadius = 1e-12;

class ModelFunction;

namespace basis {

struct Monomial {
    MultiIndex exponent;
};

/// 1 / ||x - source||^power
struct InverseDistance {
    std::vector<double> source;
    double power = 1.0;
};

struct Constant {};

struct Sinusoid {
    enum class Flavor { Sin, Cos };
    std::vector<double> frequency;
    double phase = 0.0;
    Flavor flavor = Flavor::Sin;
};

struct Expression;

}  // namespace basis

class ModelFunction {
public:
    using Kind = std::variant<basis::Monomial, basis::InverseDistance, basis::Constant, basis::Sinusoid,
                              std::shared_ptr<const basis::Expression>>;

    ModelFunction() : kind_(basis::Constant{}) {}
    ModelFunction(Kind kind);

    static ModelFunction monomial(MultiIndex exponent) { return ModelFunction(basis::Monomial{std::move(exponent)}); }
    static ModelFunction inverse_distance(std::vector<double> source, double power = 1.0);
    static ModelFunction constant() { return ModelFunction(basis::Constant{}); }
    static ModelFunction sinusoid(std::vector<double> frequency, double phase,
                                  basis::Sinusoid::Flavor flavor = basis::Sinusoid::Flavor::Sin);

    // Expression building blocks.
    static ModelFunction coordinate(std::size_t axis);
    static ModelFunction scalar(double value);
    static ModelFunction sum(std::vector<ModelFunction> terms);
    static ModelFunction product(std::vector<ModelFunction> factors);

    const Kind& kind() const noexcept { return kind_; }

    /// Ambient dimension the function constrains, 0 when it accepts any.
    std::size_t dim() const noexcept { return dim_; }

    double eval(std::span<const double> x) const;
    double eval_derivative(const MultiIndex& order, std::span<const double> x) const;

private:
    Kind kind_;
    std::size_t dim_ = 0;
};

namespace basis {

struct Expression {
    enum class Op { Sum, Product, Coordinate, Scalar, Leaf };
    Op op = Op::Scalar;
    std::vector<ModelFunction> children;  ///< Sum / Product operands, or the Leaf
    std::size_t axis = 0;                 ///< Coordinate
    double value = 0.0;                   ///< Scalar
};

}  // namespace basis

/// Ordered model family sharing one dimension.
class ModelSpec {
public:
    ModelSpec() = default;
    ModelSpec(std::size_t dim, std::vector<ModelFunction> functions);

    /// Monomials x^alpha for alpha in the lower set, in canonical order.
    static ModelSpec monomials(const LowerSet& set);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return functions_.size(); }
    const ModelFunction& operator[](std::size_t j) const { return functions_[j]; }
    const std::vector<ModelFunction>& functions() const noexcept { return functions_; }

private:
    std::size_t dim_ = 0;
    std::vector<ModelFunction> functions_;
};

/// Nested central differences of `f` at x, one first-order difference per
/// unit of `order`. Step per axis h = eps^(1/(|order|+2)) * max(1, |x_i|),
/// which is cbrt(eps) for first derivatives.
template <typename F>
double central_difference(const F& f, const MultiIndex& order, std::span<const double> x);

}  // namespace fieldest

#include "fieldest/detail/central_difference.hpp"
