/**
 * @file estimators.hpp
 * @brief Linear estimators c with target ~= c . F for field readings F.
 *
 * Targets are field values or derivatives at arbitrary points (expansion
 * over a lower set of monomials), single model coefficients (signal
 * isolation), model-based derivative values, and arbitrary linear
 * functionals b . beta solved by generalized least squares. Estimators over
 * the same sensors combine linearly.
 */
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fieldest/linear_systems.hpp"
#include "fieldest/model.hpp"
#include "fieldest/multiindex.hpp"
#include "fieldest/point_set.hpp"

namespace fieldest {

namespace target {

struct Interpolate {
    Point point;
};
struct Derivative {
    Point point;
    MultiIndex order;
};
struct Isolate {
    std::size_t index = 0;
};
struct LinearFunctional {
    std::vector<double> b;
};
struct Weighted;
struct Combination {
    std::vector<Weighted> terms;
};

}  // namespace target

struct TargetSpec {
    std::variant<target::Interpolate, target::Derivative, target::Isolate, target::LinearFunctional,
                 target::Combination>
        kind;
};

namespace target {
struct Weighted {
    double weight = 1.0;
    TargetSpec target;
};
}  // namespace target

/// Checks dimensions and finiteness. `model_size` bounds isolate / functional targets when given.
void validate_target(const TargetSpec& t, std::size_t dim, std::optional<std::size_t> model_size = std::nullopt);

enum class ExpansionMethod { Direct, NearestSensor };

enum class EstimatorMethod {
    ExpansionDirect,
    ExpansionNearestSensor,
    Isolation,
    ModelEvaluation,
    GeneralizedLeastSquares,
    Combination,
};

std::string to_string(EstimatorMethod m);

struct Estimator {
    std::vector<double> c;  ///< one coefficient per sensor
    TargetSpec target;
    PointSet sensors;
    double condition_number = 1.0;
    bool error_free = true;
    std::optional<std::vector<double>> bias_direction;  ///< over beta, when not error free
    EstimatorMethod method = EstimatorMethod::ExpansionDirect;
    std::vector<double> axis_scale;  ///< coordinate pre-scaling used, empty when none
    std::vector<std::string> warnings;

    bool condition_warning() const { return condition_number > kConditionWarning; }
    /// c . F
    double apply(std::span<const double> field_values) const;
};

struct ExpansionOptions {
    ExpansionMethod method = ExpansionMethod::Direct;
    bool prescale = true;          ///< map offsets onto [-1, 1] per axis before building V
    bool compute_condition = true; ///< SVD-based condition number (dominant cost in sweeps)
};

/// F(x_t) from the monomial expansion over L.
Estimator interpolation_estimator(const PointSet& x, const LowerSet& l, std::span<const double> target,
                                  const ExpansionOptions& opts = {});

/// D^order F(x_t) from the monomial expansion over L.
Estimator derivative_estimator(const PointSet& x, const LowerSet& l, std::span<const double> target,
                               const MultiIndex& order, const ExpansionOptions& opts = {});

/// beta_t for an invertible alternant; falls back to least squares with a
/// bias report when the alternant is rank deficient.
Estimator isolation_estimator(const PointSet& x, const ModelSpec& f, std::size_t t);

/// In-model D^order F(x_t): c = (A^T)^{-1} b with b_j = D^order f_j(x_t).
Estimator model_eval_estimator(const PointSet& x, const ModelSpec& f, std::span<const double> target,
                               const MultiIndex& order);

/// b . beta_hat for the weighted least-squares fit.
Estimator gls_estimator(const PointSet& x, const ModelSpec& f, const Weights& omega, std::span<const double> b);

/// Linear combination of estimators over the same sensors.
Estimator combine(const std::vector<std::pair<double, Estimator>>& terms);

/// Known field used to score estimators: sum_j beta_j f_j.
struct FieldOracle {
    ModelSpec model;
    std::vector<double> beta;

    double value(std::span<const double> x) const;
    double derivative(const MultiIndex& order, std::span<const double> x) const;
    /// Exact value of the target under this field. Isolate / functional
    /// targets read beta directly.
    double target_value(const TargetSpec& t) const;
};

/// Field readings of `field` at the sensors.
std::vector<double> sample(const FieldOracle& field, const PointSet& x);

/// |c . F_true - target_true|
double residual(const Estimator& e, const FieldOracle& field);

/// What a scenario offers to the estimator router.
struct EstimationContext {
    PointSet sensors;
    std::optional<LowerSet> lower_set;  ///< monomial model
    std::optional<ModelSpec> model;     ///< function model
    Weights weights = Weights::identity();
    ExpansionOptions expansion;
};

/// Routes a target to the matching construction.
Estimator estimate(const EstimationContext& ctx, const TargetSpec& t);

}  // namespace fieldest
