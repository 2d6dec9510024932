#include "fieldest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fieldest/error.hpp"

namespace fieldest {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Eigen::VectorXd to_eigen(std::span<const double> v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void check_point_dim(const PointSet& x, std::span<const double> p) {
    if (p.size() != x.dim())
        fail(ErrorKind::InvalidArgument, "target point has dimension " + std::to_string(p.size()) +
                                             ", sensors have " + std::to_string(x.dim()));
}

void note_condition(Estimator& e) {
    if (e.condition_warning()) {
        std::ostringstream os;
        os << "condition number " << e.condition_number << " exceeds 1e12";
        e.warnings.push_back(os.str());
    }
}

std::string describe_kernel(const Eigen::MatrixXd& null_basis, const LowerSet& l) {
    std::ostringstream os;
    os.precision(6);
    for (Eigen::Index k = 0; k < null_basis.cols(); ++k) {
        os << "\n  vanishing combination " << k << ":";
        for (Eigen::Index i = 0; i < null_basis.rows(); ++i) {
            const double v = null_basis(i, k);
            if (std::abs(v) < 1e-10) continue;
            os << ' ' << (v >= 0 ? "+" : "") << v << "*x^" << l[static_cast<std::size_t>(i)].to_string();
        }
    }
    return os.str();
}

std::size_t nearest_sensor(const PointSet& x, std::span<const double> t) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = 0.0;
        for (std::size_t a = 0; a < x.dim(); ++a) d = std::max(d, std::abs(x[i][a] - t[a]));
        if (d < best_dist) {  // strict: ties keep the lowest index
            best_dist = d;
            best = i;
        }
    }
    return best;
}

}  // namespace

std::string to_string(EstimatorMethod m) {
    switch (m) {
        case EstimatorMethod::ExpansionDirect: return "expansion_direct";
        case EstimatorMethod::ExpansionNearestSensor: return "expansion_nearest_sensor";
        case EstimatorMethod::Isolation: return "isolation";
        case EstimatorMethod::ModelEvaluation: return "model_evaluation";
        case EstimatorMethod::GeneralizedLeastSquares: return "generalized_least_squares";
        case EstimatorMethod::Combination: return "combination";
    }
    return "unknown";
}

void validate_target(const TargetSpec& t, std::size_t dim, std::optional<std::size_t> model_size) {
    std::visit(overloaded{
                   [&](const target::Interpolate& s) {
                       if (s.point.size() != dim) fail(ErrorKind::InvalidArgument, "target point dimension mismatch");
                       for (double v : s.point)
                           if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "non-finite target point");
                   },
                   [&](const target::Derivative& s) {
                       if (s.point.size() != dim) fail(ErrorKind::InvalidArgument, "target point dimension mismatch");
                       if (s.order.dim() != dim) fail(ErrorKind::InvalidArgument, "derivative order dimension mismatch");
                       for (double v : s.point)
                           if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "non-finite target point");
                   },
                   [&](const target::Isolate& s) {
                       if (model_size && s.index >= *model_size)
                           fail(ErrorKind::InvalidArgument, "isolation index " + std::to_string(s.index) +
                                                                " out of range for " + std::to_string(*model_size) +
                                                                " functions");
                   },
                   [&](const target::LinearFunctional& s) {
                       if (model_size && s.b.size() != *model_size)
                           fail(ErrorKind::InvalidArgument, "functional length does not match the model");
                       for (double v : s.b)
                           if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "non-finite functional entry");
                   },
                   [&](const target::Combination& s) {
                       if (s.terms.empty()) fail(ErrorKind::InvalidArgument, "empty combination");
                       for (const auto& w : s.terms) {
                           if (!std::isfinite(w.weight)) fail(ErrorKind::InvalidArgument, "non-finite weight");
                           validate_target(w.target, dim, model_size);
                       }
                   },
               },
               t.kind);
}

double Estimator::apply(std::span<const double> field_values) const {
    if (field_values.size() != c.size())
        fail(ErrorKind::InvalidArgument, "field vector length does not match the sensor count");
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * field_values[i];
    return s;
}

Estimator derivative_estimator(const PointSet& x, const LowerSet& l, std::span<const double> target,
                               const MultiIndex& order, const ExpansionOptions& opts) {
    check_point_dim(x, target);
    if (order.dim() != x.dim()) fail(ErrorKind::InvalidArgument, "derivative order dimension mismatch");
    if (x.size() != l.size())
        fail(ErrorKind::InvalidArgument, "expansion needs as many sensors as lower-set elements");

    const bool direct = opts.method == ExpansionMethod::Direct;
    const std::size_t m = x.dim();
    std::vector<double> center(target.begin(), target.end());
    if (!direct) {
        center = x[nearest_sensor(x, target)];
    } else if (opts.prescale) {
        // Expanding about the target gives one-sided offsets for targets near
        // the edge of the array. The polynomial space over a lower set is
        // translation invariant, so expand about the middle of the sensor and
        // target box instead; c is the same, the system is far better scaled.
        for (std::size_t a = 0; a < m; ++a) {
            double lo = target[a], hi = target[a];
            for (const auto& p : x.points()) lo = std::min(lo, p[a]), hi = std::max(hi, p[a]);
            center[a] = 0.5 * (lo + hi);
        }
    }

    // offsets from the expansion point, optionally scaled to [-1, 1] per axis
    std::vector<double> scale(m, 1.0);
    if (opts.prescale) {
        for (std::size_t a = 0; a < m; ++a) {
            double extent = 0.0;
            for (const auto& p : x.points()) extent = std::max(extent, std::abs(p[a] - center[a]));
            extent = std::max(extent, std::abs(target[a] - center[a]));
            if (extent > 0.0) scale[a] = 1.0 / extent;
        }
    }
    std::vector<Point> offsets;
    offsets.reserve(x.size());
    for (const auto& p : x.points()) {
        Point d(m);
        for (std::size_t a = 0; a < m; ++a) d[a] = (p[a] - center[a]) * scale[a];
        offsets.push_back(std::move(d));
    }
    const PointSet delta(m, std::move(offsets));
    const SystemMatrix v = build_vandermonde(delta, l);

    if (direct && !l.contains(order))
        fail(ErrorKind::InvalidArgument, "derivative order " + order.to_string() + " is not in the lower set");

    // rhs_alpha = D^order (x - center)^alpha at the target, in scaled coordinates
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(l.size()));
    std::vector<double> u(m);
    for (std::size_t a = 0; a < m; ++a) u[a] = (target[a] - center[a]) * scale[a];
    bool any = false;
    for (std::size_t k = 0; k < l.size(); ++k) {
        const MultiIndex& alpha = l[k];
        if (!order.precedes(alpha)) continue;
        const MultiIndex rest = alpha.minus(order);
        rhs(static_cast<Eigen::Index>(k)) = rest.monomial(u) * alpha.factorial() / rest.factorial();
        any = true;
    }
    if (!any)
        fail(ErrorKind::InvalidArgument, "derivative order " + order.to_string() +
                                             " is not reachable from any lower-set element; estimator would be zero");

    SolveResult sol;
    try {
        sol = solve(v, /*transpose=*/true, rhs);
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::RankDeficient) throw;
        const auto rep = error_subspace(v.entries);
        fail(ErrorKind::RankDeficient,
             std::string(err.what()) + "; monomials vanishing on the sensors:" + describe_kernel(rep.null_basis, l));
    }

    // a value target on a sensor is read off that sensor; the solve only adds rounding noise
    if (order.total_degree() == 0) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            bool same = true;
            for (std::size_t a = 0; a < m && same; ++a) same = same_coordinate(x[i][a], target[a]);
            if (same) {
                sol.solution.setZero();
                sol.solution(static_cast<Eigen::Index>(i)) = 1.0;
                break;
            }
        }
    }

    // chain rule back to unscaled coordinates
    double chain = 1.0;
    for (std::size_t a = 0; a < m; ++a) chain *= std::pow(scale[a], order[a]);

    Estimator e;
    e.c = to_std(sol.solution * chain);
    e.target.kind = target::Derivative{Point(target.begin(), target.end()), order};
    if (order.total_degree() == 0) e.target.kind = target::Interpolate{Point(target.begin(), target.end())};
    e.sensors = x;
    e.method = direct ? EstimatorMethod::ExpansionDirect : EstimatorMethod::ExpansionNearestSensor;
    if (opts.prescale) e.axis_scale = scale;
    if (opts.compute_condition) e.condition_number = rank_report(v).condition_number;
    note_condition(e);
    return e;
}

Estimator interpolation_estimator(const PointSet& x, const LowerSet& l, std::span<const double> target,
                                  const ExpansionOptions& opts) {
    return derivative_estimator(x, l, target, MultiIndex::zero(x.dim()), opts);
}

Estimator gls_estimator(const PointSet& x, const ModelSpec& f, const Weights& omega, std::span<const double> b) {
    const SystemMatrix design = build_design(x, f);
    const auto res = weighted_pseudo_inverse_apply(design, omega, to_eigen(b));
    Estimator e;
    e.c = to_std(res.c);
    e.target.kind = target::LinearFunctional{std::vector<double>(b.begin(), b.end())};
    e.sensors = x;
    e.method = EstimatorMethod::GeneralizedLeastSquares;
    e.condition_number = res.rank.condition_number;
    e.error_free = res.error_free;
    if (!res.error_free) {
        e.bias_direction = to_std(res.bias_direction);
        std::ostringstream os;
        os << "target has a component of norm " << res.bias_norm
           << " in the design-matrix kernel; estimate carries a construction error";
        e.warnings.push_back(os.str());
    }
    if (res.rank.numerical_rank < design.cols()) {
        e.warnings.push_back("design matrix rank " + std::to_string(res.rank.numerical_rank) + " of " +
                             std::to_string(design.cols()));
    }
    note_condition(e);
    return e;
}

namespace {

Estimator solve_alternant_or_gls(const PointSet& x, const ModelSpec& f, const Eigen::VectorXd& b,
                                 EstimatorMethod method) {
    const SystemMatrix a = build_alternant(x, f);
    try {
        const auto sol = solve(a, /*transpose=*/true, b);
        Estimator e;
        e.c = to_std(sol.solution);
        e.sensors = x;
        e.method = method;
        e.condition_number = rank_report(a).condition_number;
        note_condition(e);
        return e;
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::RankDeficient) throw;
    }
    Estimator e = gls_estimator(x, f, Weights::identity(), std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
    e.warnings.insert(e.warnings.begin(), "alternant is rank deficient; using the minimum-norm least-squares estimator");
    return e;
}

}  // namespace

Estimator isolation_estimator(const PointSet& x, const ModelSpec& f, std::size_t t) {
    if (t >= f.size())
        fail(ErrorKind::InvalidArgument, "isolation index " + std::to_string(t) + " out of range");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(f.size()));
    b(static_cast<Eigen::Index>(t)) = 1.0;
    Estimator e = solve_alternant_or_gls(x, f, b, EstimatorMethod::Isolation);
    e.target.kind = target::Isolate{t};
    return e;
}

Estimator model_eval_estimator(const PointSet& x, const ModelSpec& f, std::span<const double> target,
                               const MultiIndex& order) {
    check_point_dim(x, target);
    Eigen::VectorXd b(static_cast<Eigen::Index>(f.size()));
    for (std::size_t j = 0; j < f.size(); ++j) b(static_cast<Eigen::Index>(j)) = f[j].eval_derivative(order, target);
    Estimator e = solve_alternant_or_gls(x, f, b, EstimatorMethod::ModelEvaluation);
    e.target.kind = target::Derivative{Point(target.begin(), target.end()), order};
    if (order.total_degree() == 0) e.target.kind = target::Interpolate{Point(target.begin(), target.end())};
    return e;
}

Estimator combine(const std::vector<std::pair<double, Estimator>>& terms) {
    if (terms.empty()) fail(ErrorKind::InvalidArgument, "nothing to combine");
    const Estimator& first = terms.front().second;
    Estimator out;
    out.c.assign(first.c.size(), 0.0);
    out.sensors = first.sensors;
    out.method = EstimatorMethod::Combination;
    out.condition_number = 0.0;
    target::Combination combo;
    bool bias_compatible = true;
    std::vector<double> bias;
    for (const auto& [w, e] : terms) {
        if (e.c.size() != out.c.size() || !(e.sensors == out.sensors))
            fail(ErrorKind::InvalidArgument, "combined estimators use different sensor sets");
        for (std::size_t i = 0; i < out.c.size(); ++i) out.c[i] += w * e.c[i];
        out.error_free = out.error_free && e.error_free;
        out.condition_number = std::max(out.condition_number, e.condition_number);
        combo.terms.push_back(target::Weighted{w, e.target});
        out.warnings.insert(out.warnings.end(), e.warnings.begin(), e.warnings.end());
        if (e.bias_direction) {
            if (bias.empty()) bias.assign(e.bias_direction->size(), 0.0);
            if (bias.size() != e.bias_direction->size()) {
                bias_compatible = false;
                continue;
            }
            for (std::size_t j = 0; j < bias.size(); ++j) bias[j] += w * (*e.bias_direction)[j];
        }
    }
    out.target.kind = std::move(combo);
    if (!out.error_free && bias_compatible && !bias.empty()) out.bias_direction = std::move(bias);
    return out;
}

double FieldOracle::value(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < model.size(); ++j) s += beta[j] * model[j].eval(x);
    return s;
}

double FieldOracle::derivative(const MultiIndex& order, std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < model.size(); ++j) s += beta[j] * model[j].eval_derivative(order, x);
    return s;
}

double FieldOracle::target_value(const TargetSpec& t) const {
    return std::visit(overloaded{
                          [&](const target::Interpolate& s) { return value(s.point); },
                          [&](const target::Derivative& s) { return derivative(s.order, s.point); },
                          [&](const target::Isolate& s) { return beta.at(s.index); },
                          [&](const target::LinearFunctional& s) {
                              if (s.b.size() != beta.size())
                                  fail(ErrorKind::InvalidArgument, "functional length does not match the field model");
                              double v = 0.0;
                              for (std::size_t j = 0; j < beta.size(); ++j) v += s.b[j] * beta[j];
                              return v;
                          },
                          [&](const target::Combination& s) {
                              double v = 0.0;
                              for (const auto& w : s.terms) v += w.weight * target_value(w.target);
                              return v;
                          },
                      },
                      t.kind);
}

std::vector<double> sample(const FieldOracle& field, const PointSet& x) {
    std::vector<double> f(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) f[i] = field.value(x[i]);
    return f;
}

double residual(const Estimator& e, const FieldOracle& field) {
    return std::abs(e.apply(sample(field, e.sensors)) - field.target_value(e.target));
}

Estimator estimate(const EstimationContext& ctx, const TargetSpec& t) {
    const std::optional<std::size_t> model_size =
        ctx.model ? std::optional<std::size_t>(ctx.model->size())
                  : (ctx.lower_set ? std::optional<std::size_t>(ctx.lower_set->size()) : std::nullopt);
    validate_target(t, ctx.sensors.dim(), model_size);

    auto functional_model = [&]() -> ModelSpec {
        if (ctx.model) return *ctx.model;
        if (ctx.lower_set) return ModelSpec::monomials(*ctx.lower_set);
        fail(ErrorKind::InvalidArgument, "scenario has no model");
    };

    // value / derivative targets under a function model
    auto model_target = [&](std::span<const double> p, const MultiIndex& order) {
        const ModelSpec& f = *ctx.model;
        if (ctx.sensors.size() == f.size() && ctx.weights.is_identity())
            return model_eval_estimator(ctx.sensors, f, p, order);
        std::vector<double> b(f.size());
        for (std::size_t j = 0; j < f.size(); ++j) b[j] = f[j].eval_derivative(order, p);
        Estimator e = gls_estimator(ctx.sensors, f, ctx.weights, b);
        e.target.kind = target::Derivative{Point(p.begin(), p.end()), order};
        if (order.total_degree() == 0) e.target.kind = target::Interpolate{Point(p.begin(), p.end())};
        return e;
    };

    return std::visit(
        overloaded{
            [&](const target::Interpolate& s) -> Estimator {
                if (ctx.lower_set && !ctx.model)
                    return interpolation_estimator(ctx.sensors, *ctx.lower_set, s.point, ctx.expansion);
                return model_target(s.point, MultiIndex::zero(ctx.sensors.dim()));
            },
            [&](const target::Derivative& s) -> Estimator {
                if (ctx.lower_set && !ctx.model)
                    return derivative_estimator(ctx.sensors, *ctx.lower_set, s.point, s.order, ctx.expansion);
                return model_target(s.point, s.order);
            },
            [&](const target::Isolate& s) -> Estimator {
                const ModelSpec f = functional_model();
                if (ctx.sensors.size() == f.size() && ctx.weights.is_identity())
                    return isolation_estimator(ctx.sensors, f, s.index);
                std::vector<double> b(f.size(), 0.0);
                b[s.index] = 1.0;
                Estimator e = gls_estimator(ctx.sensors, f, ctx.weights, b);
                e.target = t;
                return e;
            },
            [&](const target::LinearFunctional& s) -> Estimator {
                return gls_estimator(ctx.sensors, functional_model(), ctx.weights, s.b);
            },
            [&](const target::Combination& s) -> Estimator {
                std::vector<std::pair<double, Estimator>> parts;
                for (const auto& w : s.terms) parts.emplace_back(w.weight, estimate(ctx, w.target));
                return combine(parts);
            },
        },
        t.kind);
}

}  // namespace fieldest
