// fieldest: command-line front end.
//
// Exit codes: 0 success, 1 analytic or validation failure (rank deficiency,
// Monte Carlo disagreement), 2 input error.

#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "fieldest/allocation.hpp"
#include "fieldest/error.hpp"
#include "fieldest/estimators.hpp"
#include "fieldest/linear_systems.hpp"
#include "fieldest/placement.hpp"
#include "fieldest/scenario.hpp"
#include "fieldest/sweep.hpp"

using namespace fieldest;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kInputError = 2;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fmt(const std::vector<double>& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s + ")";
}

std::string fmt(const LowerSet& l) {
    std::string s = "{";
    for (std::size_t i = 0; i < l.size(); ++i) s += (i ? ", " : "") + l[i].to_string();
    return s + "}";
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (cell.empty() || *end != '\0' || !std::isfinite(v))
            fail(ErrorKind::InvalidArgument, what + ": '" + cell + "' is not a number");
        out.push_back(v);
    }
    if (out.empty()) fail(ErrorKind::InvalidArgument, what + " is empty");
    return out;
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

// Vandermonde over coordinates centred and scaled to [-1, 1]; the span of a
// lower set's monomials is unchanged by per-axis affine maps, so the rank is too.
SystemMatrix scaled_vandermonde(const PointSet& x, const LowerSet& l) {
    const GridSpec box = default_grid(x, 2);
    std::vector<Point> pts;
    for (const auto& p : x.points()) {
        Point q(p.size());
        for (std::size_t a = 0; a < p.size(); ++a) {
            const auto [lo, hi] = box.bounds[a];
            const double half = 0.5 * (hi - lo);
            q[a] = half > 0.0 ? (p[a] - 0.5 * (lo + hi)) / half : 0.0;
        }
        pts.push_back(std::move(q));
    }
    return build_vandermonde(PointSet(x.dim(), std::move(pts)), l);
}

int check_placement(const std::string& path, bool as_json) {
    const Scenario s = load_scenario(path);
    json out;
    Eigen::MatrixXd m;
    std::string columns;
    if (s.model.type == ModelConfig::Type::Monomials) {
        const LowerSet& l = *s.model.lower_set;
        const bool equivalent = s.model.certificate ? true : is_equivalent(s.sensors, l);
        out["model"] = "monomials";
        out["lower_set"] = to_json(l);
        out["relabel_equivalent"] = equivalent;
        if (s.model.certificate) out["relabeling"] = to_json(s.model.certificate->relabeling);
        m = scaled_vandermonde(s.sensors, l).entries;
        columns = "lower set = " + fmt(l) + (equivalent ? " (relabel-equivalent)" : " (not relabel-equivalent)");
    } else {
        const ModelSpec& f = *s.model.functions;
        if (s.sensors.size() < f.size())
            fail(ErrorKind::InvalidArgument, "fewer sensors (" + std::to_string(s.sensors.size()) + ") than model functions (" +
                                                 std::to_string(f.size()) + ")");
        out["model"] = "functions";
        m = (s.sensors.size() == f.size() ? build_alternant(s.sensors, f) : build_design(s.sensors, f)).entries;
        columns = std::to_string(f.size()) + " model functions";
    }
    const Weights w = s.weights ? s.weights->build() : Weights::identity();
    const ErrorSubspaceReport rep = error_subspace(m, w);
    const std::size_t k = static_cast<std::size_t>(m.cols());
    const std::size_t rank = rep.rank.numerical_rank;
    const bool full = rank == k;

    out["rank"] = rank;
    out["columns"] = k;
    out["full_rank"] = full;
    out["condition_number"] = rep.rank.condition_number;
    out["singular_values"] = rep.rank.singular_values;
    out["kernel_dim"] = rep.null_basis.cols();
    out["error_free_dim"] = rep.error_free_basis.cols();
    auto columns_json = [](const Eigen::MatrixXd& b) {
        json a = json::array();
        for (Eigen::Index c = 0; c < b.cols(); ++c) a.push_back(std::vector<double>(b.col(c).data(), b.col(c).data() + b.rows()));
        return a;
    };
    out["kernel_basis"] = columns_json(rep.null_basis);
    out["error_free_basis"] = columns_json(rep.error_free_basis);

    if (as_json) {
        print_json(out);
    } else {
        if (full) std::cout << "full rank, " << columns << '\n';
        else std::cout << "rank " << rank << "/" << k << ", kernel dim " << rep.null_basis.cols() << ", error-free dim "
                       << rep.error_free_basis.cols() << "; " << columns << '\n';
        std::cout << "condition number " << fmt(rep.rank.condition_number) << '\n';
        for (Eigen::Index c = 0; c < rep.null_basis.cols(); ++c) {
            const Eigen::VectorXd v = rep.null_basis.col(c);
            std::cout << "kernel vector " << fmt(std::vector<double>(v.data(), v.data() + v.size())) << '\n';
        }
    }
    return full ? kOk : kFailure;
}

std::vector<Strategy> parse_strategies(const std::string& text) {
    std::vector<Strategy> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(strategy_from_string(cell));
    return out;
}

int estimate_cmd(const std::string& path, const std::string& target, const std::string& strategies,
                 const std::string& method, bool as_json) {
    const Scenario s = load_scenario(path);
    if (s.targets.empty()) fail(ErrorKind::InvalidArgument, "scenario has no targets");
    EstimationContext ctx = s.context();
    if (method == "nearest") ctx.expansion.method = ExpansionMethod::NearestSensor;
    else if (method != "direct") fail(ErrorKind::InvalidArgument, "unknown expansion method '" + method + "'");
    const auto strats = parse_strategies(strategies);

    std::vector<const NamedTarget*> chosen;
    if (target.empty()) {
        for (const auto& t : s.targets) chosen.push_back(&t);
    } else {
        for (const auto& t : s.targets) {
            if (t.id == target) chosen.push_back(&t);
        }
        if (chosen.empty()) {
            char* end = nullptr;
            const long idx = std::strtol(target.c_str(), &end, 10);
            if (*end != '\0' || idx < 0 || static_cast<std::size_t>(idx) >= s.targets.size())
                fail(ErrorKind::InvalidArgument, "no target '" + target + "' (scenario has " +
                                                     std::to_string(s.targets.size()) + ")");
            chosen.push_back(&s.targets[static_cast<std::size_t>(idx)]);
        }
    }

    json records = json::array();
    for (const NamedTarget* t : chosen) {
        const ResultRecord r = make_record(s, *t, estimate(ctx, t->spec), strats);
        if (as_json) {
            records.push_back(to_json(r));
            continue;
        }
        std::cout << r.id << ": c = " << fmt(r.estimator.c) << '\n';
        std::cout << "  method " << to_string(r.estimator.method) << ", condition " << fmt(r.estimator.condition_number)
                  << (r.estimator.error_free ? "" : ", NOT error free") << '\n';
        if (r.predicted) std::cout << "  predicted " << fmt(*r.predicted) << '\n';
        for (const auto& [name, var] : r.variances) std::cout << "  variance[" << name << "] " << fmt(var) << '\n';
        for (const auto& w : r.estimator.warnings) std::cout << "  warning: " << w << '\n';
    }
    if (as_json) print_json(json{{"results", records}});
    return kOk;
}

struct MapArgs {
    std::string scenario;
    std::string grid;
    std::string bounds;
    std::string out = "-";
    std::string field;
    bool serial = false;
};

GridSpec make_grid(const Scenario& s, const MapArgs& a) {
    GridSpec g = default_grid(s.sensors, 101);
    const std::size_t m = s.dimension;
    if (!a.grid.empty()) {
        const auto n = parse_list(a.grid, "--grid");
        if (n.size() != 1 && n.size() != m) fail(ErrorKind::InvalidArgument, "--grid needs 1 or " + std::to_string(m) + " counts");
        for (std::size_t i = 0; i < m; ++i) {
            const double c = n.size() == 1 ? n[0] : n[i];
            if (c < 1 || c != std::floor(c)) fail(ErrorKind::InvalidArgument, "--grid counts must be positive integers");
            g.counts[i] = static_cast<std::size_t>(c);
        }
    }
    if (!a.bounds.empty()) {
        const auto b = parse_list(a.bounds, "--bounds");
        if (b.size() != 2 && b.size() != 2 * m)
            fail(ErrorKind::InvalidArgument, "--bounds needs lo,hi or one lo,hi pair per axis");
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t o = b.size() == 2 ? 0 : 2 * i;
            g.bounds[i] = {b[o], b[o + 1]};
            if (a.grid.empty() && g.counts[i] == 1 && b[o + 1] > b[o]) g.counts[i] = 101;
        }
    }
    g.validate();
    return g;
}

void write_rows(const MapArgs& a, const std::vector<GridRow>& rows, std::size_t dim) {
    if (a.out == "-") emit_grid_csv(std::cout, rows, dim);
    else emit_grid_csv(a.out, rows, dim);
}

int gain_map_cmd(const MapArgs& a) {
    const Scenario s = load_scenario(a.scenario);
    const auto rows = gain_map(s.context(), make_grid(s, a), SweepOptions{!a.serial});
    write_rows(a, rows, s.dimension);
    return kOk;
}

int error_map_cmd(const MapArgs& a) {
    const Scenario s = load_scenario(a.scenario);
    ModelFunction f;
    if (!a.field.empty()) f = parse_polynomial(a.field, s.dimension);
    else if (s.field) f = *s.field;
    else fail(ErrorKind::InvalidArgument, "no field given: pass --field or add \"field\" to the scenario");
    const FieldOracle oracle{ModelSpec(s.dimension, {f}), {1.0}};
    const auto rows = error_map(s.context(), oracle, make_grid(s, a), SweepOptions{!a.serial});
    write_rows(a, rows, s.dimension);
    return kOk;
}

int allocate_cmd(const std::string& coeffs, double total, const std::string& strategy, int reps, bool round,
                 std::optional<double> p, std::optional<double> q, bool as_json) {
    const auto c = parse_list(coeffs, "--coeffs");
    AllocationResult r;
    if (p || q) {
        if (!p || !q) fail(ErrorKind::InvalidArgument, "--p and --q go together");
        r = allocate_general(c, total, *p, *q);
    } else {
        r = allocate(strategy_from_string(strategy), c, total, reps);
    }
    json out = to_json(r);
    std::optional<RoundedAllocation> rounded;
    if (round) {
        rounded = round_allocation(r, c);
        out["rounded"] = to_json(*rounded);
    }
    if (as_json) {
        print_json(out);
        return kOk;
    }
    std::cout << "strategy " << to_string(r.strategy) << '\n';
    std::cout << "n = " << fmt(r.n) << '\n';
    std::cout << "variance " << fmt(r.variance) << '\n';
    if (rounded) {
        std::cout << "rounded n = (";
        for (std::size_t i = 0; i < rounded->n.size(); ++i) std::cout << (i ? ", " : "") << rounded->n[i];
        std::cout << ")\nrounded variance " << fmt(rounded->variance) << " (penalty " << fmt(rounded->penalty) << ")\n";
    }
    return kOk;
}

int validate_mc_cmd(const std::string& coeffs, const std::string& alloc, long long trials, std::uint64_t seed,
                    const std::string& scaling, bool as_json) {
    const auto c = parse_list(coeffs, "--coeffs");
    const auto n = parse_list(alloc, "--alloc");
    if (trials <= 0) fail(ErrorKind::InvalidArgument, "--trials must be positive");
    NoiseScaling sc;
    if (scaling == "quantum") sc = NoiseScaling::Quantum;
    else if (scaling == "classical") sc = NoiseScaling::Classical;
    else fail(ErrorKind::InvalidArgument, "--scaling must be quantum or classical");
    const auto r = monte_carlo_variance(c, n, static_cast<std::uint64_t>(trials), seed, sc);
    const double deviation = std::abs(r.empirical_variance - r.analytic_variance);
    const bool ok = deviation <= 3.0 * r.standard_error;
    if (as_json) {
        print_json(json{{"empirical_variance", r.empirical_variance},
                        {"analytic_variance", r.analytic_variance},
                        {"standard_error", r.standard_error},
                        {"relative_deviation", r.relative_deviation},
                        {"trials", r.trials},
                        {"seed", seed},
                        {"within_3_se", ok}});
    } else {
        std::cout << "empirical " << fmt(r.empirical_variance) << ", analytic " << fmt(r.analytic_variance)
                  << ", relative deviation " << fmt(r.relative_deviation) << ", standard error "
                  << fmt(r.standard_error) << (ok ? "" : "  (outside 3 standard errors)") << '\n';
    }
    return ok ? kOk : kFailure;
}

void apply_thread_env() {
    if (const char* env = std::getenv("FIELDEST_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear estimators for fields sampled by sensor networks"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads for map sweeps (default: FIELDEST_THREADS or all cores)");

    bool as_json = false;
    std::string scenario;

    auto* cp = app.add_subcommand("check-placement", "Certify the placement and report rank and error subspace");
    cp->add_option("scenario", scenario, "Scenario JSON")->required();
    cp->add_flag("--json", as_json, "JSON output");

    std::string target, strategies = "nonlocal,local", method = "direct";
    auto* est = app.add_subcommand("estimate", "Build estimators for the scenario targets");
    est->add_option("scenario", scenario, "Scenario JSON")->required();
    est->add_option("--target", target, "Target id or index (default: all)");
    est->add_option("--strategy", strategies, "Comma-separated: nonlocal, local, classical");
    est->add_option("--method", method, "Expansion route: direct or nearest");
    est->add_flag("--json,--out-json", as_json, "JSON output");

    MapArgs map;
    auto add_map = [&](CLI::App* sub) {
        sub->add_option("scenario", map.scenario, "Scenario JSON")->required();
        sub->add_option("--grid", map.grid, "Points per axis: n or nx,ny,... (default 101)");
        sub->add_option("--bounds", map.bounds, "lo,hi or lo1,hi1,lo2,hi2,... (default: sensor bounding box)");
        sub->add_option("--out", map.out, "CSV path, '-' for stdout");
        sub->add_flag("--serial", map.serial, "Single-threaded reference sweep");
    };
    auto* gm = app.add_subcommand("gain-map", "Precision gain of the interpolation estimator over a grid");
    add_map(gm);
    auto* em = app.add_subcommand("error-map", "Interpolation error against a known field over a grid");
    add_map(em);
    em->add_option("--field", map.field, "Polynomial, e.g. \"(x-1)^3+(y-1)^3\" (default: scenario field)");

    std::string coeffs, strategy = "nonlocal";
    double total = 0.0;
    int reps = 1;
    bool round = false;
    std::optional<double> p, q;
    auto* al = app.add_subcommand("allocate", "Optimal resource allocation and variance");
    al->add_option("--coeffs", coeffs, "Estimator coefficients c1,c2,...")->required();
    al->add_option("--resources,-N", total, "Total resources N")->required();
    al->add_option("--strategy", strategy, "nonlocal, local or classical");
    al->add_option("--repetitions,-m", reps, "Repetitions m");
    al->add_option("--p", p, "General exponent p (with --q)");
    al->add_option("--q", q, "General exponent q (with --p)");
    al->add_flag("--round", round, "Also report a largest-remainder integer allocation");
    al->add_flag("--json", as_json, "JSON output");

    std::string alloc, scaling = "quantum";
    long long trials = 100000;
    std::uint64_t seed = 1;
    auto* mc = app.add_subcommand("validate-mc", "Monte Carlo check of the analytic variance");
    mc->add_option("--coeffs", coeffs, "Estimator coefficients")->required();
    mc->add_option("--alloc", alloc, "Resources per sensor")->required();
    mc->add_option("--trials", trials, "Trials (at least 10000)");
    mc->add_option("--seed", seed, "RNG seed");
    mc->add_option("--scaling", scaling, "quantum (1/n) or classical (1/sqrt(n))");
    mc->add_flag("--json", as_json, "JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    apply_thread_env();
    if (threads > 0) omp_set_num_threads(threads);

    try {
        if (cp->parsed()) return check_placement(scenario, as_json);
        if (est->parsed()) return estimate_cmd(scenario, target, strategies, method, as_json);
        if (gm->parsed()) return gain_map_cmd(map);
        if (em->parsed()) return error_map_cmd(map);
        if (al->parsed()) return allocate_cmd(coeffs, total, strategy, reps, round, p, q, as_json);
        if (mc->parsed()) return validate_mc_cmd(coeffs, alloc, trials, seed, scaling, as_json);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::RankDeficient ? kFailure : kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}
