#include "fieldest/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
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

[[noreturn]] void schema(const std::string& path, const std::string& what) {
    fail(ErrorKind::Schema, path + ": " + what);
}

std::string at(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) schema(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) schema(at(path, key), "missing required field");
    return *it;
}

const json* optional_field(const json& j, const std::string& key) {
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

double read_real(const json& j, const std::string& path) {
    if (!j.is_number()) schema(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) schema(path, "expected a finite number");
    return v;
}

long long read_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) schema(path, "expected an integer");
    return j.get<long long>();
}

std::size_t read_index(const json& j, const std::string& path) {
    const long long v = read_int(j, path);
    if (v < 0) schema(path, "expected a non-negative integer");
    return static_cast<std::size_t>(v);
}

std::string read_string(const json& j, const std::string& path) {
    if (!j.is_string()) schema(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> read_reals(const json& j, const std::string& path, std::optional<std::size_t> len = {}) {
    if (!j.is_array()) schema(path, "expected an array of numbers");
    if (len && j.size() != *len)
        schema(path, "expected " + std::to_string(*len) + " entries, got " + std::to_string(j.size()));
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_real(j[i], at(path, i)));
    return out;
}

MultiIndex read_multiindex(const json& j, const std::string& path, std::size_t dim) {
    if (!j.is_array() || j.size() != dim) schema(path, "expected " + std::to_string(dim) + " non-negative integers");
    std::vector<int> e;
    for (std::size_t i = 0; i < dim; ++i) {
        const long long v = read_int(j[i], at(path, i));
        if (v < 0) schema(at(path, i), "exponent must be non-negative");
        e.push_back(static_cast<int>(v));
    }
    return MultiIndex(std::move(e));
}

// Runs a library constructor, re-tagging its errors with the JSON path.
template <typename F>
auto guarded(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Schema) throw;
        fail(e.kind(), path + ": " + e.what());
    }
}

// ---- polynomial parser ----

class PolyParser {
public:
    PolyParser(const std::string& text, std::size_t dim) : s_(text), dim_(dim) {}

    ModelFunction parse() {
        ModelFunction f = expr();
        skip();
        if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
        return f;
    }

private:
    [[noreturn]] void error(const std::string& what) const {
        fail(ErrorKind::InvalidArgument, "polynomial '" + s_ + "' at offset " + std::to_string(pos_) + ": " + what);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    ModelFunction expr() {
        std::vector<ModelFunction> terms{term()};
        for (;;) {
            if (accept('+')) {
                terms.push_back(term());
            } else if (accept('-')) {
                terms.push_back(ModelFunction::product({ModelFunction::scalar(-1.0), term()}));
            } else {
                break;
            }
        }
        return terms.size() == 1 ? terms.front() : ModelFunction::sum(std::move(terms));
    }

    ModelFunction term() {
        std::vector<ModelFunction> factors{unary()};
        for (;;) {
            if (accept('*')) {
                factors.push_back(unary());
            } else if (accept('/')) {
                skip();
                const double d = number();
                if (d == 0.0) error("division by zero");
                factors.push_back(ModelFunction::scalar(1.0 / d));
            } else {
                break;
            }
        }
        return factors.size() == 1 ? factors.front() : ModelFunction::product(std::move(factors));
    }

    ModelFunction unary() {
        if (accept('-')) return ModelFunction::product({ModelFunction::scalar(-1.0), unary()});
        if (accept('+')) return unary();
        return power();
    }

    ModelFunction power() {
        ModelFunction base = atom();
        if (!accept('^')) return base;
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) error("exponent must be a non-negative integer");
        const int k = std::stoi(s_.substr(start, pos_ - start));
        if (k == 0) return ModelFunction::scalar(1.0);
        if (k == 1) return base;
        return ModelFunction::product(std::vector<ModelFunction>(static_cast<std::size_t>(k), base));
    }

    double number() {
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) error("expected a number");
        pos_ += static_cast<std::size_t>(end - begin);
        return v;
    }

    ModelFunction atom() {
        skip();
        if (pos_ >= s_.size()) error("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            ModelFunction f = expr();
            if (!accept(')')) error("expected ')'");
            return f;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return ModelFunction::scalar(number());
        if (c == 'x' || c == 'y' || c == 'z') {
            ++pos_;
            std::size_t axis = c == 'x' ? 0 : (c == 'y' ? 1 : 2);
            if (c == 'x' && pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                const std::size_t start = pos_;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
                const std::size_t one_based = std::stoul(s_.substr(start, pos_ - start));
                if (one_based == 0) error("variables are numbered from x1");
                axis = one_based - 1;
            }
            if (axis >= dim_) error("variable refers to axis " + std::to_string(axis + 1) + " of a " +
                                    std::to_string(dim_) + "-dimensional field");
            return ModelFunction::coordinate(axis);
        }
        error("unexpected '" + std::string(1, c) + "'");
    }

    std::string s_;
    std::size_t dim_;
    std::size_t pos_ = 0;
};

}  // namespace

ModelFunction parse_polynomial(const std::string& text, std::size_t dim) { return PolyParser(text, dim).parse(); }

// ---- functions ----

json function_to_json(const ModelFunction& f) {
    return std::visit(
        overloaded{
            [](const basis::Monomial& m) -> json {
                return {{"kind", "monomial"}, {"exponent", m.exponent.exponents()}};
            },
            [](const basis::InverseDistance& d) -> json {
                return {{"kind", "inverse_distance"}, {"source", d.source}, {"power", d.power}};
            },
            [](const basis::Constant&) -> json { return {{"kind", "constant"}}; },
            [](const basis::Sinusoid& s) -> json {
                return {{"kind", "sinusoid"},
                        {"frequency", s.frequency},
                        {"phase", s.phase},
                        {"flavor", s.flavor == basis::Sinusoid::Flavor::Sin ? "sin" : "cos"}};
            },
            [](const std::shared_ptr<const basis::Expression>& e) -> json {
                using Op = basis::Expression::Op;
                switch (e->op) {
                    case Op::Leaf: return function_to_json(e->children.front());
                    case Op::Coordinate: return {{"kind", "coordinate"}, {"axis", e->axis}};
                    case Op::Scalar: return {{"kind", "scalar"}, {"value", e->value}};
                    case Op::Sum:
                    case Op::Product: {
                        json items = json::array();
                        for (const auto& c : e->children) items.push_back(function_to_json(c));
                        return {{"kind", e->op == Op::Sum ? "sum" : "product"}, {"terms", items}};
                    }
                }
                return {};
            },
        },
        f.kind());
}

ModelFunction function_from_json(const json& j, std::size_t dim, const std::string& path) {
    if (j.is_string()) return guarded(path, [&] { return parse_polynomial(j.get<std::string>(), dim); });
    const std::string kind = read_string(require(j, "kind", path), at(path, "kind"));
    if (kind == "monomial")
        return ModelFunction::monomial(read_multiindex(require(j, "exponent", path), at(path, "exponent"), dim));
    if (kind == "inverse_distance") {
        auto src = read_reals(require(j, "source", path), at(path, "source"), dim);
        const json* p = optional_field(j, "power");
        const double power = p ? read_real(*p, at(path, "power")) : 1.0;
        return guarded(path, [&] { return ModelFunction::inverse_distance(std::move(src), power); });
    }
    if (kind == "constant") return ModelFunction::constant();
    if (kind == "sinusoid") {
        auto freq = read_reals(require(j, "frequency", path), at(path, "frequency"), dim);
        const json* ph = optional_field(j, "phase");
        const double phase = ph ? read_real(*ph, at(path, "phase")) : 0.0;
        auto flavor = basis::Sinusoid::Flavor::Sin;
        if (const json* fl = optional_field(j, "flavor")) {
            const std::string s = read_string(*fl, at(path, "flavor"));
            if (s == "cos") flavor = basis::Sinusoid::Flavor::Cos;
            else if (s != "sin") schema(at(path, "flavor"), "expected \"sin\" or \"cos\"");
        }
        return ModelFunction::sinusoid(std::move(freq), phase, flavor);
    }
    if (kind == "polynomial") {
        const std::string expr = read_string(require(j, "expr", path), at(path, "expr"));
        return guarded(path, [&] { return parse_polynomial(expr, dim); });
    }
    if (kind == "coordinate") {
        const std::size_t axis = read_index(require(j, "axis", path), at(path, "axis"));
        if (axis >= dim) schema(at(path, "axis"), "axis out of range");
        return ModelFunction::coordinate(axis);
    }
    if (kind == "scalar") return ModelFunction::scalar(read_real(require(j, "value", path), at(path, "value")));
    if (kind == "sum" || kind == "product") {
        const json& terms = require(j, "terms", path);
        if (!terms.is_array() || terms.empty()) schema(at(path, "terms"), "expected a non-empty array");
        std::vector<ModelFunction> parts;
        for (std::size_t i = 0; i < terms.size(); ++i)
            parts.push_back(function_from_json(terms[i], dim, at(at(path, "terms"), i)));
        return kind == "sum" ? ModelFunction::sum(std::move(parts)) : ModelFunction::product(std::move(parts));
    }
    schema(at(path, "kind"), "unknown function kind '" + kind + "'");
}

// ---- targets ----

json target_to_json(const TargetSpec& t) {
    return std::visit(
        overloaded{
            [](const target::Interpolate& s) -> json { return {{"kind", "interpolate"}, {"point", s.point}}; },
            [](const target::Derivative& s) -> json {
                return {{"kind", "derivative"}, {"point", s.point}, {"order", s.order.exponents()}};
            },
            [](const target::Isolate& s) -> json { return {{"kind", "isolate"}, {"index", s.index}}; },
            [](const target::LinearFunctional& s) -> json { return {{"kind", "functional"}, {"b", s.b}}; },
            [](const target::Combination& s) -> json {
                json terms = json::array();
                for (const auto& w : s.terms) terms.push_back({{"weight", w.weight}, {"target", target_to_json(w.target)}});
                return {{"kind", "combination"}, {"terms", terms}};
            },
        },
        t.kind);
}

TargetSpec target_from_json(const json& j, std::size_t dim, const std::string& path) {
    const std::string kind = read_string(require(j, "kind", path), at(path, "kind"));
    TargetSpec t;
    if (kind == "interpolate") {
        t.kind = target::Interpolate{read_reals(require(j, "point", path), at(path, "point"), dim)};
    } else if (kind == "derivative") {
        t.kind = target::Derivative{read_reals(require(j, "point", path), at(path, "point"), dim),
                                    read_multiindex(require(j, "order", path), at(path, "order"), dim)};
    } else if (kind == "isolate") {
        t.kind = target::Isolate{read_index(require(j, "index", path), at(path, "index"))};
    } else if (kind == "functional") {
        t.kind = target::LinearFunctional{read_reals(require(j, "b", path), at(path, "b"))};
    } else if (kind == "combination") {
        const json& terms = require(j, "terms", path);
        if (!terms.is_array() || terms.empty()) schema(at(path, "terms"), "expected a non-empty array");
        target::Combination c;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const std::string p = at(at(path, "terms"), i);
            const json* w = optional_field(terms[i], "weight");
            c.terms.push_back(target::Weighted{w ? read_real(*w, at(p, "weight")) : 1.0,
                                               target_from_json(require(terms[i], "target", p), dim, at(p, "target"))});
        }
        t.kind = std::move(c);
    } else {
        schema(at(path, "kind"), "unknown target kind '" + kind + "'");
    }
    return t;
}

// ---- scenario ----

Weights WeightsConfig::build() const {
    if (diagonal) return Weights::diagonal(*diagonal);
    if (full) {
        const auto n = static_cast<Eigen::Index>(full->size());
        Eigen::MatrixXd m(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& row = (*full)[static_cast<std::size_t>(i)];
            if (static_cast<Eigen::Index>(row.size()) != n) fail(ErrorKind::InvalidArgument, "weight matrix is not square");
            for (Eigen::Index k = 0; k < n; ++k) m(i, k) = row[static_cast<std::size_t>(k)];
        }
        return Weights::full(std::move(m));
    }
    return Weights::identity();
}

EstimationContext Scenario::context() const {
    EstimationContext ctx;
    ctx.sensors = sensors;
    if (model.type == ModelConfig::Type::Monomials) ctx.lower_set = model.lower_set;
    else ctx.model = model.functions;
    if (weights) ctx.weights = weights->build();
    return ctx;
}

Scenario scenario_from_json(const json& j) {
    const std::string root = "$";
    if (!j.is_object()) schema(root, "expected an object");
    Scenario s;
    const long long version = read_int(require(j, "version", root), "$.version");
    if (version != 1) schema("$.version", "unsupported version " + std::to_string(version));
    s.version = 1;

    const long long dim = read_int(require(j, "dimension", root), "$.dimension");
    if (dim < 1) schema("$.dimension", "must be at least 1");
    s.dimension = static_cast<std::size_t>(dim);

    const json& sensors = require(j, "sensors", root);
    if (!sensors.is_array()) schema("$.sensors", "expected an array of points");
    if (sensors.empty()) schema("$.sensors", "at least one sensor is required");
    std::vector<Point> pts;
    for (std::size_t i = 0; i < sensors.size(); ++i)
        pts.push_back(read_reals(sensors[i], at("$.sensors", i), s.dimension));
    std::vector<std::string> labels;
    if (const json* lj = optional_field(j, "sensor_labels")) {
        if (!lj->is_array() || lj->size() != pts.size())
            schema("$.sensor_labels", "expected one label per sensor");
        for (std::size_t i = 0; i < lj->size(); ++i) labels.push_back(read_string((*lj)[i], at("$.sensor_labels", i)));
    }
    s.sensors = PointSet(s.dimension, std::move(pts), std::move(labels));
    guarded("$.sensors", [&] { s.sensors.require_distinct(); });

    const json& model = require(j, "model", root);
    const std::string type = read_string(require(model, "type", "$.model"), "$.model.type");
    if (type == "monomials") {
        s.model.type = ModelConfig::Type::Monomials;
        const json& lj = require(model, "lower_set", "$.model");
        if (lj.is_string()) {
            if (lj.get<std::string>() != "auto") schema("$.model.lower_set", "expected \"auto\" or a list of multi-indices");
            s.model.auto_lower_set = true;
            auto cert = find_lower_set_relabeling(s.sensors);
            if (!cert)
                fail(ErrorKind::InvalidArgument,
                     "$.model.lower_set: sensors are not relabel-equivalent to any lower set; give the lower set explicitly");
            s.model.lower_set = cert->lower_set;
            s.model.certificate = std::move(cert);
        } else {
            if (!lj.is_array()) schema("$.model.lower_set", "expected \"auto\" or a list of multi-indices");
            std::vector<MultiIndex> elems;
            for (std::size_t i = 0; i < lj.size(); ++i)
                elems.push_back(read_multiindex(lj[i], at("$.model.lower_set", i), s.dimension));
            s.model.lower_set = guarded("$.model.lower_set", [&] { return LowerSet::from_elements(std::move(elems)); });
        }
        if (s.model.lower_set->size() != s.sensors.size())
            fail(ErrorKind::InvalidArgument, "$.model.lower_set: has " + std::to_string(s.model.lower_set->size()) +
                                                 " elements for " + std::to_string(s.sensors.size()) + " sensors");
    } else if (type == "functions") {
        s.model.type = ModelConfig::Type::Functions;
        const json& fj = require(model, "functions", "$.model");
        if (!fj.is_array() || fj.empty()) schema("$.model.functions", "expected a non-empty array");
        std::vector<ModelFunction> fs;
        for (std::size_t i = 0; i < fj.size(); ++i)
            fs.push_back(function_from_json(fj[i], s.dimension, at("$.model.functions", i)));
        s.model.functions = guarded("$.model.functions", [&] { return ModelSpec(s.dimension, std::move(fs)); });
    } else {
        schema("$.model.type", "expected \"monomials\" or \"functions\"");
    }

    if (const json* fv = optional_field(j, "field_values")) {
        if (fv->is_array() && fv->size() != s.sensors.size())
            fail(ErrorKind::InvalidArgument, "$.field_values: has " + std::to_string(fv->size()) + " entries for " +
                                                 std::to_string(s.sensors.size()) + " sensors");
        s.field_values = read_reals(*fv, "$.field_values");
    }

    if (const json* wj = optional_field(j, "weights")) {
        if (!wj->is_object()) schema("$.weights", "expected an object");
        WeightsConfig w;
        if (const json* d = optional_field(*wj, "diagonal")) {
            w.diagonal = read_reals(*d, "$.weights.diagonal", s.sensors.size());
        } else if (const json* f = optional_field(*wj, "full")) {
            if (!f->is_array() || f->size() != s.sensors.size())
                schema("$.weights.full", "expected a square matrix with one row per sensor");
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < f->size(); ++i)
                rows.push_back(read_reals((*f)[i], at("$.weights.full", i), s.sensors.size()));
            w.full = std::move(rows);
        } else {
            schema("$.weights", "expected \"diagonal\" or \"full\"");
        }
        guarded("$.weights", [&] { (void)w.build(); });
        s.weights = std::move(w);
    }

    if (const json* rj = optional_field(j, "resources")) {
        Resources r;
        r.total = read_real(require(*rj, "N", "$.resources"), "$.resources.N");
        if (!(r.total > 0.0)) schema("$.resources.N", "must be positive");
        if (const json* m = optional_field(*rj, "repetitions")) {
            const long long reps = read_int(*m, "$.resources.repetitions");
            if (reps < 1) schema("$.resources.repetitions", "must be at least 1");
            r.repetitions = static_cast<int>(reps);
        }
        s.resources = r;
    }

    if (const json* fj = optional_field(j, "field")) s.field = function_from_json(*fj, s.dimension, "$.field");

    if (const json* tj = optional_field(j, "targets")) {
        if (!tj->is_array()) schema("$.targets", "expected an array");
        const std::size_t model_size =
            s.model.functions ? s.model.functions->size() : s.model.lower_set->size();
        for (std::size_t i = 0; i < tj->size(); ++i) {
            const std::string p = at("$.targets", i);
            NamedTarget nt;
            const json* id = optional_field((*tj)[i], "id");
            nt.id = id ? read_string(*id, at(p, "id")) : "t" + std::to_string(i);
            nt.spec = target_from_json((*tj)[i], s.dimension, p);
            guarded(p, [&] { validate_target(nt.spec, s.dimension, model_size); });
            s.targets.push_back(std::move(nt));
        }
    }
    return s;
}

json to_json(const Scenario& s) {
    json j;
    j["version"] = s.version;
    j["dimension"] = s.dimension;
    j["sensors"] = to_json(s.sensors);
    if (!s.sensors.labels().empty()) j["sensor_labels"] = s.sensors.labels();
    json model;
    if (s.model.type == ModelConfig::Type::Monomials) {
        model["type"] = "monomials";
        model["lower_set"] = s.model.auto_lower_set ? json("auto") : to_json(*s.model.lower_set);
    } else {
        model["type"] = "functions";
        json fs = json::array();
        for (const auto& f : s.model.functions->functions()) fs.push_back(function_to_json(f));
        model["functions"] = fs;
    }
    j["model"] = model;
    if (s.field_values) j["field_values"] = *s.field_values;
    if (s.weights) {
        if (s.weights->diagonal) j["weights"] = {{"diagonal", *s.weights->diagonal}};
        else if (s.weights->full) j["weights"] = {{"full", *s.weights->full}};
    }
    if (s.resources) j["resources"] = {{"N", s.resources->total}, {"repetitions", s.resources->repetitions}};
    if (s.field) j["field"] = function_to_json(*s.field);
    json targets = json::array();
    for (const auto& t : s.targets) {
        json tj = target_to_json(t.spec);
        tj["id"] = t.id;
        targets.push_back(tj);
    }
    j["targets"] = targets;
    return j;
}

Scenario load_scenario(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Schema, std::string("invalid JSON: ") + e.what());
    }
    return scenario_from_json(j);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open scenario file '" + path + "'");
    return load_scenario(in);
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
    out << to_json(s).dump(2) << '\n';
    if (!out) fail(ErrorKind::Io, "write to '" + path + "' failed");
}

// ---- results ----

json to_json(const LowerSet& l) {
    json a = json::array();
    for (const auto& e : l.elements()) a.push_back(e.exponents());
    return a;
}

json to_json(const PointSet& x) { return x.points(); }

json to_json(const Relabeling& r) {
    json axes = json::array();
    for (const auto& a : r.axes) axes.push_back({{"values", a.values}, {"labels", a.labels}, {"collapsed", a.collapsed}});
    return axes;
}

json to_json(const AllocationResult& a) {
    json j{{"strategy", to_string(a.strategy)},
           {"n", a.n},
           {"variance", a.variance},
           {"total", a.total},
           {"repetitions", a.repetitions}};
    if (a.strategy == Strategy::General) {
        j["p"] = a.p;
        j["q"] = a.q;
    }
    return j;
}

json to_json(const RoundedAllocation& r) {
    return {{"n", r.n}, {"variance", r.variance}, {"penalty", r.penalty}};
}

json to_json(const Estimator& e) {
    json j{{"c", e.c},
           {"method", to_string(e.method)},
           {"target", target_to_json(e.target)},
           {"condition_number", e.condition_number},
           {"condition_warning", e.condition_warning()},
           {"error_free", e.error_free}};
    if (e.bias_direction) j["bias_direction"] = *e.bias_direction;
    if (!e.axis_scale.empty()) j["axis_scale"] = e.axis_scale;
    j["warnings"] = e.warnings;
    return j;
}

ResultRecord make_record(const Scenario& s, const NamedTarget& t, const Estimator& e,
                         const std::vector<Strategy>& strategies) {
    ResultRecord r{t.id, e, std::nullopt, {}};
    if (s.field_values) r.predicted = e.apply(*s.field_values);
    const double total = s.resources ? s.resources->total : 1.0;
    const int reps = s.resources ? s.resources->repetitions : 1;
    bool nonzero = false;
    for (double v : e.c) nonzero = nonzero || v != 0.0;
    if (nonzero) {
        for (Strategy st : strategies) r.variances[to_string(st)] = allocate(st, e.c, total, reps).variance;
    }
    return r;
}

json to_json(const ResultRecord& r) {
    json j{{"id", r.id}, {"estimator", to_json(r.estimator)}, {"variances", r.variances}};
    if (r.predicted) j["predicted"] = *r.predicted;
    return j;
}

// ---- grid CSV ----

void emit_grid_csv(std::ostream& out, const std::vector<GridRow>& rows, std::size_t dim) {
    for (std::size_t a = 0; a < dim; ++a) out << 'x' << (a + 1) << ',';
    out << "value\n";
    char buf[64];
    for (const auto& row : rows) {
        if (row.x.size() != dim) fail(ErrorKind::InvalidArgument, "grid row has the wrong dimension");
        for (double v : row.x) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", row.value);
        out << buf << '\n';
    }
}

void emit_grid_csv(const std::string& path, const std::vector<GridRow>& rows, std::size_t dim) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
    emit_grid_csv(out, rows, dim);
    out.flush();
    if (!out) fail(ErrorKind::Io, "write to '" + path + "' failed");
}

std::vector<GridRow> read_grid_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::Io, "empty CSV");
    const auto cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    std::vector<GridRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
        if (vals.size() != cols) fail(ErrorKind::Io, "CSV row has " + std::to_string(vals.size()) + " columns");
        rows.push_back(GridRow{Point(vals.begin(), vals.end() - 1), vals.back()});
    }
    return rows;
}

}  // namespace fieldest
