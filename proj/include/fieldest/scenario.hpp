/**
 * @file scenario.hpp
 * @brief Scenario files (JSON, version 1), result records and grid CSV output.
 *
 * A scenario names the sensors, the field model (monomials over an explicit
 * or automatically certified lower set, or a list of basis functions),
 * optional field readings, weights and resources, and a list of targets.
 * Everything is validated at load time; schema problems are reported with a
 * JSON path such as `$.sensors[2][1]`.
 */
#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fieldest/allocation.hpp"
#include "fieldest/estimators.hpp"
#include "fieldest/placement.hpp"
#include "fieldest/sweep.hpp"

namespace fieldest {

using json = nlohmann::json;

struct ModelConfig {
    enum class Type { Monomials, Functions };
    Type type = Type::Monomials;
    bool auto_lower_set = false;          ///< "lower_set": "auto"
    std::optional<LowerSet> lower_set;    ///< explicit, or resolved from the certificate
    std::optional<PlacementCertificate> certificate;  ///< set when auto resolution succeeded
    std::optional<ModelSpec> functions;
};

struct WeightsConfig {
    std::optional<std::vector<double>> diagonal;
    std::optional<std::vector<std::vector<double>>> full;

    Weights build() const;
};

struct Resources {
    double total = 0.0;
    int repetitions = 1;
};

struct NamedTarget {
    std::string id;
    TargetSpec spec;
};

struct Scenario {
    int version = 1;
    std::size_t dimension = 0;
    PointSet sensors;
    ModelConfig model;
    std::optional<std::vector<double>> field_values;
    std::optional<WeightsConfig> weights;
    std::optional<Resources> resources;
    std::vector<NamedTarget> targets;
    std::optional<ModelFunction> field;  ///< exact field, for error maps

    EstimationContext context() const;
};

Scenario load_scenario(const std::string& path);
Scenario load_scenario(std::istream& in);
Scenario scenario_from_json(const json& j);
json to_json(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

/// Polynomial expression in x, y, z (or x1, x2, ...): numbers, + - * /, ^ with
/// non-negative integer exponents, parentheses. Division only by constants.
ModelFunction parse_polynomial(const std::string& text, std::size_t dim);

json function_to_json(const ModelFunction& f);
ModelFunction function_from_json(const json& j, std::size_t dim, const std::string& path = "$");
json target_to_json(const TargetSpec& t);
TargetSpec target_from_json(const json& j, std::size_t dim, const std::string& path = "$");

json to_json(const LowerSet& l);
json to_json(const PointSet& x);
json to_json(const Relabeling& r);
json to_json(const AllocationResult& a);
json to_json(const RoundedAllocation& r);
json to_json(const Estimator& e);

/// One estimated target.
struct ResultRecord {
    std::string id;
    Estimator estimator;
    std::optional<double> predicted;  ///< present iff field values are
    std::map<std::string, double> variances;
};

ResultRecord make_record(const Scenario& s, const NamedTarget& t, const Estimator& e,
                         const std::vector<Strategy>& strategies);
json to_json(const ResultRecord& r);

/// Header x1,...,xm,value then one row per point; %.17g formatting.
void emit_grid_csv(std::ostream& out, const std::vector<GridRow>& rows, std::size_t dim);
void emit_grid_csv(const std::string& path, const std::vector<GridRow>& rows, std::size_t dim);

/// Reads a file written by emit_grid_csv.
std::vector<GridRow> read_grid_csv(std::istream& in);

}  // namespace fieldest
