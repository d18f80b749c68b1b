#include <filesystem>
#include <fstream>
#include <sstream>

#include "ecomason/canonical_json.hpp"
#include "ecomason/enumerator.hpp"

#ifndef ECOMASON_DEFAULT_CATALOG
#define ECOMASON_DEFAULT_CATALOG "data/nepal_catalog.csv"
#endif

namespace ecomason {

using nlohmann::json;

std::string default_catalog_path() {
    if (const char* env = std::getenv("ECOMASON_CATALOG")) return env;
    return ECOMASON_DEFAULT_CATALOG;
}

ScenarioConfig default_scenario() {
    ScenarioConfig s;
    s.rules.push_back(ScenarioRule::link_brick_grades());
    s.finalize();
    return s;
}

void ScenarioConfig::finalize() {
    MaterialCatalog base;
    if (catalog_override) {
        base = *catalog_override;
    } else {
        base = load_catalog_file(catalog_path.empty() ? default_catalog_path() : catalog_path);
    }
    catalog = filter_available(base, exclude_materials);
    try {
        params = apply_overrides(BuildingParams{}, param_overrides);
    } catch (const ParamError& e) {
        throw ScenarioError(e.what());
    }
    for (const auto& rule : rules) {
        if (rule.kind != ScenarioRule::Kind::FixMaterial) continue;
        if (!catalog.find(rule.material, rule.component))
            throw ScenarioError("fixed material not available: " + std::string(to_string(rule.component)) + " " +
                                rule.material);
    }
    if (solver.starts < 1) throw ScenarioError("solver.starts must be at least 1");
    if (!(solver.tolerance > 0.0)) throw ScenarioError("solver.tolerance must be positive");
    if (!(solver.penalty_growth > 1.0)) throw ScenarioError("solver.penalty_growth must exceed 1");
    if (solver.max_iterations < 1) throw ScenarioError("solver.max_iterations must be at least 1");
}

namespace {

json rule_to_json(const ScenarioRule& r) {
    if (r.kind == ScenarioRule::Kind::LinkBrickGrades) return "link_brick_grades";
    if (r.component == ComponentClass::Wall) return json{{"rule", "fix_wall_material"}, {"material", r.material}};
    return json{{"rule", "fix_material"}, {"class", std::string(to_string(r.component))}, {"material", r.material}};
}

ScenarioRule rule_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "link_brick_grades") return ScenarioRule::link_brick_grades();
        throw ScenarioError("unknown rule: " + j.get<std::string>());
    }
    if (!j.is_object() || !j.contains("rule")) throw ScenarioError("rule entries need a 'rule' field");
    const auto name = j.at("rule").get<std::string>();
    if (name == "link_brick_grades") return ScenarioRule::link_brick_grades();
    if (name == "fix_wall_material") return ScenarioRule::fix_wall_material(j.at("material").get<std::string>());
    if (name == "fix_material")
        return ScenarioRule::fix_material(parse_component_class(j.at("class").get<std::string>()),
                                          j.at("material").get<std::string>());
    throw ScenarioError("unknown rule: " + name);
}

json solver_to_json(const SolverConfig& c) {
    return json{{"starts", c.starts},
                {"tolerance", c.tolerance},
                {"seed", c.seed},
                {"max_iterations", c.max_iterations},
                {"penalty_growth", c.penalty_growth}};
}

void solver_from_json(const json& j, SolverConfig& c) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& k = it.key();
        if (k == "starts") c.starts = it->get<int>();
        else if (k == "tolerance") c.tolerance = it->get<double>();
        else if (k == "seed") c.seed = it->get<std::uint64_t>();
        else if (k == "max_iterations") c.max_iterations = it->get<int>();
        else if (k == "penalty_growth") c.penalty_growth = it->get<double>();
        else throw ScenarioError("unknown solver key: " + k);
    }
}

}  // namespace

std::string ScenarioConfig::fingerprint() const {
    json doc;
    doc["catalog"] = serialize_catalog(catalog);
    doc["params"] = to_key_values(params);
    json rules_json = json::array();
    for (const auto& r : rules) rules_json.push_back(rule_to_json(r));
    doc["rules"] = rules_json;
    doc["solver"] = solver_to_json(solver);
    doc["objective"] = objective == ScenarioObjective::MinCost ? "min_cost" : "min_EE";
    doc["exhaustive_rebar"] = exhaustive_rebar;
    return hex_digest(canonical_dump(doc));
}

ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object");
    ScenarioConfig s;
    s.rules.push_back(ScenarioRule::link_brick_grades());
    try {
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            const auto& k = it.key();
            const auto& v = it.value();
            if (k == "catalog_path") {
                std::filesystem::path p = v.get<std::string>();
                if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
                s.catalog_path = p.string();
            } else if (k == "exclude_materials") {
                for (const auto& m : v) s.exclude_materials.insert(m.get<std::string>());
            } else if (k == "param_overrides") {
                for (auto p = v.begin(); p != v.end(); ++p) s.param_overrides[p.key()] = p->get<double>();
            } else if (k == "rules") {
                s.rules.clear();
                for (const auto& r : v) s.rules.push_back(rule_from_json(r));
            } else if (k == "solver") {
                solver_from_json(v, s.solver);
            } else if (k == "objective") {
                const auto o = v.get<std::string>();
                if (o == "min_EE") s.objective = ScenarioObjective::MinEmbodiedEnergy;
                else if (o == "min_cost") s.objective = ScenarioObjective::MinCost;
                else throw ScenarioError("unknown objective: " + o);
            } else if (k == "exhaustive_rebar") {
                s.exhaustive_rebar = v.get<bool>();
            } else {
                throw ScenarioError("unknown scenario section: " + k);
            }
        }
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario schema violation: ") + e.what());
    }
    s.finalize();
    return s;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), std::filesystem::path(path).parent_path().string());
}

std::string scenario_to_json(const ScenarioConfig& s) {
    json doc;
    if (!s.catalog_path.empty()) doc["catalog_path"] = s.catalog_path;
    doc["exclude_materials"] = s.exclude_materials;
    doc["param_overrides"] = s.param_overrides;
    json rules_json = json::array();
    for (const auto& r : s.rules) rules_json.push_back(rule_to_json(r));
    doc["rules"] = rules_json;
    doc["solver"] = solver_to_json(s.solver);
    doc["objective"] = s.objective == ScenarioObjective::MinCost ? "min_cost" : "min_EE";
    doc["exhaustive_rebar"] = s.exhaustive_rebar;
    return doc.dump(2);
}

}  // namespace ecomason
