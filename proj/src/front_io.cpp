#include "ecomason/front_io.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace ecomason {

using nlohmann::json;

std::string front_json_to_csv(const json& front) {
    std::ostringstream os;
    os << kFrontCsvHeader << '\n';
    os << std::setprecision(10);
    auto num = [&](const json& v) {
        if (v.is_null()) os << "nan";
        else os << v.get<double>();
    };
    for (const auto& p : front.at("points")) {
        const auto& d = p.at("design");
        const auto& a = d.at("assignment");
        const auto& x = d.at("point");
        num(d.at("cost_usd"));
        os << ',';
        num(d.at("ee_GJ"));
        os << ',' << a.at("wall").at("name").get<std::string>() << ',' << a.at("foundation").at("name").get<std::string>()
           << ',' << a.at("roof").at("name").get<std::string>() << ',' << a.at("cover").at("name").get<std::string>()
           << ',' << a.at("n_slc").get<int>();
        for (const auto* key : {"w_do", "l_wi"}) {
            os << ',';
            num(x.at(key));
        }
        os << ',';
        num(d.at("derived").at("v_wa_tot_m3"));
        for (const auto* key : {"t_wa", "h_wa", "l_x_fl", "l_y_fl", "t_fo"}) {
            os << ',';
            num(x.at(key));
        }
        os << '\n';
    }
    return os.str();
}

std::string front_to_csv(const ParetoFront& front) { return front_json_to_csv(front_to_json(front)); }

json material_to_json(const MaterialSpec& m) {
    json j{{"name", m.name},
           {"grade", std::string(to_string(m.grade))},
           {"class", std::string(to_string(m.component))},
           {"density_kg_m3", m.density},
           {"cost_usd_m3", m.unit_cost},
           {"ee_MJ_kg", m.embodied_energy},
           {"sigma_allw_MPa", nullptr},
           {"min_thickness_m", nullptr}};
    if (m.allowable_compressive) j["sigma_allw_MPa"] = *m.allowable_compressive / 1e6;
    if (m.min_thickness) j["min_thickness_m"] = *m.min_thickness;
    return j;
}

MaterialSpec material_from_json(const json& j) {
    MaterialSpec m;
    m.name = j.at("name").get<std::string>();
    m.grade = parse_grade(j.at("grade").get<std::string>());
    m.component = parse_component_class(j.at("class").get<std::string>());
    m.density = j.at("density_kg_m3").get<double>();
    m.unit_cost = j.at("cost_usd_m3").get<double>();
    m.embodied_energy = j.at("ee_MJ_kg").get<double>();
    if (j.contains("sigma_allw_MPa") && !j["sigma_allw_MPa"].is_null())
        m.allowable_compressive = j["sigma_allw_MPa"].get<double>() * 1e6;
    if (j.contains("min_thickness_m") && !j["min_thickness_m"].is_null())
        m.min_thickness = j["min_thickness_m"].get<double>();
    validate_material(m);
    return m;
}

json design_to_json(const Design& d) {
    const auto& a = d.assign;
    const auto& x = d.point;
    const auto& s = d.state;
    return json{
        {"cost_usd", d.cost},
        {"ee_GJ", d.ee},
        {"assignment",
         {{"wall", material_to_json(a.wall)},
          {"foundation", material_to_json(a.foundation)},
          {"roof", material_to_json(a.roof)},
          {"cover", material_to_json(a.cover)},
          {"n_slc", a.n_slc},
          {"n_re", a.n_re},
          {"x_e", a.x_e},
          {"x_wa", a.x_wa}}},
        {"point",
         {{"t_wa", x.t_wa},
          {"h_wa", x.h_wa},
          {"l_x_fl", x.l_x_fl},
          {"l_y_fl", x.l_y_fl},
          {"t_fo", x.t_fo},
          {"w_do", x.w_do},
          {"l_wi", x.l_wi}}},
        {"derived",
         {{"floor_area_m2", x.l_x_fl * x.l_y_fl},
          {"v_wa_tot_m3", s.v_wa_tot},
          {"v_fo_tot_m3", s.v_fo_tot},
          {"v_slc_tot_m3", s.v_slc_tot},
          {"v_co_tot_m3", s.v_co_tot},
          {"l_re_tot_m", s.l_re_tot},
          {"e_m", s.e}}},
        {"provenance",
         {{"seed", d.provenance.seed}, {"starts", d.provenance.starts}, {"solver_version", d.provenance.solver_version}}},
    };
}

Design design_from_json(const json& j, const BuildingParams& params) {
    const auto& a = j.at("assignment");
    DiscreteAssignment assign{material_from_json(a.at("wall")),
                              material_from_json(a.at("foundation")),
                              material_from_json(a.at("roof")),
                              material_from_json(a.at("cover")),
                              a.at("n_slc").get<int>(),
                              a.at("n_re").get<int>(),
                              a.at("x_e").get<bool>(),
                              a.at("x_wa").get<bool>()};
    const auto& p = j.at("point");
    ContinuousPoint point{p.at("t_wa").get<double>(), p.at("h_wa").get<double>(), p.at("l_x_fl").get<double>(),
                          p.at("l_y_fl").get<double>(), p.at("t_fo").get<double>(), p.at("w_do").get<double>(),
                          p.at("l_wi").get<double>()};
    Provenance prov;
    if (j.contains("provenance")) {
        const auto& pr = j["provenance"];
        prov.seed = pr.value("seed", std::uint64_t{0});
        prov.starts = pr.value("starts", 0);
        prov.solver_version = pr.value("solver_version", std::string{});
    }
    return make_design(params, assign, point, prov);
}

json cluster_to_json(const DesignCluster& c) {
    auto range = [](const std::pair<double, double>& r) { return json::array({r.first, r.second}); };
    return json{{"label", c.label},
                {"materials", c.material_tuple},
                {"n_slc", c.n_slc},
                {"members", c.members},
                {"cost_usd", range(c.cost)},
                {"ee_GJ", range(c.ee)},
                {"w_do_m", range(c.w_do)},
                {"l_wi_m", range(c.l_wi)},
                {"v_wa_tot_m3", range(c.v_wa_tot)},
                {"floor_area_m2", range(c.floor_area)}};
}

json params_to_json(const BuildingParams& params) {
    json j = json::object();
    for (const auto& [k, v] : to_key_values(params)) {
        if (std::isfinite(v)) j[k] = v;
        else j[k] = nullptr;
    }
    return j;
}

BuildingParams params_from_json(const json& j) {
    std::map<std::string, double> overrides;
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!it->is_null()) overrides[it.key()] = it->get<double>();
    return apply_overrides(BuildingParams{}, overrides);
}

json front_to_json(const ParetoFront& front) {
    json points = json::array();
    for (const auto& p : front.points) {
        json alts = json::array();
        for (const auto& a : p.alternatives) alts.push_back(design_to_json(a));
        points.push_back(json{{"x", p.x}, {"y", p.y}, {"design", design_to_json(p.design)}, {"alternatives", alts}});
    }
    json clusters = json::array();
    if (!front.points.empty())
        for (const auto& c : cluster_designs(front)) clusters.push_back(cluster_to_json(c));
    return json{{"axes", front.axes == FrontAxes::CostVsEe ? "cost_vs_ee" : "area_vs_ee"},
                {"scenario_fingerprint", front.scenario_fingerprint},
                {"instances_solved", front.instances_solved},
                {"params", params_to_json(front.params)},
                {"points", points},
                {"clusters", clusters}};
}

ParetoFront front_from_json(const json& j) {
    ParetoFront front;
    const auto axes = j.at("axes").get<std::string>();
    if (axes == "cost_vs_ee") front.axes = FrontAxes::CostVsEe;
    else if (axes == "area_vs_ee") front.axes = FrontAxes::AreaVsEe;
    else throw std::invalid_argument("unknown front axes: " + axes);
    front.scenario_fingerprint = j.value("scenario_fingerprint", std::string{});
    front.instances_solved = j.value("instances_solved", 0);
    front.params = j.contains("params") ? params_from_json(j["params"]) : BuildingParams{};
    for (const auto& pj : j.at("points")) {
        FrontPoint p;
        p.design = design_from_json(pj.at("design"), front.params);
        p.x = front.axes == FrontAxes::CostVsEe ? p.design.cost : p.design.point.l_x_fl * p.design.point.l_y_fl;
        p.y = p.design.ee;
        if (pj.contains("alternatives"))
            for (const auto& aj : pj["alternatives"]) p.alternatives.push_back(design_from_json(aj, front.params));
        front.points.push_back(std::move(p));
    }
    return front;
}

}  // namespace ecomason
