#pragma once

#include <string>

#include <json.hpp>

#include "ecomason/pareto.hpp"

namespace ecomason {

inline constexpr const char* kFrontCsvHeader =
    "cost_usd,ee_GJ,wall,foundation,roof,cover,n_slc,w_do_m,l_wi_m,v_wa_tot_m3,t_wa_m,h_wa_m,l_x_fl_m,l_y_fl_m,t_fo_m";

std::string front_to_csv(const ParetoFront& front);
// Same rows, read from the JSON form without re-deriving designs.
std::string front_json_to_csv(const nlohmann::json& front);

nlohmann::json material_to_json(const MaterialSpec& m);
MaterialSpec material_from_json(const nlohmann::json& j);
nlohmann::json design_to_json(const Design& d);
// Re-derives state, cost and EE from the stored assignment and point.
Design design_from_json(const nlohmann::json& j, const BuildingParams& params);
nlohmann::json cluster_to_json(const DesignCluster& c);
nlohmann::json params_to_json(const BuildingParams& params);
BuildingParams params_from_json(const nlohmann::json& j);

nlohmann::json front_to_json(const ParetoFront& front);
ParetoFront front_from_json(const nlohmann::json& j);

}  // namespace ecomason
