#include "ecomason/params.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <variant>

namespace ecomason {

namespace {

struct KeySpec {
    std::string_view key;
    std::variant<double BuildingParams::*, int BuildingParams::*> field;
    double scale;  // override unit -> stored unit
};

const std::array<KeySpec, 37> kKeys = {{
    {"n_rm", &BuildingParams::n_rm, 1.0},
    {"A_fl_min", &BuildingParams::A_fl_min, 1.0},
    {"l_fl_min", &BuildingParams::l_fl_min, 1.0},
    {"l_fl_max", &BuildingParams::l_fl_max, 1.0},
    {"h_wa_min", &BuildingParams::h_wa_min, 1.0},
    {"h_wa_max", &BuildingParams::h_wa_max, 1.0},
    {"t_wa_max", &BuildingParams::t_wa_max, 1.0},
    {"h_do", &BuildingParams::h_do, 1.0},
    {"w_do_min", &BuildingParams::w_do_min, 1.0},
    {"l_wi_min", &BuildingParams::l_wi_min, 1.0},
    {"n_re_min", &BuildingParams::n_re_min, 1.0},
    {"d_re", &BuildingParams::d_re, 1.0},
    {"s_re_min", &BuildingParams::s_re_min, 1.0},
    {"C_re", &BuildingParams::C_re, 1.0},
    {"E_re", &BuildingParams::E_re, 1.0},
    {"rho_re", &BuildingParams::rho_re, 1.0},
    {"P_L", &BuildingParams::P_L, 1.0},
    {"P_design", &BuildingParams::P_design, 1.0},
    {"C_f", &BuildingParams::C_f, 1.0},
    {"C", &BuildingParams::C, 1.0},
    {"Z", &BuildingParams::Z, 1.0},
    {"I", &BuildingParams::I, 1.0},
    {"K", &BuildingParams::K, 1.0},
    {"tau_allw", &BuildingParams::tau_allw, 1e6},
    {"sigma_t_allw", &BuildingParams::sigma_t_allw, 1e6},
    {"g", &BuildingParams::g, 1.0},
    {"A_be", &BuildingParams::A_be, 1.0},
    {"A_ra", &BuildingParams::A_ra, 1.0},
    {"w_be", &BuildingParams::w_be, 1.0},
    {"s_be_max", &BuildingParams::s_be_max, 1.0},
    {"R_be", &BuildingParams::R_be, 1.0},
    {"R_co", &BuildingParams::R_co, 1.0},
    {"n_slc_min", &BuildingParams::n_slc_min, 1.0},
    {"n_slc_max", &BuildingParams::n_slc_max, 1.0},
    {"h_fo", &BuildingParams::h_fo, 1.0},
    {"B_fo", &BuildingParams::B_fo, 1.0},
    {"B_avail", &BuildingParams::B_avail, 1.0},
}};

std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

}  // namespace

void BuildingParams::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ParamError(what);
    };
    require(n_rm >= 1, "n_rm must be at least 1");
    require(A_fl_min >= 0.0, "A_fl_min must be nonnegative");
    require(l_fl_min > 0.0 && l_fl_min <= l_fl_max, "floor length bounds invalid");
    require(h_wa_min > 0.0 && h_wa_min <= h_wa_max, "wall height bounds invalid");
    require(t_wa_max > 0.0, "t_wa_max must be positive");
    require(h_do > 0.0 && w_do_min > 0.0 && l_wi_min > 0.0, "opening sizes must be positive");
    require(n_re_min >= 1 && d_re > 0.0 && s_re_min >= 0.0, "rebar data invalid");
    require(C_re >= 0.0 && E_re >= 0.0 && rho_re > 0.0, "rebar price data invalid");
    require(P_L >= 0.0 && P_design >= 0.0 && C_f >= 0.0, "loads must be nonnegative");
    require(C >= 0.0 && Z >= 0.0 && I >= 0.0 && K >= 0.0, "seismic factors must be nonnegative");
    require(tau_allw > 0.0 && sigma_t_allw > 0.0, "allowable stresses must be positive");
    require(g > 0.0, "g must be positive");
    require(A_be > 0.0 && A_ra > 0.0 && w_be > 0.0 && s_be_max >= 0.0, "roof section data invalid");
    require(R_be >= 0.0 && R_co >= 0.0, "roof ratios must be nonnegative");
    require(n_slc_min >= 1 && n_slc_min <= n_slc_max, "slice count bounds invalid");
    require(h_fo > 0.0 && B_fo > 0.0, "foundation dimensions must be positive");
    require(B_avail > 0.0, "B_avail must be positive");
}

void apply_override(BuildingParams& params, std::string_view key, double value) {
    for (const auto& spec : kKeys) {
        if (spec.key != key) continue;
        if (!std::isfinite(value) && key != "B_avail")
            throw ParamError("override " + std::string(key) + " must be finite");
        if (auto p = std::get_if<int BuildingParams::*>(&spec.field)) {
            if (value != std::floor(value)) throw ParamError("override " + std::string(key) + " must be an integer");
            params.*(*p) = static_cast<int>(value);
        } else {
            params.*std::get<double BuildingParams::*>(spec.field) = value * spec.scale;
        }
        return;
    }
    throw ParamError("unknown parameter key: " + std::string(key));
}

BuildingParams apply_overrides(BuildingParams params, const std::map<std::string, double>& overrides) {
    for (const auto& [key, value] : overrides) apply_override(params, key, value);
    params.validate();
    return params;
}

std::map<std::string, double> parse_override_document(std::istream& in) {
    std::map<std::string, double> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ParamError("line " + std::to_string(line_no) + ": expected key=value");
        auto key = trim(view.substr(0, eq));
        auto text = trim(view.substr(eq + 1));
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size())
            throw ParamError("line " + std::to_string(line_no) + ": bad value for " + std::string(key));
        BuildingParams probe;
        apply_override(probe, key, value);
        out[std::string(key)] = value;
    }
    return out;
}

std::map<std::string, double> to_key_values(const BuildingParams& params) {
    std::map<std::string, double> out;
    for (const auto& spec : kKeys) {
        if (auto p = std::get_if<int BuildingParams::*>(&spec.field))
            out[std::string(spec.key)] = params.*(*p);
        else
            out[std::string(spec.key)] = params.*std::get<double BuildingParams::*>(spec.field) / spec.scale;
    }
    return out;
}

}  // namespace ecomason
