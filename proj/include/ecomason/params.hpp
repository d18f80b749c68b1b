#pragma once

#include <iosfwd>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ecomason {

class ParamError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Fixed model parameters in SI units. Stresses are held in Pa.
struct BuildingParams {
    int n_rm = 3;
    double A_fl_min = 10.0;  // m^2 per room
    double l_fl_min = 2.0;
    double l_fl_max = 4.5;
    double h_wa_min = 2.7;
    double h_wa_max = 3.8;
    double t_wa_max = 1.1;
    double h_do = 2.0;
    double w_do_min = 1.1;
    double l_wi_min = 1.0;
    int n_re_min = 2;
    double d_re = 0.012;
    double s_re_min = 0.05;
    double C_re = 17.3;    // USD/m
    double E_re = 37.95;   // MJ/kg
    double rho_re = 0.89;  // kg/m
    double P_L = 2000.0;       // N/m^2
    double P_design = 8120.0;  // N/m^2
    double C_f = 1.0;
    double C = 0.08;
    double Z = 1.1;
    double I = 1.0;
    double K = 4.0;
    double tau_allw = 0.5e6;      // Pa
    double sigma_t_allw = 0.12e6;  // Pa
    double g = 9.8;
    double A_be = 0.0253;
    double A_ra = 0.0065;
    double w_be = 0.11;
    double s_be_max = 0.5;
    double R_be = 0.4027;
    double R_co = 0.0628;
    int n_slc_min = 2;
    int n_slc_max = 20;
    double h_fo = 1.1;
    double B_fo = 0.8;
    double B_avail = std::numeric_limits<double>::infinity();

    double seismic_coefficient() const { return C * Z * I * K; }
    double big_m_wall() const { return l_fl_max - l_fl_min; }

    // Throws ParamError when bounds are inverted or magnitudes are nonpositive.
    void validate() const;

    bool operator==(const BuildingParams&) const = default;
};

// Keys are ASCII names such as "B_fo" or "tau_allw"; stress keys take MPa.
void apply_override(BuildingParams& params, std::string_view key, double value);
BuildingParams apply_overrides(BuildingParams params, const std::map<std::string, double>& overrides);
// Parses "key=value" lines; '#' starts a comment.
std::map<std::string, double> parse_override_document(std::istream& in);
// Every overridable key with its current value, in override units.
std::map<std::string, double> to_key_values(const BuildingParams& params);

}  // namespace ecomason
