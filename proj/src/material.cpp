#include "ecomason/material.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ecomason {

namespace {

constexpr std::string_view kHeader =
    "name,grade,class,density_kg_m3,cost_usd_m3,ee_MJ_kg,sigma_allw_MPa,min_thickness_m";

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_number(std::string_view cell, int line_no, std::string_view field) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw CatalogError("line " + std::to_string(line_no) + ": field " + std::string(field) +
                           " is not a number: '" + std::string(cell) + "'");
    }
    return v;
}

// Shortest decimal form that round-trips.
std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// Pa back to MPa text such that reloading (x 1e6) reproduces the stored value.
std::string format_mpa(double pa) {
    char buf[64];
    for (int precision = 1; precision <= 17; ++precision) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, pa / 1e6, std::chars_format::general, precision);
        double back = 0.0;
        std::from_chars(buf, ptr, back);
        if (back * 1e6 == pa) return std::string(buf, ptr);
    }
    return format_number(pa / 1e6);
}

}  // namespace

std::string_view to_string(Grade g) {
    switch (g) {
        case Grade::G1: return "G1";
        case Grade::G2: return "G2";
        case Grade::NotApplicable: return "n/a";
    }
    return "n/a";
}

std::string_view to_string(ComponentClass c) {
    switch (c) {
        case ComponentClass::Wall: return "wall";
        case ComponentClass::Foundation: return "foundation";
        case ComponentClass::Roof: return "roof";
        case ComponentClass::RoofCover: return "roof_cover";
    }
    return "wall";
}

Grade parse_grade(std::string_view text) {
    text = trim(text);
    if (text == "G1") return Grade::G1;
    if (text == "G2") return Grade::G2;
    if (text.empty() || text == "n/a" || text == "-") return Grade::NotApplicable;
    throw CatalogError("unknown grade: '" + std::string(text) + "'");
}

ComponentClass parse_component_class(std::string_view text) {
    text = trim(text);
    for (auto c : kAllClasses)
        if (text == to_string(c)) return c;
    throw CatalogError("unknown class: '" + std::string(text) + "'");
}

std::string MaterialSpec::family() const {
    auto end = name.find_last_not_of("0123456789");
    return end == std::string::npos ? name : name.substr(0, end + 1);
}

void validate_material(const MaterialSpec& m) {
    auto fail = [&](const std::string& why) {
        throw CatalogError("material " + m.name + " (" + std::string(to_string(m.component)) + "): " + why);
    };
    if (m.name.empty()) fail("empty name");
    if (!(m.density > 0.0)) fail("density must be positive");
    if (!(m.unit_cost >= 0.0)) fail("unit cost must be nonnegative");
    if (!(m.embodied_energy >= 0.0)) fail("embodied energy must be nonnegative");
    const bool structural =
        m.component == ComponentClass::Wall || m.component == ComponentClass::Foundation;
    if (m.component == ComponentClass::Wall && !m.allowable_compressive)
        fail("wall entries need an allowable compressive strength");
    if (!structural && m.allowable_compressive) fail("strength only applies to wall and foundation entries");
    if (m.allowable_compressive && !(*m.allowable_compressive > 0.0)) fail("strength must be positive");
    if (structural && !m.min_thickness) fail("missing minimum thickness");
    if (!structural && m.min_thickness) fail("minimum thickness only applies to wall and foundation entries");
    if (m.min_thickness && !(*m.min_thickness > 0.0)) fail("minimum thickness must be positive");
}

MaterialCatalog::MaterialCatalog(std::vector<MaterialSpec> entries) : entries_(std::move(entries)) {
    for (const auto& m : entries_) validate_material(m);
    for (std::size_t i = 0; i < entries_.size(); ++i)
        for (std::size_t j = i + 1; j < entries_.size(); ++j)
            if (entries_[i].name == entries_[j].name && entries_[i].component == entries_[j].component)
                throw CatalogError("duplicate material " + entries_[i].name + " in class " +
                                   std::string(to_string(entries_[i].component)));
    for (auto c : kAllClasses)
        if (count(c) == 0) throw EmptyClassError("empty class set: " + std::string(to_string(c)));
}

std::vector<MaterialSpec> MaterialCatalog::of_class(ComponentClass c) const {
    std::vector<MaterialSpec> out;
    for (const auto& m : entries_)
        if (m.component == c) out.push_back(m);
    return out;
}

const MaterialSpec* MaterialCatalog::find(std::string_view name, ComponentClass c) const {
    for (const auto& m : entries_)
        if (m.component == c && m.name == name) return &m;
    return nullptr;
}

bool MaterialCatalog::contains_name(std::string_view name) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const auto& m) { return m.name == name; });
}

std::size_t MaterialCatalog::count(ComponentClass c) const {
    return static_cast<std::size_t>(
        std::count_if(entries_.begin(), entries_.end(), [&](const auto& m) { return m.component == c; }));
}

MaterialCatalog load_catalog(std::istream& in) {
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    std::vector<MaterialSpec> entries;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        if (view.empty() || view.front() == '#') continue;
        if (!header_seen) {
            auto cols = split(view, ',');
            auto expected = split(kHeader, ',');
            if (cols != expected) throw CatalogError("line " + std::to_string(line_no) + ": unexpected header");
            header_seen = true;
            continue;
        }
        auto cells = split(view, ',');
        if (cells.size() != 8)
            throw CatalogError("line " + std::to_string(line_no) + ": expected 8 fields, got " +
                               std::to_string(cells.size()));
        static constexpr std::array<std::string_view, 6> required = {"name", "grade", "class", "density_kg_m3",
                                                                     "cost_usd_m3", "ee_MJ_kg"};
        for (std::size_t i = 0; i < required.size(); ++i)
            if (cells[i].empty() && i != 1)
                throw CatalogError("line " + std::to_string(line_no) + ": missing field " +
                                   std::string(required[i]));

        MaterialSpec base;
        base.name = std::string(cells[0]);
        try {
            base.grade = parse_grade(cells[1]);
        } catch (const CatalogError& e) {
            throw CatalogError("line " + std::to_string(line_no) + ": " + e.what());
        }
        base.density = parse_number(cells[3], line_no, "density_kg_m3");
        base.unit_cost = parse_number(cells[4], line_no, "cost_usd_m3");
        base.embodied_energy = parse_number(cells[5], line_no, "ee_MJ_kg");
        if (!cells[6].empty()) base.allowable_compressive = parse_number(cells[6], line_no, "sigma_allw_MPa") * 1e6;
        if (!cells[7].empty()) base.min_thickness = parse_number(cells[7], line_no, "min_thickness_m");

        for (auto part : split(cells[2], '+')) {
            MaterialSpec m = base;
            try {
                m.component = parse_component_class(part);
                validate_material(m);
            } catch (const CatalogError& e) {
                throw CatalogError("line " + std::to_string(line_no) + ": " + e.what());
            }
            entries.push_back(std::move(m));
        }
    }
    return MaterialCatalog(std::move(entries));
}

MaterialCatalog load_catalog_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CatalogError("cannot open catalog: " + path);
    return load_catalog(in);
}

std::string serialize_catalog(const MaterialCatalog& catalog) {
    std::ostringstream os;
    os << kHeader << '\n';
    const auto& entries = catalog.entries();
    std::vector<bool> written(entries.size(), false);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (written[i]) continue;
        const auto& m = entries[i];
        std::string cls(to_string(m.component));
        // Identical wall and foundation records share one row.
        if (m.component == ComponentClass::Wall) {
            for (std::size_t j = i + 1; j < entries.size(); ++j) {
                MaterialSpec other = entries[j];
                if (written[j] || other.component != ComponentClass::Foundation) continue;
                other.component = ComponentClass::Wall;
                if (other == m) {
                    written[j] = true;
                    cls = "wall+foundation";
                    break;
                }
            }
        }
        written[i] = true;
        os << m.name << ',' << (m.grade == Grade::NotApplicable ? "" : std::string(to_string(m.grade))) << ','
           << cls << ',' << format_number(m.density) << ',' << format_number(m.unit_cost) << ','
           << format_number(m.embodied_energy) << ','
           << (m.allowable_compressive ? format_mpa(*m.allowable_compressive) : "") << ','
           << (m.min_thickness ? format_number(*m.min_thickness) : "") << '\n';
    }
    return os.str();
}

MaterialCatalog filter_available(const MaterialCatalog& catalog, const std::set<std::string>& excluded) {
    struct Exclusion {
        std::string name;
        std::optional<ComponentClass> component;
    };
    std::vector<Exclusion> rules;
    for (const auto& raw : excluded) {
        Exclusion ex;
        auto colon = raw.find(':');
        if (colon == std::string::npos) {
            ex.name = raw;
            if (!catalog.contains_name(ex.name)) throw CatalogError("unknown material: " + raw);
        } else {
            ex.component = parse_component_class(std::string_view(raw).substr(0, colon));
            ex.name = raw.substr(colon + 1);
            if (!catalog.find(ex.name, *ex.component)) throw CatalogError("unknown material: " + raw);
        }
        rules.push_back(std::move(ex));
    }
    std::vector<MaterialSpec> kept;
    for (const auto& m : catalog.entries()) {
        bool drop = std::any_of(rules.begin(), rules.end(), [&](const Exclusion& ex) {
            return ex.name == m.name && (!ex.component || *ex.component == m.component);
        });
        if (!drop) kept.push_back(m);
    }
    return MaterialCatalog(std::move(kept));
}

double masonry_density(double rho_unit, double rho_mortar) {
    if (!(rho_unit > 0.0) || !(rho_mortar > 0.0))
        throw std::invalid_argument("masonry_density: densities must be positive");
    return 0.875 * rho_unit + 0.125 * rho_mortar;
}

double masonry_compressive_strength(double f_b, double f_m) {
    if (!(f_b > 0.0) || !(f_m > 0.0))
        throw std::invalid_argument("masonry_compressive_strength: strengths must be positive");
    return 0.75 * std::pow(f_b, 0.75) * std::pow(f_m, 0.31);
}

}  // namespace ecomason
