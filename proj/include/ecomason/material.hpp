#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ecomason {

enum class Grade { G1, G2, NotApplicable };

enum class ComponentClass { Wall, Foundation, Roof, RoofCover };

inline constexpr ComponentClass kAllClasses[] = {ComponentClass::Wall, ComponentClass::Foundation,
                                                 ComponentClass::Roof, ComponentClass::RoofCover};

std::string_view to_string(Grade g);
std::string_view to_string(ComponentClass c);
Grade parse_grade(std::string_view text);
ComponentClass parse_component_class(std::string_view text);

class CatalogError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A component class has no available material.
class EmptyClassError : public CatalogError {
public:
    using CatalogError::CatalogError;
};

// One catalog row for one component class. Strength is stored in Pa.
struct MaterialSpec {
    std::string name;
    Grade grade = Grade::NotApplicable;
    ComponentClass component = ComponentClass::Wall;
    double density = 0.0;          // kg/m^3
    double unit_cost = 0.0;        // USD/m^3
    double embodied_energy = 0.0;  // MJ/kg
    std::optional<double> allowable_compressive;  // Pa
    std::optional<double> min_thickness;          // m

    double energy_per_m3() const { return density * embodied_energy; }
    // Brick family etc: the name with trailing grade digits removed.
    std::string family() const;

    bool operator==(const MaterialSpec&) const = default;
};

class MaterialCatalog {
public:
    MaterialCatalog() = default;
    // Validates every entry and rejects empty class sets.
    explicit MaterialCatalog(std::vector<MaterialSpec> entries);

    const std::vector<MaterialSpec>& entries() const { return entries_; }
    std::vector<MaterialSpec> of_class(ComponentClass c) const;
    const MaterialSpec* find(std::string_view name, ComponentClass c) const;
    bool contains_name(std::string_view name) const;
    std::size_t count(ComponentClass c) const;

    bool operator==(const MaterialCatalog&) const = default;

private:
    std::vector<MaterialSpec> entries_;
};

// Throws CatalogError for rows that break the MaterialSpec invariants.
void validate_material(const MaterialSpec& m);

MaterialCatalog load_catalog(std::istream& in);
MaterialCatalog load_catalog_file(const std::string& path);
std::string serialize_catalog(const MaterialCatalog& catalog);

// Names may be qualified as "class:name" (e.g. "roof:Ba") to drop a single class entry.
MaterialCatalog filter_available(const MaterialCatalog& catalog, const std::set<std::string>& excluded);

double masonry_density(double rho_unit, double rho_mortar);
double masonry_compressive_strength(double f_b, double f_m);

}  // namespace ecomason
