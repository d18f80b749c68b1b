#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "ecomason/enumerator.hpp"

namespace fixtures {

using namespace ecomason;

inline const MaterialCatalog& case_catalog() {
    static const MaterialCatalog catalog = load_catalog_file(default_catalog_path());
    return catalog;
}

inline MaterialSpec material(const std::string& name, ComponentClass c) {
    const MaterialSpec* m = case_catalog().find(name, c);
    if (!m) throw std::runtime_error("fixture material missing: " + name);
    return *m;
}

inline DiscreteAssignment assignment(const std::string& wall, const std::string& foundation, const std::string& roof,
                                     const std::string& cover, int n_slc, bool x_e = false, bool x_wa = false) {
    return {material(wall, ComponentClass::Wall),
            material(foundation, ComponentClass::Foundation),
            material(roof, ComponentClass::Roof),
            material(cover, ComponentClass::RoofCover),
            n_slc,
            2,
            x_e,
            x_wa};
}

// Scenario with every class pinned, so only n_slc and the branch bits vary.
inline ScenarioConfig pinned_scenario(const std::string& wall = "So2", const std::string& foundation = "Br2",
                                      const std::string& roof = "Wo", const std::string& cover = "Pl",
                                      int starts = 8) {
    ScenarioConfig s;
    s.rules = {ScenarioRule::link_brick_grades(), ScenarioRule::fix_wall_material(wall),
               ScenarioRule::fix_material(ComponentClass::Foundation, foundation),
               ScenarioRule::fix_material(ComponentClass::Roof, roof),
               ScenarioRule::fix_material(ComponentClass::RoofCover, cover)};
    s.solver.starts = starts;
    s.finalize();
    return s;
}

inline std::string pinned_scenario_json(const std::string& wall = "So2", const std::string& foundation = "Br2",
                                        int starts = 8) {
    return R"({"rules": ["link_brick_grades", {"rule": "fix_wall_material", "material": ")" + wall +
           R"("}, {"rule": "fix_material", "class": "foundation", "material": ")" + foundation +
           R"("}, {"rule": "fix_material", "class": "roof", "material": "Wo"},)"
           R"( {"rule": "fix_material", "class": "roof_cover", "material": "Pl"}], "solver": {"starts": )" +
           std::to_string(starts) + "}}";
}

// Fresh directory under the system temp path, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("ecomason-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace fixtures
