#include <CLI11.hpp>
#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ecomason/canonical_json.hpp"
#include "ecomason/front_io.hpp"
#include "ecomason/service.hpp"

namespace ecomason {

using nlohmann::json;

namespace {

int exit_code(const ServiceError& e) {
    if (e.status() == 422) return 2;
    if (e.status() >= 500) return 3;
    return 1;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ServiceError(400, "schema", "cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ServiceError(400, "schema", path + " is not valid JSON: " + e.what());
    }
}

// Loads a scenario file and pins a relative catalog path to the file's directory.
json read_scenario(const std::string& path) {
    json doc = read_json_file(path);
    if (doc.is_object() && doc.contains("catalog_path") && doc["catalog_path"].is_string()) {
        std::filesystem::path p = doc["catalog_path"].get<std::string>();
        if (p.is_relative()) doc["catalog_path"] = (std::filesystem::path(path).parent_path() / p).string();
    }
    return doc;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Embodied-energy and cost trade-offs for single-storey masonry buildings", "ecomason"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::optional<std::uint64_t> seed;
    std::string results_dir = "results";
    std::string format = "json";
    app.add_option("--scenario", scenario_path, "Scenario JSON file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Multistart seed (overrides the scenario)");
    app.add_option("--results-dir", results_dir, "Result cache directory (empty disables it)");

    std::optional<double> budget;
    double budget_min = 4500.0, budget_max = 9000.0, area_min = 10.0, area_max = 14.0;
    int steps = 150, area_steps = 41, refine_depth = SweepOptions{}.refine_depth;
    std::string wall, front_path, material, component;
    double price = 0.0;
    int port = 8080;
    std::string host = "127.0.0.1";

    auto* solve = app.add_subcommand("solve", "Minimum-EE design within a budget");
    solve->add_option("--budget", budget, "USD; omit for no budget");

    auto* pareto = app.add_subcommand("pareto", "Cost vs EE front over a budget range");
    pareto->add_option("--budget-min", budget_min)->capture_default_str();
    pareto->add_option("--budget-max", budget_max)->capture_default_str();
    pareto->add_option("--steps", steps)->capture_default_str();
    pareto->add_option("--refine-depth", refine_depth)->capture_default_str();
    pareto->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    auto* area = app.add_subcommand("area-sweep", "Floor area vs EE front at a fixed budget");
    area->add_option("--budget", budget, "USD")->required();
    area->add_option("--area-min", area_min)->capture_default_str();
    area->add_option("--area-max", area_max)->capture_default_str();
    area->add_option("--steps", area_steps)->capture_default_str();
    area->add_option("--refine-depth", refine_depth)->capture_default_str();
    area->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    auto* bfo = app.add_subcommand("min-bfo", "Smallest feasible foundation width for a wall material");
    bfo->add_option("--wall", wall)->required();

    auto* what_if = app.add_subcommand("price-what-if", "Re-price a material on a saved front");
    what_if->add_option("--front", front_path, "front.json from pareto or area-sweep")->required();
    what_if->add_option("--material", material)->required();
    what_if->add_option("--price", price, "USD/m^3")->required();
    what_if->add_option("--class", component, "Restrict to one component class");
    what_if->add_option("--budget", budget, "Report price thresholds against this budget");

    auto* materials = app.add_subcommand("materials", "List the scenario catalog");

    auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON service");
    serve->add_option("--port", port)->capture_default_str();
    serve->add_option("--host", host)->capture_default_str();

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << canonical_dump(json{{"error", "usage"}, {"message", e.what()}, {"status", 400}}) << '\n';
        return 1;
    }

    try {
        ServiceOptions options;
        options.results_dir = results_dir;
        Service service(options);

        json request = json::object();
        if (!scenario_path.empty()) request["scenario"] = read_scenario(scenario_path);
        if (seed) request["seed"] = *seed;

        auto emit_front = [&](const std::string& result) {
            if (format == "csv") out << front_json_to_csv(json::parse(result));
            else out << result << '\n';
        };

        if (solve->parsed()) {
            if (budget) request["budget"] = *budget;
            const auto result = service.run(RequestKind::Solve, request);
            const auto doc = json::parse(result);
            if (doc.at("status") == "infeasible")
                throw ServiceError(422, "infeasible", doc.at("diagnostic").get<std::string>(), doc);
            out << result << '\n';
        } else if (pareto->parsed()) {
            request["budget_min"] = budget_min;
            request["budget_max"] = budget_max;
            request["steps"] = steps;
            request["refine_depth"] = refine_depth;
            emit_front(service.run(RequestKind::Pareto, request));
        } else if (area->parsed()) {
            request["budget"] = *budget;
            request["area_min"] = area_min;
            request["area_max"] = area_max;
            request["steps"] = area_steps;
            request["refine_depth"] = refine_depth;
            emit_front(service.run(RequestKind::AreaSweep, request));
        } else if (bfo->parsed()) {
            request["wall"] = wall;
            out << service.run(RequestKind::MinBfo, request) << '\n';
        } else if (what_if->parsed()) {
            json req{{"front", read_json_file(front_path)}, {"material", material}, {"price", price}};
            if (!component.empty()) req["class"] = component;
            if (budget) req["budget"] = *budget;
            out << service.run(RequestKind::PriceWhatIf, req) << '\n';
        } else if (materials->parsed()) {
            out << service.materials(request.value("scenario", json::object())) << '\n';
        } else if (serve->parsed()) {
            httplib::Server server;
            install_routes(server, service);
            if (!server.bind_to_port(host, port))
                throw ServiceError(500, "internal", "cannot bind " + host + ":" + std::to_string(port));
            out << canonical_dump(json{{"listening", host + ":" + std::to_string(port)}}) << std::endl;
            server.listen_after_bind();
        }
        return 0;
    } catch (...) {
        const auto e = classify_current_exception();
        err << canonical_dump(e.to_json()) << '\n';
        return exit_code(e);
    }
}

}  // namespace ecomason
