#include "ecomason/service.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "ecomason/canonical_json.hpp"
#include "ecomason/front_io.hpp"

namespace ecomason {

using nlohmann::json;

json ServiceError::to_json() const {
    json j{{"error", code_}, {"message", what()}, {"status", status_}};
    if (!detail_.is_null()) j["detail"] = detail_;
    return j;
}

ServiceError classify_current_exception() {
    try {
        throw;
    } catch (const ServiceError& e) {
        return e;
    } catch (const EmptyClassError& e) {
        return {422, "infeasible", e.what()};
    } catch (const CatalogError& e) {
        return {400, "schema", e.what()};
    } catch (const ScenarioError& e) {
        return {400, "schema", e.what()};
    } catch (const ParamError& e) {
        return {400, "schema", e.what()};
    } catch (const json::exception& e) {
        return {400, "schema", e.what()};
    } catch (const std::invalid_argument& e) {
        return {400, "schema", e.what()};
    } catch (const std::exception& e) {
        return {500, "internal", e.what()};
    } catch (...) {
        return {500, "internal", "unknown error"};
    }
}

const char* to_string(RequestKind kind) {
    switch (kind) {
        case RequestKind::Solve: return "solve";
        case RequestKind::Pareto: return "pareto";
        case RequestKind::AreaSweep: return "area_sweep";
        case RequestKind::MinBfo: return "min_bfo";
        case RequestKind::PriceWhatIf: return "price_what_if";
    }
    return "?";
}

const char* to_string(JobStatus status) {
    switch (status) {
        case JobStatus::Running: return "running";
        case JobStatus::Done: return "done";
        case JobStatus::Failed: return "failed";
    }
    return "?";
}

namespace {

ServiceError schema_error(const std::string& message) { return {400, "schema", message}; }

void require_object(const json& j, const char* what) {
    if (!j.is_object()) throw schema_error(std::string(what) + " must be a JSON object");
}

void check_keys(const json& request, std::initializer_list<const char*> allowed) {
    for (auto it = request.begin(); it != request.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || it.key() == k;
        if (!ok) throw schema_error("unknown request field: " + it.key());
    }
}

double number(const json& request, const char* key, std::optional<double> fallback) {
    if (!request.contains(key) || request[key].is_null()) {
        if (fallback) return *fallback;
        throw schema_error(std::string("missing field: ") + key);
    }
    if (!request[key].is_number()) throw schema_error(std::string("field must be a number: ") + key);
    const double v = request[key].get<double>();
    if (!std::isfinite(v)) throw schema_error(std::string("field must be finite: ") + key);
    return v;
}

int integer(const json& request, const char* key, int fallback) {
    if (!request.contains(key)) return fallback;
    if (!request[key].is_number_integer()) throw schema_error(std::string("field must be an integer: ") + key);
    return request[key].get<int>();
}

std::string text(const json& request, const char* key) {
    if (!request.contains(key) || !request[key].is_string())
        throw schema_error(std::string("field must be a string: ") + key);
    return request[key].get<std::string>();
}

json sweep_fields(const json& request) {
    json out;
    out["refine_depth"] = integer(request, "refine_depth", SweepOptions{}.refine_depth);
    out["min_gap"] = number(request, "min_gap", SweepOptions{}.min_gap);
    if (out["refine_depth"].get<int>() < 0) throw schema_error("refine_depth must be nonnegative");
    return out;
}

SweepOptions sweep_options(const json& n) {
    SweepOptions o;
    o.refine_depth = n.at("refine_depth").get<int>();
    o.min_gap = n.at("min_gap").get<double>();
    return o;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

std::optional<std::string> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool is_front(RequestKind kind) { return kind == RequestKind::Pareto || kind == RequestKind::AreaSweep; }

const char* result_file(RequestKind kind) { return is_front(kind) ? "front.json" : "result.json"; }

}  // namespace

Service::Service(ServiceOptions options) : options_(std::move(options)) {
    if (options_.workers < 1) options_.workers = 1;
}

Service::~Service() {
    for (auto& t : threads_)
        if (t.joinable()) t.join();
}

ScenarioConfig Service::scenario_from_request(const json& request) const {
    require_object(request, "request");
    json doc = request.contains("scenario") ? request["scenario"] : json::object();
    require_object(doc, "scenario");
    ScenarioConfig s = parse_scenario(doc.dump(), options_.base_dir.string());
    if (request.contains("seed")) {
        const auto& seed = request["seed"];
        if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
            throw schema_error("seed must be a nonnegative integer");
        s.solver.seed = request["seed"].get<std::uint64_t>();
    }
    return s;
}

std::string Service::materials(const json& scenario) const {
    json req{{"scenario", scenario}};
    const ScenarioConfig s = scenario_from_request(req);
    json rows = json::array();
    std::vector<MaterialSpec> seen;
    for (const auto& m : s.catalog.entries()) {
        bool merged = false;
        for (std::size_t i = 0; i < seen.size(); ++i) {
            MaterialSpec probe = m;
            probe.component = seen[i].component;
            if (probe == seen[i]) {
                rows[i]["classes"].push_back(std::string(to_string(m.component)));
                merged = true;
                break;
            }
        }
        if (merged) continue;
        seen.push_back(m);
        json row = material_to_json(m);
        row.erase("class");
        row["classes"] = json::array({std::string(to_string(m.component))});
        rows.push_back(row);
    }
    return canonical_dump(json{{"materials", rows}, {"count", rows.size()}});
}

std::string Service::scenario_summary(const json& scenario) const {
    const ScenarioConfig s = scenario_from_request(json{{"scenario", scenario}});
    json counts = json::object();
    for (auto c : kAllClasses) counts[std::string(to_string(c))] = s.catalog.count(c);
    return canonical_dump(json{{"fingerprint", s.fingerprint()},
                               {"scenario", json::parse(scenario_to_json(s))},
                               {"class_counts", counts},
                               {"assignments", enumerate_discrete(s).size()}});
}

json Service::normalize(RequestKind kind, const json& request) const {
    require_object(request, "request");
    json n = json::object();
    switch (kind) {
        case RequestKind::Solve:
            check_keys(request, {"scenario", "seed", "budget"});
            if (request.contains("budget") && !request["budget"].is_null()) n["budget"] = number(request, "budget", {});
            else n["budget"] = nullptr;
            break;
        case RequestKind::Pareto: {
            check_keys(request, {"scenario", "seed", "budget_min", "budget_max", "steps", "refine_depth", "min_gap"});
            n = sweep_fields(request);
            n["budget_min"] = number(request, "budget_min", 4500.0);
            n["budget_max"] = number(request, "budget_max", 9000.0);
            n["steps"] = integer(request, "steps", 150);
            if (n["steps"].get<int>() < 2) throw schema_error("steps must be at least 2");
            if (n["budget_min"].get<double>() > n["budget_max"].get<double>())
                throw schema_error("budget_min exceeds budget_max");
            break;
        }
        case RequestKind::AreaSweep: {
            check_keys(request,
                       {"scenario", "seed", "budget", "area_min", "area_max", "steps", "refine_depth", "min_gap"});
            n = sweep_fields(request);
            n["budget"] = number(request, "budget", 7000.0);
            n["area_min"] = number(request, "area_min", 10.0);
            n["area_max"] = number(request, "area_max", 14.0);
            n["steps"] = integer(request, "steps", 41);
            if (n["steps"].get<int>() < 2) throw schema_error("steps must be at least 2");
            if (n["area_min"].get<double>() > n["area_max"].get<double>())
                throw schema_error("area_min exceeds area_max");
            break;
        }
        case RequestKind::MinBfo:
            check_keys(request, {"scenario", "seed", "wall"});
            n["wall"] = text(request, "wall");
            break;
        case RequestKind::PriceWhatIf:
            check_keys(request, {"front", "material", "price", "class", "budget"});
            if (!request.contains("front")) throw schema_error("missing field: front");
            require_object(request["front"], "front");
            n["front"] = canonicalize(request["front"]);
            n["material"] = text(request, "material");
            n["price"] = number(request, "price", {});
            if (n["price"].get<double>() < 0.0) throw schema_error("price must be nonnegative");
            n["class"] = nullptr;
            if (request.contains("class") && !request["class"].is_null())
                n["class"] = std::string(to_string(parse_component_class(text(request, "class"))));
            n["budget"] = nullptr;
            if (request.contains("budget") && !request["budget"].is_null()) n["budget"] = number(request, "budget", {});
            break;
    }
    return n;
}

Service::Prepared Service::prepare(RequestKind kind, const json& request) const {
    Prepared p{kind, normalize(kind, request), std::nullopt, {}};
    if (kind != RequestKind::PriceWhatIf) p.scenario = scenario_from_request(request);
    json key_doc{{"kind", to_string(kind)},
                 {"scenario", p.scenario ? json(p.scenario->fingerprint()) : json(nullptr)},
                 {"request", p.normalized}};
    p.key = hex_digest(canonical_dump(key_doc));
    return p;
}

std::string Service::request_fingerprint(RequestKind kind, const json& request) const {
    return prepare(kind, request).key;
}

std::shared_ptr<const MinlpEngine> Service::engine(const ScenarioConfig& scenario) {
    const auto fp = scenario.fingerprint();
    std::promise<std::shared_ptr<const MinlpEngine>> promise;
    std::shared_future<std::shared_ptr<const MinlpEngine>> future;
    bool build = false;
    {
        std::lock_guard lock(mutex_);
        auto it = engines_.find(fp);
        if (it == engines_.end()) {
            future = promise.get_future().share();
            engines_.emplace(fp, future);
            build = true;
        } else {
            future = it->second;
        }
    }
    if (build) {
        try {
            auto built = std::make_shared<const MinlpEngine>(scenario, options_.workers);
            ++engines_built_;
            promise.set_value(std::move(built));
        } catch (...) {
            {
                std::lock_guard lock(mutex_);
                engines_.erase(fp);
            }
            promise.set_exception(std::current_exception());
        }
    }
    return future.get();
}

std::string Service::compute(const Prepared& p, std::optional<ParetoFront>& front) {
    const json& n = p.normalized;
    switch (p.kind) {
        case RequestKind::Solve: {
            const ScenarioConfig& s = *p.scenario;
            json out{{"scenario_fingerprint", s.fingerprint()}, {"budget", n["budget"]}};
            std::optional<double> budget;
            if (!n["budget"].is_null()) budget = n["budget"].get<double>();
            if (budget && !(*budget > 0.0)) {
                out["status"] = "infeasible";
                out["design"] = nullptr;
                out["diagnostic"] = "budget must be positive";
                return canonical_dump(out);
            }
            MinlpQuery query;
            query.budget = budget;
            const auto result = engine(s)->solve(query);
            out["status"] = result.design ? "solved" : "infeasible";
            out["design"] = result.design ? design_to_json(*result.design) : json(nullptr);
            out["diagnostic"] = result.design ? json(nullptr) : json(result.diagnostic);
            return canonical_dump(out);
        }
        case RequestKind::Pareto: {
            const auto eng = engine(*p.scenario);
            front = epsilon_constraint_front(*eng, n["budget_min"].get<double>(), n["budget_max"].get<double>(),
                                             n["steps"].get<int>(), sweep_options(n));
            return canonical_dump(front_to_json(*front));
        }
        case RequestKind::AreaSweep: {
            const auto eng = engine(*p.scenario);
            front = floor_area_front(*eng, n["budget"].get<double>(), n["area_min"].get<double>(),
                                     n["area_max"].get<double>(), n["steps"].get<int>(), sweep_options(n));
            return canonical_dump(front_to_json(*front));
        }
        case RequestKind::MinBfo: {
            const auto wall = n["wall"].get<std::string>();
            const auto width = min_feasible_foundation_width(*p.scenario, wall, options_.workers);
            return canonical_dump(json{{"scenario_fingerprint", p.scenario->fingerprint()},
                                       {"wall", wall},
                                       {"min_B_fo_m", width ? json(*width) : json(nullptr)},
                                       {"resolution_m", 0.005}});
        }
        case RequestKind::PriceWhatIf: {
            const ParetoFront base = front_from_json(n["front"]);
            const auto material = n["material"].get<std::string>();
            const double price = n["price"].get<double>();
            std::optional<ComponentClass> component;
            if (!n["class"].is_null()) component = parse_component_class(n["class"].get<std::string>());
            const ParetoFront shifted = price_shift(base, material, price, component);
            json thresholds = json::array();
            if (!n["budget"].is_null()) {
                const double budget = n["budget"].get<double>();
                for (const auto& pt : base.points) {
                    bool uses = false;
                    for (const auto* m : {&pt.design.assign.wall, &pt.design.assign.foundation,
                                          &pt.design.assign.roof, &pt.design.assign.cover})
                        uses = uses || m->name == material;
                    if (!uses) continue;
                    thresholds.push_back(json{{"cost_usd", pt.design.cost},
                                              {"ee_GJ", pt.design.ee},
                                              {"materials", pt.design.assign.material_tuple()},
                                              {"n_slc", pt.design.assign.n_slc},
                                              {"threshold_usd_m3", price_threshold(pt.design, budget, material)}});
                }
            }
            return canonical_dump(json{{"material", material},
                                       {"price", price},
                                       {"class", n["class"]},
                                       {"budget", n["budget"]},
                                       {"front", front_to_json(shifted)},
                                       {"thresholds", thresholds}});
        }
    }
    throw std::logic_error("unhandled request kind");
}

std::optional<std::string> Service::cached(const std::string& key, RequestKind kind) const {
    {
        std::lock_guard lock(mutex_);
        if (auto it = results_.find(key); it != results_.end()) return it->second;
    }
    if (options_.results_dir.empty()) return std::nullopt;
    return read_file(options_.results_dir / key / result_file(kind));
}

void Service::store(const std::string& key, RequestKind kind, const std::string& result, const json& meta,
                    const std::optional<ParetoFront>& front) {
    {
        std::lock_guard lock(mutex_);
        results_.emplace(key, result);
    }
    if (options_.results_dir.empty()) return;
    const auto dir = options_.results_dir / key;
    std::filesystem::create_directories(dir);
    if (front) write_file(dir / "front.csv", front_json_to_csv(json::parse(result)));
    write_file(dir / "meta.json", meta.dump(2) + "\n");
    write_file(dir / result_file(kind), result);
}

std::string Service::execute(const Prepared& p) {
    if (auto hit = cached(p.key, p.kind)) return *hit;
    const auto start = std::chrono::steady_clock::now();
    std::optional<ParetoFront> front;
    std::string result = compute(p, front);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json meta{{"kind", to_string(p.kind)},
              {"request_fingerprint", p.key},
              {"request", p.kind == RequestKind::PriceWhatIf ? json(nullptr) : p.normalized},
              {"solver_version", kSolverVersion},
              {"workers", options_.workers},
              {"elapsed_s", elapsed}};
    if (p.scenario) {
        meta["scenario_fingerprint"] = p.scenario->fingerprint();
        meta["scenario"] = json::parse(scenario_to_json(*p.scenario));
        meta["seed"] = p.scenario->solver.seed;
    }
    if (front) meta["instances_solved"] = front->instances_solved;
    store(p.key, p.kind, result, meta, front);
    return result;
}

std::string Service::run(RequestKind kind, const json& request) { return execute(prepare(kind, request)); }

JobRecord Service::submit(RequestKind kind, const json& request) {
    Prepared p = prepare(kind, request);
    auto hit = cached(p.key, kind);
    std::lock_guard lock(mutex_);
    if (auto it = jobs_.find(p.key); it != jobs_.end() && it->second.status != JobStatus::Failed) return it->second;
    JobRecord rec;
    rec.id = p.key;
    rec.kind = kind;
    if (p.scenario) rec.scenario_fingerprint = p.scenario->fingerprint();
    if (hit) {
        rec.status = JobStatus::Done;
        rec.result = *hit;
        jobs_[p.key] = rec;
        return rec;
    }
    jobs_[p.key] = rec;
    threads_.emplace_back([this, p = std::move(p)] {
        const auto start = std::chrono::steady_clock::now();
        std::string result;
        std::optional<ServiceError> error;
        try {
            result = execute(p);
        } catch (...) {
            error = classify_current_exception();
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::lock_guard lock(mutex_);
        auto& job = jobs_[p.key];
        job.elapsed_s = elapsed;
        if (error) {
            job.status = JobStatus::Failed;
            job.error = std::move(error);
        } else {
            job.status = JobStatus::Done;
            job.result = std::move(result);
        }
        job_changed_.notify_all();
    });
    return rec;
}

std::optional<JobRecord> Service::job(const std::string& id) const {
    std::lock_guard lock(mutex_);
    if (auto it = jobs_.find(id); it != jobs_.end()) return it->second;
    return std::nullopt;
}

std::optional<JobRecord> Service::wait(const std::string& id) const {
    std::unique_lock lock(mutex_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) return std::nullopt;
    job_changed_.wait(lock, [&] { return jobs_.at(id).status != JobStatus::Running; });
    return jobs_.at(id);
}

}  // namespace ecomason
