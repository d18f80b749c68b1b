#include <httplib.h>

#include "ecomason/canonical_json.hpp"
#include "ecomason/service.hpp"

namespace ecomason {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

void send(httplib::Response& res, int status, const std::string& body) {
    res.status = status;
    res.set_content(body, kJson);
}

void send_error(httplib::Response& res, const ServiceError& e) { send(res, e.status(), canonical_dump(e.to_json())); }

json body_of(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        throw ServiceError(400, "schema", std::string("request body is not valid JSON: ") + e.what());
    }
}

template <class Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (...) {
            send_error(res, classify_current_exception());
        }
    };
}

json job_to_json(const JobRecord& job) {
    json j{{"id", job.id},
           {"kind", to_string(job.kind)},
           {"status", to_string(job.status)},
           {"scenario_fingerprint", job.scenario_fingerprint},
           {"elapsed_s", job.elapsed_s}};
    if (job.status == JobStatus::Done) j["result"] = json::parse(job.result);
    if (job.error) j["error"] = job.error->to_json();
    return j;
}

void submit_route(httplib::Server& server, const char* path, RequestKind kind, Service& service) {
    server.Post(path, guarded([&service, kind](const httplib::Request& req, httplib::Response& res) {
                    const auto job = service.submit(kind, body_of(req));
                    send(res, job.status == JobStatus::Running ? 202 : 200, canonical_dump(job_to_json(job)));
                }));
}

}  // namespace

void install_routes(httplib::Server& server, Service& service) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });

    server.Get("/materials", guarded([&service](const httplib::Request&, httplib::Response& res) {
                   send(res, 200, service.materials());
               }));
    server.Post("/materials", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                    send(res, 200, service.materials(body_of(req)));
                }));
    server.Post("/scenario", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                    send(res, 200, service.scenario_summary(body_of(req)));
                }));
    server.Post("/solve", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                    const auto result = service.run(RequestKind::Solve, body_of(req));
                    const auto doc = json::parse(result);
                    if (doc.at("status") == "infeasible")
                        throw ServiceError(422, "infeasible", doc.at("diagnostic").get<std::string>(), doc);
                    send(res, 200, result);
                }));
    server.Post("/price-what-if", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                    send(res, 200, service.run(RequestKind::PriceWhatIf, body_of(req)));
                }));
    submit_route(server, "/pareto", RequestKind::Pareto, service);
    submit_route(server, "/area-sweep", RequestKind::AreaSweep, service);
    submit_route(server, "/min-bfo", RequestKind::MinBfo, service);
    server.Get(R"(/jobs/([^/]+))", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                   const auto job = service.job(req.matches[1]);
                   if (!job) throw ServiceError(404, "not_found", "unknown job: " + std::string(req.matches[1]));
                   send(res, 200, canonical_dump(job_to_json(*job)));
               }));
    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) return;
        send(res, res.status, canonical_dump(ServiceError(res.status, res.status == 404 ? "not_found" : "http",
                                                          "no route for " + req.method + " " + req.path)
                                                 .to_json()));
    });
}

}  // namespace ecomason
