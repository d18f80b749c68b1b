#pragma once

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ecomason/pareto.hpp"

namespace httplib {
class Server;
}

namespace ecomason {

// Carries the HTTP status and a machine-readable error object.
class ServiceError : public std::runtime_error {
public:
    ServiceError(int status, std::string code, const std::string& message, nlohmann::json detail = nullptr)
        : std::runtime_error(message), status_(status), code_(std::move(code)), detail_(std::move(detail)) {}

    int status() const { return status_; }
    const std::string& code() const { return code_; }
    nlohmann::json to_json() const;

private:
    int status_;
    std::string code_;
    nlohmann::json detail_;
};

// Maps the in-flight exception to a ServiceError (400 schema, 422 infeasible, 500 otherwise).
ServiceError classify_current_exception();

enum class RequestKind { Solve, Pareto, AreaSweep, MinBfo, PriceWhatIf };
const char* to_string(RequestKind kind);

enum class JobStatus { Running, Done, Failed };
const char* to_string(JobStatus status);

struct JobRecord {
    std::string id;  // equals the request fingerprint
    RequestKind kind = RequestKind::Solve;
    std::string scenario_fingerprint;
    JobStatus status = JobStatus::Running;
    std::string result;  // canonical JSON once done
    std::optional<ServiceError> error;
    double elapsed_s = 0.0;
};

struct ServiceOptions {
    std::filesystem::path results_dir = "results";
    // Relative catalog paths inside request scenarios resolve against this directory.
    std::filesystem::path base_dir = ".";
    int workers = default_worker_count();
};

// Request handling shared by the CLI and the HTTP routes. Results are canonical JSON strings,
// cached in memory and under results_dir/<request fingerprint>/.
class Service {
public:
    explicit Service(ServiceOptions options = {});
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    const ServiceOptions& options() const { return options_; }

    // Catalog rows of the request scenario; wall and foundation records with identical data share a row.
    std::string materials(const nlohmann::json& scenario = nlohmann::json::object()) const;
    // Validates and fingerprints a scenario document.
    std::string scenario_summary(const nlohmann::json& scenario) const;

    // Requests carry an optional "scenario" object and "seed"; see each kind for its fields.
    ScenarioConfig scenario_from_request(const nlohmann::json& request) const;
    // Fills defaults; throws ServiceError(400) on malformed fields.
    nlohmann::json normalize(RequestKind kind, const nlohmann::json& request) const;
    std::string request_fingerprint(RequestKind kind, const nlohmann::json& request) const;

    // Runs (or fetches from cache) a request synchronously.
    std::string run(RequestKind kind, const nlohmann::json& request);

    // Starts a job, or returns the existing one for an identical request unless it failed.
    JobRecord submit(RequestKind kind, const nlohmann::json& request);
    std::optional<JobRecord> job(const std::string& id) const;
    // Blocks until the job leaves Running.
    std::optional<JobRecord> wait(const std::string& id) const;

    // Number of engines built so far (cache hits do not count).
    int engines_built() const { return engines_built_.load(); }

private:
    struct Prepared {
        RequestKind kind;
        nlohmann::json normalized;
        std::optional<ScenarioConfig> scenario;  // absent for price what-if
        std::string key;
    };
    Prepared prepare(RequestKind kind, const nlohmann::json& request) const;
    std::string execute(const Prepared& p);
    std::shared_ptr<const MinlpEngine> engine(const ScenarioConfig& scenario);
    std::string compute(const Prepared& p, std::optional<ParetoFront>& front);
    std::optional<std::string> cached(const std::string& key, RequestKind kind) const;
    void store(const std::string& key, RequestKind kind, const std::string& result, const nlohmann::json& meta,
               const std::optional<ParetoFront>& front);

    ServiceOptions options_;
    mutable std::mutex mutex_;
    mutable std::condition_variable job_changed_;
    std::map<std::string, std::string> results_;
    std::map<std::string, std::shared_future<std::shared_ptr<const MinlpEngine>>> engines_;
    std::map<std::string, JobRecord> jobs_;
    std::vector<std::thread> threads_;
    std::atomic<int> engines_built_{0};
};

// Registers all endpoints on `server`.
void install_routes(httplib::Server& server, Service& service);

// Command-line entry point; writes results to `out` and error objects to `err`.
// Exit codes: 0 success, 1 usage or schema error, 2 infeasible, 3 internal error.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ecomason
